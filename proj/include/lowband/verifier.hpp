#pragma once

#include "lowband/bit_adversary.hpp"
#include "lowband/oracle.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lowband {

struct ViolationReport {
  enum class Kind {
    kAnswerMismatch,
    kNonSeparating,
    kFeasibleOutside,
    kPendingUnresolved,
  };
  std::size_t record_index = 0;
  Kind kind = Kind::kAnswerMismatch;
  std::string detail;
};

std::string to_string(ViolationReport::Kind kind);

/// Audit one record against a candidate instance: a Feasible answer requires
/// membership; any other answer requires the realized normal to reproduce
/// the answer (values compared within tol, bits exactly) and to strictly
/// separate the query point from the instance.
std::optional<ViolationReport> check_record(const TranscriptRecord& rec,
                                            std::size_t index,
                                            const WitnessSet& w, double tol);

/// All-records audit; empty result means the instance is consistent with the
/// transcript under the realized first-order map.
std::vector<ViolationReport> check_transcript(const Transcript& t,
                                              const WitnessSet& w, double tol);

/// True iff the two instances share no mixed-integer point: balls disjoint
/// on the same fiber or on different fibers, and every shared generator has
/// a fractional integer part.
bool certify_disjoint(const WitnessSet& w1, const WitnessSet& w2);

struct SurvivalReport {
  long survivors = 0;
  long eliminated_by_commit = 0;
  long eliminated_by_zeros = 0;
};

/// Brute-force orthant classification for one bit-adversary level (d <= 12).
SurvivalReport survival_report(const BitLevelSnapshot& level,
                               double tol = kDefaultTol);

}  // namespace lowband
