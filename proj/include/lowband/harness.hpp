#pragma once

#include "lowband/bit_adversary.hpp"
#include "lowband/dir_adversary.hpp"
#include "lowband/floors.hpp"
#include "lowband/oracle.hpp"
#include "lowband/solvers.hpp"
#include "lowband/verifier.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lowband {

struct DuelConfig {
  int n = 0;
  int d = 8;
  double R = 1.0;
  double rho = 1e-4;
  AdversaryKind adversary = AdversaryKind::kBit;
  QueryMode mode = QueryMode::kCoord;
  int bits = 0;
  std::uint64_t seed = 0;
  long max_queries = -1;  // < 0: stop at floor - 1
  std::string out;        // base path for transcript / snapshot emission
  double tol = kDefaultTol;

  void validate() const;  // throws std::invalid_argument (CLI exit 3)
};

/// Everything `verify` needs next to a transcript: the exhibited witnesses
/// and the per-level adversary state.
struct RunSnapshot {
  int n = 0;
  int d = 0;
  double R = 1.0;
  double rho = 0.0;
  std::string adversary;
  WitnessSet w1, w2;
  std::vector<BitLevelSnapshot> bit_levels;
  std::vector<DirStageSnapshot> dir_stages;

  void write_json(std::ostream& os) const;
  static RunSnapshot read_json(std::istream& is);
};

struct DuelReport {
  long certified_floor = 0;
  std::optional<long> resolved_at;  // solver halt, if before the floor
  bool solver_claim_feasible = false;
  bool claim_verified = false;  // a halt whose answer survives both witnesses
  bool witnesses_verified = false;
  long survivors = -1;  // brute-force count, bit adversary with d <= 12
  std::vector<ViolationReport> violations;
};

DuelReport run_duel(const DuelConfig& cfg, Transcript* transcript_out = nullptr,
                    RunSnapshot* snapshot_out = nullptr);

struct ScalingRow {
  int d = 0;
  long floor = 0;
  long queries = 0;
  long cuts = 0;
  bool sound = false;
  double wallclock_ms = 0.0;
};

struct ScalingResult {
  std::vector<ScalingRow> rows;
  double floor_slope = 0.0;
  double cut_slope = 0.0;
  double query_slope = 0.0;
};

/// Honest planted runs plus formula floors across a d-sweep; log-log slopes
/// by least squares.
ScalingResult run_scaling(const std::vector<int>& d_list, const DuelConfig& base);

void write_scaling_csv(std::ostream& os, const ScalingResult& result,
                       const DuelConfig& base);

struct ReplayResult {
  bool ok = false;
  std::vector<ViolationReport> violations;
  bool disjoint = false;
  std::vector<SurvivalReport> survival;  // per bit level, d <= 12 only
};

ReplayResult replay(const Transcript& t, const RunSnapshot& snap, double tol);
ReplayResult replay_files(const std::string& transcript_path,
                          const std::string& snapshot_path, double tol);

/// Least-squares slope of ln(y) against ln(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace lowband
