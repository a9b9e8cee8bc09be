#pragma once

#include "lowband/oracle.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lowband {

/// Per-level thresholds. The construction assumes d divisible by 4; ceilings
/// keep the guarantees for small d.
int bit_commit_threshold(int d);  // commit fires on this query within an orthant
int bit_level_budget(int d);      // queries per recursion level

struct BitCommitRecord {
  std::vector<int> orthant;
  int coord = -1;
  int sign = 0;
  int level = 0;
};

/// Self-contained picture of one recursion level, sufficient to re-run the
/// orthant elimination count without the adversary object.
struct BitLevelSnapshot {
  struct Rec {
    Vec point;
    std::optional<int> coord;        // queried coordinate, if any
    std::optional<Vec> normal;       // realized normal, if resolved
    std::vector<int> orthant;        // empty for outside-the-box queries
    std::size_t transcript_index = 0;
  };
  struct Orthant {
    std::vector<int> label;
    std::set<int> queried_coords;
    std::optional<std::pair<int, int>> commit;  // (coordinate, sign)
    int count = 0;
  };

  int index = 0;
  Vec anchor;
  double radius = 0.0;
  std::vector<Orthant> orthants;  // touched orthants only
  std::set<int> used_coords;      // coordinates consumed by commits
  int queries = 0;
  std::vector<Rec> records;
};

/// True iff every record of the level is explainable by a first-order map
/// whose instances live in the candidate orthant's recursion sub-box.
bool orthant_survives(const std::vector<int>& candidate,
                      const BitLevelSnapshot& level, double tol = kDefaultTol);

/// Brute-force count over all 2^d orthants (capped at d <= 12).
long count_surviving_orthants(const BitLevelSnapshot& level,
                              double tol = kDefaultTol);

/// The level-state machine behind the coordinate/bit resisting oracle:
/// per-orthant zero answers, commitment to sign*e_i on the threshold query,
/// recursion into a surviving orthant at radius/3. Produces normals and
/// resolution events; answer formatting and transcript writing live in the
/// wrapping oracle.
class BitAdversaryCore {
 public:
  struct Outcome {
    bool realized = false;
    Vec normal;             // valid when realized
    std::uint64_t ticket = 0;
    int level = 0;
    std::string tag;
  };

  BitAdversaryCore(int d, double R, double rho, double tol = kDefaultTol);

  /// One query at `point`, addressing `coord` (nullopt when the query does
  /// not name a coordinate of the normal). `transcript_index` is the slot
  /// the caller will log this query under. Auto-descends when the level
  /// budget is met and the fatness still allows a deeper level.
  Outcome respond(const Vec& point, std::optional<int> coord,
                  std::size_t transcript_index = 0);

  /// Resolution events (ticket -> normal) accumulated since the last drain.
  std::vector<std::pair<std::uint64_t, Vec>> drain_resolutions();

  /// Resolve every pending answer at the current level against the
  /// lexicographically-first surviving orthant, without descending.
  void finalize();

  /// Two disjoint rho-balls consistent with the whole history. Placed in the
  /// surviving orthant's sub-box, or centrally when the level is fresh and
  /// rho only fits the full box. Throws "fatness too large for current
  /// level" when neither placement fits.
  std::pair<InfBall, InfBall> witness_balls(double rho);

  void descend();  // public for tests; normally automatic

  BitLevelSnapshot level_snapshot() const;
  const std::vector<BitLevelSnapshot>& history() const { return history_; }
  const std::vector<BitCommitRecord>& commits() const { return commits_; }
  int level_index() const { return level_index_; }
  long total_queries() const { return total_queries_; }
  BoxRegion universe() const { return BoxRegion{anchor_, radius_}; }
  int dim() const { return d_; }

  /// Deterministic surviving orthant: exact lex-first for d <= 12,
  /// constructive beyond the brute-force cap.
  std::vector<int> surviving_orthant() const;

 private:
  struct LevelRec {
    Vec point;
    std::optional<int> coord;
    std::optional<Vec> normal;
    std::vector<int> orthant;
    std::uint64_t ticket = 0;
    std::size_t transcript_index = 0;
  };
  struct OrthantData {
    std::set<int> queried_coords;
    std::optional<std::pair<int, int>> commit;
    int count = 0;
    std::vector<std::size_t> rec_ids;
  };

  Vec unit(int i, int sign) const;
  void resolve_rec(std::size_t rec_id, const Vec& normal);
  void resolve_pendings_toward(const std::vector<int>& survivor);
  bool can_descend() const { return 6.0 * rho_ < radius_; }

  int d_;
  double R_;
  double rho_;
  double tol_;
  Vec anchor_;
  double radius_;
  int level_index_ = 0;
  long total_queries_ = 0;
  int level_queries_ = 0;
  std::map<std::vector<int>, OrthantData> orthants_;
  std::set<int> used_coords_;
  std::vector<LevelRec> recs_;
  std::vector<BitLevelSnapshot> history_;
  std::vector<BitCommitRecord> commits_;
  std::vector<std::pair<std::uint64_t, Vec>> resolution_queue_;
  std::uint64_t next_ticket_ = 1;
};

/// Oracle facade: answers Coord/Bit queries, owns the transcript, resolves
/// realized normals as the core commits.
class BitAdversary final : public SeparationOracle {
 public:
  BitAdversary(int d, double R, double rho, std::uint64_t seed = 0,
               double tol = kDefaultTol);

  OracleAnswer ask(const Vec& point, const Query& q) override;
  const Transcript& transcript() const override { return transcript_; }

  std::pair<WitnessSet, WitnessSet> witnesses(double rho);
  void finalize();

  BitAdversaryCore& core() { return core_; }
  const BitAdversaryCore& core() const { return core_; }

 private:
  void drain();

  BitAdversaryCore core_;
  Transcript transcript_;
  std::unordered_map<std::uint64_t, std::size_t> pending_;
};

}  // namespace lowband
