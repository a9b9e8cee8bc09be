#pragma once

#include "lowband/oracle.hpp"

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lowband {

int dir_stage_budget(int d);  // queries per recursion stage

/// Snapshot of one stage: committed orthonormal normals and the recursion
/// cube they induce.
struct DirStageSnapshot {
  int index = 0;
  Vec anchor;
  double radius = 0.0;
  std::vector<Vec> committed;
  Vec cube_center;
  double cube_radius = 0.0;
  int queries = 0;
};

/// Unit vector orthogonal (within tol) to every constraint: orthonormalize
/// the constraints, then take the first canonical basis vector whose
/// projection onto the complement has norm above 1e-8. Deterministic given
/// input order. Throws "capacity accounting bug" when the nullspace is
/// numerically empty.
Vec nullspace_unit(const std::vector<Vec>& constraints, int dim);

/// The stage-state machine behind the inner-product resisting oracle:
/// batched zero answers, orthonormal commitments, split-set membership
/// answers, recursion into the cube u + [-R/3d, R/3d]^d.
class DirAdversaryCore {
 public:
  struct Outcome {
    bool realized = false;
    Vec normal;
    std::uint64_t ticket = 0;
    int stage = 0;
    std::string tag;
  };

  DirAdversaryCore(int d, double R, double rho, double tol = kDefaultTol);

  /// One query at `point` along `direction` (a zero direction contributes no
  /// orthogonality constraint but still consumes batch capacity).
  Outcome respond(const Vec& point, const Vec& direction);

  std::vector<std::pair<std::uint64_t, Vec>> drain_resolutions();

  /// Commit any partial batch so every answer has a realized normal.
  void finalize();

  /// Two disjoint rho-balls inside the current stage cube (or the fresh
  /// stage box when rho only fits there). Throws "fatness too large for
  /// current level" otherwise.
  std::pair<InfBall, InfBall> witness_balls(double rho);

  /// Cube construction u, Q from the currently committed normals. Asserts
  /// every cube corner sits strictly inside each split set and the stage box
  /// (corner check for d <= 12, norm bound beyond).
  std::pair<Vec, BoxRegion> stage_cube() const;

  void descend();  // public for tests; normally automatic

  const std::vector<Vec>& committed() const { return committed_; }
  int batch_capacity() const;
  int batch_size() const { return static_cast<int>(batch_points_.size()); }
  int stage_index() const { return stage_index_; }
  long total_queries() const { return total_queries_; }
  int stage_queries() const { return stage_queries_; }
  BoxRegion universe() const { return BoxRegion{anchor_, radius_}; }
  double split_width() const;
  int dim() const { return d_; }
  DirStageSnapshot stage_snapshot() const;
  const std::vector<DirStageSnapshot>& history() const { return history_; }

 private:
  void commit_batch();
  bool can_descend() const { return 2.0 * rho_ * 3.0 * d_ < radius_; }
  void maybe_transition();

  int d_;
  double R_;
  double rho_;
  double tol_;
  Vec anchor_;
  double radius_;
  int stage_index_ = 0;
  long total_queries_ = 0;
  int stage_queries_ = 0;
  std::vector<Vec> committed_;
  std::vector<Vec> batch_points_;
  std::vector<Vec> batch_dirs_;  // nonzero queried directions
  std::vector<std::uint64_t> batch_tickets_;
  std::vector<DirStageSnapshot> history_;
  std::vector<std::pair<std::uint64_t, Vec>> resolution_queue_;
  std::uint64_t next_ticket_ = 1;
};

/// Oracle facade for Inner/SignInner queries.
class DirAdversary final : public SeparationOracle {
 public:
  DirAdversary(int d, double R, double rho, std::uint64_t seed = 0,
               double tol = kDefaultTol);

  OracleAnswer ask(const Vec& point, const Query& q) override;
  const Transcript& transcript() const override { return transcript_; }

  std::pair<WitnessSet, WitnessSet> witnesses(double rho);
  void finalize();

  DirAdversaryCore& core() { return core_; }
  const DirAdversaryCore& core() const { return core_; }

 private:
  void drain();

  DirAdversaryCore core_;
  Transcript transcript_;
  std::unordered_map<std::uint64_t, std::size_t> pending_;
};

}  // namespace lowband
