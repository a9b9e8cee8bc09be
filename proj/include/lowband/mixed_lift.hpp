#pragma once

#include "lowband/floors.hpp"
#include "lowband/oracle.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lowband {

enum class FiberClass { kOutsideUnitBox, kFractional, kIntegral };

/// Classify the integer block of a query point against [0,1]^n.
FiberClass classify_fiber(const Vec& x);

/// Feasible-reported points (all with fractional integer parts) plus the
/// instance parameters: everything a lift needs to stay consistent.
struct LiftContext {
  int n = 0;
  int d = 0;
  double R = 1.0;
  std::vector<Vec> feasible_reported;  // points in R^{n+d}
};

/// Rotate a continuous separator ahat at fiber xhat (query point (xhat,
/// yhat)) into R^{n+d}: returns (M * (xhat - 1/2), ahat) with M =
/// max{M1, M2} + 1, M1 the max consistency ratio over feasible-reported
/// points and M2 = 4 R ||ahat||_1 + 1 the closed-form bound keeping every
/// other fiber's slab intact.
Vec lift_normal(const Vec& xhat, const Vec& yhat, const Vec& ahat,
                const LiftContext& ctx, double* scale_out = nullptr);

/// M for a lift whose continuous normal is still pending: only a bound
/// l1_max >= ||ahat||_1 is known, which is enough to fix the integer-block
/// answers ahead of the commitment.
double lift_scale_bound(const Vec& xhat, const Vec& yhat, double l1_max,
                        const LiftContext& ctx);

/// Mixed-integer resisting oracle: reports feasibility on fractional fibers,
/// separates points outside the unit box, and delegates integral-fiber
/// queries to per-fiber continuous adversaries whose normals it lifts.
class MixedAdversary final : public SeparationOracle {
 public:
  /// Per-fiber continuous adversary, seen through a uniform surface.
  class Fiber {
   public:
    struct Out {
      bool realized = false;
      Vec normal;
      std::uint64_t ticket = 0;
      int level = 0;
      std::string tag;
    };
    virtual ~Fiber() = default;
    virtual Out respond(const Vec& y, const Query& q, int n,
                        std::size_t transcript_index) = 0;
    virtual std::vector<std::pair<std::uint64_t, Vec>> drain() = 0;
    virtual void finalize() = 0;
    virtual std::pair<InfBall, InfBall> witness_balls(double rho) = 0;
    virtual long total_queries() const = 0;
  };

  MixedAdversary(int n, int d, double R, double rho, AdversaryKind kind,
                 std::uint64_t seed = 0, double tol = kDefaultTol);

  OracleAnswer ask(const Vec& point, const Query& q) override;
  const Transcript& transcript() const override { return transcript_; }

  /// Witnesses on the least-queried fiber; resolves every fiber's pending
  /// answers. Throws when all fibers have exhausted the per-fiber floor.
  std::pair<WitnessSet, WitnessSet> witnesses(double rho);
  void finalize();

  const LiftContext& context() const { return ctx_; }
  long fiber_queries(const std::vector<int>& fiber) const;
  long per_fiber_budget() const;

 private:
  Fiber& fiber_slot(const std::vector<int>& key);
  void drain();
  void check_lift_conditions(const Vec& lifted, const Vec& point,
                             std::size_t ctx_size) const;

  int n_;
  int d_;
  double R_;
  double rho_;
  double tol_;
  AdversaryKind kind_;
  double l1_max_;
  Transcript transcript_;
  LiftContext ctx_;
  std::map<std::vector<int>, std::unique_ptr<Fiber>> fibers_;

  struct PendingLift {
    std::size_t transcript_index = 0;
    double scale = 0.0;
    Vec tilde;       // xhat - 1/2
    Vec point;       // full query point
    std::size_t ctx_size = 0;
  };
  std::map<std::vector<int>, std::unordered_map<std::uint64_t, PendingLift>> pending_;
};

}  // namespace lowband
