#include "lowband/mixed_lift.hpp"

#include "lowband/bit_adversary.hpp"
#include "lowband/dir_adversary.hpp"

#include <cmath>
#include <stdexcept>

namespace lowband {

long recursion_depth(double R, double rho, double scale) {
  if (!(rho > 0.0)) throw std::invalid_argument("recursion depth needs rho > 0");
  long k = 0;
  double reach = 2.0 * rho * scale;
  while (reach < R && k < 256) {
    ++k;
    reach *= scale;
  }
  return k;
}

long bit_certified_floor(int d, double R, double rho) {
  return bit_level_budget(d) * recursion_depth(R, rho, 3.0);
}

long dir_certified_floor(int d, double R, double rho) {
  return dir_stage_budget(d) * recursion_depth(R, rho, 3.0 * d);
}

long certified_floor(AdversaryKind kind, int n, int d, double R, double rho) {
  const long cont = kind == AdversaryKind::kBit ? bit_certified_floor(d, R, rho)
                                                : dir_certified_floor(d, R, rho);
  return (1L << n) * cont;
}

FiberClass classify_fiber(const Vec& x) {
  bool integral = true;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] < 0.0 || x[i] > 1.0) return FiberClass::kOutsideUnitBox;
    if (x[i] != 0.0 && x[i] != 1.0) integral = false;
  }
  return integral ? FiberClass::kIntegral : FiberClass::kFractional;
}

namespace {

Vec half_offset(const Vec& xhat) {
  return xhat.array() - 0.5;
}

double ratio_denominator(const Vec& tilde, const Vec& xhat, const Vec& x) {
  const double denom = tilde.dot(xhat - x);
  if (denom <= 0.0)
    throw std::logic_error("feasible-reported point not strictly interior");
  return denom;
}

}  // namespace

Vec lift_normal(const Vec& xhat, const Vec& yhat, const Vec& ahat,
                const LiftContext& ctx, double* scale_out) {
  const int n = static_cast<int>(xhat.size());
  const int d = static_cast<int>(ahat.size());
  const Vec tilde = half_offset(xhat);
  double m1 = 0.0;
  for (const Vec& f : ctx.feasible_reported) {
    const Vec x = f.head(n);
    const Vec y = f.tail(d);
    const double num = ahat.dot(y) - ahat.dot(yhat);
    const double denom = ratio_denominator(tilde, xhat, x);
    m1 = std::max(m1, num / denom);
  }
  const double m2 = 4.0 * ctx.R * ahat.lpNorm<1>() + 1.0;
  const double m = std::max(m1, m2) + 1.0;
  if (scale_out) *scale_out = m;
  Vec lifted(n + d);
  lifted.head(n) = m * tilde;
  lifted.tail(d) = ahat;
  return lifted;
}

double lift_scale_bound(const Vec& xhat, const Vec& yhat, double l1_max,
                        const LiftContext& ctx) {
  const int n = static_cast<int>(xhat.size());
  const Vec tilde = half_offset(xhat);
  double m1 = 0.0;
  for (const Vec& f : ctx.feasible_reported) {
    const Vec x = f.head(n);
    const double num = l1_max * (f.tail(f.size() - n) - yhat).lpNorm<Eigen::Infinity>();
    m1 = std::max(m1, num / ratio_denominator(tilde, xhat, x));
  }
  const double m2 = 4.0 * ctx.R * l1_max + 1.0;
  return std::max(m1, m2) + 1.0;
}

namespace {

class BitFiber final : public MixedAdversary::Fiber {
 public:
  BitFiber(int d, double R, double rho, double tol) : core_(d, R, rho, tol) {}

  Out respond(const Vec& y, const Query& q, int n,
              std::size_t transcript_index) override {
    std::optional<int> coord;
    switch (q.kind) {
      case QueryKind::kCoord:
      case QueryKind::kBit:
        if (q.coord >= n) coord = q.coord - n;
        break;
      default:
        throw std::invalid_argument("bit fiber answers coordinate/bit queries only");
    }
    auto o = core_.respond(y, coord, transcript_index);
    return Out{o.realized, o.normal, o.ticket, o.level, o.tag};
  }
  std::vector<std::pair<std::uint64_t, Vec>> drain() override {
    return core_.drain_resolutions();
  }
  void finalize() override { core_.finalize(); }
  std::pair<InfBall, InfBall> witness_balls(double rho) override {
    return core_.witness_balls(rho);
  }
  long total_queries() const override { return core_.total_queries(); }

 private:
  BitAdversaryCore core_;
};

class DirFiber final : public MixedAdversary::Fiber {
 public:
  DirFiber(int d, double R, double rho, double tol) : core_(d, R, rho, tol) {}

  Out respond(const Vec& y, const Query& q, int n,
              std::size_t transcript_index) override {
    (void)transcript_index;  // stage snapshots carry no per-record refs
    Vec dir;
    switch (q.kind) {
      case QueryKind::kInner:
      case QueryKind::kSignInner:
        dir = q.direction.tail(q.direction.size() - n);
        break;
      default:
        throw std::invalid_argument("inner fiber answers inner/sign queries only");
    }
    auto o = core_.respond(y, dir);
    return Out{o.realized, o.normal, o.ticket, o.stage, o.tag};
  }
  std::vector<std::pair<std::uint64_t, Vec>> drain() override {
    return core_.drain_resolutions();
  }
  void finalize() override { core_.finalize(); }
  std::pair<InfBall, InfBall> witness_balls(double rho) override {
    return core_.witness_balls(rho);
  }
  long total_queries() const override { return core_.total_queries(); }

 private:
  DirAdversaryCore core_;
};

std::string fiber_string(const std::vector<int>& key) {
  std::string s = "fiber=";
  for (int b : key) s += b ? '1' : '0';
  return s;
}

OracleAnswer pending_lift_answer(const Query& q, double scale, const Vec& tilde,
                                 int n) {
  switch (q.kind) {
    case QueryKind::kCoord:
      return q.coord < n ? OracleAnswer::Value(scale * tilde[q.coord])
                         : OracleAnswer::Value(0.0);
    case QueryKind::kBit: {
      // The pending lift has l-inf norm scale/2, attained on every integer
      // coordinate, so the normalized addressed value is +-1 or 0.
      const double normalized = q.coord < n ? 2.0 * tilde[q.coord] : 0.0;
      return OracleAnswer::BitVal(bit_of(normalized, q.bit_index));
    }
    case QueryKind::kInner:
      return OracleAnswer::Value(scale * q.direction.head(n).dot(tilde));
    case QueryKind::kSignInner:
      return OracleAnswer::BitVal(scale * q.direction.head(n).dot(tilde) > 0.0 ? 1 : 0);
  }
  throw std::logic_error("unreachable query kind");
}

}  // namespace

MixedAdversary::MixedAdversary(int n, int d, double R, double rho,
                               AdversaryKind kind, std::uint64_t seed, double tol)
    : n_(n),
      d_(d),
      R_(R),
      rho_(rho),
      tol_(tol),
      kind_(kind),
      l1_max_(kind == AdversaryKind::kBit ? 1.0 : std::sqrt(double(d))),
      transcript_(TranscriptHeader{n, d, R, rho,
                                   kind == AdversaryKind::kBit ? "bit" : "dir",
                                   seed}) {
  if (n < 1) throw std::invalid_argument("mixed oracle needs n >= 1");
  ctx_.n = n;
  ctx_.d = d;
  ctx_.R = R;
}

MixedAdversary::Fiber& MixedAdversary::fiber_slot(const std::vector<int>& key) {
  auto it = fibers_.find(key);
  if (it == fibers_.end()) {
    std::unique_ptr<Fiber> f;
    if (kind_ == AdversaryKind::kBit)
      f = std::make_unique<BitFiber>(d_, R_, rho_, tol_);
    else
      f = std::make_unique<DirFiber>(d_, R_, rho_, tol_);
    it = fibers_.emplace(key, std::move(f)).first;
  }
  return *it->second;
}

void MixedAdversary::check_lift_conditions(const Vec& lifted, const Vec& point,
                                           std::size_t ctx_size) const {
  const double cut = lifted.dot(point);
  for (std::size_t i = 0; i < ctx_size; ++i) {
    if (!(lifted.dot(ctx_.feasible_reported[i]) < cut - tol_))
      throw std::logic_error("lift violates a feasible-reported point");
  }
  // Every other integral fiber's slab {x} x [-R, R]^d stays feasible.
  const Vec xhat = point.head(n_);
  const double slab = R_ * lifted.tail(d_).lpNorm<1>();
  for (long mask = 0; mask < (1L << n_); ++mask) {
    Vec v(n_);
    for (int i = 0; i < n_; ++i) v[i] = (mask >> i) & 1 ? 1.0 : 0.0;
    if ((v - xhat).lpNorm<Eigen::Infinity>() == 0.0) continue;
    if (!(lifted.head(n_).dot(v) + slab < cut - tol_))
      throw std::logic_error("lift cuts into another fiber's slab");
  }
}

OracleAnswer MixedAdversary::ask(const Vec& point, const Query& q) {
  if (point.size() != n_ + d_)
    throw std::invalid_argument("query point dimension mismatch");
  if ((q.kind == QueryKind::kCoord || q.kind == QueryKind::kBit) &&
      (q.coord < 0 || q.coord >= n_ + d_))
    throw std::out_of_range("queried coordinate out of range");
  const Vec x = point.head(n_);
  const Vec y = point.tail(d_);

  TranscriptRecord rec;
  rec.point = point;
  rec.query = q;

  switch (classify_fiber(x)) {
    case FiberClass::kOutsideUnitBox: {
      auto face = box_face_separator(x, BoxRegion{Vec::Constant(n_, 0.5), 0.5});
      Vec normal = Vec::Zero(n_ + d_);
      normal.head(n_) = face->normal;
      rec.answer = evaluate_query(q, normal);
      rec.realized_normal = normal;
      rec.tag = "xbox";
      break;
    }
    case FiberClass::kFractional: {
      rec.answer = OracleAnswer::Feasible();
      rec.realized_normal = Vec::Zero(n_ + d_);
      rec.tag = "frac";
      ctx_.feasible_reported.push_back(point);
      break;
    }
    case FiberClass::kIntegral: {
      std::vector<int> key(static_cast<std::size_t>(n_));
      for (int i = 0; i < n_; ++i) key[static_cast<std::size_t>(i)] = x[i] == 1.0 ? 1 : 0;
      Fiber& fiber = fiber_slot(key);
      auto out = fiber.respond(y, q, n_, transcript_.size());
      rec.level = out.level;
      rec.tag = fiber_string(key) + ";" + out.tag;
      if (out.realized) {
        double scale = 0.0;
        const Vec lifted = lift_normal(x, y, out.normal, ctx_, &scale);
        check_lift_conditions(lifted, point, ctx_.feasible_reported.size());
        rec.answer = evaluate_query(q, lifted);
        rec.realized_normal = lifted;
      } else {
        PendingLift pl;
        pl.scale = lift_scale_bound(x, y, l1_max_, ctx_);
        pl.tilde = half_offset(x);
        pl.point = point;
        pl.ctx_size = ctx_.feasible_reported.size();
        const OracleAnswer ans = pending_lift_answer(q, pl.scale, pl.tilde, n_);
        rec.answer = ans;
        pl.transcript_index = transcript_.append(std::move(rec));
        pending_[key][out.ticket] = std::move(pl);
        drain();
        return ans;
      }
      break;
    }
  }
  const OracleAnswer ans = rec.answer;
  transcript_.append(std::move(rec));
  drain();
  return ans;
}

void MixedAdversary::drain() {
  for (auto& [key, fiber] : fibers_) {
    auto events = fiber->drain();
    if (events.empty()) continue;
    auto& waiting = pending_[key];
    for (const auto& [ticket, ahat] : events) {
      auto it = waiting.find(ticket);
      if (it == waiting.end()) continue;
      const PendingLift& pl = it->second;
      Vec lifted(n_ + d_);
      lifted.head(n_) = pl.scale * pl.tilde;
      lifted.tail(d_) = ahat;
      check_lift_conditions(lifted, pl.point, pl.ctx_size);
      transcript_.resolve_normal(pl.transcript_index, lifted);
      waiting.erase(it);
    }
  }
}

long MixedAdversary::fiber_queries(const std::vector<int>& fiber) const {
  auto it = fibers_.find(fiber);
  return it == fibers_.end() ? 0 : it->second->total_queries();
}

long MixedAdversary::per_fiber_budget() const {
  return kind_ == AdversaryKind::kBit ? bit_certified_floor(d_, R_, rho_)
                                      : dir_certified_floor(d_, R_, rho_);
}

std::pair<WitnessSet, WitnessSet> MixedAdversary::witnesses(double rho) {
  // Pigeonhole: pick the least-queried fiber (lexicographic tie-break).
  std::vector<int> best;
  long best_count = -1;
  for (long mask = 0; mask < (1L << n_); ++mask) {
    std::vector<int> key(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) key[static_cast<std::size_t>(i)] = (mask >> (n_ - 1 - i)) & 1;
    const long c = fiber_queries(key);
    if (best_count < 0 || c < best_count) {
      best = key;
      best_count = c;
    }
  }
  if (best_count >= per_fiber_budget())
    throw std::runtime_error("lower-bound guarantee expired");

  for (auto& [key, fiber] : fibers_)
    if (key != best) fiber->finalize();
  auto balls = fiber_slot(best).witness_balls(rho);
  drain();

  Vec fiber_x(n_);
  for (int i = 0; i < n_; ++i) fiber_x[i] = best[static_cast<std::size_t>(i)];
  auto lift_ball = [&](const InfBall& b) {
    Vec c(n_ + d_);
    c.head(n_) = fiber_x;
    c.tail(d_) = b.center;
    return InfBall{c, b.radius};
  };
  WitnessSet w1{n_, ctx_.feasible_reported, lift_ball(balls.first)};
  WitnessSet w2{n_, ctx_.feasible_reported, lift_ball(balls.second)};

  // No common mixed-integer point: shared generators are all fractional and
  // the balls are disjoint on an integral fiber.
  for (const Vec& g : ctx_.feasible_reported)
    if (classify_fiber(g.head(n_)) != FiberClass::kFractional)
      throw std::logic_error("non-fractional feasible-reported point");
  if (!((w1.ball.center - w2.ball.center).lpNorm<Eigen::Infinity>() >
        w1.ball.radius + w2.ball.radius))
    throw std::logic_error("witness balls not disjoint");
  return {std::move(w1), std::move(w2)};
}

void MixedAdversary::finalize() {
  for (auto& [key, fiber] : fibers_) fiber->finalize();
  drain();
}

}  // namespace lowband
