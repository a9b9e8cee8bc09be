#include "lowband/dir_adversary.hpp"

#include <cmath>
#include <stdexcept>

namespace lowband {

int dir_stage_budget(int d) { return (d * d + 7) / 8; }

Vec nullspace_unit(const std::vector<Vec>& constraints, int dim) {
  std::vector<Vec> basis;  // orthonormalized constraints
  for (const Vec& c : constraints) {
    Vec r = c;
    for (const Vec& b : basis) r -= b.dot(r) * b;
    const double nrm = r.norm();
    if (nrm > 1e-12) basis.push_back(r / nrm);
  }
  for (int i = 0; i < dim; ++i) {
    Vec r = Vec::Zero(dim);
    r[i] = 1.0;
    for (const Vec& b : basis) r -= b.dot(r) * b;
    const double nrm = r.norm();
    if (nrm > 1e-8) return r / nrm;
  }
  throw std::runtime_error("capacity accounting bug");
}

DirAdversaryCore::DirAdversaryCore(int d, double R, double rho, double tol)
    : d_(d), R_(R), rho_(rho), tol_(tol), anchor_(Vec::Zero(d)), radius_(R) {
  if (d < 2) throw std::invalid_argument("inner-product adversary needs d >= 2");
  if (!(R > 0.0) || !(rho >= 0.0)) throw std::invalid_argument("need R > 0 and rho >= 0");
  // Total batch capacity across a stage covers the stage budget.
  long capacity_sum = 0;
  for (int k = 0; k < d; ++k) capacity_sum += (d - k) / 2;
  if (capacity_sum < dir_stage_budget(d))
    throw std::logic_error("stage capacity below budget");
}

int DirAdversaryCore::batch_capacity() const {
  return (d_ - static_cast<int>(committed_.size())) / 2;
}

double DirAdversaryCore::split_width() const { return radius_ / std::sqrt(double(d_)); }

DirAdversaryCore::Outcome DirAdversaryCore::respond(const Vec& point,
                                                    const Vec& direction) {
  if (point.size() != d_) throw std::invalid_argument("query point dimension mismatch");
  if (direction.size() != 0 && direction.size() != d_)
    throw std::invalid_argument("query direction dimension mismatch");

  Outcome out;
  out.stage = stage_index_;
  out.ticket = next_ticket_++;

  const BoxRegion box = universe();
  if (!box.contains(point)) {
    auto face = box_face_separator(point, box);
    out.realized = true;
    out.normal = face->normal;
    out.tag = "outside";
  } else {
    // Split-set membership: the open slab -width < <a_i, y - anchor> < 0.
    // Boundary contact (within tol) counts as outside; the sets are open.
    int violated = -1;
    double side = 0.0;
    const double width = split_width();
    for (std::size_t i = 0; i < committed_.size(); ++i) {
      const double v = committed_[i].dot(point - anchor_);
      if (v >= -tol_) {
        violated = static_cast<int>(i);
        side = +1.0;
        break;
      }
      if (v <= -width + tol_) {
        violated = static_cast<int>(i);
        side = -1.0;
        break;
      }
    }
    if (violated >= 0) {
      out.realized = true;
      out.normal = side * committed_[static_cast<std::size_t>(violated)];
      out.tag = "split";
    } else {
      if (batch_capacity() == 0)
        throw std::runtime_error("budget exceeded: adversary guarantee void");
      out.realized = false;
      out.tag = "batch";
      batch_points_.push_back(point);
      if (direction.size() == d_ && direction.lpNorm<Eigen::Infinity>() > 0.0)
        batch_dirs_.push_back(direction);
      batch_tickets_.push_back(out.ticket);
      if (batch_size() >= batch_capacity()) commit_batch();
    }
  }

  ++stage_queries_;
  ++total_queries_;
  maybe_transition();
  return out;
}

void DirAdversaryCore::commit_batch() {
  if (batch_points_.empty()) throw std::logic_error("commit on empty batch");
  std::vector<Vec> constraints = committed_;
  for (std::size_t j = 1; j < batch_points_.size(); ++j)
    constraints.push_back(batch_points_[j] - batch_points_[0]);
  for (const Vec& v : batch_dirs_) constraints.push_back(v);
  Vec a = nullspace_unit(constraints, d_);
  if (a.dot(batch_points_[0] - anchor_) < 0.0) a = -a;
  committed_.push_back(a);
  for (std::uint64_t t : batch_tickets_) resolution_queue_.emplace_back(t, a);
  batch_points_.clear();
  batch_dirs_.clear();
  batch_tickets_.clear();
}

void DirAdversaryCore::maybe_transition() {
  const bool budget_met = stage_queries_ >= dir_stage_budget(d_);
  const bool saturated = batch_capacity() == 0;
  if ((budget_met || saturated) && can_descend()) descend();
}

std::pair<Vec, BoxRegion> DirAdversaryCore::stage_cube() const {
  Vec u = anchor_;
  const double step = radius_ / (2.0 * std::sqrt(double(d_)));
  for (const Vec& a : committed_) u -= step * a;
  const double half = radius_ / (3.0 * d_);
  const BoxRegion cube{u, half};

  const double width = split_width();
  if (d_ <= 12) {
    std::vector<int> corner(static_cast<std::size_t>(d_));
    for (long mask = 0; mask < (1L << d_); ++mask) {
      Vec c = u;
      for (int i = 0; i < d_; ++i) c[i] += ((mask >> i) & 1 ? half : -half);
      if ((c - anchor_).lpNorm<Eigen::Infinity>() >= radius_)
        throw std::logic_error("stage cube corner escapes the stage box");
      for (const Vec& a : committed_) {
        const double v = a.dot(c - anchor_);
        if (!(v > -width && v < 0.0))
          throw std::logic_error("stage cube corner escapes a split set");
      }
    }
  } else {
    // Norm bound: corners lie within the ball B(u, R/(2 sqrt d)) which the
    // construction keeps inside every split set and the box.
    const double corner_dist = half * std::sqrt(double(d_));
    if (!(corner_dist < radius_ / (2.0 * std::sqrt(double(d_)))))
      throw std::logic_error("stage cube norm bound violated");
  }
  return {u, cube};
}

void DirAdversaryCore::finalize() {
  if (!batch_points_.empty()) commit_batch();
}

void DirAdversaryCore::descend() {
  finalize();
  auto [u, cube] = stage_cube();
  DirStageSnapshot snap = stage_snapshot();
  snap.cube_center = u;
  snap.cube_radius = cube.radius;
  history_.push_back(std::move(snap));
  anchor_ = u;
  radius_ = cube.radius;
  committed_.clear();
  stage_queries_ = 0;
  ++stage_index_;
}

std::pair<InfBall, InfBall> DirAdversaryCore::witness_balls(double rho) {
  const bool fresh = stage_queries_ == 0 && committed_.empty() && batch_points_.empty();
  const double cube_half = radius_ / (3.0 * d_);
  if (rho < cube_half / 2.0) {
    finalize();
    auto [u, cube] = stage_cube();
    Vec c1 = u, c2 = u;
    c1[0] -= cube_half / 2.0;
    c2[0] += cube_half / 2.0;
    return {InfBall{c1, rho}, InfBall{c2, rho}};
  }
  if (fresh && rho < radius_ / 2.0) {
    Vec c1 = anchor_, c2 = anchor_;
    c1[0] -= radius_ / 2.0;
    c2[0] += radius_ / 2.0;
    return {InfBall{c1, rho}, InfBall{c2, rho}};
  }
  throw std::invalid_argument("fatness too large for current level");
}

std::vector<std::pair<std::uint64_t, Vec>> DirAdversaryCore::drain_resolutions() {
  auto out = std::move(resolution_queue_);
  resolution_queue_.clear();
  return out;
}

DirStageSnapshot DirAdversaryCore::stage_snapshot() const {
  DirStageSnapshot snap;
  snap.index = stage_index_;
  snap.anchor = anchor_;
  snap.radius = radius_;
  snap.committed = committed_;
  snap.queries = stage_queries_;
  Vec u = anchor_;
  const double step = radius_ / (2.0 * std::sqrt(double(d_)));
  for (const Vec& a : committed_) u -= step * a;
  snap.cube_center = u;
  snap.cube_radius = radius_ / (3.0 * d_);
  return snap;
}

DirAdversary::DirAdversary(int d, double R, double rho, std::uint64_t seed, double tol)
    : core_(d, R, rho, tol),
      transcript_(TranscriptHeader{0, d, R, rho, "dir", seed}) {}

OracleAnswer DirAdversary::ask(const Vec& point, const Query& q) {
  if (q.kind != QueryKind::kInner && q.kind != QueryKind::kSignInner)
    throw std::invalid_argument("inner-product oracle answers inner/sign queries only");
  auto out = core_.respond(point, q.direction);
  OracleAnswer ans;
  if (out.realized) {
    ans = evaluate_query(q, out.normal);
  } else {
    ans = q.kind == QueryKind::kInner ? OracleAnswer::Value(0.0)
                                      : OracleAnswer::BitVal(0);
  }
  TranscriptRecord rec;
  rec.point = point;
  rec.query = q;
  rec.answer = ans;
  if (out.realized) rec.realized_normal = out.normal;
  rec.level = out.stage;
  rec.tag = out.tag;
  const std::size_t idx = transcript_.append(std::move(rec));
  if (!out.realized) pending_[out.ticket] = idx;
  drain();
  return ans;
}

void DirAdversary::drain() {
  for (const auto& [ticket, normal] : core_.drain_resolutions()) {
    auto it = pending_.find(ticket);
    if (it == pending_.end()) continue;
    transcript_.resolve_normal(it->second, normal);
    pending_.erase(it);
  }
}

std::pair<WitnessSet, WitnessSet> DirAdversary::witnesses(double rho) {
  auto balls = core_.witness_balls(rho);
  drain();
  return {WitnessSet{0, {}, balls.first}, WitnessSet{0, {}, balls.second}};
}

void DirAdversary::finalize() {
  core_.finalize();
  drain();
}

}  // namespace lowband
