#include "lowband/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lowband {

double support_inf_ball(const InfBall& ball, const Vec& a) {
  if (a.size() != ball.center.size())
    throw std::invalid_argument("support_inf_ball: dimension mismatch");
  if (a.lpNorm<Eigen::Infinity>() == 0.0)
    throw std::invalid_argument("degenerate normal");
  return a.dot(ball.center) + ball.radius * a.lpNorm<1>();
}

double support_l2_ball(const Vec& center, double radius, const Vec& a) {
  if (a.lpNorm<Eigen::Infinity>() == 0.0)
    throw std::invalid_argument("degenerate normal");
  return a.dot(center) + radius * a.norm();
}

OrthantLabel orthant_of(const Vec& y, const Vec& anchor) {
  if (y.size() != anchor.size())
    throw std::invalid_argument("orthant_of: dimension mismatch");
  OrthantLabel label;
  label.anchor = anchor;
  label.signs.resize(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i)
    label.signs[i] = y[i] > anchor[i] ? +1 : -1;
  return label;
}

std::optional<Halfspace> box_face_separator(const Vec& zhat, const BoxRegion& box) {
  double best = 0.0;
  int best_index = -1;
  int best_sign = 0;
  for (Eigen::Index i = 0; i < zhat.size(); ++i) {
    const double over = zhat[i] - (box.center[i] + box.radius);
    const double under = (box.center[i] - box.radius) - zhat[i];
    if (over > best) {
      best = over;
      best_index = static_cast<int>(i);
      best_sign = +1;
    }
    if (under > best) {
      best = under;
      best_index = static_cast<int>(i);
      best_sign = -1;
    }
  }
  if (best_index < 0) return std::nullopt;
  Vec normal = Vec::Zero(zhat.size());
  normal[best_index] = best_sign;
  return Halfspace{normal, normal.dot(box.center) + box.radius};
}

double WitnessSet::support(const Vec& a) const {
  if (a.size() != ball.center.size())
    throw std::invalid_argument("WitnessSet::support: dimension mismatch");
  double s = a.dot(ball.center) + ball.radius * a.tail(a.size() - int_dims).lpNorm<1>();
  for (const Vec& g : generators) s = std::max(s, a.dot(g));
  return s;
}

bool WitnessSet::contains(const Vec& z, double tol) const {
  if (z.size() != ball.center.size()) return false;
  for (const Vec& g : generators)
    if (g.size() == z.size() && (z - g).lpNorm<Eigen::Infinity>() <= tol) return true;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double slack = i < int_dims ? tol : ball.radius + tol;
    if (std::abs(z[i] - ball.center[i]) > slack) return false;
  }
  return true;
}

bool separates_strictly(const Vec& a, const Vec& zhat, const WitnessSet& w,
                        double tol) {
  if (a.lpNorm<Eigen::Infinity>() == 0.0)
    throw std::invalid_argument("degenerate normal");
  return w.support(a) <= a.dot(zhat) - tol;
}

WitnessSet box_witness(const BoxRegion& box) {
  return WitnessSet{0, {}, InfBall{box.center, box.radius}};
}

std::string orthant_string(const std::vector<int>& signs) {
  std::string s;
  s.reserve(signs.size());
  for (int v : signs) s += v > 0 ? '+' : '-';
  return s;
}

}  // namespace lowband
