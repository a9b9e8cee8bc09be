#pragma once

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace lowband {

using Vec = Eigen::VectorXd;

/// Default strictness tolerance for separation checks. Overridable per call
/// and, at the CLI level, through the ORACLE_DUEL_TOL environment variable.
inline constexpr double kDefaultTol = 1e-9;

/// Halfspace {z : <normal, z> <= offset}.
struct Halfspace {
  Vec normal;
  double offset = 0.0;

  bool contains(const Vec& z, double slack = 0.0) const {
    return normal.dot(z) <= offset + slack;
  }
};

/// Axis-aligned box given by center and l-inf half-width.
struct BoxRegion {
  Vec center;
  double radius = 0.0;

  bool contains(const Vec& z) const {
    return (z - center).lpNorm<Eigen::Infinity>() <= radius;
  }
};

/// Closed l-inf ball; radius 0 degenerates to a point.
struct InfBall {
  Vec center;
  double radius = 0.0;

  bool contains(const Vec& z) const {
    return (z - center).lpNorm<Eigen::Infinity>() <= radius;
  }
};

/// Sign pattern of an orthant relative to an anchor point.
struct OrthantLabel {
  std::vector<int> signs;  // entries in {-1, +1}
  Vec anchor;
};

/// sup over the ball of <a, .>  =  <a, center> + radius * ||a||_1.
/// Throws on a zero normal ("degenerate normal").
double support_inf_ball(const InfBall& ball, const Vec& a);

/// sup over the l2 ball of <a, .>  =  <a, center> + radius * ||a||_2.
double support_l2_ball(const Vec& center, double radius, const Vec& a);

/// Orthant of y relative to anchor. Coordinates equal to the anchor resolve
/// to -1, so the returned label is the lexicographically first (under the
/// order -1 < +1) among the orthants whose closure contains y.
OrthantLabel orthant_of(const Vec& y, const Vec& anchor);

/// Face of the box most violated by zhat, as a halfspace with normal +-e_i
/// (ties broken by smallest coordinate index); nullopt if zhat is inside.
std::optional<Halfspace> box_face_separator(const Vec& zhat, const BoxRegion& box);

/// An instance of the parametrized class: the convex hull of finitely many
/// generator points together with one fat l-inf ball. When int_dims = n > 0
/// the ball lives on a single integer fiber, i.e. it is fat only in the
/// trailing continuous coordinates.
struct WitnessSet {
  int int_dims = 0;
  std::vector<Vec> generators;
  InfBall ball;

  int dim() const { return static_cast<int>(ball.center.size()); }

  /// sup over the hull of <a, .>: max over generator supports and the
  /// fiber-ball support.
  double support(const Vec& a) const;

  /// Membership up to tol: matches a generator, or lies in the fiber ball.
  bool contains(const Vec& z, double tol) const;
};

/// True iff sup_{z in w} <a, z> <= <a, zhat> - tol. Throws on zero normal.
bool separates_strictly(const Vec& a, const Vec& zhat, const WitnessSet& w,
                        double tol);

/// Variant used internally for region checks: witness set that is just a box.
WitnessSet box_witness(const BoxRegion& box);

std::string orthant_string(const std::vector<int>& signs);

}  // namespace lowband
