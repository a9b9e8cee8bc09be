#include "lowband/geometry.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace lowband;

namespace {

Vec vec(std::initializer_list<double> vals) {
  Vec v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

// Independent oracle: max of <a, .> over the 2^d corners of the ball.
double corner_support(const InfBall& ball, const Vec& a) {
  const int d = static_cast<int>(ball.center.size());
  double best = -std::numeric_limits<double>::infinity();
  for (long mask = 0; mask < (1L << d); ++mask) {
    Vec corner = ball.center;
    for (int i = 0; i < d; ++i)
      corner[i] += ((mask >> i) & 1) ? ball.radius : -ball.radius;
    best = std::max(best, a.dot(corner));
  }
  return best;
}

}  // namespace

TEST_CASE("inf-ball support in coordinate direction") {
  const InfBall ball{vec({0, 0}), 1.0};
  CHECK(support_inf_ball(ball, vec({1, 0})) == doctest::Approx(1.0));
}

TEST_CASE("inf-ball support of a point set") {
  const InfBall ball{vec({2, -1}), 0.0};
  const Vec a = vec({0.3, 4.0});
  CHECK(support_inf_ball(ball, a) == doctest::Approx(a.dot(ball.center)));
}

TEST_CASE("inf-ball support matches the corner maximum") {
  const InfBall ball{vec({1, 1}), 0.5};
  const Vec a = vec({2, -3});
  CHECK(support_inf_ball(ball, a) == doctest::Approx(corner_support(ball, a)));
}

TEST_CASE("inf-ball support equals brute force on random instances") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int d : {1, 2, 3, 4, 5, 6, 7, 12}) {
    for (int rep = 0; rep < 30; ++rep) {
      Vec c(d), a(d);
      for (int i = 0; i < d; ++i) {
        c[i] = unif(rng);
        a[i] = unif(rng);
      }
      if (a.lpNorm<Eigen::Infinity>() == 0.0) a[0] = 1.0;
      const InfBall ball{c, std::abs(unif(rng)) + 0.01};
      const double closed = support_inf_ball(ball, a);
      const double brute = corner_support(ball, a);
      CHECK(std::abs(closed - brute) <= 1e-12 * std::max(1.0, std::abs(brute)));
    }
  }
}

TEST_CASE("l2 ball support") {
  const Vec a = vec({3, 4});
  CHECK(support_l2_ball(vec({1, -1}), 2.0, a) == doctest::Approx(3 - 4 + 2 * 5));
}

TEST_CASE("zero normal is rejected") {
  const InfBall ball{vec({0, 0}), 1.0};
  CHECK_THROWS_WITH_AS(support_inf_ball(ball, vec({0, 0})), "degenerate normal",
                       std::invalid_argument);
  const WitnessSet w{0, {}, ball};
  CHECK_THROWS_AS(separates_strictly(vec({0, 0}), vec({1, 0}), w, 1e-9),
                  std::invalid_argument);
}

TEST_CASE("strict separation of a ball") {
  const WitnessSet w{0, {}, InfBall{vec({-1, 0}), 0.5}};
  CHECK(separates_strictly(vec({1, 0}), vec({1, 0}), w, 1e-9));
  // Boundary: sup = -0.5 equals <a, zhat>, not strictly below.
  CHECK_FALSE(separates_strictly(vec({1, 0}), vec({-0.5, 0}), w, 1e-9));
}

TEST_CASE("separation support over hull generators") {
  WitnessSet w{0, {vec({0, 0}), vec({1, 0})}, InfBall{vec({0, 1}), 0.25}};
  const Vec a = vec({1, 1});
  // sup over generators: max(0, 1); ball support: 1 + 0.5 = 1.5.
  double brute = std::max(a.dot(vec({0, 0})), a.dot(vec({1, 0})));
  brute = std::max(brute, corner_support(w.ball, a));
  CHECK(w.support(a) == doctest::Approx(brute));
  CHECK(separates_strictly(a, vec({3, 3}), w, 1e-9));
}

TEST_CASE("separation is monotone in the tolerance") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int rep = 0; rep < 100; ++rep) {
    Vec a(3), z(3), c(3);
    for (int i = 0; i < 3; ++i) {
      a[i] = unif(rng);
      z[i] = unif(rng);
      c[i] = unif(rng);
    }
    if (a.lpNorm<Eigen::Infinity>() == 0.0) a[1] = 0.5;
    const WitnessSet w{0, {}, InfBall{c, 0.3}};
    const double tol = std::abs(unif(rng)) * 0.1;
    if (separates_strictly(a, z, w, tol)) {
      CHECK(separates_strictly(a, z, w, tol / 2.0));
      CHECK(separates_strictly(a, z, w, 0.0));
    }
  }
}

TEST_CASE("orthant labeling with the tie rule") {
  CHECK(orthant_of(vec({1, -2}), vec({0, 0})).signs == std::vector<int>{+1, -1});
  CHECK(orthant_of(vec({0, 3}), vec({0, 0})).signs == std::vector<int>{-1, +1});
  CHECK(orthant_of(vec({0, 0}), vec({0, 0})).signs == std::vector<int>{-1, -1});
}

TEST_CASE("orthant label is stable under small perturbations") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    Vec y(4), anchor(4);
    for (int i = 0; i < 4; ++i) {
      anchor[i] = unif(rng);
      double delta = unif(rng);
      if (std::abs(delta) < 1e-3) delta = 1e-3;
      y[i] = anchor[i] + delta;
    }
    double gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) gap = std::min(gap, std::abs(y[i] - anchor[i]));
    const auto base = orthant_of(y, anchor).signs;
    for (int trial = 0; trial < 5; ++trial) {
      Vec p = y;
      for (int i = 0; i < 4; ++i) p[i] += unif(rng) * 0.99 * gap;
      CHECK(orthant_of(p, anchor).signs == base);
    }
  }
}

TEST_CASE("box face separation picks the worst violation") {
  const double R = 1.0;
  const BoxRegion box{vec({0, 0}), R};
  auto hs = box_face_separator(vec({2 * R, 0}), box);
  REQUIRE(hs.has_value());
  CHECK(hs->normal == vec({1, 0}));
  CHECK_FALSE(box_face_separator(vec({0.5, -0.5}), box).has_value());
  auto hs2 = box_face_separator(vec({1.5 * R, -3 * R}), box);
  REQUIRE(hs2.has_value());
  CHECK(hs2->normal == vec({0, -1}));
}

TEST_CASE("fiber witness support only fattens the continuous block") {
  WitnessSet w{1, {}, InfBall{vec({1, 0.5, -0.5}), 0.25}};
  const Vec a = vec({2, 1, 1});
  CHECK(w.support(a) == doctest::Approx(2 + 0.5 - 0.5 + 0.25 * 2));
  CHECK(w.contains(vec({1, 0.6, -0.4}), 1e-9));
  CHECK_FALSE(w.contains(vec({0.9, 0.5, -0.5}), 1e-9));
}
