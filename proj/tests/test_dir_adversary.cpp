#include "lowband/dir_adversary.hpp"

#include "lowband/verifier.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace lowband;

namespace {

Vec unit(int d, int i, double s = 1.0) {
  Vec v = Vec::Zero(d);
  v[i] = s;
  return v;
}

Vec random_unit(int d, std::mt19937& rng) {
  std::normal_distribution<double> gauss;
  Vec v(d);
  for (int i = 0; i < d; ++i) v[i] = gauss(rng);
  return v / v.norm();
}

/// Queries sampled inside the current consistent region (the stage cube is
/// always interior to every split set).
void random_stage_queries(DirAdversary& adv, int count, std::mt19937& rng) {
  const int d = adv.core().dim();
  for (int k = 0; k < count; ++k) {
    const auto snap = adv.core().stage_snapshot();
    std::uniform_real_distribution<double> unif(-snap.cube_radius, snap.cube_radius);
    Vec p = snap.cube_center;
    for (int i = 0; i < d; ++i) p[i] += unif(rng);
    adv.ask(p, Query::Inner(random_unit(d, rng)));
  }
}

// rho fat enough to pin the adversary at stage 0 (blocks the recursion).
constexpr double kPin4 = 0.05;   // d=4: needs rho >= 1/24
constexpr double kPin2 = 0.1;    // d=2: needs rho >= 1/12

}  // namespace

TEST_CASE("nullspace construction on canonical cases") {
  // Constraints {e1} in d=2 leave +-e2.
  Vec a = nullspace_unit({unit(2, 0)}, 2);
  CHECK(std::abs(std::abs(a[1]) - 1.0) < 1e-12);
  CHECK(std::abs(a[0]) < 1e-12);

  // Constraints {e1, e2} in d=3 with batch point (0,0,-1): the canonical
  // projection picks e3 and the sign rule flips it so delta = 1 >= 0.
  Vec b = nullspace_unit({unit(3, 0), unit(3, 1)}, 3);
  const Vec y1 = unit(3, 2, -1.0);
  if (b.dot(y1) < 0.0) b = -b;
  CHECK(b == unit(3, 2, -1.0));

  // d=6 random batch: the result satisfies every constraint to 1e-9.
  std::mt19937 rng(2);
  std::vector<Vec> constraints;
  for (int i = 0; i < 5; ++i) constraints.push_back(random_unit(6, rng));
  const Vec c = nullspace_unit(constraints, 6);
  CHECK(c.norm() == doctest::Approx(1.0));
  for (const Vec& v : constraints) CHECK(std::abs(v.dot(c)) < 1e-9);

  CHECK_THROWS_WITH_AS(nullspace_unit({unit(1, 0)}, 1), "capacity accounting bug",
                       std::runtime_error);
}

TEST_CASE("batch of floor(d/2) zero answers commits an orthogonal normal") {
  DirAdversary adv(4, 1.0, kPin4);
  CHECK(adv.ask(Vec::Zero(4), Query::Inner(unit(4, 0))) == OracleAnswer::Value(0.0));
  CHECK(adv.core().batch_size() == 1);
  CHECK(adv.core().batch_capacity() == 2);
  // Second query fills the batch: a1 is orthogonal to {y2 - y1 = e2, e1, e2}
  // and the deterministic canonical projection picks e3 with delta = 0.
  CHECK(adv.ask(unit(4, 1), Query::Inner(unit(4, 1))) == OracleAnswer::Value(0.0));
  REQUIRE(adv.core().committed().size() == 1);
  CHECK(adv.core().committed()[0] == unit(4, 2));
  for (int i = 0; i < 2; ++i) {
    REQUIRE(adv.transcript().records()[i].realized_normal.has_value());
    CHECK(*adv.transcript().records()[i].realized_normal == unit(4, 2));
  }
}

TEST_CASE("the sign rule flips the committed normal toward the batch point") {
  DirAdversaryCore core(2, 1.0, kPin2);
  core.respond(Vec(unit(2, 1, -0.5)), unit(2, 0));
  REQUIRE(core.committed().size() == 1);
  CHECK(core.committed()[0] == unit(2, 1, -1.0));
}

TEST_CASE("queries outside a split set are answered with the committed normal") {
  DirAdversary adv(4, 1.0, kPin4);
  adv.ask(Vec::Zero(4), Query::Inner(unit(4, 0)));
  adv.ask(unit(4, 1), Query::Inner(unit(4, 1)));  // commits a1 = e3
  // <e3, (0,0,-R,0)> = -1 < -R/sqrt(4): outside P1 on the far side.
  const OracleAnswer a = adv.ask(unit(4, 2, -1.0), Query::Inner(unit(4, 2)));
  CHECK(a == OracleAnswer::Value(-1.0));
  CHECK(*adv.transcript().records().back().realized_normal == unit(4, 2, -1.0));
  CHECK(adv.transcript().records().back().tag == "split");
  // Boundary contact (the anchor) counts as outside, separable by +a1.
  const OracleAnswer b = adv.ask(Vec::Zero(4), Query::Inner(unit(4, 2)));
  CHECK(b == OracleAnswer::Value(1.0));
}

TEST_CASE("stage cube arithmetic for one committed direction") {
  DirAdversaryCore core(4, 1.0, kPin4);
  core.respond(Vec::Zero(4), unit(4, 0));
  core.respond(Vec(unit(4, 1)), unit(4, 1));  // a1 = e3
  auto [u, cube] = core.stage_cube();
  CHECK(u == Vec(unit(4, 2, -0.25)));  // anchor - R/(2 sqrt d) * a1
  CHECK(cube.radius == doctest::Approx(1.0 / 12.0));
  // Corner products with a1 stay strictly inside (-1/2, 0).
  for (double corner : {-0.25 - 1.0 / 12.0, -0.25 + 1.0 / 12.0}) {
    CHECK(corner > -0.5);
    CHECK(corner < 0.0);
  }
}

TEST_CASE("empty stage cube is the anchor cube") {
  DirAdversaryCore core(4, 1.0, kPin4);
  auto [u, cube] = core.stage_cube();
  CHECK(u == Vec::Zero(4));
  CHECK(cube.radius == doctest::Approx(1.0 / 12.0));
}

TEST_CASE("descend shrinks the box by 1/(3d)") {
  DirAdversaryCore core(4, 1.0, 1e-6);
  core.descend();
  CHECK(core.universe().radius == doctest::Approx(1.0 / 12.0));
  core.descend();
  CHECK(core.universe().radius == doctest::Approx(1.0 / 144.0));
}

TEST_CASE("committed normals stay orthonormal across a full stage") {
  std::mt19937 rng(12);
  for (int d : {6, 8}) {
    DirAdversary adv(d, 1.0, 1e-9);
    random_stage_queries(adv, dir_stage_budget(d) - 1, rng);
    adv.finalize();
    const auto& committed = adv.core().committed();
    CHECK(!committed.empty());
    for (std::size_t i = 0; i < committed.size(); ++i)
      for (std::size_t j = 0; j < committed.size(); ++j) {
        const double expected = i == j ? 1.0 : 0.0;
        CHECK(std::abs(committed[i].dot(committed[j]) - expected) <= 1e-9);
      }
  }
}

TEST_CASE("zero answers are coherent with the realized normals") {
  std::mt19937 rng(14);
  DirAdversary adv(6, 1.0, 1e-9);
  random_stage_queries(adv, dir_stage_budget(6) - 1, rng);
  adv.finalize();
  for (const auto& rec : adv.transcript().records()) {
    REQUIRE(rec.realized_normal.has_value());
    if (rec.answer == OracleAnswer::Value(0.0))
      CHECK(std::abs(rec.query.direction.dot(*rec.realized_normal)) <= 1e-9);
  }
}

TEST_CASE("witnesses inside the stage cube satisfy the verifier") {
  std::mt19937 rng(15);
  for (int rep = 0; rep < 5; ++rep) {
    DirAdversary adv(4, 1.0, 1e-4);
    random_stage_queries(adv, dir_stage_budget(4) - 1, rng);
    auto [w1, w2] = adv.witnesses(1e-4);
    CHECK(check_transcript(adv.transcript(), w1, 1e-9).empty());
    CHECK(check_transcript(adv.transcript(), w2, 1e-9).empty());
    CHECK(certify_disjoint(w1, w2));
  }
}

TEST_CASE("any ball inside the stage cube is consistent") {
  std::mt19937 rng(16);
  DirAdversary adv(8, 1.0, 1e-9);
  random_stage_queries(adv, dir_stage_budget(8) - 1, rng);
  adv.finalize();
  auto [u, cube] = adv.core().stage_cube();
  const double rho = cube.radius / 20.0;
  std::uniform_real_distribution<double> unif(-(cube.radius - rho), cube.radius - rho);
  for (int rep = 0; rep < 10; ++rep) {
    Vec c = u;
    for (int i = 0; i < 8; ++i) c[i] += unif(rng);
    const WitnessSet w{0, {}, InfBall{c, rho}};
    CHECK(check_transcript(adv.transcript(), w, 1e-9).empty());
  }
}

TEST_CASE("fresh-stage witnesses fall back to the box when rho is fat") {
  DirAdversaryCore core(2, 1.0, kPin2);
  // cube half-width is 1/6; rho in [cube/2, R/2) uses the box placement.
  auto [b1, b2] = core.witness_balls(0.2);
  CHECK((b1.center - b2.center).lpNorm<Eigen::Infinity>() > 0.4);
  CHECK_THROWS_WITH_AS(core.witness_balls(0.6), "fatness too large for current level",
                       std::invalid_argument);
}

TEST_CASE("sign queries get the bit of the inner product") {
  DirAdversary adv(4, 1.0, kPin4);
  CHECK(adv.ask(Vec::Zero(4), Query::SignInner(unit(4, 0))) ==
        OracleAnswer::BitVal(0));
  adv.ask(unit(4, 1), Query::SignInner(unit(4, 1)));  // commits a1 = e3
  // The anchor sits on the boundary of P1, answered with +a1 = e3.
  CHECK(adv.ask(Vec::Zero(4), Query::SignInner(unit(4, 2))) ==
        OracleAnswer::BitVal(1));
  auto [w1, w2] = adv.witnesses(1e-3);
  CHECK(check_transcript(adv.transcript(), w1, 1e-9).empty());
  CHECK(check_transcript(adv.transcript(), w2, 1e-9).empty());
}

TEST_CASE("stage budget arithmetic") {
  CHECK(dir_stage_budget(2) == 1);
  CHECK(dir_stage_budget(4) == 2);
  CHECK(dir_stage_budget(8) == 8);
  for (int d = 2; d <= 16; ++d) {
    long capacity_sum = 0;
    for (int k = 0; k < d; ++k) capacity_sum += (d - k) / 2;
    CHECK(capacity_sum >= dir_stage_budget(d));
  }
}
