#include "lowband/solvers.hpp"

#include "lowband/bit_adversary.hpp"
#include "lowband/honest_oracle.hpp"

#include <doctest.h>

#include <Eigen/Cholesky>

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

/// Oracle with a frozen normal, for exercising reconstruction in isolation.
class FixedNormalOracle final : public SeparationOracle {
 public:
  explicit FixedNormalOracle(Vec g)
      : g_(std::move(g)),
        transcript_(TranscriptHeader{0, static_cast<int>(g_.size()), 1.0, 0.0,
                                     "fixed", 0}) {}
  OracleAnswer ask(const Vec& point, const Query& q) override {
    TranscriptRecord rec{point, q, evaluate_query(q, g_), g_, 0, ""};
    const OracleAnswer ans = rec.answer;
    transcript_.append(std::move(rec));
    return ans;
  }
  const Transcript& transcript() const override { return transcript_; }

 private:
  Vec g_;
  Transcript transcript_;
};

InfBall random_planted(int d, double R, double rho, std::mt19937& rng) {
  std::uniform_real_distribution<double> unif(-(R - rho), R - rho);
  Vec c(d);
  for (int i = 0; i < d; ++i) c[i] = unif(rng);
  return InfBall{c, rho};
}

}  // namespace

TEST_CASE("coordinate reconstruction is exact") {
  FixedNormalOracle oracle(vec({0.5, -1}));
  const auto res = reconstruct_normal(oracle, Vec::Zero(2), QueryMode::kCoord);
  REQUIRE(res.normal.has_value());
  CHECK(*res.normal == vec({0.5, -1}));
  CHECK(res.queries == 2);
}

TEST_CASE("inner reconstruction is exact") {
  FixedNormalOracle oracle(vec({3, 4, 0}));
  const auto res = reconstruct_normal(oracle, Vec::Zero(3), QueryMode::kInner);
  REQUIRE(res.normal.has_value());
  CHECK(*res.normal == vec({3, 4, 0}));
  CHECK(res.queries == 3);
}

TEST_CASE("bit reconstruction is within 2^-B of the normalized normal") {
  FixedNormalOracle oracle(vec({1.0, 0.3}));
  const auto res = reconstruct_normal(oracle, Vec::Zero(2), QueryMode::kBits, 5);
  REQUIRE(res.normal.has_value());
  CHECK(res.queries == 2 * 6);
  CHECK(std::abs((*res.normal)[0] - 1.0) <= std::ldexp(1.0, -5));
  CHECK(std::abs((*res.normal)[1] - 0.3) <= std::ldexp(1.0, -5));
}

TEST_CASE("feasible token short-circuits reconstruction") {
  HonestBallOracle oracle(InfBall{Vec::Zero(3), 0.5}, 1.0);
  const auto res = reconstruct_normal(oracle, Vec::Zero(3), QueryMode::kCoord);
  CHECK_FALSE(res.normal.has_value());
  CHECK(res.queries == 1);
}

TEST_CASE("ellipsoid finds the center immediately when feasible") {
  HonestBallOracle oracle(InfBall{Vec::Zero(4), 0.01}, 1.0);
  const auto report = ellipsoid_solve(oracle, 4, 1.0, 0.01, QueryMode::kCoord);
  CHECK(report.feasible);
  CHECK(report.cut_count == 0);
  CHECK(report.query_count == 1);
}

TEST_CASE("ellipsoid solves planted feasibility instances") {
  std::mt19937 rng(51);
  for (int rep = 0; rep < 10; ++rep) {
    const InfBall planted = random_planted(8, 1.0, 1e-3, rng);
    HonestBallOracle oracle(planted, 1.0);
    const auto report = ellipsoid_solve(oracle, 8, 1.0, 1e-3, QueryMode::kCoord);
    REQUIRE(report.feasible);
    CHECK(planted.contains(*report.point));
    // Coordinate mode spends d queries per cut plus the feasible probe.
    CHECK(report.query_count == 8 * report.cut_count + 1);
    CHECK(report.query_count ==
          static_cast<long>(oracle.transcript().size()));
  }
}

TEST_CASE("exact cuts never sever the planted ball") {
  std::mt19937 rng(52);
  const InfBall planted = random_planted(6, 1.0, 1e-3, rng);
  HonestBallOracle oracle(planted, 1.0);
  const auto report = ellipsoid_solve(oracle, 6, 1.0, 1e-3, QueryMode::kCoord);
  REQUIRE(report.feasible);
  for (const auto& cut : report.cuts)
    CHECK(cut.normal.dot(planted.center) <= cut.offset + 1e-12);
}

TEST_CASE("central cuts shrink volume at the guaranteed rate") {
  std::mt19937 rng(53);
  const InfBall planted = random_planted(8, 1.0, 1e-3, rng);
  HonestBallOracle oracle(planted, 1.0);
  const auto report = ellipsoid_solve(oracle, 8, 1.0, 1e-3, QueryMode::kCoord);
  const double bound = -1.0 / (2.0 * (8 + 1));
  for (double ratio : report.log_volume_ratios) CHECK(ratio <= bound + 1e-6);
}

TEST_CASE("bits mode slack keeps the ball center on the kept side") {
  std::mt19937 rng(54);
  for (int rep = 0; rep < 5; ++rep) {
    const InfBall planted = random_planted(6, 1.0, 1e-3, rng);
    HonestBallOracle coord_oracle(planted, 1.0);
    HonestBallOracle bits_oracle(planted, 1.0);
    const int budget = default_bit_budget(1.0, 6, 1e-3);
    const auto coord = ellipsoid_solve(coord_oracle, 6, 1.0, 1e-3, QueryMode::kCoord);
    const auto bits = ellipsoid_solve(bits_oracle, 6, 1.0, 1e-3, QueryMode::kBits, budget);
    CHECK(coord.feasible == bits.feasible);
    if (bits.feasible) CHECK(planted.contains(*bits.point));
    for (const auto& cut : bits.cuts)
      CHECK(cut.normal.dot(planted.center) <= cut.offset + 1e-12);
  }
}

TEST_CASE("empty instances are reported infeasible by volume") {
  // Oracle for the empty set: always separate with the coordinate of
  // largest magnitude, pushing away from wherever the solver looks.
  class EmptyOracle final : public SeparationOracle {
   public:
    EmptyOracle()
        : transcript_(TranscriptHeader{0, 3, 1.0, 1e-2, "empty", 0}) {}
    OracleAnswer ask(const Vec& point, const Query& q) override {
      Vec g = Vec::Zero(point.size());
      int arg = 0;
      point.cwiseAbs().maxCoeff(&arg);
      g[arg] = point[arg] >= 0 ? 1.0 : -1.0;
      TranscriptRecord rec{point, q, evaluate_query(q, g), g, 0, ""};
      const OracleAnswer ans = rec.answer;
      transcript_.append(std::move(rec));
      return ans;
    }
    const Transcript& transcript() const override { return transcript_; }

   private:
    Transcript transcript_;
  } oracle;
  const auto report = ellipsoid_solve(oracle, 3, 1.0, 1e-2, QueryMode::kCoord);
  CHECK_FALSE(report.feasible);
  CHECK_FALSE(report.capped);
}

TEST_CASE("mixed solve finds the planted fiber") {
  std::mt19937 rng(55);
  const InfBall planted_y = random_planted(3, 1.0, 1e-2, rng);
  HonestMixedOracle oracle(vec({1.0}), planted_y, 1.0);
  const auto report = mixed_solve(oracle, 1, 3, 1.0, 1e-2, QueryMode::kCoord);
  REQUIRE(report.feasible);
  CHECK((*report.point)[0] == 1.0);
  CHECK(oracle.contains(*report.point));
}

TEST_CASE("mixed solve reports empty instances infeasible within the cap") {
  // Empty mixed instance: every point is separated by a hash-picked normal.
  class EmptyMixedOracle final : public SeparationOracle {
   public:
    explicit EmptyMixedOracle(int n, int d)
        : transcript_(TranscriptHeader{n, d, 1.0, 1e-2, "empty", 0}, false) {}
    OracleAnswer ask(const Vec& point, const Query& q) override {
      std::uint64_t h = 1469598103934665603ULL;
      for (Eigen::Index i = 0; i < point.size(); ++i)
        h = (h ^ static_cast<std::uint64_t>(point[i] * 1e6)) * 1099511628211ULL;
      std::mt19937_64 rng(h);
      std::normal_distribution<double> gauss;
      Vec g(point.size());
      for (Eigen::Index i = 0; i < point.size(); ++i) g[i] = gauss(rng);
      g /= g.norm();
      const OracleAnswer ans = evaluate_query(q, g);
      transcript_.append(TranscriptRecord{point, q, ans, g, 0, ""});
      return ans;
    }
    const Transcript& transcript() const override { return transcript_; }

   private:
    Transcript transcript_;
  } oracle(1, 3);
  const auto report = mixed_solve(oracle, 1, 3, 1.0, 1e-2, QueryMode::kCoord);
  CHECK_FALSE(report.feasible);
  const long cap =
      static_cast<long>(std::ceil(10.0 * 9 * std::log(3.0 * 1.0 / 1e-2)));
  CHECK(report.query_count <= 2 * (cap * 3 + 3 + 1) + 1);
}

TEST_CASE("solver report: csv row and final ellipsoid invariants") {
  std::mt19937 rng(56);
  const InfBall planted = random_planted(5, 1.0, 1e-3, rng);
  HonestBallOracle oracle(planted, 1.0);
  const auto report = ellipsoid_solve(oracle, 5, 1.0, 1e-3, QueryMode::kCoord);
  const std::string row = report.csv_row(5, 0, 1.0, 1e-3, QueryMode::kCoord, 1.5);
  CHECK(row.rfind("5,0,1,0.001,coord,feasible,", 0) == 0);
  REQUIRE(report.final_ellipsoid.has_value());
  const auto& shape = report.final_ellipsoid->shape;
  CHECK((shape - shape.transpose()).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(Eigen::LLT<Eigen::MatrixXd>(shape).info() == Eigen::Success);
}

TEST_CASE("reconstruction against the bit adversary reads the committed normal") {
  BitAdversary adv(8, 1.0, 1e-4);
  const auto res =
      reconstruct_normal(adv, Vec(Vec::Constant(8, 0.5)), QueryMode::kCoord);
  REQUIRE(res.normal.has_value());
  // The orthant committed on the second query: smallest coordinate outside
  // J = {0} is 1, with sign +1.
  Vec expected = Vec::Zero(8);
  expected[1] = 1.0;
  CHECK(*res.normal == expected);
  CHECK(res.queries == 8);
}
