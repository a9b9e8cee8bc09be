#include "lowband/oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace lowband;

namespace {

Vec vec(std::initializer_list<double> vals) {
  Vec v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("bit encoding basics") {
  CHECK(bit_of(0.5, 1) == 1);
  CHECK(bit_of(0.5, 2) == 0);
  CHECK(bit_of(-0.25, 0) == 1);
  CHECK(bit_of(-0.25, 1) == 0);
  CHECK(bit_of(-0.25, 2) == 1);
  // 0.3 = 0.01001...
  const int expected[] = {0, 1, 0, 0, 1};
  std::vector<int> bits{bit_of(0.3, 0)};
  for (int i = 1; i <= 5; ++i) {
    CHECK(bit_of(0.3, i) == expected[i - 1]);
    bits.push_back(bit_of(0.3, i));
  }
  CHECK(std::abs(0.3 - reconstruct_bits(bits)) <= std::ldexp(1.0, -5));
  CHECK_THROWS_WITH_AS(bit_of(1.5, 1), "unnormalized coordinate",
                       std::invalid_argument);
}

TEST_CASE("bit round trip within 2^-B") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int rep = 0; rep < 300; ++rep) {
    const double x = rep == 0 ? 1.0 : (rep == 1 ? -1.0 : unif(rng));
    for (int budget : {1, 3, 8, 20}) {
      std::vector<int> bits;
      for (int i = 0; i <= budget; ++i) bits.push_back(bit_of(x, i));
      CHECK(std::abs(x - reconstruct_bits(bits)) <= std::ldexp(1.0, -budget));
    }
  }
}

TEST_CASE("query evaluation against a fixed map") {
  CHECK(evaluate_query(Query::Coord(0), vec({0.5, -1})) ==
        OracleAnswer::Value(0.5));
  CHECK(evaluate_query(Query::SignInner(vec({1, 1})), vec({1, -2})) ==
        OracleAnswer::BitVal(0));
  CHECK(evaluate_query(Query::Inner(vec({0, 1, 0})), vec({3, 4, 0})) ==
        OracleAnswer::Value(4));
  CHECK(evaluate_query(Query::Coord(1), Vec::Zero(3)) == OracleAnswer::Feasible());
  // Bit queries address the l-inf normalized normal: (0.5,-1) -> (-0.5, 1)
  // after flipping? No: normalization only scales, so coord 0 is 0.5/1 = 0.5.
  CHECK(evaluate_query(Query::Bit(1, 0), vec({0.5, -1})) == OracleAnswer::BitVal(1));
  CHECK(evaluate_query(Query::Bit(0, 1), vec({0.5, -1})) == OracleAnswer::BitVal(1));
  CHECK_THROWS_AS(evaluate_query(Query::Coord(5), vec({1, 2})), std::out_of_range);
}

TEST_CASE("transcript jsonl round trip and replay") {
  Transcript t(TranscriptHeader{0, 2, 1.0, 0.01, "bit", 42});
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    Vec g = vec({unif(rng), unif(rng)});
    if (g.lpNorm<Eigen::Infinity>() == 0.0) g[0] = 0.25;
    TranscriptRecord rec;
    rec.point = vec({unif(rng), unif(rng)});
    rec.query = i % 3 == 0 ? Query::Coord(i % 2)
                           : (i % 3 == 1 ? Query::Bit(i % 5, i % 2)
                                         : Query::Inner(vec({1.0, 0.5})));
    rec.answer = evaluate_query(rec.query, g);
    rec.realized_normal = g;
    rec.level = i / 7;
    rec.tag = "t" + std::to_string(i);
    t.append(std::move(rec));
  }

  std::stringstream ss;
  t.write_jsonl(ss);
  Transcript back = Transcript::read_jsonl(ss);
  REQUIRE(back.size() == t.size());
  CHECK(back.header().seed == 42);
  for (std::size_t i = 0; i < back.records().size(); ++i) {
    const auto& rec = back.records()[i];
    REQUIRE(rec.realized_normal.has_value());
    // Replay: re-evaluating every realized record reproduces its answer.
    CHECK(evaluate_query(rec.query, *rec.realized_normal) == rec.answer);
    CHECK(rec.point == t.records()[i].point);
  }

  // Determinism of the byte encoding itself.
  std::stringstream ss2;
  back.write_jsonl(ss2);
  std::stringstream ss3;
  t.write_jsonl(ss3);
  CHECK(ss2.str() == ss3.str());
}

TEST_CASE("realized normals are set-once") {
  Transcript t(TranscriptHeader{0, 1, 1.0, 0.1, "bit", 0});
  TranscriptRecord rec;
  rec.point = vec({0.5});
  rec.query = Query::Coord(0);
  rec.answer = OracleAnswer::Value(0.0);
  const std::size_t idx = t.append(std::move(rec));
  t.resolve_normal(idx, vec({1.0}));
  CHECK_THROWS_AS(t.resolve_normal(idx, vec({-1.0})), std::logic_error);
}
