#include "lowband/honest_oracle.hpp"

#include <algorithm>
#include <stdexcept>

namespace lowband {

namespace {

Vec clamp_to_ball(const Vec& z, const InfBall& ball) {
  Vec p = ball.center;
  for (Eigen::Index i = 0; i < z.size(); ++i)
    p[i] = std::clamp(z[i], ball.center[i] - ball.radius, ball.center[i] + ball.radius);
  return p;
}

}  // namespace

HonestBallOracle::HonestBallOracle(InfBall planted, double R, std::uint64_t seed,
                                   bool store_records)
    : planted_(std::move(planted)),
      transcript_(TranscriptHeader{0, static_cast<int>(planted_.center.size()), R,
                                   planted_.radius, "honest", seed},
                  store_records) {}

OracleAnswer HonestBallOracle::ask(const Vec& point, const Query& q) {
  TranscriptRecord rec;
  rec.point = point;
  rec.query = q;
  Vec g;
  if (planted_.contains(point)) {
    g = Vec::Zero(point.size());
    rec.tag = "feasible";
  } else {
    g = point - clamp_to_ball(point, planted_);
    rec.tag = "cut";
  }
  rec.answer = evaluate_query(q, g);
  rec.realized_normal = g;
  const OracleAnswer ans = rec.answer;
  transcript_.append(std::move(rec));
  return ans;
}

HonestMixedOracle::HonestMixedOracle(Vec fiber, InfBall planted_y, double R,
                                     std::uint64_t seed, bool store_records)
    : fiber_(std::move(fiber)),
      planted_y_(std::move(planted_y)),
      transcript_(TranscriptHeader{static_cast<int>(fiber_.size()),
                                   static_cast<int>(planted_y_.center.size()), R,
                                   planted_y_.radius, "honest", seed},
                  store_records) {}

bool HonestMixedOracle::contains(const Vec& point) const {
  const int n = static_cast<int>(fiber_.size());
  if ((point.head(n) - fiber_).lpNorm<Eigen::Infinity>() != 0.0) return false;
  return planted_y_.contains(point.tail(point.size() - n));
}

OracleAnswer HonestMixedOracle::ask(const Vec& point, const Query& q) {
  const int n = static_cast<int>(fiber_.size());
  if (point.size() != n + planted_y_.center.size())
    throw std::invalid_argument("query point dimension mismatch");
  TranscriptRecord rec;
  rec.point = point;
  rec.query = q;
  Vec g;
  if (contains(point)) {
    g = Vec::Zero(point.size());
    rec.tag = "feasible";
  } else {
    g = point;
    g.head(n) -= fiber_;
    g.tail(point.size() - n) =
        point.tail(point.size() - n) -
        clamp_to_ball(point.tail(point.size() - n), planted_y_);
    rec.tag = "cut";
  }
  rec.answer = evaluate_query(q, g);
  rec.realized_normal = g;
  const OracleAnswer ans = rec.answer;
  transcript_.append(std::move(rec));
  return ans;
}

}  // namespace lowband
