#include "lowband/verifier.hpp"

#include "lowband/mixed_lift.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lowband {

std::string to_string(ViolationReport::Kind kind) {
  switch (kind) {
    case ViolationReport::Kind::kAnswerMismatch:
      return "answer-mismatch";
    case ViolationReport::Kind::kNonSeparating:
      return "non-separating";
    case ViolationReport::Kind::kFeasibleOutside:
      return "feasible-outside";
    case ViolationReport::Kind::kPendingUnresolved:
      return "pending-unresolved";
  }
  return "unknown";
}

namespace {

bool answers_match(const OracleAnswer& recorded, const OracleAnswer& expected,
                   const Query& q, const Vec& normal, double tol) {
  if (recorded == expected) return true;
  if (recorded.kind == OracleAnswer::Kind::kValue &&
      expected.kind == OracleAnswer::Kind::kValue)
    return std::abs(recorded.value - expected.value) <= tol;
  // A sign query whose inner product sits within tol of zero may land on
  // either bit; the committed zero answers are zero only to rounding.
  if (q.kind == QueryKind::kSignInner &&
      recorded.kind == OracleAnswer::Kind::kBit &&
      expected.kind == OracleAnswer::Kind::kBit)
    return std::abs(q.direction.dot(normal)) <= tol;
  return false;
}

}  // namespace

std::optional<ViolationReport> check_record(const TranscriptRecord& rec,
                                            std::size_t index,
                                            const WitnessSet& w, double tol) {
  if (rec.answer.kind == OracleAnswer::Kind::kFeasible) {
    if (!w.contains(rec.point, tol))
      return ViolationReport{index, ViolationReport::Kind::kFeasibleOutside,
                             "feasible-reported point outside the instance"};
    return std::nullopt;
  }
  if (!rec.realized_normal)
    return ViolationReport{index, ViolationReport::Kind::kPendingUnresolved,
                           "record has no realized normal"};
  const Vec& a = *rec.realized_normal;
  if (a.lpNorm<Eigen::Infinity>() == 0.0)
    return ViolationReport{index, ViolationReport::Kind::kPendingUnresolved,
                           "zero realized normal on a separating answer"};
  const OracleAnswer expected = evaluate_query(rec.query, a);
  if (!answers_match(rec.answer, expected, rec.query, a, tol)) {
    std::ostringstream os;
    os << "stored answer does not match the realized map";
    return ViolationReport{index, ViolationReport::Kind::kAnswerMismatch, os.str()};
  }
  if (!separates_strictly(a, rec.point, w, tol))
    return ViolationReport{index, ViolationReport::Kind::kNonSeparating,
                           "realized normal fails to separate the instance"};
  return std::nullopt;
}

std::vector<ViolationReport> check_transcript(const Transcript& t,
                                              const WitnessSet& w, double tol) {
  std::vector<ViolationReport> out;
  const auto& records = t.records();
  for (std::size_t i = 0; i < records.size(); ++i)
    if (auto v = check_record(records[i], i, w, tol)) out.push_back(std::move(*v));
  return out;
}

bool certify_disjoint(const WitnessSet& w1, const WitnessSet& w2) {
  if (w1.int_dims != w2.int_dims || w1.dim() != w2.dim())
    throw std::invalid_argument("witness dimension mismatch");
  const int n = w1.int_dims;
  if (n > 0) {
    for (const Vec& g : w1.generators)
      if (classify_fiber(g.head(n)) != FiberClass::kFractional) return false;
    for (const Vec& g : w2.generators)
      if (classify_fiber(g.head(n)) != FiberClass::kFractional) return false;
  }
  const Vec c1 = w1.ball.center, c2 = w2.ball.center;
  if (n > 0 && (c1.head(n) - c2.head(n)).lpNorm<Eigen::Infinity>() > 0.0)
    return true;  // different fibers
  return (c1 - c2).lpNorm<Eigen::Infinity>() > w1.ball.radius + w2.ball.radius;
}

SurvivalReport survival_report(const BitLevelSnapshot& level, double tol) {
  const int d = static_cast<int>(level.anchor.size());
  if (d > 12)
    throw std::invalid_argument("orthant enumeration capped at d = 12");

  SurvivalReport report;
  std::vector<int> label(static_cast<std::size_t>(d));
  for (long mask = 0; mask < (1L << d); ++mask) {
    for (int i = 0; i < d; ++i)
      label[static_cast<std::size_t>(i)] = (mask >> i) & 1 ? +1 : -1;
    if (orthant_survives(label, level, tol)) {
      ++report.survivors;
      continue;
    }
    // Classify the elimination: committed-normal separation failures take
    // precedence over pending zero-answer eliminations.
    bool by_commit = false;
    for (const auto& o : level.orthants) {
      if (!o.commit) continue;
      const int i = o.commit->first;
      if (label[static_cast<std::size_t>(i)] == o.commit->second) {
        by_commit = true;
        break;
      }
    }
    if (by_commit)
      ++report.eliminated_by_commit;
    else
      ++report.eliminated_by_zeros;
  }
  return report;
}

}  // namespace lowband
