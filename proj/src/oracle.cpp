#include "lowband/oracle.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace lowband {

using nlohmann::json;

Query Query::Coord(int j) {
  Query q;
  q.kind = QueryKind::kCoord;
  q.coord = j;
  return q;
}

Query Query::Bit(int i, int j) {
  Query q;
  q.kind = QueryKind::kBit;
  q.bit_index = i;
  q.coord = j;
  return q;
}

Query Query::Inner(Vec v) {
  if (!v.allFinite() || v.lpNorm<Eigen::Infinity>() == 0.0)
    throw std::invalid_argument("inner query direction must be finite and nonzero");
  Query q;
  q.kind = QueryKind::kInner;
  q.direction = std::move(v);
  return q;
}

Query Query::SignInner(Vec v) {
  if (!v.allFinite() || v.lpNorm<Eigen::Infinity>() == 0.0)
    throw std::invalid_argument("inner query direction must be finite and nonzero");
  Query q;
  q.kind = QueryKind::kSignInner;
  q.direction = std::move(v);
  return q;
}

int bit_of(double x, int i) {
  if (!(std::abs(x) <= 1.0)) throw std::invalid_argument("unnormalized coordinate");
  if (i < 0) throw std::out_of_range("bit index must be nonnegative");
  if (i == 0) return x < 0.0 ? 1 : 0;
  const double a = std::abs(x);
  if (a == 1.0) return 1;  // 1 = 0.111..., truncated representation
  const double scaled = std::floor(std::ldexp(a, i));
  return static_cast<int>(std::fmod(scaled, 2.0));
}

double reconstruct_bits(const std::vector<int>& bits) {
  if (bits.empty()) return 0.0;
  double mag = 0.0;
  for (std::size_t i = 1; i < bits.size(); ++i)
    if (bits[i]) mag += std::ldexp(1.0, -static_cast<int>(i));
  return bits[0] ? -mag : mag;
}

OracleAnswer evaluate_query(const Query& q, const Vec& g) {
  const double gmax = g.lpNorm<Eigen::Infinity>();
  if (gmax == 0.0) return OracleAnswer::Feasible();
  switch (q.kind) {
    case QueryKind::kCoord:
      if (q.coord < 0 || q.coord >= g.size())
        throw std::out_of_range("coordinate query index out of range");
      return OracleAnswer::Value(g[q.coord]);
    case QueryKind::kBit:
      if (q.coord < 0 || q.coord >= g.size())
        throw std::out_of_range("bit query coordinate out of range");
      return OracleAnswer::BitVal(bit_of(g[q.coord] / gmax, q.bit_index));
    case QueryKind::kInner:
      if (q.direction.size() != g.size())
        throw std::out_of_range("inner query dimension mismatch");
      return OracleAnswer::Value(q.direction.dot(g));
    case QueryKind::kSignInner:
      if (q.direction.size() != g.size())
        throw std::out_of_range("inner query dimension mismatch");
      return OracleAnswer::BitVal(q.direction.dot(g) > 0.0 ? 1 : 0);
  }
  throw std::logic_error("unreachable query kind");
}

std::size_t Transcript::append(TranscriptRecord rec) {
  if (header_.n + header_.d > 0 &&
      rec.point.size() != header_.n + header_.d)
    throw std::invalid_argument("record dimension differs from the transcript's");
  ++count_;
  if (store_) records_.push_back(std::move(rec));
  return count_ - 1;
}

void Transcript::resolve_normal(std::size_t index, const Vec& normal) {
  if (!store_) return;
  if (index >= records_.size()) throw std::out_of_range("transcript index");
  auto& slot = records_[index].realized_normal;
  if (slot.has_value()) throw std::logic_error("realized normal already set");
  slot = normal;
}

namespace {

json vec_to_json(const Vec& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vec vec_from_json(const json& arr) {
  Vec v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return v;
}

json query_to_json(const Query& q) {
  switch (q.kind) {
    case QueryKind::kCoord:
      return {{"kind", "coord"}, {"j", q.coord}};
    case QueryKind::kBit:
      return {{"kind", "bit"}, {"i", q.bit_index}, {"j", q.coord}};
    case QueryKind::kInner:
      return {{"kind", "inner"}, {"v", vec_to_json(q.direction)}};
    case QueryKind::kSignInner:
      return {{"kind", "sign_inner"}, {"v", vec_to_json(q.direction)}};
  }
  throw std::logic_error("unreachable query kind");
}

Query query_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "coord") return Query::Coord(j.at("j").get<int>());
  if (kind == "bit") return Query::Bit(j.at("i").get<int>(), j.at("j").get<int>());
  if (kind == "inner") return Query::Inner(vec_from_json(j.at("v")));
  if (kind == "sign_inner") return Query::SignInner(vec_from_json(j.at("v")));
  throw std::invalid_argument("unknown query kind: " + kind);
}

json answer_to_json(const OracleAnswer& a) {
  switch (a.kind) {
    case OracleAnswer::Kind::kFeasible:
      return {{"kind", "feasible"}};
    case OracleAnswer::Kind::kValue:
      return {{"kind", "value"}, {"value", a.value}};
    case OracleAnswer::Kind::kBit:
      return {{"kind", "bitval"}, {"value", a.bit}};
  }
  throw std::logic_error("unreachable answer kind");
}

OracleAnswer answer_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "feasible") return OracleAnswer::Feasible();
  if (kind == "value") return OracleAnswer::Value(j.at("value").get<double>());
  if (kind == "bitval") return OracleAnswer::BitVal(j.at("value").get<int>());
  throw std::invalid_argument("unknown answer kind: " + kind);
}

}  // namespace

void Transcript::write_jsonl(std::ostream& os) const {
  json header = {{"n", header_.n},     {"d", header_.d},
                 {"R", header_.R},     {"rho", header_.rho},
                 {"adversary", header_.adversary}, {"seed", header_.seed}};
  os << header.dump() << '\n';
  for (const auto& rec : records_) {
    json line = {{"point", vec_to_json(rec.point)},
                 {"query", query_to_json(rec.query)},
                 {"answer", answer_to_json(rec.answer)},
                 {"realized_normal",
                  rec.realized_normal ? vec_to_json(*rec.realized_normal) : json()},
                 {"level", rec.level},
                 {"tag", rec.tag}};
    os << line.dump() << '\n';
  }
}

Transcript Transcript::read_jsonl(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("empty transcript stream");
  json header = json::parse(line);
  TranscriptHeader h;
  h.n = header.at("n").get<int>();
  h.d = header.at("d").get<int>();
  h.R = header.at("R").get<double>();
  h.rho = header.at("rho").get<double>();
  h.adversary = header.at("adversary").get<std::string>();
  h.seed = header.at("seed").get<std::uint64_t>();
  Transcript t(h);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    TranscriptRecord rec;
    rec.point = vec_from_json(j.at("point"));
    rec.query = query_from_json(j.at("query"));
    rec.answer = answer_from_json(j.at("answer"));
    if (!j.at("realized_normal").is_null())
      rec.realized_normal = vec_from_json(j.at("realized_normal"));
    rec.level = j.at("level").get<int>();
    rec.tag = j.at("tag").get<std::string>();
    t.append(std::move(rec));
  }
  return t;
}

}  // namespace lowband
