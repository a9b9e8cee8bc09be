#pragma once

#include "lowband/geometry.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lowband {

enum class QueryKind { kCoord, kBit, kInner, kSignInner };

/// A permissible query: which piece of the first-order map's output the
/// algorithm asks for at a point.
struct Query {
  QueryKind kind = QueryKind::kCoord;
  int bit_index = -1;  // bit queries only
  int coord = -1;      // coord/bit queries only
  Vec direction;       // inner/sign-inner queries only

  static Query Coord(int j);
  static Query Bit(int i, int j);
  static Query Inner(Vec v);
  static Query SignInner(Vec v);
};

/// Oracle output. Feasible is a distinguished token (the zero map output),
/// never conflated with a numeric zero.
struct OracleAnswer {
  enum class Kind { kFeasible, kValue, kBit };
  Kind kind = Kind::kFeasible;
  double value = 0.0;
  int bit = 0;

  static OracleAnswer Feasible() { return {Kind::kFeasible, 0.0, 0}; }
  static OracleAnswer Value(double v) { return {Kind::kValue, v, 0}; }
  static OracleAnswer BitVal(int b) { return {Kind::kBit, 0.0, b}; }

  bool operator==(const OracleAnswer& o) const {
    if (kind != o.kind) return false;
    if (kind == Kind::kValue) return value == o.value;
    if (kind == Kind::kBit) return bit == o.bit;
    return true;
  }
};

/// Fixed-point sign-magnitude encoding of x in [-1, 1]. Index 0 is the sign
/// bit (1 iff x < 0); index i >= 1 is the i-th binary digit of |x| after the
/// radix point, truncated. |x| = 1 encodes as all ones so that the
/// reconstruction error stays within 2^-B. Throws "unnormalized coordinate"
/// when |x| > 1.
int bit_of(double x, int i);

/// Inverse of bit_of over a prefix: bits[0] is the sign bit, bits[1..B] the
/// magnitude digits. |x - reconstruct| <= 2^-B.
double reconstruct_bits(const std::vector<int>& bits);

/// q(g) per the query/answer contract. A zero map output is Feasible
/// regardless of the query. Bit queries address the l-inf normalized normal.
OracleAnswer evaluate_query(const Query& q, const Vec& g);

struct TranscriptRecord {
  Vec point;
  Query query;
  OracleAnswer answer;
  std::optional<Vec> realized_normal;  // zero vector for Feasible answers
  int level = 0;
  std::string tag;
};

struct TranscriptHeader {
  int n = 0;
  int d = 0;
  double R = 1.0;
  double rho = 0.0;
  std::string adversary;
  std::uint64_t seed = 0;
};

/// Append-only query/response log. Realized normals may be set once, later,
/// when an adversary resolves its pending answers.
class Transcript {
 public:
  explicit Transcript(TranscriptHeader header, bool store_records = true)
      : header_(std::move(header)), store_(store_records) {}

  std::size_t append(TranscriptRecord rec);
  void resolve_normal(std::size_t index, const Vec& normal);

  const TranscriptHeader& header() const { return header_; }
  const std::vector<TranscriptRecord>& records() const { return records_; }
  std::size_t size() const { return count_; }
  bool stores_records() const { return store_; }

  void write_jsonl(std::ostream& os) const;
  static Transcript read_jsonl(std::istream& is);

 private:
  TranscriptHeader header_;
  bool store_ = true;
  std::size_t count_ = 0;
  std::vector<TranscriptRecord> records_;
};

/// Everything the solvers talk to: adversaries and honest oracles alike.
class SeparationOracle {
 public:
  virtual ~SeparationOracle() = default;
  virtual OracleAnswer ask(const Vec& point, const Query& q) = 0;
  virtual const Transcript& transcript() const = 0;
};

}  // namespace lowband
