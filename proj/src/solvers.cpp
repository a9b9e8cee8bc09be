#include "lowband/solvers.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lowband {

std::string to_string(QueryMode mode) {
  switch (mode) {
    case QueryMode::kCoord:
      return "coord";
    case QueryMode::kBits:
      return "bits";
    case QueryMode::kInner:
      return "inner";
  }
  return "?";
}

int default_bit_budget(double R, int d, double rho) {
  return static_cast<int>(std::ceil(std::log2(4.0 * R * d / rho)));
}

namespace {

Vec unit_vec(int dim, int j) {
  Vec v = Vec::Zero(dim);
  v[j] = 1.0;
  return v;
}

/// One coordinate of the normal at `point` through the chosen query family.
/// Sets res.token (and returns 0) when the oracle reports feasibility.
double read_coordinate(SeparationOracle& oracle, const Vec& point, int j,
                       QueryMode mode, int bits, ReconstructResult& res) {
  if (mode == QueryMode::kBits) {
    if (bits < 1) throw std::invalid_argument("bits mode needs B >= 1");
    std::vector<int> read(static_cast<std::size_t>(bits) + 1, 0);
    for (int i = 0; i <= bits; ++i) {
      const OracleAnswer a = oracle.ask(point, Query::Bit(i, j));
      ++res.queries;
      if (a.kind == OracleAnswer::Kind::kFeasible) {
        res.token = true;
        return 0.0;
      }
      read[static_cast<std::size_t>(i)] = a.bit;
    }
    return reconstruct_bits(read);
  }
  const Query q = mode == QueryMode::kCoord
                      ? Query::Coord(j)
                      : Query::Inner(unit_vec(static_cast<int>(point.size()), j));
  const OracleAnswer a = oracle.ask(point, q);
  ++res.queries;
  if (a.kind == OracleAnswer::Kind::kFeasible) {
    res.token = true;
    return 0.0;
  }
  return a.value;
}

}  // namespace

ReconstructResult reconstruct_normal(SeparationOracle& oracle, const Vec& point,
                                     QueryMode mode, int bits) {
  const int d = static_cast<int>(point.size());
  ReconstructResult res;
  Vec g = Vec::Zero(d);
  for (int j = 0; j < d; ++j) {
    const double value = read_coordinate(oracle, point, j, mode, bits, res);
    if (res.token) return res;
    g[j] = value;
  }
  if (g.lpNorm<Eigen::Infinity>() == 0.0) return res;  // zero-map convention
  res.normal = std::move(g);
  return res;
}

std::string SolverReport::csv_row(int d, int n, double R, double rho,
                                  QueryMode mode, double wallclock_ms) const {
  std::ostringstream os;
  os << d << ',' << n << ',' << R << ',' << rho << ',' << to_string(mode) << ','
     << (feasible ? "feasible" : (capped ? "infeasible(cap)" : "infeasible")) << ','
     << query_count << ',' << cut_count << ',' << wallclock_ms;
  return os.str();
}

namespace {

struct EllipsoidState {
  Vec center;
  Eigen::MatrixXd shape;
  double log_det;  // ln det(shape)

  explicit EllipsoidState(int d, double R)
      : center(Vec::Zero(d)),
        shape(Eigen::MatrixXd::Identity(d, d) * (R * R * d)),
        log_det(d * std::log(R * R * d)) {}

  /// Rank-one updates slowly decouple the tracked determinant from the
  /// matrix; refresh it from a factorization and restore definiteness.
  void refresh() {
    const int d = static_cast<int>(center.size());
    shape = 0.5 * (shape + shape.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(shape);
    if (llt.info() == Eigen::Success) {
      log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
      return;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(shape);
    Vec values = eig.eigenvalues();
    const double cap = values.cwiseAbs().maxCoeff();
    for (int i = 0; i < d; ++i)
      values[i] = std::isfinite(values[i]) ? std::max(values[i], 1e-14 * cap)
                                           : 1e-14 * cap;
    shape = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
    log_det = values.array().log().sum();
  }
};

double unit_ball_log_volume(int d) {
  return 0.5 * d * std::log(M_PI) - std::lgamma(0.5 * d + 1.0);
}

/// Standard shallow/central cut update for <g, z> <= <g, c> + slack.
/// Returns ln(vol'/vol); mutates the state in place. `t` is clamped away
/// from -1/d so the ellipsoid always shrinks.
double ellipsoid_cut(EllipsoidState& e, const Vec& g, double slack) {
  const int d = static_cast<int>(e.center.size());
  Vec Ag = e.shape * g;
  double gAg = g.dot(Ag);
  if (!(gAg > 0.0)) {
    e.refresh();
    Ag = e.shape * g;
    gAg = g.dot(Ag);
    if (!(gAg > 0.0)) throw std::runtime_error("ellipsoid lost positive definiteness");
  }
  const double norm = std::sqrt(gAg);
  double t = -slack / norm;
  t = std::max(t, -0.45 / d);

  if (d == 1) {
    // Interval special case: intersect [c - r, c + r] with the halfline.
    const double r = std::sqrt(e.shape(0, 0));
    const double offset = std::min(slack / std::abs(g[0]), 0.45 * r);
    double lo = e.center[0] - r;
    double hi = e.center[0] + r;
    if (g[0] > 0)
      hi = e.center[0] + offset;
    else
      lo = e.center[0] - offset;
    const double half = 0.5 * (hi - lo);
    e.center[0] = 0.5 * (hi + lo);
    e.shape(0, 0) = half * half;
    e.log_det = std::log(e.shape(0, 0));
    return std::log(half / r);
  }

  const double tau = (1.0 + d * t) / (d + 1.0);
  const double sigma = 2.0 * (1.0 + d * t) / ((d + 1.0) * (1.0 + t));
  const double delta = (double(d) * d / (double(d) * d - 1.0)) * (1.0 - t * t);

  e.center -= (tau / norm) * Ag;
  e.shape = delta * (e.shape - (sigma / gAg) * (Ag * Ag.transpose()));
  e.shape = 0.5 * (e.shape + e.shape.transpose());
  const double ratio = 0.5 * (d * std::log(delta) + std::log1p(-sigma));
  e.log_det += d * std::log(delta) + std::log1p(-sigma);
  return ratio;
}

struct SubSolveConfig {
  int d = 0;
  double R = 1.0;
  double rho = 1e-3;
  QueryMode mode = QueryMode::kCoord;
  int bits = 0;
};

/// Core loop shared by the continuous solver and the per-fiber slices.
/// `probe` maps a candidate center to a reconstruction result.
SolverReport ellipsoid_core(
    const SubSolveConfig& cfg,
    const std::function<ReconstructResult(const Vec&)>& probe) {
  const int d = cfg.d;
  SolverReport report;
  EllipsoidState e(d, cfg.R);
  const double stop_log_volume = d * std::log(2.0 * cfg.rho);
  const double slack = cfg.mode == QueryMode::kBits
                           ? std::ldexp(2.0 * cfg.R * std::sqrt(double(d)), -cfg.bits)
                           : 0.0;
  const long cap = static_cast<long>(
      std::ceil(10.0 * d * d * std::log(double(d) * cfg.R / cfg.rho)));

  bool done = false;
  for (long iter = 0; iter < cap && !done; ++iter) {
    ReconstructResult res = probe(e.center);
    report.query_count += res.queries;
    if (res.abort_region) {  // no cut in this block can help
      done = true;
      break;
    }
    if (!res.normal) {
      report.feasible = true;
      report.point = e.center;
      done = true;
      break;
    }
    const Vec& g = *res.normal;
    report.cuts.push_back(Halfspace{g, g.dot(e.center) + slack});
    ++report.cut_count;
    report.log_volume_ratios.push_back(ellipsoid_cut(e, g, slack));
    if (report.cut_count % 32 == 0) e.refresh();
    const double log_volume = unit_ball_log_volume(d) + 0.5 * e.log_det;
    if (log_volume < stop_log_volume) done = true;
  }
  report.capped = !done;
  report.final_ellipsoid = Ellipsoid{e.center, e.shape};
  return report;
}

}  // namespace

SolverReport ellipsoid_solve(SeparationOracle& oracle, int d, double R,
                             double rho, QueryMode mode, int bits) {
  if (!(R > rho) || !(rho > 0.0))
    throw std::invalid_argument("ellipsoid_solve needs R > rho > 0");
  if (mode == QueryMode::kBits && bits < 1) bits = default_bit_budget(R, d, rho);
  SubSolveConfig cfg{d, R, rho, mode, bits};
  const long before = static_cast<long>(oracle.transcript().size());
  SolverReport report = ellipsoid_core(cfg, [&](const Vec& center) {
    return reconstruct_normal(oracle, center, mode, bits);
  });
  report.oracle_kind = oracle.transcript().header().adversary;
  report.query_count = static_cast<long>(oracle.transcript().size()) - before;
  return report;
}

SolverReport mixed_solve(SeparationOracle& oracle, int n, int d, double R,
                         double rho, QueryMode mode, int bits) {
  if (n < 1) throw std::invalid_argument("mixed_solve needs n >= 1");
  if (n > 3) throw std::invalid_argument("mixed_solve enumerates fibers for n <= 3");
  if (mode == QueryMode::kBits && bits < 1) bits = default_bit_budget(R, d, rho);
  const long before = static_cast<long>(oracle.transcript().size());

  SolverReport total;
  total.oracle_kind = oracle.transcript().header().adversary;

  // One fractional interior probe of the unit cell; its answer (feasible or
  // a separator) is informational only since the point is not integral.
  {
    Vec probe(n + d);
    probe.head(n).setConstant(0.5);
    probe.tail(d).setZero();
    const Query q = mode == QueryMode::kInner
                        ? Query::Inner(unit_vec(n + d, n))
                        : (mode == QueryMode::kBits ? Query::Bit(0, n)
                                                    : Query::Coord(n));
    oracle.ask(probe, q);
  }

  for (long mask = 0; mask < (1L << n) && !total.feasible; ++mask) {
    Vec fiber(n);
    for (int i = 0; i < n; ++i) fiber[i] = (mask >> (n - 1 - i)) & 1 ? 1.0 : 0.0;
    SubSolveConfig cfg{d, R, rho, mode, bits};
    SolverReport sub = ellipsoid_core(cfg, [&](const Vec& y) {
      Vec full(n + d);
      full.head(n) = fiber;
      full.tail(d) = y;
      ReconstructResult res;
      Vec g = Vec::Zero(d);
      for (int j = 0; j < d; ++j) {
        const double value = read_coordinate(oracle, full, n + j, mode, bits, res);
        if (res.token) return res;
        g[j] = value;
      }
      if (g.lpNorm<Eigen::Infinity>() > 0.0) {
        res.normal = std::move(g);
        return res;
      }
      // All continuous reads are zero: the separator lives in the integer
      // block, which no y-cut can act on. Probe it to tell this apart from
      // a genuinely zero map.
      for (int j = 0; j < n; ++j) {
        const double value = read_coordinate(oracle, full, j, mode, bits, res);
        if (res.token) return res;
        if (value != 0.0) {
          res.abort_region = true;  // the whole fiber is cut off
          return res;
        }
      }
      return res;  // zero map convention: report feasible
    });
    total.cut_count += sub.cut_count;
    total.capped = total.capped || sub.capped;
    if (sub.feasible) {
      total.feasible = true;
      Vec full(n + d);
      full.head(n) = fiber;
      full.tail(d) = *sub.point;
      total.point = full;
    }
  }
  total.query_count = static_cast<long>(oracle.transcript().size()) - before;
  return total;
}

}  // namespace lowband
