#pragma once

#include "lowband/oracle.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace lowband {

enum class QueryMode { kCoord, kBits, kInner };

std::string to_string(QueryMode mode);

/// Smallest bit budget keeping the reconstruction slack below rho/2.
int default_bit_budget(double R, int d, double rho);

struct ReconstructResult {
  std::optional<Vec> normal;  // nullopt: feasible signal (or all-zero reads)
  long queries = 0;
  bool token = false;         // the distinguished Feasible answer was seen
  bool abort_region = false;  // slice solving: the separator lies outside the
                              // probed block, so no y-cut can help this fiber
};

/// Pull a separator normal out of the oracle at `point` using the chosen
/// low-bandwidth query family. Coord/Inner recover it exactly in d queries;
/// Bits recovers the l-inf normalized normal to 2^-B per coordinate in
/// d*(B+1) queries. An all-zero read without a Feasible token is treated as
/// feasible, matching the zero-map convention.
ReconstructResult reconstruct_normal(SeparationOracle& oracle, const Vec& point,
                                     QueryMode mode, int bits = 0);

struct Ellipsoid {
  Vec center;
  Eigen::MatrixXd shape;  // symmetric positive definite
};

struct SolverReport {
  bool feasible = false;
  std::optional<Vec> point;
  long query_count = 0;
  long cut_count = 0;
  std::string oracle_kind;
  bool capped = false;
  std::vector<Halfspace> cuts;
  std::vector<double> log_volume_ratios;  // per-cut ln(vol'/vol)
  std::optional<Ellipsoid> final_ellipsoid;

  std::string csv_row(int d, int n, double R, double rho, QueryMode mode,
                      double wallclock_ms) const;
};

/// Cutting-plane feasibility baseline: query the ellipsoid center, cut with
/// the reconstructed normal (slack 2^-B * 2R sqrt(d) in Bits mode), shrink
/// by the standard central/shallow-cut update, and declare infeasibility
/// once the volume drops below that of a rho-ball.
SolverReport ellipsoid_solve(SeparationOracle& oracle, int d, double R,
                             double rho, QueryMode mode, int bits = 0);

/// Fiber enumeration over {0,1}^n with a per-fiber ellipsoid sweep plus one
/// fractional interior probe of the unit cell.
SolverReport mixed_solve(SeparationOracle& oracle, int n, int d, double R,
                         double rho, QueryMode mode, int bits = 0);

}  // namespace lowband
