#include "lowband/harness.hpp"

#include "lowband/honest_oracle.hpp"
#include "lowband/mixed_lift.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace lowband {

using nlohmann::json;

void DuelConfig::validate() const {
  if (n < 0 || n > 3) throw std::invalid_argument("need 0 <= n <= 3");
  if (adversary == AdversaryKind::kBit) {
    if (d < 1) throw std::invalid_argument("bit adversary needs d >= 1");
    if (!(rho > 0.0) || !(rho < R / 2.0))
      throw std::invalid_argument("bit adversary needs 0 < rho < R/2");
    if (mode == QueryMode::kInner)
      throw std::invalid_argument("bit adversary answers coord/bit queries only");
  } else {
    if (d < 2) throw std::invalid_argument("inner-product adversary needs d >= 2");
    if (!(rho > 0.0) || !(rho < R / (4.0 * d)))
      throw std::invalid_argument("inner-product adversary needs 0 < rho < R/(4d)");
    if (mode != QueryMode::kInner)
      throw std::invalid_argument("inner-product adversary answers inner queries only");
  }
  if (!(R > 0.0)) throw std::invalid_argument("need R > 0");
  if (mode == QueryMode::kBits && bits < 0)
    throw std::invalid_argument("bits budget must be nonnegative");
}

namespace {

/// Stops the solver at the certification point by throwing.
struct QueryBudgetExhausted {};

class BudgetedOracle final : public SeparationOracle {
 public:
  BudgetedOracle(SeparationOracle& inner, long budget)
      : inner_(inner), remaining_(budget) {}

  OracleAnswer ask(const Vec& point, const Query& q) override {
    if (remaining_ <= 0) throw QueryBudgetExhausted{};
    --remaining_;
    return inner_.ask(point, q);
  }
  const Transcript& transcript() const override { return inner_.transcript(); }

 private:
  SeparationOracle& inner_;
  long remaining_;
};

json vec_to_json(const Vec& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vec vec_from_json(const json& arr) {
  Vec v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return v;
}

json witness_to_json(const WitnessSet& w) {
  json gens = json::array();
  for (const Vec& g : w.generators) gens.push_back(vec_to_json(g));
  return {{"int_dims", w.int_dims},
          {"generators", gens},
          {"ball_center", vec_to_json(w.ball.center)},
          {"ball_radius", w.ball.radius}};
}

WitnessSet witness_from_json(const json& j) {
  WitnessSet w;
  w.int_dims = j.at("int_dims").get<int>();
  for (const auto& g : j.at("generators")) w.generators.push_back(vec_from_json(g));
  w.ball.center = vec_from_json(j.at("ball_center"));
  w.ball.radius = j.at("ball_radius").get<double>();
  return w;
}

json bit_level_to_json(const BitLevelSnapshot& level) {
  json orthants = json::array();
  for (const auto& o : level.orthants) {
    json commit;
    if (o.commit) commit = {{"coord", o.commit->first}, {"sign", o.commit->second}};
    orthants.push_back({{"label", o.label},
                        {"queried_coords", o.queried_coords},
                        {"commit", commit},
                        {"count", o.count}});
  }
  json records = json::array();
  for (const auto& r : level.records) {
    records.push_back(
        {{"point", vec_to_json(r.point)},
         {"coord", r.coord ? json(*r.coord) : json()},
         {"normal", r.normal ? vec_to_json(*r.normal) : json()},
         {"orthant", r.orthant},
         {"transcript_index", r.transcript_index}});
  }
  return {{"index", level.index},
          {"anchor", vec_to_json(level.anchor)},
          {"radius", level.radius},
          {"orthants", orthants},
          {"used_coords", level.used_coords},
          {"queries", level.queries},
          {"records", records}};
}

BitLevelSnapshot bit_level_from_json(const json& j) {
  BitLevelSnapshot level;
  level.index = j.at("index").get<int>();
  level.anchor = vec_from_json(j.at("anchor"));
  level.radius = j.at("radius").get<double>();
  for (const auto& o : j.at("orthants")) {
    BitLevelSnapshot::Orthant orthant;
    orthant.label = o.at("label").get<std::vector<int>>();
    for (const auto& c : o.at("queried_coords")) orthant.queried_coords.insert(c.get<int>());
    if (!o.at("commit").is_null())
      orthant.commit = {o.at("commit").at("coord").get<int>(),
                        o.at("commit").at("sign").get<int>()};
    orthant.count = o.at("count").get<int>();
    level.orthants.push_back(std::move(orthant));
  }
  for (const auto& c : j.at("used_coords")) level.used_coords.insert(c.get<int>());
  level.queries = j.at("queries").get<int>();
  for (const auto& r : j.at("records")) {
    BitLevelSnapshot::Rec rec;
    rec.point = vec_from_json(r.at("point"));
    if (!r.at("coord").is_null()) rec.coord = r.at("coord").get<int>();
    if (!r.at("normal").is_null()) rec.normal = vec_from_json(r.at("normal"));
    rec.orthant = r.at("orthant").get<std::vector<int>>();
    rec.transcript_index = r.at("transcript_index").get<std::size_t>();
    level.records.push_back(std::move(rec));
  }
  return level;
}

json dir_stage_to_json(const DirStageSnapshot& s) {
  json committed = json::array();
  for (const Vec& a : s.committed) committed.push_back(vec_to_json(a));
  return {{"index", s.index},
          {"anchor", vec_to_json(s.anchor)},
          {"radius", s.radius},
          {"committed", committed},
          {"cube_center", vec_to_json(s.cube_center)},
          {"cube_radius", s.cube_radius},
          {"queries", s.queries}};
}

DirStageSnapshot dir_stage_from_json(const json& j) {
  DirStageSnapshot s;
  s.index = j.at("index").get<int>();
  s.anchor = vec_from_json(j.at("anchor"));
  s.radius = j.at("radius").get<double>();
  for (const auto& a : j.at("committed")) s.committed.push_back(vec_from_json(a));
  s.cube_center = vec_from_json(j.at("cube_center"));
  s.cube_radius = j.at("cube_radius").get<double>();
  s.queries = j.at("queries").get<int>();
  return s;
}

}  // namespace

void RunSnapshot::write_json(std::ostream& os) const {
  json levels = json::array();
  for (const auto& level : bit_levels) levels.push_back(bit_level_to_json(level));
  json stages = json::array();
  for (const auto& s : dir_stages) stages.push_back(dir_stage_to_json(s));
  json j = {{"n", n},
            {"d", d},
            {"R", R},
            {"rho", rho},
            {"adversary", adversary},
            {"w1", witness_to_json(w1)},
            {"w2", witness_to_json(w2)},
            {"bit_levels", levels},
            {"dir_stages", stages}};
  os << j.dump(2) << '\n';
}

RunSnapshot RunSnapshot::read_json(std::istream& is) {
  json j = json::parse(is);
  RunSnapshot snap;
  snap.n = j.at("n").get<int>();
  snap.d = j.at("d").get<int>();
  snap.R = j.at("R").get<double>();
  snap.rho = j.at("rho").get<double>();
  snap.adversary = j.at("adversary").get<std::string>();
  snap.w1 = witness_from_json(j.at("w1"));
  snap.w2 = witness_from_json(j.at("w2"));
  for (const auto& level : j.at("bit_levels"))
    snap.bit_levels.push_back(bit_level_from_json(level));
  for (const auto& s : j.at("dir_stages"))
    snap.dir_stages.push_back(dir_stage_from_json(s));
  return snap;
}

namespace {

/// Adversary oracles seen uniformly by the duel driver.
struct AdversaryHandle {
  std::unique_ptr<SeparationOracle> oracle;
  std::function<std::pair<WitnessSet, WitnessSet>(double)> witnesses;
  std::function<void(RunSnapshot&)> fill_snapshot;
};

AdversaryHandle make_adversary(const DuelConfig& cfg) {
  AdversaryHandle h;
  if (cfg.n == 0 && cfg.adversary == AdversaryKind::kBit) {
    auto adv = std::make_unique<BitAdversary>(cfg.d, cfg.R, cfg.rho, cfg.seed, cfg.tol);
    auto* p = adv.get();
    h.witnesses = [p](double rho) { return p->witnesses(rho); };
    h.fill_snapshot = [p](RunSnapshot& snap) {
      snap.bit_levels = p->core().history();
      snap.bit_levels.push_back(p->core().level_snapshot());
    };
    h.oracle = std::move(adv);
  } else if (cfg.n == 0) {
    auto adv = std::make_unique<DirAdversary>(cfg.d, cfg.R, cfg.rho, cfg.seed, cfg.tol);
    auto* p = adv.get();
    h.witnesses = [p](double rho) { return p->witnesses(rho); };
    h.fill_snapshot = [p](RunSnapshot& snap) {
      snap.dir_stages = p->core().history();
      snap.dir_stages.push_back(p->core().stage_snapshot());
    };
    h.oracle = std::move(adv);
  } else {
    auto adv = std::make_unique<MixedAdversary>(cfg.n, cfg.d, cfg.R, cfg.rho,
                                                cfg.adversary, cfg.seed, cfg.tol);
    auto* p = adv.get();
    h.witnesses = [p](double rho) { return p->witnesses(rho); };
    h.fill_snapshot = [](RunSnapshot&) {};
    h.oracle = std::move(adv);
  }
  return h;
}

}  // namespace

DuelReport run_duel(const DuelConfig& cfg, Transcript* transcript_out,
                    RunSnapshot* snapshot_out) {
  cfg.validate();
  DuelReport report;
  report.certified_floor = certified_floor(cfg.adversary, cfg.n, cfg.d, cfg.R, cfg.rho);

  AdversaryHandle adv = make_adversary(cfg);
  long stop = report.certified_floor - 1;
  if (cfg.max_queries >= 0) stop = std::min(stop, cfg.max_queries);
  BudgetedOracle budgeted(*adv.oracle, std::max(stop, 0L));

  std::optional<SolverReport> solver;
  try {
    if (cfg.n == 0)
      solver = ellipsoid_solve(budgeted, cfg.d, cfg.R, cfg.rho, cfg.mode, cfg.bits);
    else
      solver = mixed_solve(budgeted, cfg.n, cfg.d, cfg.R, cfg.rho, cfg.mode, cfg.bits);
  } catch (const QueryBudgetExhausted&) {
    solver.reset();
  }
  if (solver) {
    report.resolved_at = static_cast<long>(adv.oracle->transcript().size());
    report.solver_claim_feasible = solver->feasible;
  }

  auto [w1, w2] = adv.witnesses(cfg.rho);
  report.violations = check_transcript(adv.oracle->transcript(), w1, cfg.tol);
  auto v2 = check_transcript(adv.oracle->transcript(), w2, cfg.tol);
  report.violations.insert(report.violations.end(), v2.begin(), v2.end());
  const bool disjoint = certify_disjoint(w1, w2);
  report.witnesses_verified = report.violations.empty() && disjoint;

  // A claim made before the floor is verified-correct only if it survives
  // both exhibited instances; a disjoint certified pair rules that out,
  // which is the whole point of the floor.
  if (solver && solver->feasible)
    report.claim_verified =
        w1.contains(*solver->point, cfg.tol) && w2.contains(*solver->point, cfg.tol);
  if (report.witnesses_verified && report.claim_verified)
    throw std::logic_error("verified witnesses alongside a verified claim");

  if (cfg.n == 0 && cfg.adversary == AdversaryKind::kBit && cfg.d <= 12) {
    const auto* bit = dynamic_cast<const BitAdversary*>(adv.oracle.get());
    report.survivors = survival_report(bit->core().level_snapshot(), cfg.tol).survivors;
  }

  RunSnapshot snap;
  snap.n = cfg.n;
  snap.d = cfg.d;
  snap.R = cfg.R;
  snap.rho = cfg.rho;
  snap.adversary = cfg.adversary == AdversaryKind::kBit ? "bit" : "dir";
  snap.w1 = w1;
  snap.w2 = w2;
  adv.fill_snapshot(snap);

  if (!cfg.out.empty()) {
    std::ofstream tf(cfg.out + ".jsonl");
    if (!tf) throw std::runtime_error("cannot open " + cfg.out + ".jsonl");
    adv.oracle->transcript().write_jsonl(tf);
    std::ofstream sf(cfg.out + ".snapshot.json");
    if (!sf) throw std::runtime_error("cannot open " + cfg.out + ".snapshot.json");
    snap.write_json(sf);
  }
  if (transcript_out) *transcript_out = adv.oracle->transcript();
  if (snapshot_out) *snapshot_out = std::move(snap);
  return report;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("slope needs matched samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = static_cast<double>(x.size());
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

ScalingResult run_scaling(const std::vector<int>& d_list, const DuelConfig& base) {
  if (d_list.size() < 4)
    throw std::invalid_argument("scaling sweep needs at least 4 dimensions");
  ScalingResult result;
  std::vector<double> ds, floors, cuts, queries;
  for (int d : d_list) {
    ScalingRow row;
    row.d = d;
    row.floor = certified_floor(base.adversary, base.n, d, base.R, base.rho);

    std::mt19937_64 rng(base.seed ^ (0x9e3779b97f4a7c15ULL * (d + 1)));
    std::uniform_real_distribution<double> unif(-(base.R - base.rho), base.R - base.rho);
    Vec center(d);
    for (int i = 0; i < d; ++i) center[i] = unif(rng);
    HonestBallOracle oracle(InfBall{center, base.rho}, base.R, base.seed, false);

    const auto t0 = std::chrono::steady_clock::now();
    SolverReport rep = ellipsoid_solve(oracle, d, base.R, base.rho, base.mode, base.bits);
    const auto t1 = std::chrono::steady_clock::now();
    row.wallclock_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    row.queries = rep.query_count;
    row.cuts = rep.cut_count;
    row.sound = rep.feasible && InfBall{center, base.rho}.contains(*rep.point);
    result.rows.push_back(row);

    ds.push_back(d);
    floors.push_back(static_cast<double>(row.floor));
    cuts.push_back(static_cast<double>(std::max(row.cuts, 1L)));
    queries.push_back(static_cast<double>(std::max(row.queries, 1L)));
  }
  result.floor_slope = loglog_slope(ds, floors);
  result.cut_slope = loglog_slope(ds, cuts);
  result.query_slope = loglog_slope(ds, queries);
  return result;
}

void write_scaling_csv(std::ostream& os, const ScalingResult& result,
                       const DuelConfig& base) {
  os << "d,n,R,rho,adversary,mode,floor,queries,cuts,survivors,verified,wallclock_ms\n";
  for (const auto& row : result.rows) {
    os << row.d << ',' << base.n << ',' << base.R << ',' << base.rho << ','
       << (base.adversary == AdversaryKind::kBit ? "bit" : "dir") << ','
       << to_string(base.mode) << ',' << row.floor << ',' << row.queries << ','
       << row.cuts << ',' << -1 << ',' << (row.sound ? 1 : 0) << ','
       << row.wallclock_ms << '\n';
  }
}

ReplayResult replay(const Transcript& t, const RunSnapshot& snap, double tol) {
  ReplayResult result;
  result.violations = check_transcript(t, snap.w1, tol);
  auto v2 = check_transcript(t, snap.w2, tol);
  result.violations.insert(result.violations.end(), v2.begin(), v2.end());
  result.disjoint = certify_disjoint(snap.w1, snap.w2);
  if (snap.d <= 12)
    for (const auto& level : snap.bit_levels)
      result.survival.push_back(survival_report(level, tol));
  result.ok = result.violations.empty() && result.disjoint;
  return result;
}

ReplayResult replay_files(const std::string& transcript_path,
                          const std::string& snapshot_path, double tol) {
  std::ifstream tf(transcript_path);
  if (!tf) throw std::runtime_error("cannot open " + transcript_path);
  Transcript t = Transcript::read_jsonl(tf);
  std::ifstream sf(snapshot_path);
  if (!sf) throw std::runtime_error("cannot open " + snapshot_path);
  RunSnapshot snap = RunSnapshot::read_json(sf);
  return replay(t, snap, tol);
}

}  // namespace lowband
