// Command-line driver: adversary-vs-solver duels, honest scaling sweeps,
// transcript replay verification, and a small demo tour.
//
// Exit codes: 0 all verifications pass, 2 verifier violation, 3 bad config.

#include "lowband/harness.hpp"
#include "lowband/mixed_lift.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace lowband;

double env_tolerance() {
  if (const char* s = std::getenv("ORACLE_DUEL_TOL")) {
    const double v = std::atof(s);
    if (v > 0.0) return v;
  }
  return kDefaultTol;
}

AdversaryKind parse_adversary(const std::string& s) {
  if (s == "bit") return AdversaryKind::kBit;
  if (s == "dir") return AdversaryKind::kDir;
  throw CLI::ValidationError("--adversary must be bit or dir");
}

QueryMode parse_mode(const std::string& s) {
  if (s == "coord") return QueryMode::kCoord;
  if (s == "bits") return QueryMode::kBits;
  if (s == "inner") return QueryMode::kInner;
  throw CLI::ValidationError("--mode must be coord, bits or inner");
}

void print_duel_report(const DuelConfig& cfg, const DuelReport& rep) {
  std::cout << "certified floor: " << rep.certified_floor << " queries\n";
  if (rep.resolved_at)
    std::cout << "solver halted after " << *rep.resolved_at << " queries with an "
              << (rep.solver_claim_feasible ? "(unverifiable) feasible claim"
                                            : "(unverifiable) infeasible claim")
              << "\n";
  else
    std::cout << "solver still running at floor - 1 = " << rep.certified_floor - 1
              << " queries\n";
  std::cout << "witness pair verified: " << (rep.witnesses_verified ? "yes" : "no")
            << "\n";
  if (rep.survivors >= 0)
    std::cout << "surviving orthants at the open level: " << rep.survivors << "\n";
  for (const auto& v : rep.violations)
    std::cout << "violation at record " << v.record_index << ": "
              << to_string(v.kind) << " (" << v.detail << ")\n";
  if (!cfg.out.empty())
    std::cout << "wrote " << cfg.out << ".jsonl and " << cfg.out
              << ".snapshot.json\n";
}

int run_demo(double tol) {
  std::cout << "== bit adversary, d = 8, coordinate queries ==\n";
  DuelConfig bit_cfg;
  bit_cfg.d = 8;
  bit_cfg.rho = 1e-4;
  bit_cfg.tol = tol;
  print_duel_report(bit_cfg, run_duel(bit_cfg));

  std::cout << "\n== inner-product adversary, d = 4 ==\n";
  DuelConfig dir_cfg;
  dir_cfg.d = 4;
  dir_cfg.rho = 1e-4;
  dir_cfg.adversary = AdversaryKind::kDir;
  dir_cfg.mode = QueryMode::kInner;
  dir_cfg.tol = tol;
  print_duel_report(dir_cfg, run_duel(dir_cfg));

  std::cout << "\n== mixed: n = 1 integer variable over the bit adversary ==\n";
  DuelConfig mixed_cfg = bit_cfg;
  mixed_cfg.n = 1;
  print_duel_report(mixed_cfg, run_duel(mixed_cfg));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"low-bandwidth separation-oracle laboratory"};
  app.require_subcommand(1);
  const double tol = env_tolerance();

  DuelConfig cfg;
  cfg.tol = tol;
  std::string adversary = "bit";
  std::string mode = "coord";

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--n", cfg.n, "integer variables (0..3)");
    cmd->add_option("--d", cfg.d, "continuous dimension");
    cmd->add_option("--R", cfg.R, "box half-width");
    cmd->add_option("--rho", cfg.rho, "fatness radius");
    cmd->add_option("--adversary", adversary, "bit|dir");
    cmd->add_option("--mode", mode, "coord|bits|inner");
    cmd->add_option("--bits", cfg.bits, "bit budget for bits mode");
    cmd->add_option("--seed", cfg.seed, "rng seed");
    cmd->add_option("--max-queries", cfg.max_queries, "hard query cap");
    cmd->add_option("--out", cfg.out, "output base path");
  };

  CLI::App* duel = app.add_subcommand("duel", "run one adversary-vs-solver duel");
  add_common(duel);

  CLI::App* scaling =
      app.add_subcommand("scaling", "floors and honest runs across a d-sweep");
  std::vector<int> d_list{8, 16, 32, 64};
  add_common(scaling);
  scaling->add_option("--d-list", d_list, "dimensions to sweep")->delimiter(',');

  CLI::App* verify = app.add_subcommand("verify", "replay a transcript + snapshot");
  std::string transcript_path, snapshot_path;
  verify->add_option("--transcript", transcript_path, "transcript .jsonl")->required();
  verify->add_option("--snapshot", snapshot_path, "snapshot .json")->required();

  CLI::App* demo = app.add_subcommand("demo", "small end-to-end tour");
  (void)demo;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;
  }

  try {
    if (app.got_subcommand(duel)) {
      cfg.adversary = parse_adversary(adversary);
      cfg.mode = parse_mode(mode);
      const DuelReport rep = run_duel(cfg);
      print_duel_report(cfg, rep);
      return rep.witnesses_verified ? 0 : 2;
    }
    if (app.got_subcommand(scaling)) {
      cfg.adversary = parse_adversary(adversary);
      cfg.mode = parse_mode(mode);
      const ScalingResult result = run_scaling(d_list, cfg);
      std::ostringstream csv;
      write_scaling_csv(csv, result, cfg);
      if (cfg.out.empty()) {
        std::cout << csv.str();
      } else {
        std::ofstream f(cfg.out);
        f << csv.str();
        std::cout << "wrote " << cfg.out << "\n";
      }
      std::cout << "floor slope " << result.floor_slope << ", cut slope "
                << result.cut_slope << ", query slope " << result.query_slope
                << "\n";
      for (const auto& row : result.rows)
        if (!row.sound) {
          std::cout << "soundness failure at d = " << row.d << "\n";
          return 2;
        }
      return 0;
    }
    if (app.got_subcommand(verify)) {
      const ReplayResult result = replay_files(transcript_path, snapshot_path, tol);
      for (const auto& v : result.violations)
        std::cout << "violation at record " << v.record_index << ": "
                  << to_string(v.kind) << " (" << v.detail << ")\n";
      if (!result.disjoint) std::cout << "witnesses are not disjoint\n";
      for (std::size_t i = 0; i < result.survival.size(); ++i)
        std::cout << "level " << i << ": " << result.survival[i].survivors
                  << " surviving orthants (" << result.survival[i].eliminated_by_commit
                  << " eliminated by commits, "
                  << result.survival[i].eliminated_by_zeros << " by zero answers)\n";
      std::cout << (result.ok ? "verification OK\n" : "verification FAILED\n");
      return result.ok ? 0 : 2;
    }
    return run_demo(tol);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
