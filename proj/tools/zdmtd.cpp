// zdmtd: command-line front end. Exit codes are stable: 0 success,
// 2 infeasible, 3 verification failure, 64 usage or input error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "zdmtd/commands.hpp"
#include "zdmtd/io.hpp"
#include "zdmtd/mdp_br.hpp"
#include "zdmtd/pipeline.hpp"
#include "zdmtd/scenarios.hpp"
#include "zdmtd/sim.hpp"
#include "zdmtd/sse_baseline.hpp"

namespace fs = std::filesystem;
using namespace zdmtd;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitVerify = 3;
constexpr int kExitUsage = 64;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string("missing ") + what);
  if (!fs::is_regular_file(path)) throw UsageError(std::string(what) + " not found: " + path);
}

// The output location must be creatable; checked before any computation.
void require_writable_target(const std::string& path) {
  if (path.empty()) throw UsageError("missing output path");
  fs::path p = fs::absolute(path);
  fs::path dir = p.has_filename() ? p.parent_path() : p;
  while (!dir.empty() && !fs::exists(dir)) dir = dir.parent_path();
  if (dir.empty() || !fs::is_directory(dir)) throw UsageError("output location is not writable: " + path);
}

std::string hash_of(const std::string& canonical) { return hex64(fnv1a(canonical)); }

GameSpec load_game(const std::string& path) { return game_from_json(read_json_file(path)); }

// Keeps outputs reproducible from (inputs, seed, version).
std::string version_tag() { return "zdmtd-1"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero-determinant moving target defense: strategy construction, baselines, simulation"};
  app.require_subcommand(1);
  app.footer(
      "Environment: ZDMTD_THREADS caps worker threads.\n"
      "Exit codes: 0 success, 2 infeasible, 3 verification failure, 64 usage.");

  std::string game_path, out_path, config_path, strategy_path, mode_str = "auto", baseline_str = "oneshot";
  uint64_t seed = 0;
  int budget = 200, verify_samples = 20, trials = 3, kmax = 50, search_kmax = 10, lag = 0;
  int64_t steps = 100000, stride = 100;
  double tol_residual = kZdResidualTol, phi_scale = PipelineOptions{}.phi_scale;
  std::optional<double> tol_tie;
  std::string suites_configs, suites_run;

  auto* solve = app.add_subcommand("solve", "Compute a ZD strategy: writes strategy.json and result.json");
  solve->add_option("--game", game_path, "Game JSON")->required();
  solve->add_option("--mode", mode_str, "ideal | optimal | auto")->check(CLI::IsMember({"ideal", "optimal", "auto"}));
  solve->add_option("--out", out_path, "Output directory")->required();
  solve->add_option("--seed", seed, "Seed for verification sampling");
  solve->add_option("--verify-samples", verify_samples, "Random attackers used for verification")->capture_default_str();
  solve->add_option("--phi-scale", phi_scale, "phi multiplier on the optimal path")->capture_default_str();
  solve->add_option("--tol-residual", tol_residual, "Verification tolerance")->capture_default_str();
  solve->add_option("--tol-tie", tol_tie, "Attacker gain tie window for BR evaluation");

  auto* compare_cmd = app.add_subcommand("compare", "ZD vs SSE baselines: comparison.csv");
  compare_cmd->add_option("--game", game_path, "Game JSON");
  compare_cmd->add_option("--config", config_path, "Scenario config (iot family) instead of --game");
  compare_cmd->add_option("--budget", budget, "search_sse evaluations")->capture_default_str();
  compare_cmd->add_option("--seed", seed, "Search seed");
  compare_cmd->add_option("--phi-scale", phi_scale, "phi multiplier on the optimal path")->capture_default_str();
  compare_cmd->add_option("--out", out_path, "Output CSV")->required();

  auto* bench_cmd = app.add_subcommand("bench", "Runtime of ZD vs SSE baselines: bench.csv");
  bench_cmd->add_option("--kmax", kmax, "Largest K for the ZD pipeline")->capture_default_str();
  bench_cmd->add_option("--trials", trials, "Instances per K")->capture_default_str();
  bench_cmd->add_option("--seed", seed, "Instance seed");
  bench_cmd->add_option("--budget", budget, "search_sse evaluations")->capture_default_str();
  bench_cmd->add_option("--search-kmax", search_kmax, "Largest K for search_sse")->capture_default_str();
  bench_cmd->add_option("--out", out_path, "Output CSV")->required();

  auto* sim_cmd = app.add_subcommand("simulate", "Trajectory CSV under a switching worker or a best responder");
  sim_cmd->add_option("--config", config_path, "Crowdsourcing scenario config");
  sim_cmd->add_option("--game", game_path, "Game JSON (attacker best-responds)");
  sim_cmd->add_option("--strategy", strategy_path, "Defender strategy JSON; default: ZD from the pipeline");
  auto* sim_baseline = sim_cmd->add_option("--baseline", baseline_str,
                                           "Write a ZD vs baseline comparison CSV instead: oneshot | search");
  sim_baseline->check(CLI::IsMember({"oneshot", "search"}));
  sim_cmd->add_option("--steps", steps, "Steps")->capture_default_str();
  sim_cmd->add_option("--stride", stride, "Series downsampling stride")->capture_default_str();
  sim_cmd->add_option("--seed", seed, "Simulation seed");
  sim_cmd->add_option("--budget", budget, "search_sse evaluations for --baseline search")->capture_default_str();
  sim_cmd->add_option("--lag", lag, "Steps before a switched worker adopts its new best response")->capture_default_str();
  sim_cmd->add_option("--out", out_path, "Output CSV")->required();

  auto* mip_cmd = app.add_subcommand("emit-mip", "Write the memory-one SSE mixed-integer program in LP format");
  mip_cmd->add_option("--game", game_path, "Game JSON")->required();
  mip_cmd->add_option("--out", out_path, "Output LP file")->required();

  auto* suites_cmd = app.add_subcommand("suites", "Default scenario suites");
  suites_cmd->add_option("--write-configs", suites_configs, "Write one config JSON per suite into this directory");
  suites_cmd->add_option("--run", suites_run, "Run every suite, writing CSVs into this directory");
  suites_cmd->add_option("--steps", steps, "Simulation steps per crowdsourcing suite")->capture_default_str();
  suites_cmd->add_option("--stride", stride, "Series downsampling stride")->capture_default_str();
  suites_cmd->add_option("--seed", seed, "Seed");
  suites_cmd->add_option("--budget", budget, "search_sse evaluations")->capture_default_str();
  suites_cmd->add_option("--baseline", baseline_str, "oneshot | search")->check(CLI::IsMember({"oneshot", "search"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*solve) {
      require_file(game_path, "game file");
      require_writable_target((fs::path(out_path) / "result.json").string());
      const GameSpec g = load_game(game_path);
      PipelineOptions opt;
      opt.mode = parse_mode(mode_str);
      opt.seed = seed;
      opt.verify_samples = verify_samples;
      opt.phi_scale = phi_scale;
      const std::string hash =
          hash_of(game_to_json(g).dump() + "|solve|" + mode_str + "|" + std::to_string(seed) + "|" +
                  std::to_string(verify_samples) + "|" + std::to_string(phi_scale) + "|" + version_tag());
      PipelineResult r;
      try {
        r = run_pipeline(g, opt);
      } catch (const ConstructionError& e) {
        std::cerr << "construction failed: " << e.what() << '\n';
        return kExitVerify;
      }
      UtilityPair realized;
      if (r.has_strategy) {
        const double tie = tol_tie ? *tol_tie : zd_tie_tolerance(g, r.zd);
        realized = defender_utility_under_br(g, r.zd.strategy, tie).first;
      }
      Json result = result_to_json(r, realized);
      result["config_hash"] = hash;
      result["seed"] = seed;
      write_file_atomic((fs::path(out_path) / "result.json").string(), result.dump(2) + "\n");
      if (!r.has_strategy) {
        std::cout << "kind=none: no ZD strategy for mode " << mode_str << '\n';
        return kExitInfeasible;
      }
      Json strat = strategy_to_json(r.zd);
      strat["config_hash"] = hash;
      write_file_atomic((fs::path(out_path) / "strategy.json").string(), strat.dump(2) + "\n");
      std::printf("kind=%s alpha=%.9g beta=%.9g gamma=%.9g predicted_u_d=%.9g realized_u_d=%.9g\n",
                  to_string(r.solve.kind).c_str(), r.zd.params.alpha, r.zd.params.beta, r.zd.params.gamma,
                  r.solve.expected_br, realized.u_d);
      std::printf("residual=%.3g sampled_line=%.3g samples=%d\n", r.report.defining_residual,
                  r.report.max_line_residual, r.report.n_samples);
      if (!r.report.passed(tol_residual)) {
        std::cerr << "verification failed at tolerance " << tol_residual << '\n';
        return kExitVerify;
      }
      return kExitOk;
    }

    if (*compare_cmd) {
      if (game_path.empty() == config_path.empty()) throw UsageError("compare needs exactly one of --game, --config");
      require_file(game_path.empty() ? config_path : game_path, "input file");
      require_writable_target(out_path);
      GameSpec g;
      if (!game_path.empty()) {
        g = load_game(game_path);
      } else {
        const Suite s = suite_from_json(read_json_file(config_path));
        if (s.family != Suite::Family::iot) throw UsageError("compare --config expects an iot scenario");
        g = iot_game(s.iot);
      }
      PipelineOptions opt;
      opt.phi_scale = phi_scale;
      const std::string hash = hash_of(game_to_json(g).dump() + "|compare|" + std::to_string(budget) + "|" +
                                       std::to_string(seed) + "|" + version_tag());
      const Comparison c = compare(g, budget, seed, opt);
      write_file_atomic(out_path, comparison_csv(c, hash, seed));
      for (const auto& row : c.rows) std::printf("%-12s %14.9g %10.4fs\n", row.strategy.c_str(), row.value, row.wall_time);
      return kExitOk;
    }

    if (*bench_cmd) {
      require_writable_target(out_path);
      BenchOptions b{kmax, trials, seed, budget, search_kmax};
      const std::string hash = hash_of("bench|" + std::to_string(kmax) + "|" + std::to_string(trials) + "|" +
                                       std::to_string(seed) + "|" + std::to_string(budget) + "|" +
                                       std::to_string(search_kmax) + "|" + version_tag());
      const auto rows = bench(b);
      write_file_atomic(out_path, bench_csv(rows, hash, seed));
      for (const auto& r : rows)
        std::printf("%-15s K=%-3d mean=%.6fs (min %.6f, max %.6f)\n", r.method.c_str(), r.K, r.mean_s, r.min_s, r.max_s);
      if (kmax >= 10) std::printf("zd log-log slope over K in [5, %d]: %.3f\n", kmax, loglog_slope(rows, "zd", 5, kmax));
      return kExitOk;
    }

    if (*sim_cmd) {
      if (game_path.empty() == config_path.empty()) throw UsageError("simulate needs exactly one of --game, --config");
      require_file(game_path.empty() ? config_path : game_path, "input file");
      if (!strategy_path.empty()) require_file(strategy_path, "strategy file");
      require_writable_target(out_path);
      if (steps < 1 || stride < 1) throw UsageError("steps and stride must be >= 1");
      if (!config_path.empty()) {
        const std::string text = read_text_file(config_path);
        const Suite s = suite_from_json(parse_json_text(text));
        if (s.family != Suite::Family::crowd) throw UsageError("simulate --config expects a crowd scenario");
        const std::string hash = hash_of(text + "|simulate|" + std::to_string(steps) + "|" + std::to_string(seed) +
                                         "|" + baseline_str + "|" + std::to_string(lag) + "|" + version_tag());
        if (!strategy_path.empty()) {
          const MemoryOneStrategy pi = strategy_from_json(read_json_file(strategy_path));
          const GameSpec design = crowd_game(s.crowd, WorkerType::malicious);
          const auto rep = switching_experiment(s.crowd, pi, std::nullopt, design, steps, seed, stride, lag);
          write_file_atomic(out_path, trajectory_csv(rep.stats, hash));
          for (const auto& r : rep.stats.regimes)
            std::printf("%-10s steps=%lld avg_u_d=%.6f avg_u_a=%.6f\n", r.regime.c_str(),
                        static_cast<long long>(r.steps), r.avg_u_d, r.avg_u_a);
          return kExitOk;
        }
        if (sim_baseline->count() == 0) {
          // ZD strategy built against the malicious-type game.
          const GameSpec design = crowd_game(s.crowd, WorkerType::malicious);
          const PipelineResult r = run_pipeline(design);
          if (!r.has_strategy) {
            std::cerr << "no ZD strategy for the malicious game; pass --strategy or --baseline\n";
            return kExitInfeasible;
          }
          const auto rep =
              switching_experiment(s.crowd, r.zd.strategy, r.zd.params, design, steps, seed, stride, lag);
          write_file_atomic(out_path, trajectory_csv(rep.stats, hash));
          for (const auto& g : rep.regimes)
            std::printf("%-10s steps=%lld avg_u_d=%.6f avg_u_a=%.6f residual=%.3g se=%.3g\n", g.regime.c_str(),
                        static_cast<long long>(g.steps), g.avg_u_d, g.avg_u_a, g.residual, g.standard_error);
          return kExitOk;
        }
        const CrowdRun run = crowd_run(s.crowd, steps, seed, stride, parse_baseline(baseline_str), budget, lag);
        write_file_atomic(out_path, crowd_comparison_csv(run, hash, seed));
        if (run.zd_fallback) std::printf("no ZD strategy for the malicious game: zd column is the one-shot proxy\n");
        for (const auto& r : run.zd.regimes)
          std::printf("%-10s steps=%lld zd_avg_u_d=%.6f residual=%.3g se=%.3g\n", r.regime.c_str(),
                      static_cast<long long>(r.steps), r.avg_u_d, r.residual, r.standard_error);
        for (const auto& r : run.baseline.stats.regimes)
          std::printf("%-10s baseline_avg_u_d=%.6f\n", r.regime.c_str(), r.avg_u_d);
        return kExitOk;
      }
      const std::string text = read_text_file(game_path);
      const GameSpec g = game_from_json(parse_json_text(text));
      MemoryOneStrategy pi;
      if (!strategy_path.empty()) {
        pi = strategy_from_json(read_json_file(strategy_path));
        if (pi.K != g.K) throw UsageError("strategy K does not match the game");
      } else {
        const PipelineResult r = run_pipeline(g);
        if (!r.has_strategy) {
          std::cerr << "no ZD strategy for this game; pass --strategy\n";
          return kExitInfeasible;
        }
        pi = r.zd.strategy;
      }
      const std::string hash = hash_of(text + "|simulate|" + std::to_string(steps) + "|" + std::to_string(seed) + "|" +
                                       strategy_path + "|" + version_tag());
      const auto t = simulate(g, pi, AttackerProfile::best_response(), steps, seed, stride);
      write_file_atomic(out_path, trajectory_csv(t, hash));
      std::printf("avg_u_d=%.9g (se %.2g) avg_u_a=%.9g (se %.2g)\n", t.avg_u_d, t.se_u_d, t.avg_u_a, t.se_u_a);
      return kExitOk;
    }

    if (*mip_cmd) {
      require_file(game_path, "game file");
      require_writable_target(out_path);
      const GameSpec g = load_game(game_path);
      const MipModel m = build_mip(g);
      write_file_atomic(out_path, write_lp(m));
      std::printf("binaries=%zu strategy_vars=%d value_vars=%d constraints=%zu Z=%g\n", m.binaries.size(),
                  m.count_prefix("pid_"), m.count_prefix("V") + m.count_prefix("Q_") + m.count_prefix("W_"),
                  m.rows.size(), big_m(g));
      return kExitOk;
    }

    if (*suites_cmd) {
      if (suites_configs.empty() && suites_run.empty()) {
        for (const auto& s : default_suites()) std::printf("%s\n", s.name.c_str());
        return kExitOk;
      }
      if (!suites_configs.empty()) require_writable_target((fs::path(suites_configs) / "x.json").string());
      if (!suites_run.empty()) require_writable_target((fs::path(suites_run) / "x.csv").string());
      const Baseline base = parse_baseline(baseline_str);
      for (const auto& s : default_suites()) {
        const std::string cfg = suite_to_json(s).dump(2) + "\n";
        if (!suites_configs.empty()) write_file_atomic((fs::path(suites_configs) / (s.name + ".json")).string(), cfg);
        if (suites_run.empty()) continue;
        const std::string hash = hash_of(cfg + "|suites|" + std::to_string(steps) + "|" + std::to_string(seed) + "|" +
                                         std::to_string(budget) + "|" + baseline_str + "|" + version_tag());
        if (s.family == Suite::Family::iot) {
          const Comparison c = compare(iot_game(s.iot), budget, seed);
          write_file_atomic((fs::path(suites_run) / (s.name + "_compare.csv")).string(), comparison_csv(c, hash, seed));
          std::printf("%-22s zd%s=%.6f oneshot=%.6f search=%.6f upper=%.6f\n", s.name.c_str(),
                      c.zd_fallback ? "(fallback)" : "", c.rows[0].value, c.rows[1].value, c.rows[2].value,
                      c.rows[3].value);
        } else {
          const CrowdRun run = crowd_run(s.crowd, steps, seed, stride, base, budget);
          write_file_atomic((fs::path(suites_run) / (s.name + "_compare.csv")).string(),
                            crowd_comparison_csv(run, hash, seed));
          std::printf("%-22s zd_avg_u_d=%.6f baseline_avg_u_d=%.6f\n", s.name.c_str(), run.zd.stats.avg_u_d,
                      run.baseline.stats.avg_u_d);
        }
      }
      return kExitOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitUsage;
}
