// Python bindings. Games, strategies and results cross the boundary as plain
// dicts in the same schema as the CLI's JSON files; strategy matrices are
// numpy arrays of shape (K^2, K).

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "zdmtd/commands.hpp"
#include "zdmtd/io.hpp"
#include "zdmtd/markov.hpp"
#include "zdmtd/pipeline.hpp"
#include "zdmtd/scenarios.hpp"
#include "zdmtd/sim.hpp"
#include "zdmtd/sse_baseline.hpp"

namespace py = pybind11;
using namespace zdmtd;

namespace {

// Round trip through the json module keeps one schema implementation.
Json to_json(const py::object& o) {
  const auto dumps = py::module_::import("json").attr("dumps");
  return parse_json_text(dumps(o).cast<std::string>());
}

py::object to_py(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

GameSpec game_arg(const py::dict& d) { return game_from_json(to_json(d)); }

MemoryOneStrategy strategy_arg(const GameSpec& g, const Eigen::MatrixXd& rows) {
  MemoryOneStrategy s{g.K, rows};
  if (rows.rows() != g.K * g.K || rows.cols() != g.K)
    throw std::invalid_argument("strategy must have shape (K^2, K)");
  s.validate(1e-9);
  return s;
}

py::dict pipeline_dict(const GameSpec& g, const PipelineResult& r) {
  UtilityPair realized;
  if (r.has_strategy) realized = zd_utility_under_br(g, r.zd).first;
  py::dict out = to_py(result_to_json(r, realized));
  if (r.has_strategy) {
    out["pi"] = r.zd.strategy.rows;
    out["strategy"] = to_py(strategy_to_json(r.zd));
  }
  return out;
}

py::dict trajectory_dict(const TrajectoryStats& t) {
  py::dict d;
  d["steps"] = t.steps;
  d["avg_u_d"] = t.avg_u_d;
  d["avg_u_a"] = t.avg_u_a;
  d["se_u_d"] = t.se_u_d;
  d["se_u_a"] = t.se_u_a;
  py::list series;
  for (const auto& p : t.series) series.append(py::make_tuple(p.step, p.avg_u_d, p.avg_u_a, p.regime));
  d["series"] = series;
  return d;
}

}  // namespace

PYBIND11_MODULE(_zdmtd, m) {
  m.doc() = "Zero-determinant defender strategies for repeated moving-target-defense games.";

  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<ConstructionError>(m, "ConstructionError", PyExc_RuntimeError);

  m.def(
      "solve",
      [](const py::dict& game, const std::string& mode, double phi_scale, int verify_samples, uint64_t seed) {
        const GameSpec g = game_arg(game);
        PipelineOptions opt;
        opt.mode = parse_mode(mode);
        opt.phi_scale = phi_scale;
        opt.verify_samples = verify_samples;
        opt.seed = seed;
        return pipeline_dict(g, run_pipeline(g, opt));
      },
      py::arg("game"), py::arg("mode") = "auto", py::arg("phi_scale") = 100.0, py::arg("verify_samples") = 0,
      py::arg("seed") = 0,
      "Solve for the best ZD strategy. The result has kind none and no 'pi' when none exists.");

  m.def(
      "long_run_utilities",
      [](const py::dict& game, const Eigen::MatrixXd& pi_d, const Eigen::MatrixXd& pi_a) {
        const GameSpec g = game_arg(game);
        const UtilityPair u = long_run_utilities(g, strategy_arg(g, pi_d), strategy_arg(g, pi_a));
        return py::make_tuple(u.u_d, u.u_a);
      },
      py::arg("game"), py::arg("pi_d"), py::arg("pi_a"), "(u_d, u_a) under the stationary distribution.");

  m.def(
      "best_response",
      [](const py::dict& game, const Eigen::MatrixXd& pi_d) {
        const GameSpec g = game_arg(game);
        const auto [u, br] = defender_utility_under_br(g, strategy_arg(g, pi_d), br_tie_tolerance(g));
        py::dict d;
        d["policy"] = br.policy;
        d["u_d"] = u.u_d;
        d["u_a"] = u.u_a;
        return d;
      },
      py::arg("game"), py::arg("pi_d"), "Attacker's deterministic memory-one best response.");

  m.def(
      "verify",
      [](const py::dict& game, const py::dict& strategy, int n_samples, uint64_t seed) {
        const GameSpec g = game_arg(game);
        const Json j = to_json(strategy);
        if (!j.contains("zd")) throw FormatError("strategy has no zd block");
        ZdStrategy zd;
        zd.strategy = strategy_from_json(j);
        const Json& z = j["zd"];
        zd.params = {z.at("alpha").get<double>(), z.at("beta").get<double>(), z.at("gamma").get<double>()};
        const auto phi = z.at("phi").get<std::vector<double>>();
        zd.phi.phi = Eigen::Map<const Eigen::VectorXd>(phi.data(), static_cast<Eigen::Index>(phi.size()));
        const VerifyReport r = verify(g, zd, n_samples, seed);
        py::dict d;
        d["defining_residual"] = r.defining_residual;
        d["max_line_residual"] = r.max_line_residual;
        d["row_defect"] = r.row_defect;
        d["passed"] = r.passed();
        return d;
      },
      py::arg("game"), py::arg("strategy"), py::arg("n_samples") = 1000, py::arg("seed") = 0,
      "Recheck the 'strategy' dict returned by solve (it needs the zd block).");

  m.def(
      "oneshot_sse",
      [](const py::dict& game) {
        const OneShotSse s = oneshot_sse(game_arg(game));
        py::dict d;
        d["x"] = s.x;
        d["value"] = s.value;
        d["attacked"] = s.attacked;
        return d;
      },
      py::arg("game"));

  m.def(
      "compare",
      [](const py::dict& game, int budget, uint64_t seed) {
        const Comparison c = compare(game_arg(game), budget, seed);
        py::list rows;
        for (const auto& r : c.rows) {
          py::dict d;
          d["strategy"] = r.strategy;
          d["value"] = r.value;
          d["wall_time"] = r.wall_time;
          rows.append(d);
        }
        return rows;
      },
      py::arg("game"), py::arg("budget") = 200, py::arg("seed") = 0,
      "ZD value, one-shot proxy, search baseline and upper bound, one dict per row.");

  m.def("emit_mip", [](const py::dict& game) { return emit_mip(game_arg(game)); }, py::arg("game"),
        "The memory-one SSE mixed-integer program in LP-file text.");

  m.def(
      "simulate",
      [](const py::dict& game, const Eigen::MatrixXd& pi_d, int64_t steps, uint64_t seed, int64_t stride,
         const std::optional<Eigen::MatrixXd>& pi_a) {
        const GameSpec g = game_arg(game);
        const AttackerProfile profile =
            pi_a ? AttackerProfile::fixed(strategy_arg(g, *pi_a)) : AttackerProfile::best_response();
        return trajectory_dict(simulate(g, strategy_arg(g, pi_d), profile, steps, seed, stride));
      },
      py::arg("game"), py::arg("pi_d"), py::arg("steps"), py::arg("seed") = 0, py::arg("stride") = 1000,
      py::arg("pi_a") = py::none(),
      "Monte Carlo run against a fixed attacker, or the best responder when pi_a is None.");

  m.def(
      "default_suites",
      [] {
        py::list out;
        for (const auto& s : default_suites()) out.append(to_py(suite_to_json(s)));
        return out;
      },
      "The built-in scenario configs, as written to configs/.");

  m.def(
      "suite_game",
      [](const py::dict& config, const std::string& worker) {
        const Suite s = suite_from_json(to_json(config));
        const GameSpec g = s.family == Suite::Family::iot ? iot_game(s.iot) : crowd_game(s.crowd, parse_worker_type(worker));
        return to_py(game_to_json(g));
      },
      py::arg("config"), py::arg("worker") = "malicious",
      "Game dict for a scenario config; worker selects the crowdsourcing type.");
}
