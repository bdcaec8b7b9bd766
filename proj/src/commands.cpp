#include "zdmtd/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "zdmtd/instances.hpp"
#include "zdmtd/mdp_br.hpp"

namespace zdmtd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

MemoryOneStrategy lift(const OneShotSse& o) {
  return MemoryOneStrategy::memoryless(Eigen::Map<const Eigen::VectorXd>(o.x.data(), static_cast<Eigen::Index>(o.x.size())));
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

Comparison compare(const GameSpec& g, int budget, uint64_t seed, const PipelineOptions& opt) {
  g.validate();
  Comparison c;
  std::vector<SseSeed> seeds;

  auto t0 = Clock::now();
  c.oneshot = oneshot_sse(g);
  const MemoryOneStrategy lifted = lift(c.oneshot);
  const double oneshot_value = defender_utility_under_br(g, lifted).first.u_d;
  const double oneshot_time = seconds_since(t0);

  t0 = Clock::now();
  c.zd = run_pipeline(g, opt);
  double zd_value = oneshot_value;
  if (c.zd.has_strategy) {
    zd_value = zd_utility_under_br(g, c.zd.zd).first.u_d;
    seeds.push_back({c.zd.zd.strategy, zd_tie_tolerance(g, c.zd.zd)});
  } else {
    c.zd_fallback = true;
  }
  const double zd_time = seconds_since(t0);
  seeds.push_back({lifted, std::nullopt});

  t0 = Clock::now();
  c.search = search_sse(g, budget, seed, seeds);
  const double search_time = seconds_since(t0);

  t0 = Clock::now();
  const double ub = sse_upper_bound(g);
  const double ub_time = seconds_since(t0);

  c.rows = {{c.zd_fallback ? "zd_fallback" : "zd", zd_value, zd_time},
            {"oneshot_sse", oneshot_value, oneshot_time},
            {"search_sse", c.search.value, search_time},
            {"upper_bound", ub, ub_time}};
  return c;
}

std::string comparison_csv(const Comparison& c, const std::string& config_hash, uint64_t seed) {
  std::ostringstream os;
  os << "# seed=" << seed << " config_hash=" << config_hash << '\n';
  os << "strategy,value,wall_time\n";
  for (const auto& r : c.rows) os << r.strategy << ',' << fmt(r.value) << ',' << fmt(r.wall_time) << '\n';
  return os.str();
}

Baseline parse_baseline(const std::string& s) {
  if (s == "oneshot") return Baseline::oneshot;
  if (s == "search") return Baseline::search;
  throw std::invalid_argument("baseline must be oneshot or search, got '" + s + "'");
}

std::string to_string(Baseline b) { return b == Baseline::oneshot ? "oneshot" : "search"; }

CrowdRun crowd_run(const CrowdScenario& s, int64_t steps, uint64_t seed, int64_t stride, Baseline baseline,
                   int budget, int lag) {
  const GameSpec design = crowd_game(s, WorkerType::malicious);
  CrowdRun out;
  out.baseline_kind = baseline;
  out.pipeline = run_pipeline(design);
  const OneShotSse os = oneshot_sse(design);
  const MemoryOneStrategy lifted = lift(os);

  MemoryOneStrategy base = lifted;
  if (baseline == Baseline::search) {
    std::vector<SseSeed> seeds;
    if (out.pipeline.has_strategy)
      seeds.push_back({out.pipeline.zd.strategy, zd_tie_tolerance(design, out.pipeline.zd)});
    seeds.push_back({lifted, std::nullopt});
    base = search_sse(design, budget, seed, seeds).strategy;
  }

  if (out.pipeline.has_strategy) {
    out.zd = switching_experiment(s, out.pipeline.zd.strategy, out.pipeline.zd.params, design, steps, seed, stride,
                                  lag);
  } else {
    out.zd_fallback = true;
    out.zd = switching_experiment(s, lifted, std::nullopt, design, steps, seed, stride, lag);
  }
  out.baseline = switching_experiment(s, base, std::nullopt, design, steps, seed, stride, lag);
  return out;
}

std::string crowd_comparison_csv(const CrowdRun& r, const std::string& config_hash, uint64_t seed) {
  std::ostringstream os;
  os << "# seed=" << seed << " config_hash=" << config_hash << " baseline=" << to_string(r.baseline_kind)
     << (r.zd_fallback ? " zd_fallback=1" : "") << '\n';
  os << "step,zd_avg_u_d,baseline_avg_u_d,regime\n";
  const auto& a = r.zd.stats.series;
  const auto& b = r.baseline.stats.series;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
    os << a[i].step << ',' << fmt(a[i].avg_u_d) << ',' << fmt(b[i].avg_u_d) << ',' << a[i].regime << '\n';
  return os.str();
}

std::vector<BenchRow> bench(const BenchOptions& opt) {
  if (opt.kmax < 2) throw std::invalid_argument("bench: kmax must be >= 2");
  if (opt.trials < 1) throw std::invalid_argument("bench: trials must be >= 1");
  std::vector<BenchRow> rows;
  auto record = [&](const std::string& method, int K, const std::vector<double>& t) {
    double sum = 0.0;
    for (double v : t) sum += v;
    rows.push_back({method, K, static_cast<int>(t.size()), *std::min_element(t.begin(), t.end()), sum / t.size(),
                    *std::max_element(t.begin(), t.end())});
  };
  PipelineOptions popt;
  popt.verify_samples = 0;
  for (int K = 2; K <= opt.kmax; ++K) {
    std::vector<GameSpec> games;
    for (int t = 0; t < opt.trials; ++t) {
      Rng rng(opt.seed, static_cast<uint64_t>(K) * 1000 + t);
      games.push_back(random_zd_game(K, rng));
    }
    std::vector<double> times;
    for (const auto& g : games) {
      const auto t0 = Clock::now();
      run_pipeline(g, popt);
      times.push_back(seconds_since(t0));
    }
    record("zd", K, times);
    if (K <= 3) {
      times.clear();
      for (const auto& g : games) {
        const auto t0 = Clock::now();
        exhaustive_sse(g);
        times.push_back(seconds_since(t0));
      }
      record("exhaustive_sse", K, times);
    }
    if (K <= opt.search_kmax) {
      times.clear();
      for (const auto& g : games) {
        const auto t0 = Clock::now();
        search_sse(g, opt.budget, opt.seed, {});
        times.push_back(seconds_since(t0));
      }
      record("search_sse", K, times);
    }
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows, const std::string& config_hash, uint64_t seed) {
  std::ostringstream os;
  os << "# seed=" << seed << " config_hash=" << config_hash << '\n';
  os << "method,K,trials,min_s,mean_s,max_s\n";
  for (const auto& r : rows)
    os << r.method << ',' << r.K << ',' << r.trials << ',' << fmt(r.min_s) << ',' << fmt(r.mean_s) << ','
       << fmt(r.max_s) << '\n';
  return os.str();
}

double loglog_slope(const std::vector<BenchRow>& rows, const std::string& method, int klo, int khi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& r : rows) {
    if (r.method != method || r.K < klo || r.K > khi || !(r.mean_s > 0.0)) continue;
    const double x = std::log(r.K), y = std::log(r.mean_s);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("loglog_slope: need at least two points");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace zdmtd
