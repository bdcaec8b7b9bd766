#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zdmtd/pipeline.hpp"
#include "zdmtd/scenarios.hpp"
#include "zdmtd/sim.hpp"
#include "zdmtd/sse_baseline.hpp"

namespace zdmtd {

// Experiment drivers shared by the CLI, the acceptance harness and the Python
// module. Each returns values; the callers decide where output goes.

struct CompareRow {
  std::string strategy;  // zd | zd_fallback | oneshot_sse | search_sse | upper_bound
  double value = 0.0;
  double wall_time = 0.0;  // seconds
};

struct Comparison {
  std::vector<CompareRow> rows;
  PipelineResult zd;
  // No ZD strategy exists: the zd row carries the lifted one-shot proxy.
  bool zd_fallback = false;
  OneShotSse oneshot;
  SearchResult search;
};

// ZD BR-value, the one-shot proxy lifted to memory-one, search_sse seeded with
// both, and the analytic upper bound.
Comparison compare(const GameSpec& g, int budget, uint64_t seed, const PipelineOptions& opt = {});
std::string comparison_csv(const Comparison& c, const std::string& config_hash, uint64_t seed);

enum class Baseline { oneshot, search };
Baseline parse_baseline(const std::string& s);
std::string to_string(Baseline b);

struct CrowdRun {
  SwitchingReport zd;
  SwitchingReport baseline;
  Baseline baseline_kind = Baseline::oneshot;
  bool zd_fallback = false;
  PipelineResult pipeline;
};

// Both strategies are built against the malicious-type game and replayed
// against the same switching worker with the same seed.
CrowdRun crowd_run(const CrowdScenario& s, int64_t steps, uint64_t seed, int64_t stride, Baseline baseline,
                   int budget = 200, int lag = 0);
// step,zd_avg_u_d,baseline_avg_u_d,regime
std::string crowd_comparison_csv(const CrowdRun& r, const std::string& config_hash, uint64_t seed);

struct BenchRow {
  std::string method;  // zd | exhaustive_sse | search_sse
  int K = 0;
  int trials = 0;
  double min_s = 0.0, mean_s = 0.0, max_s = 0.0;
};

struct BenchOptions {
  int kmax = 50;
  int trials = 3;
  uint64_t seed = 0;
  int budget = 200;      // search_sse evaluations
  int search_kmax = 10;  // search_sse is timed for K <= search_kmax
};

std::vector<BenchRow> bench(const BenchOptions& opt);
std::string bench_csv(const std::vector<BenchRow>& rows, const std::string& config_hash, uint64_t seed);

// Least-squares slope of log(mean_s) against log(K) over rows of one method
// with klo <= K <= khi.
double loglog_slope(const std::vector<BenchRow>& rows, const std::string& method, int klo, int khi);

}  // namespace zdmtd
