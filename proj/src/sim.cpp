#include "zdmtd/sim.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "zdmtd/mdp_br.hpp"
#include "zdmtd/rng.hpp"

namespace zdmtd {

namespace {

struct Kahan {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

int sample_row(const Eigen::MatrixXd& rows, int s, double u) {
  const int K = static_cast<int>(rows.cols());
  double acc = 0.0;
  for (int k = 0; k < K - 1; ++k) {
    acc += rows(s, k);
    if (u < acc) return k;
  }
  return K - 1;
}

// Batch means over a stream of unknown length: values are appended, batches
// formed at the end.
struct BatchSeries {
  std::vector<double> values;
  double standard_error() const {
    const int64_t n = static_cast<int64_t>(values.size());
    const int nb = static_cast<int>(std::min<int64_t>(kBatches, n));
    if (nb < 2) return 0.0;
    std::vector<Kahan> sums(nb);
    std::vector<int64_t> counts(nb, 0);
    for (int64_t t = 0; t < n; ++t) {
      const int b = static_cast<int>(t * nb / n);
      sums[b].add(values[t]);
      ++counts[b];
    }
    double mean = 0.0;
    std::vector<double> means(nb);
    for (int b = 0; b < nb; ++b) mean += means[b] = sums[b].sum / counts[b];
    mean /= nb;
    double var = 0.0;
    for (double m : means) var += (m - mean) * (m - mean);
    var /= nb - 1;
    return std::sqrt(var / nb);
  }
};

std::vector<int> br_policy(const GameSpec& g, const MemoryOneStrategy& pi_d) {
  return defender_utility_under_br(g, pi_d).second.policy;
}

}  // namespace

AttackerProfile AttackerProfile::fixed(MemoryOneStrategy s) {
  AttackerProfile p;
  p.kind = Kind::fixed;
  p.strategy = std::move(s);
  return p;
}

AttackerProfile AttackerProfile::best_response() { return AttackerProfile{}; }

AttackerProfile AttackerProfile::switching(int period, WorkerType initial, GameSpec honest, GameSpec malicious,
                                           int lag) {
  if (period < 1) throw std::invalid_argument("switching profile: period must be >= 1");
  if (lag < 0) throw std::invalid_argument("switching profile: lag must be >= 0");
  AttackerProfile p;
  p.kind = Kind::type_switching;
  p.period = period;
  p.initial_type = initial;
  p.honest = std::move(honest);
  p.malicious = std::move(malicious);
  p.lag = lag;
  return p;
}

bool TrajectoryStats::operator==(const TrajectoryStats& o) const {
  if (steps != o.steps || seed != o.seed || avg_u_d != o.avg_u_d || avg_u_a != o.avg_u_a || se_u_d != o.se_u_d ||
      se_u_a != o.se_u_a || series.size() != o.series.size() || regimes.size() != o.regimes.size())
    return false;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto &a = series[i], &b = o.series[i];
    if (a.step != b.step || a.avg_u_d != b.avg_u_d || a.avg_u_a != b.avg_u_a || a.regime != b.regime) return false;
  }
  for (std::size_t i = 0; i < regimes.size(); ++i) {
    const auto &a = regimes[i], &b = o.regimes[i];
    if (a.regime != b.regime || a.steps != b.steps || a.avg_u_d != b.avg_u_d || a.avg_u_a != b.avg_u_a)
      return false;
  }
  return true;
}

TrajectoryStats simulate(const GameSpec& g, const MemoryOneStrategy& pi_d, const AttackerProfile& profile,
                         int64_t steps, uint64_t seed, int64_t stride, const StepObserver& observer) {
  g.validate();
  pi_d.validate(1e-9);
  if (steps < 1) throw std::invalid_argument("simulate: steps must be >= 1");
  if (stride < 1) throw std::invalid_argument("simulate: stride must be >= 1");
  const int K = g.K;
  if (pi_d.K != K) throw std::invalid_argument("simulate: defender strategy K does not match the game");

  using Kind = AttackerProfile::Kind;
  // Per-type attacker policy and game; index 0 is the only type unless switching.
  std::vector<const GameSpec*> games{&g};
  std::vector<std::vector<int>> policies;
  std::vector<std::string> labels{"fixed"};
  switch (profile.kind) {
    case Kind::fixed:
      if (profile.strategy.K != K) throw std::invalid_argument("simulate: attacker strategy K does not match the game");
      profile.strategy.validate(1e-9);
      break;
    case Kind::best_response:
      labels = {"best_response"};
      policies.push_back(br_policy(g, pi_d));
      break;
    case Kind::type_switching: {
      if (profile.period < 1) throw std::invalid_argument("simulate: switching period must be >= 1");
      if (profile.honest.K != K || profile.malicious.K != K)
        throw std::invalid_argument("simulate: per-type games must match K");
      const bool honest_first = profile.initial_type == WorkerType::honest;
      const GameSpec* first = honest_first ? &profile.honest : &profile.malicious;
      const GameSpec* second = honest_first ? &profile.malicious : &profile.honest;
      games = {first, second};
      labels = {to_string(profile.initial_type),
                to_string(honest_first ? WorkerType::malicious : WorkerType::honest)};
      policies = {br_policy(*first, pi_d), br_policy(*second, pi_d)};
      break;
    }
  }

  Rng init_rng(seed, 0), def_rng(seed, 1), att_rng(seed, 2);
  int state = static_cast<int>(init_rng.below(static_cast<uint64_t>(K) * K));

  TrajectoryStats out;
  out.steps = steps;
  out.seed = seed;
  Kahan sum_d, sum_a;
  BatchSeries batch_d, batch_a;
  batch_d.values.reserve(steps);
  batch_a.values.reserve(steps);
  std::map<std::string, std::pair<int64_t, std::pair<Kahan, Kahan>>> per_regime;
  std::vector<std::string> order;

  for (int64_t t = 0; t < steps; ++t) {
    int type = 0, policy_type = 0;
    if (profile.kind == Kind::type_switching) {
      type = static_cast<int>((t / profile.period) % 2);
      const int64_t since = t % profile.period;
      policy_type = (t >= profile.period && since < profile.lag) ? 1 - type : type;
    }
    const int d = sample_row(pi_d.rows, state, def_rng.uniform());
    int a;
    if (profile.kind == Kind::fixed) {
      a = sample_row(profile.strategy.rows, state, att_rng.uniform());
    } else {
      a = policies[policy_type][state];
      att_rng.next_u64();  // keep the stream aligned across profiles
    }
    const UtilityPair u = one_shot_utilities(*games[type], d, a);
    sum_d.add(u.u_d);
    sum_a.add(u.u_a);
    batch_d.values.push_back(u.u_d);
    batch_a.values.push_back(u.u_a);
    const std::string& label = labels[type];
    auto [it, fresh] = per_regime.try_emplace(label);
    if (fresh) order.push_back(label);
    ++it->second.first;
    it->second.second.first.add(u.u_d);
    it->second.second.second.add(u.u_a);
    if (observer) observer(t, d, a, label);
    const int64_t n = t + 1;
    if (n % stride == 0 || n == steps)
      out.series.push_back({n, sum_d.sum / static_cast<double>(n), sum_a.sum / static_cast<double>(n), label});
    state = flat(K, d, a);
  }
  out.avg_u_d = sum_d.sum / static_cast<double>(steps);
  out.avg_u_a = sum_a.sum / static_cast<double>(steps);
  out.se_u_d = batch_d.standard_error();
  out.se_u_a = batch_a.standard_error();
  for (const auto& label : order) {
    const auto& [n, sums] = per_regime.at(label);
    out.regimes.push_back({label, n, sums.first.sum / static_cast<double>(n), sums.second.sum / static_cast<double>(n)});
  }
  return out;
}

SwitchingReport switching_experiment(const CrowdScenario& s, const MemoryOneStrategy& pi_d,
                                     const std::optional<ZdLinearParams>& params, const GameSpec& design,
                                     int64_t steps, uint64_t seed, int64_t stride, int lag) {
  const GameSpec honest = crowd_game(s, WorkerType::honest);
  const GameSpec malicious = crowd_game(s, WorkerType::malicious);
  if (design.K != s.K) throw std::invalid_argument("switching_experiment: design game K does not match");
  const auto profile = AttackerProfile::switching(s.switching.period, s.switching.initial_type, honest, malicious, lag);

  // Line value of every step, in the design game and in the regime's own game.
  std::map<std::string, BatchSeries> design_line;
  std::map<std::string, Kahan> own_line;
  StepObserver obs;
  if (params) {
    obs = [&](int64_t, int d, int a, const std::string& regime) {
      const UtilityPair ud = one_shot_utilities(design, d, a);
      design_line[regime].values.push_back(params->alpha * ud.u_d + params->beta * ud.u_a + params->gamma);
      const GameSpec& own = regime == "honest" ? honest : malicious;
      const UtilityPair uo = one_shot_utilities(own, d, a);
      own_line[regime].add(params->alpha * uo.u_d + params->beta * uo.u_a + params->gamma);
    };
  }
  SwitchingReport rep;
  rep.stats = simulate(honest, pi_d, profile, steps, seed, stride, obs);
  if (params) {
    for (const auto& r : rep.stats.regimes) {
      const BatchSeries& series = design_line.at(r.regime);
      Kahan mean;
      for (double v : series.values) mean.add(v);
      const double n = static_cast<double>(r.steps);
      rep.regimes.push_back({r.regime, r.steps, r.avg_u_d, r.avg_u_a, std::abs(mean.sum / n),
                             series.standard_error(), std::abs(own_line.at(r.regime).sum / n)});
    }
  }
  return rep;
}

std::string trajectory_csv(const TrajectoryStats& t, const std::string& config_hash) {
  std::ostringstream os;
  os.precision(17);
  os << "# seed=" << t.seed << " config_hash=" << config_hash << " steps=" << t.steps << '\n';
  os << "step,avg_u_d,avg_u_a,regime\n";
  for (const auto& p : t.series) os << p.step << ',' << p.avg_u_d << ',' << p.avg_u_a << ',' << p.regime << '\n';
  return os.str();
}

}  // namespace zdmtd
