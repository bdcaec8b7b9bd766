#include "zdmtd/mdp_br.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "zdmtd/parallel.hpp"

namespace zdmtd {

namespace {

constexpr int kMaxPolicyIterations = 1000;

// Per-state reward matrix R(s, a) = sum_d pd(d|s) u(d, a) for one player.
Eigen::MatrixXd reward_matrix(const GameSpec& g, const Eigen::MatrixXd& pd, Player p) {
  const int K = g.K;
  const auto& cov = p == Player::defender ? g.u_d_cov : g.u_a_cov;
  const auto& unc = p == Player::defender ? g.u_d_unc : g.u_a_unc;
  Eigen::MatrixXd R(K * K, K);
  for (int s = 0; s < K * K; ++s)
    for (int a = 0; a < K; ++a) R(s, a) = pd(s, a) * cov[a] + (1.0 - pd(s, a)) * unc[a];
  return R;
}

// The eps-mixed MDP. Executing action a plays a' with probability
// q(a'|a) = (1 - eps)[a' = a] + eps/K.
struct MixedMdp {
  int K;
  double eps;
  Eigen::MatrixXd pd;  // eps-mixed defender rows
  Eigen::MatrixXd ra;  // rewards after action mixing
  Eigen::MatrixXd rd;

  MixedMdp(const GameSpec& g, const MemoryOneStrategy& pi_d, double e)
      : K(g.K), eps(e), pd(eps_mix(pi_d, e).rows) {
    ra = mix_actions(reward_matrix(g, pd, Player::attacker));
    rd = mix_actions(reward_matrix(g, pd, Player::defender));
  }

  Eigen::MatrixXd mix_actions(const Eigen::MatrixXd& R) const {
    Eigen::VectorXd avg = R.rowwise().mean();
    return (1.0 - eps) * R + eps * avg.replicate(1, K);
  }

  struct Eval {
    double gain;
    Eigen::VectorXd h;
  };

  Eval evaluate(const Eigen::MatrixXd& r, const std::vector<int>& policy) const {
    const int n = K * K;
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd b(n);
    for (int s = 0; s < n; ++s) {
      const int a = policy[s];
      b(s) = r(s, a);
      for (int d = 0; d < K; ++d) {
        const double p = pd(s, d);
        for (int a2 = 0; a2 < K; ++a2)
          A(s, flat(K, d, a2)) -= p * ((a2 == a ? 1.0 - eps : 0.0) + eps / K);
      }
    }
    // Unknowns (g, h_1..h_{n-1}) with h_0 = 0: column 0 carries g.
    A.col(0).setOnes();
    Eigen::VectorXd x = Eigen::PartialPivLU<Eigen::MatrixXd>(A).solve(b);
    Eval e{x(0), x};
    e.h(0) = 0.0;
    return e;
  }

  // Q(s, a) = r(s, a) + sum_{s'} P(s'|s, a) h(s').
  Eigen::MatrixXd q_values(const Eigen::MatrixXd& r, const Eigen::VectorXd& h) const {
    const Eigen::Map<const Eigen::MatrixXd> Ht(h.data(), K, K);  // Ht(a, d) = h(flat(d, a))
    Eigen::MatrixXd H = Ht.transpose();                          // H(d, a)
    Eigen::VectorXd hbar = H.rowwise().mean();
    Eigen::MatrixXd next = (1.0 - eps) * (pd * H);
    next.colwise() += eps * (pd * hbar);
    return r + next;
  }
};

// Rounding in Q grows with the bias magnitude, which is large on nearly
// reducible chains where only eps-mixing connects the classes.
constexpr double kBiasRounding = 1e-14;

double margin(const Eigen::MatrixXd& r, const Eigen::VectorXd& h) {
  return 1e-12 * (1.0 + r.cwiseAbs().maxCoeff()) + kBiasRounding * h.cwiseAbs().maxCoeff();
}

// allowed(s, a) != 0 marks admissible actions; empty means all.
BestResponse policy_iteration(const MixedMdp& m, const Eigen::MatrixXd& r,
                              const Eigen::MatrixXi& allowed, std::vector<int> policy) {
  const int n = m.K * m.K;
  auto ok = [&](int s, int a) { return allowed.size() == 0 || allowed(s, a) != 0; };
  for (int it = 0;; ++it) {
    if (it > kMaxPolicyIterations)
      throw std::runtime_error("best_response: policy iteration did not settle");
    const auto e = m.evaluate(r, policy);
    const Eigen::MatrixXd Q = m.q_values(r, e.h);
    const double tol = margin(r, e.h);
    bool changed = false;
    double residual = 0.0;
    for (int s = 0; s < n; ++s) {
      double best = -INFINITY;
      for (int a = 0; a < m.K; ++a)
        if (ok(s, a)) best = std::max(best, Q(s, a));
      residual = std::max(residual, std::abs(e.gain + e.h(s) - best));
      if (Q(s, policy[s]) >= best - tol) continue;
      for (int a = 0; a < m.K; ++a)
        if (ok(s, a) && Q(s, a) >= best - tol) {
          policy[s] = a;
          break;
        }
      changed = true;
    }
    if (!changed) {
      BestResponse br{policy, e.gain, e.h, residual};
      if (residual > kBellmanTol * (1.0 + std::abs(e.gain)) + kBiasRounding * e.h.cwiseAbs().maxCoeff())
        throw std::runtime_error("best_response: Bellman residual above tolerance");
      return br;
    }
  }
}

std::vector<int> greedy_policy(const Eigen::MatrixXd& r, const Eigen::MatrixXi& allowed) {
  std::vector<int> pol(r.rows(), 0);
  for (Eigen::Index s = 0; s < r.rows(); ++s) {
    int best = -1;
    for (Eigen::Index a = 0; a < r.cols(); ++a) {
      if (allowed.size() != 0 && allowed(s, a) == 0) continue;
      if (best < 0 || r(s, a) > r(s, best)) best = static_cast<int>(a);
    }
    pol[s] = best;
  }
  return pol;
}

void check_k(const GameSpec& g, const MemoryOneStrategy& pi_d) {
  g.validate();
  if (g.K != pi_d.K) throw std::invalid_argument("mdp_br: game and strategy disagree on K");
}

BestResponse finish(const MixedMdp& m, const std::vector<int>& policy) {
  const auto e = m.evaluate(m.ra, policy);
  const Eigen::MatrixXd Q = m.q_values(m.ra, e.h);
  double residual = 0.0;
  for (int s = 0; s < m.K * m.K; ++s)
    residual = std::max(residual, std::abs(e.gain + e.h(s) - Q.row(s).maxCoeff()));
  return {policy, e.gain, e.h, residual};
}

}  // namespace

Eigen::VectorXd AttackerMdp::transition(int s, int a) const {
  const int k = K();
  Eigen::VectorXd p = Eigen::VectorXd::Zero(k * k);
  for (int d = 0; d < k; ++d) p(flat(k, d, a)) = pi_d.rows(s, d);
  return p;
}

AttackerMdp build_attacker_mdp(const GameSpec& g, const MemoryOneStrategy& pi_d) {
  check_k(g, pi_d);
  return {g, pi_d, reward_matrix(g, pi_d.rows, Player::attacker)};
}

BestResponse best_response(const AttackerMdp& mdp, double eps) {
  const MixedMdp m(mdp.game, mdp.pi_d, eps);
  const Eigen::MatrixXi none;
  return policy_iteration(m, m.ra, none, greedy_policy(m.ra, none));
}

std::vector<int> decode_policy(long long code, int K) {
  const int n = K * K;
  std::vector<int> pol(n);
  for (int s = n - 1; s >= 0; --s) {
    pol[s] = static_cast<int>(code % K);
    code /= K;
  }
  return pol;
}

long long policy_count(int K) {
  long long c = 1;
  for (int s = 0; s < K * K; ++s) c *= K;
  return c;
}

BestResponse exhaustive_br(const GameSpec& g, const MemoryOneStrategy& pi_d) {
  check_k(g, pi_d);
  if (g.K > 3) throw std::invalid_argument("exhaustive_br: K must be <= 3");
  const int K = g.K;
  const long long count = policy_count(K);
  std::vector<double> gains(count);
  parallel_for(static_cast<int>(count), [&](int c) {
    const auto pol = decode_policy(c, K);
    gains[c] = mixed_utilities(g, pi_d, MemoryOneStrategy::deterministic(K, pol)).u_a;
  });
  long long best = 0;
  for (long long c = 1; c < count; ++c)
    if (gains[c] > gains[best]) best = c;
  const MixedMdp m(g, pi_d, kEpsMix);
  BestResponse br = finish(m, decode_policy(best, K));
  br.gain = gains[best];
  return br;
}

double br_tie_tolerance(const GameSpec& g) {
  double span = 0.0;
  for (int k = 0; k < g.K; ++k)
    span = std::max({span, std::abs(g.u_a_cov[k]), std::abs(g.u_a_unc[k])});
  return 1e-9 + 100.0 * kEpsMix * span;
}

std::pair<UtilityPair, BestResponse> defender_utility_under_br(const GameSpec& g,
                                                               const MemoryOneStrategy& pi_d,
                                                               std::optional<double> tie_override) {
  check_k(g, pi_d);
  const MixedMdp m(g, pi_d, kEpsMix);
  const Eigen::MatrixXi none;
  const BestResponse att = policy_iteration(m, m.ra, none, greedy_policy(m.ra, none));
  // Every policy of the mixed MDP is irreducible, so a policy is gain-optimal
  // exactly when it only uses actions attaining max_a Q*(s, a). Restricting to
  // those actions and optimizing the defender's reward is the optimistic
  // tie-break. The window is widened from gain to Q scale by the bias span
  // relative to the reward span (a proxy for the mixing time); the result is
  // then rechecked in gain space.
  const Eigen::MatrixXd Q = m.q_values(m.ra, att.bias);
  const double tie = tie_override.value_or(br_tie_tolerance(g));
  const double r_span = std::max(m.ra.maxCoeff() - m.ra.minCoeff(), 1e-300);
  const double tie_q = tie * std::max(1.0, (att.bias.maxCoeff() - att.bias.minCoeff()) / r_span);
  const int n = g.K * g.K;
  Eigen::MatrixXi allowed = Eigen::MatrixXi::Zero(n, g.K);
  for (int s = 0; s < n; ++s) {
    const double best = Q.row(s).maxCoeff();
    for (int a = 0; a < g.K; ++a) allowed(s, a) = Q(s, a) >= best - tie_q ? 1 : 0;
  }
  const BestResponse def = policy_iteration(m, m.rd, allowed, att.policy);
  const UtilityPair u_att = mixed_utilities(g, pi_d, MemoryOneStrategy::deterministic(g.K, att.policy));
  UtilityPair u = mixed_utilities(g, pi_d, MemoryOneStrategy::deterministic(g.K, def.policy));
  std::vector<int> pick = def.policy;
  if (u.u_a < u_att.u_a - tie || u.u_d < u_att.u_d) {
    pick = att.policy;
    u = u_att;
  }
  BestResponse br = finish(m, pick);
  br.gain = u.u_a;
  return {u, br};
}

std::pair<UtilityPair, BestResponse> exhaustive_defender_utility(const GameSpec& g,
                                                                 const MemoryOneStrategy& pi_d,
                                                               std::optional<double> tie_override) {
  check_k(g, pi_d);
  if (g.K > 3) throw std::invalid_argument("exhaustive_defender_utility: K must be <= 3");
  const int K = g.K;
  const long long count = policy_count(K);
  std::vector<UtilityPair> vals(count);
  parallel_for(static_cast<int>(count), [&](int c) {
    vals[c] = mixed_utilities(g, pi_d, MemoryOneStrategy::deterministic(K, decode_policy(c, K)));
  });
  double best_gain = -INFINITY;
  for (const auto& v : vals) best_gain = std::max(best_gain, v.u_a);
  const double tie = tie_override.value_or(br_tie_tolerance(g));
  long long pick = -1;
  for (long long c = 0; c < count; ++c) {
    if (vals[c].u_a < best_gain - tie) continue;
    if (pick < 0 || vals[c].u_d > vals[pick].u_d) pick = c;
  }
  const MixedMdp m(g, pi_d, kEpsMix);
  BestResponse br = finish(m, decode_policy(pick, K));
  br.gain = vals[pick].u_a;
  return {vals[pick], br};
}

}  // namespace zdmtd
