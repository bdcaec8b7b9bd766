#include "zdmtd/game_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace zdmtd {

namespace {

void check_target(int K, int k, const char* what) {
  if (k < 0 || k >= K)
    throw std::out_of_range(std::string(what) + " index " + std::to_string(k) +
                            " out of range for K=" + std::to_string(K));
}

}  // namespace

void GameSpec::validate() const {
  if (K < 2) throw std::invalid_argument("game: K must be >= 2");
  const auto n = static_cast<size_t>(K);
  if (u_d_cov.size() != n || u_d_unc.size() != n || u_a_cov.size() != n || u_a_unc.size() != n)
    throw std::invalid_argument("game: every profit vector must have length K");
  for (int k = 0; k < K; ++k) {
    for (double v : {u_d_cov[k], u_d_unc[k], u_a_cov[k], u_a_unc[k]})
      if (!std::isfinite(v)) throw std::invalid_argument("game: non-finite profit");
    if (!(u_d_cov[k] > u_d_unc[k]))
      throw std::invalid_argument("game: u_d_cov[" + std::to_string(k) +
                                  "] must exceed u_d_unc (covered beats uncovered)");
  }
}

GameSpec make_game(std::vector<double> u_d_cov, std::vector<double> u_d_unc,
                   std::vector<double> u_a_cov, std::vector<double> u_a_unc) {
  GameSpec g;
  g.K = static_cast<int>(u_d_cov.size());
  g.u_d_cov = std::move(u_d_cov);
  g.u_d_unc = std::move(u_d_unc);
  g.u_a_cov = std::move(u_a_cov);
  g.u_a_unc = std::move(u_a_unc);
  g.validate();
  return g;
}

void MemoryOneStrategy::validate(double tol) const {
  if (K < 2) throw std::invalid_argument("strategy: K must be >= 2");
  if (rows.rows() != K * K || rows.cols() != K)
    throw std::invalid_argument("strategy: expected K^2 x K rows");
  for (int s = 0; s < K * K; ++s) {
    double sum = 0.0;
    for (int k = 0; k < K; ++k) {
      const double p = rows(s, k);
      if (!std::isfinite(p) || p < -tol || p > 1.0 + tol)
        throw std::invalid_argument("strategy: entry out of [0,1] in state " + std::to_string(s));
      sum += p;
    }
    if (std::abs(sum - 1.0) > tol)
      throw std::invalid_argument("strategy: row " + std::to_string(s) + " does not sum to 1");
  }
}

double MemoryOneStrategy::row_defect() const {
  double worst = 0.0;
  for (Eigen::Index s = 0; s < rows.rows(); ++s) {
    worst = std::max(worst, std::abs(rows.row(s).sum() - 1.0));
    worst = std::max(worst, -rows.row(s).minCoeff());
  }
  return worst;
}

MemoryOneStrategy MemoryOneStrategy::uniform(int K) {
  return {K, Eigen::MatrixXd::Constant(K * K, K, 1.0 / K)};
}

MemoryOneStrategy MemoryOneStrategy::always(int K, int target) {
  check_target(K, target, "target");
  MemoryOneStrategy s{K, Eigen::MatrixXd::Zero(K * K, K)};
  s.rows.col(target).setOnes();
  return s;
}

MemoryOneStrategy MemoryOneStrategy::memoryless(const Eigen::VectorXd& x) {
  const int K = static_cast<int>(x.size());
  MemoryOneStrategy s{K, Eigen::MatrixXd(K * K, K)};
  for (int r = 0; r < K * K; ++r) s.rows.row(r) = x.transpose();
  return s;
}

MemoryOneStrategy MemoryOneStrategy::deterministic(int K, const std::vector<int>& policy) {
  if (static_cast<int>(policy.size()) != K * K)
    throw std::invalid_argument("policy: expected one action per state");
  MemoryOneStrategy s{K, Eigen::MatrixXd::Zero(K * K, K)};
  for (int r = 0; r < K * K; ++r) {
    check_target(K, policy[r], "policy action");
    s.rows(r, policy[r]) = 1.0;
  }
  return s;
}

UtilityPair one_shot_utilities(const GameSpec& g, int d, int a) {
  check_target(g.K, d, "defender action");
  check_target(g.K, a, "attacker action");
  if (d == a) return {g.u_d_cov[a], g.u_a_cov[a]};
  return {g.u_d_unc[a], g.u_a_unc[a]};
}

Eigen::VectorXd profit_vector(const GameSpec& g, Player p) {
  const int K = g.K;
  const auto& cov = p == Player::defender ? g.u_d_cov : g.u_a_cov;
  const auto& unc = p == Player::defender ? g.u_d_unc : g.u_a_unc;
  Eigen::VectorXd v(K * K);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) v(flat(K, i, j)) = i == j ? cov[j] : unc[j];
  return v;
}

Eigen::VectorXd hat_indicator(int K, int k) {
  check_target(K, k, "target");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(K * K);
  v.segment(k * K, K).setOnes();
  return v;
}

CanonicalPermutation CanonicalPermutation::identity(int K) {
  std::vector<int> p(K);
  std::iota(p.begin(), p.end(), 0);
  return from_perm(std::move(p));
}

CanonicalPermutation CanonicalPermutation::from_perm(std::vector<int> perm) {
  const int K = static_cast<int>(perm.size());
  std::vector<int> inv(K, -1);
  for (int t = 0; t < K; ++t) {
    if (perm[t] < 0 || perm[t] >= K || inv[perm[t]] != -1)
      throw std::invalid_argument("permutation: not a bijection");
    inv[perm[t]] = t;
  }
  return {std::move(perm), std::move(inv)};
}

CanonicalPermutation CanonicalPermutation::inverse() const { return {inv, perm}; }

bool CanonicalPermutation::is_identity() const {
  for (size_t t = 0; t < perm.size(); ++t)
    if (perm[t] != static_cast<int>(t)) return false;
  return true;
}

GameSpec permute_game(const GameSpec& g, const CanonicalPermutation& p) {
  GameSpec out = g;
  for (int t = 0; t < g.K; ++t) {
    const int l = p.perm[t];
    out.u_d_cov[l] = g.u_d_cov[t];
    out.u_d_unc[l] = g.u_d_unc[t];
    out.u_a_cov[l] = g.u_a_cov[t];
    out.u_a_unc[l] = g.u_a_unc[t];
  }
  return out;
}

MemoryOneStrategy permute_strategy(const MemoryOneStrategy& s, const CanonicalPermutation& p) {
  const int K = s.K;
  MemoryOneStrategy out{K, Eigen::MatrixXd(K * K, K)};
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j)
      for (int k = 0; k < K; ++k)
        out.rows(flat(K, p.perm[i], p.perm[j]), p.perm[k]) = s.rows(flat(K, i, j), k);
  return out;
}

Eigen::VectorXd permute_states(const Eigen::VectorXd& v, const CanonicalPermutation& p) {
  const int K = static_cast<int>(p.perm.size());
  Eigen::VectorXd out(K * K);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) out(flat(K, p.perm[i], p.perm[j])) = v(flat(K, i, j));
  return out;
}

std::pair<GameSpec, CanonicalPermutation> canonicalize(const GameSpec& g) {
  g.validate();
  const int K = g.K;
  const int top = static_cast<int>(std::max_element(g.u_d_cov.begin(), g.u_d_cov.end()) -
                                   g.u_d_cov.begin());
  std::vector<int> perm(K);
  for (int t = 0; t < K; ++t) perm[t] = (t - top + K) % K;
  auto p = CanonicalPermutation::from_perm(std::move(perm));
  return {permute_game(g, p), p};
}

}  // namespace zdmtd
