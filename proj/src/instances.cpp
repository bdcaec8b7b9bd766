#include "zdmtd/instances.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace zdmtd {

MemoryOneStrategy random_strategy(int K, Rng& rng) {
  MemoryOneStrategy s{K, Eigen::MatrixXd(K * K, K)};
  for (int r = 0; r < K * K; ++r) {
    const auto row = rng.simplex(K);
    for (int k = 0; k < K; ++k) s.rows(r, k) = row[k];
  }
  return s;
}

GameSpec random_game(int K, Rng& rng) {
  GameSpec g;
  g.K = K;
  for (int k = 0; k < K; ++k) {
    const double unc = rng.uniform(-5.0, 5.0);
    g.u_d_unc.push_back(unc);
    g.u_d_cov.push_back(unc + rng.uniform(0.1, 5.0));
    g.u_a_cov.push_back(rng.uniform(-5.0, 5.0));
    g.u_a_unc.push_back(rng.uniform(-5.0, 5.0));
  }
  g.validate();
  return g;
}

GameSpec random_zd_game(int K, Rng& rng) {
  if (K <= 3) return random_game(K, rng);
  const bool anchor = rng.uniform() < 1.0 / 3.0;
  const double x0 = rng.uniform(-3.0, 3.0), y0 = rng.uniform(-3.0, 3.0);
  const double ang = rng.uniform(0.0, 6.283185307179586);
  const double dx = std::cos(ang), dy = std::sin(ang);
  GameSpec g;
  g.K = K;
  for (int k = 0; k < K; ++k) {
    const double t = anchor ? 0.0 : rng.uniform(-2.0, 2.0);
    g.u_d_unc.push_back(x0 + t * dx);
    g.u_a_unc.push_back(y0 + t * dy);
    g.u_d_cov.push_back(g.u_d_unc.back() + rng.uniform(0.1, 5.0));
    g.u_a_cov.push_back(rng.uniform(-5.0, 5.0));
  }
  // Side of the uncovered line (through (x0, y0) along (dx, dy)) for covered
  // points; in anchor mode any line through the anchor works, so use the same.
  auto side = [&](int k) { return dx * (g.u_a_cov[k] - y0) - dy * (g.u_d_cov[k] - x0); };
  bool pos = false, neg = false;
  for (int k = 0; k < K; ++k) (side(k) >= 0 ? pos : neg) = true;
  if (!pos || !neg) {
    // Reflect one covered attacker profit across the line along the u_a axis.
    const int k = static_cast<int>(rng.below(K));
    if (std::abs(dx) > 1e-3) {
      g.u_a_cov[k] -= 2.0 * side(k) / dx;
    } else {
      g.u_a_cov[k] = -g.u_a_cov[k];
    }
  }
  g.validate();
  return g;
}

GameSpec corollary_game(int K, CorollaryKind kind, Rng& rng, bool shuffle) {
  if (K < 2) throw std::invalid_argument("corollary_game: K must be >= 2");
  GameSpec g;
  g.K = K;
  g.u_d_cov.assign(K, 0.0);
  g.u_d_unc.assign(K, 0.0);
  g.u_a_cov.assign(K, 0.0);
  g.u_a_unc.assign(K, 0.0);
  const int last = K - 1;
  const double top = rng.uniform(2.0, 6.0);
  g.u_d_cov[0] = top;
  g.u_d_unc[0] = top - rng.uniform(0.5, 4.0);
  g.u_d_cov[last] = top - rng.uniform(0.1, 2.0);
  g.u_d_unc[last] = g.u_d_cov[last] - rng.uniform(0.1, 3.0);
  for (int k = 1; k < last; ++k) {
    g.u_d_unc[k] = top - rng.uniform(1.0, 4.0);
    g.u_d_cov[k] = g.u_d_unc[k] + rng.uniform(0.1, 0.95) * (top - g.u_d_unc[k]);
    g.u_a_cov[k] = rng.uniform(-5.0, 5.0);
  }
  if (kind == CorollaryKind::equalizer) {
    const double ya = rng.uniform(-3.0, 3.0);
    g.u_a_cov[0] = ya;
    for (int k = 1; k < last; ++k) g.u_a_unc[k] = ya;
    g.u_a_cov[last] = ya + rng.uniform(0.0, 3.0);
    g.u_a_unc[0] = ya + rng.uniform(0.0, 3.0);
    g.u_a_unc[last] = ya - rng.uniform(0.0, 3.0);
  } else {
    const double theta = rng.uniform(-2.0, 2.0);
    const double chi = kind == CorollaryKind::extortion ? rng.uniform(1.0, 3.0) : rng.uniform(0.2, 1.0);
    // Attacker profit that puts defender profit x on the line through (theta, theta).
    auto on_line = [&](double x) { return theta + (x - theta) / chi; };
    g.u_a_cov[0] = on_line(top);
    for (int k = 1; k < last; ++k) g.u_a_unc[k] = on_line(g.u_d_unc[k]);
    g.u_a_unc[0] = on_line(g.u_d_unc[0]) - rng.uniform(0.0, 2.0);
    g.u_a_cov[last] = on_line(g.u_d_cov[last]) - rng.uniform(0.0, 2.0);
    g.u_a_unc[last] = on_line(g.u_d_unc[last]) + rng.uniform(0.0, 2.0);
  }
  g.validate();
  if (!shuffle) return g;
  std::vector<int> perm(K);
  for (int k = 0; k < K; ++k) perm[k] = k;
  for (int k = K - 1; k > 0; --k) std::swap(perm[k], perm[rng.below(k + 1)]);
  return permute_game(g, CanonicalPermutation::from_perm(perm));
}

}  // namespace zdmtd
