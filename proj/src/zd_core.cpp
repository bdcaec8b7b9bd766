#include "zdmtd/zd_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "zdmtd/instances.hpp"
#include "zdmtd/lp_core.hpp"
#include "zdmtd/markov.hpp"
#include "zdmtd/parallel.hpp"
#include "zdmtd/rng.hpp"

namespace zdmtd {

bool ZdLinearParams::is_zero(double tol) const {
  return std::abs(alpha) <= tol && std::abs(beta) <= tol && std::abs(gamma) <= tol;
}

ZdLinearParams ZdLinearParams::normalized() const {
  const double m = std::max({std::abs(alpha), std::abs(beta), std::abs(gamma)});
  if (m == 0.0) return *this;
  return scaled(1.0 / m);
}

double FeasibilityParams::max_except(int k) const {
  double m = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < phi.size(); ++j)
    if (j != k) m = std::max(m, phi(j));
  return m;
}

double FeasibilityParams::min_except(int k) const {
  double m = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < phi.size(); ++j)
    if (j != k) m = std::min(m, phi(j));
  return m;
}

bool FeasibilityParams::monotone(double tol) const {
  for (Eigen::Index k = 0; k + 1 < phi.size(); ++k)
    if (phi(k) < phi(k + 1) - tol) return false;
  return phi.size() == 0 || std::abs(phi(phi.size() - 1)) <= tol;
}

std::string Classification::label() const {
  switch (kind) {
    case ZdClass::equalizer: return "equalizer";
    case ZdClass::extortion: return "extortion";
    case ZdClass::generous: return "generous";
    case ZdClass::general: return "general";
  }
  return "general";
}

Eigen::VectorXd zd_target(const GameSpec& g, const ZdLinearParams& p) {
  return p.alpha * profit_vector(g, Player::defender) + p.beta * profit_vector(g, Player::attacker) +
         Eigen::VectorXd::Constant(g.K * g.K, p.gamma);
}

namespace {

double fc(const GameSpec& g, const ZdLinearParams& p, int k) {
  return p.alpha * g.u_d_cov[k] + p.beta * g.u_a_cov[k] + p.gamma;
}
double fu(const GameSpec& g, const ZdLinearParams& p, int k) {
  return p.alpha * g.u_d_unc[k] + p.beta * g.u_a_unc[k] + p.gamma;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

double scale_of(const GameSpec& g, const ZdLinearParams& p, const Eigen::VectorXd& phi) {
  double s = 1.0 + (phi.size() ? phi.cwiseAbs().maxCoeff() : 0.0);
  for (int k = 0; k < g.K; ++k) s = std::max({s, std::abs(fc(g, p, k)), std::abs(fu(g, p, k))});
  return s;
}

}  // namespace

std::vector<std::string> existence_violations(const GameSpec& g, const ZdLinearParams& p,
                                              const FeasibilityParams& fp, double tol) {
  const int K = g.K;
  std::vector<std::string> out;
  if (fp.phi.size() != K) {
    out.push_back("phi has wrong length");
    return out;
  }
  const double t = tol * scale_of(g, p, fp.phi);
  if (std::abs(fp.phi(K - 1)) > t) out.push_back("phi of the last label must be 0");
  for (int k = 0; k < K; ++k)
    if (fp.phi(k) < -t) out.push_back("phi[" + std::to_string(k) + "] is negative");
  const double pmax = fp.max();
  for (int k = 0; k < K; ++k) {
    const double c = fc(g, p, k), u = fu(g, p, k);
    const double phk = fp.phi(k);
    if (c < -phk - t)
      out.push_back("covered lower bound at target " + std::to_string(k) + ": " + fmt(c) + " < " + fmt(-phk));
    if (c > pmax - phk + t)
      out.push_back("covered upper bound at target " + std::to_string(k) + ": " + fmt(c) + " > " +
                    fmt(pmax - phk));
    const double lo = -fp.min_except(k), hi = pmax - fp.max_except(k);
    if (u < lo - t)
      out.push_back("uncovered lower bound at target " + std::to_string(k) + ": " + fmt(u) + " < " + fmt(lo));
    if (u > hi + t)
      out.push_back("uncovered upper bound at target " + std::to_string(k) + ": " + fmt(u) + " > " + fmt(hi));
  }
  return out;
}

namespace {

// Feasibility parameters with phi(m) as the maximum, over phi(0..K-2).
LinearProgram phi_program(const GameSpec& g, const ZdLinearParams& p, int m) {
  const int K = g.K;
  const int nv = K - 1;
  const Eigen::VectorXd f = zd_target(g, p);
  LinearProgram lp(nv);
  for (int k = 0; k < nv; ++k) {
    if (k == m) continue;
    std::vector<double> row(nv, 0.0);
    row[m] = 1.0;
    row[k] = -1.0;
    lp.add(row, Relation::ge, 0.0);
  }
  // Per state: 0 <= f_s + phi_i <= phi_m.
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) {
      const double fs = f(flat(K, i, j));
      std::vector<double> row(nv, 0.0);
      if (i < nv) row[i] = 1.0;
      lp.add(row, Relation::ge, -fs);
      std::vector<double> up = row;
      up[m] -= 1.0;
      lp.add(up, Relation::le, -fs);
    }
  return lp;
}

}  // namespace

FeasibilityParams construct_phi(const GameSpec& g, const ZdLinearParams& p) {
  const int K = g.K;
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(K);
  if (K == 2) {
    phi(0) = std::abs(fu(g, p, 0)) + std::abs(fc(g, p, 0));
    return {phi};
  }
  phi(K - 2) = std::max(std::abs(fc(g, p, K - 1)), std::abs(fu(g, p, K - 1)));
  for (int k = 1; k <= K - 3; ++k) phi(k) = std::abs(fc(g, p, k)) + phi(K - 2);
  double mid = 0.0;
  for (int k = 1; k <= K - 2; ++k) mid += phi(k);
  phi(0) = 2.0 * mid + std::abs(fu(g, p, 0)) + std::abs(fc(g, p, 0));
  return {phi};
}

ExistenceResult existence_check(const GameSpec& g, const ZdLinearParams& p) {
  g.validate();
  const int K = g.K;
  ExistenceResult res;
  FeasibilityParams lit = construct_phi(g, p);
  auto viol = existence_violations(g, p, lit);
  if (viol.empty()) {
    res.exists = true;
    res.phi = lit;
    res.from_formula = true;
    return res;
  }
  const int nv = K - 1;  // phi(0..K-2); phi(K-1) = 0
  for (int m = 0; m < nv; ++m) {
    const LinearProgram lp = phi_program(g, p, m);
    const Feasibility fz = check_feasible(lp);
    if (!fz.feasible) continue;
    FeasibilityParams cand{Eigen::VectorXd::Zero(K)};
    for (int k = 0; k < nv; ++k) cand.phi(k) = std::max(fz.point[k], 0.0);
    if (existence_violations(g, p, cand).empty()) {
      res.exists = true;
      res.phi = cand;
      return res;
    }
  }
  res.witness = std::move(viol);
  res.witness.insert(res.witness.begin(), "formula phi fails and no LP candidate argmax label is feasible");
  return res;
}

std::optional<FeasibilityParams> minimal_phi(const GameSpec& g, const ZdLinearParams& p) {
  g.validate();
  // With phi(0) as the maximum the per-state bounds separate by defender
  // action i: phi(i) >= -min_j f(i, j) and phi(0) >= phi(i) + max_j f(i, j).
  const int K = g.K;
  const Eigen::VectorXd f = zd_target(g, p);
  FeasibilityParams out{Eigen::VectorXd::Zero(K)};
  double top = 0.0;
  for (int i = 0; i < K; ++i) {
    const Eigen::VectorXd row = f.segment(i * K, K);
    if (i == K - 1) {
      top = std::max(top, row.maxCoeff());
    } else {
      out.phi(i) = std::max(0.0, -row.minCoeff());
      top = std::max(top, out.phi(i));
      if (i > 0) top = std::max(top, out.phi(i) + row.maxCoeff());
    }
  }
  out.phi(0) = top;
  if (!existence_violations(g, p, out).empty()) return std::nullopt;
  return out;
}

ZdStrategy construct_strategy(const GameSpec& g, const ZdLinearParams& p, const FeasibilityParams& fp,
                              const std::optional<WeightParams>& omega_in) {
  g.validate();
  const int K = g.K, n = K * K;
  if (p.is_zero())
    throw ConstructionError(ConstructionError::Kind::degenerate,
                            "construct_strategy: all-zero linear parameters (any strategy qualifies)");
  if (fp.phi.size() != K) throw std::invalid_argument("construct_strategy: phi has wrong length");
  const Eigen::VectorXd& phi = fp.phi;
  if (phi(K - 1) != 0.0) throw std::invalid_argument("construct_strategy: phi of the last label must be 0");
  if (phi.minCoeff() < 0.0) throw std::invalid_argument("construct_strategy: phi must be nonnegative");
  Eigen::VectorXd user = omega_in ? omega_in->omega : WeightParams::uniform(K).omega;
  if (user.size() != K) throw std::invalid_argument("construct_strategy: omega has wrong length");

  const Eigen::VectorXd f = zd_target(g, p);
  const double scale = scale_of(g, p, phi);
  const double tol = 1e-12 * scale;
  const double pmax = phi.maxCoeff();

  // prefix_max(k) = max_{m < k} phi(m), 0 for k = 0.
  Eigen::VectorXd prefix_max = Eigen::VectorXd::Zero(K);
  for (int k = 1; k < K; ++k) prefix_max(k) = std::max(prefix_max(k - 1), phi(k - 1));

  // Per state: T = remaining target for labels <= k, R = remaining mass.
  Eigen::VectorXd T(n), R = Eigen::VectorXd::Ones(n), r(n);
  for (int s = 0; s < n; ++s) {
    const int i = state_def(K, s);
    double t = f(s) + (i < K - 1 ? phi(i) : 0.0);
    if (t < -1e-9 * scale || t > pmax + 1e-9 * scale)
      throw ConstructionError(ConstructionError::Kind::empty_interval,
                              "construct_strategy: state " + std::to_string(s) + " needs phi-weighted mass " +
                                  fmt(t) + " outside [0, " + fmt(pmax) + "]",
                              0.0, pmax);
    T(s) = std::clamp(t, 0.0, pmax);
    r(s) = f(s);  // f_s - sum_{m > k} phi_m (pi(m|s) - hat_m(s)), updated as k descends
  }

  ZdStrategy out;
  out.params = p;
  out.phi = fp;
  out.strategy = {K, Eigen::MatrixXd::Zero(n, K)};
  out.omega = Eigen::MatrixXd::Constant(K, n, std::numeric_limits<double>::quiet_NaN());
  out.scalar_omega.assign(K, false);

  Eigen::VectorXd lo(n), hi(n);
  for (int k = K - 2; k >= 0; --k) {
    const double ph = phi(k), mx = prefix_max(k);
    for (int s = 0; s < n; ++s) {
      double a = 0.0, b = R(s);
      if (ph > 0.0) b = std::min(b, T(s) / ph);
      const double c = mx - ph, rhs = R(s) * mx - T(s);
      if (c > 0.0)
        b = std::min(b, rhs / c);
      else if (c < 0.0)
        a = std::max(a, rhs / c);
      else if (rhs < -tol) {
        if (ph == 0.0)
          throw ConstructionError(ConstructionError::Kind::degenerate,
                                  "construct_strategy: phi[" + std::to_string(k) +
                                      "] = 0 but the state still needs phi-weighted mass " + fmt(T(s)));
        a = b + 1.0;  // forces the empty-interval report below
      }
      if (a > b + 1e-12) {
        throw ConstructionError(ConstructionError::Kind::empty_interval,
                                "construct_strategy: empty interval for pi_d(" + std::to_string(k) + "|state " +
                                    std::to_string(s) + ") = [" + fmt(a) + ", " + fmt(b) + "]",
                                a, b);
      }
      lo(s) = a;
      hi(s) = std::max(a, b);
    }
    if (ph > 0.0) {
      // omega interval: p = (r - omega)/phi + hat is decreasing in omega.
      double wlo = -INFINITY, whi = INFINITY;
      for (int s = 0; s < n; ++s) {
        const double hat = state_def(K, s) == k ? 1.0 : 0.0;
        wlo = std::max(wlo, r(s) - ph * (hi(s) - hat));
        whi = std::min(whi, r(s) - ph * (lo(s) - hat));
      }
      const bool scalar = wlo <= whi + 1e-12 * scale;
      double w = user(k);
      if (scalar && !(w >= wlo && w <= whi)) w = 0.5 * (wlo + std::max(wlo, whi));
      out.scalar_omega[k] = scalar;
      for (int s = 0; s < n; ++s) {
        const double hat = state_def(K, s) == k ? 1.0 : 0.0;
        double ws = w;
        if (!scalar) {
          const double p_user = (r(s) - user(k)) / ph + hat;
          ws = (p_user >= lo(s) && p_user <= hi(s)) ? user(k) : r(s) - ph * (0.5 * (lo(s) + hi(s)) - hat);
        }
        const double pk = std::clamp((r(s) - ws) / ph + hat, lo(s), hi(s));
        out.strategy.rows(s, k) = pk;
        out.omega(k, s) = r(s) - ph * (pk - hat);
      }
    } else {
      for (int s = 0; s < n; ++s) out.strategy.rows(s, k) = 0.5 * (lo(s) + hi(s));
    }
    for (int s = 0; s < n; ++s) {
      const double pk = out.strategy.rows(s, k);
      const double hat = state_def(K, s) == k ? 1.0 : 0.0;
      T(s) = std::max(T(s) - ph * pk, 0.0);
      R(s) = std::max(R(s) - pk, 0.0);
      r(s) -= ph * (pk - hat);
    }
  }
  for (int s = 0; s < n; ++s) out.strategy.rows(s, K - 1) = R(s);
  // Only rounding should need absorbing: renormalize rows, then recheck.
  for (int s = 0; s < n; ++s) out.strategy.rows.row(s) /= out.strategy.rows.row(s).sum();

  out.residual = defining_residual(g, out.strategy, p, fp);
  if (out.residual > kZdResidualTol)
    throw ConstructionError(ConstructionError::Kind::empty_interval,
                            "construct_strategy: defining-equation residual " + fmt(out.residual) +
                                " exceeds tolerance");
  out.classification = classify(p);
  return out;
}

double defining_residual(const GameSpec& g, const MemoryOneStrategy& s, const ZdLinearParams& p,
                    const FeasibilityParams& fp) {
  const int K = g.K;
  const Eigen::VectorXd f = zd_target(g, p);
  double worst = 0.0;
  for (int st = 0; st < K * K; ++st) {
    const int i = state_def(K, st);
    double lhs = 0.0;
    for (int k = 0; k < K; ++k) lhs += fp.phi(k) * (s.rows(st, k) - (i == k ? 1.0 : 0.0));
    worst = std::max(worst, std::abs(lhs - f(st)));
  }
  return worst;
}

VerifyReport verify(const GameSpec& g, const ZdStrategy& zd, int n_samples, uint64_t seed) {
  VerifyReport rep;
  rep.n_samples = n_samples;
  rep.defining_residual = defining_residual(g, zd.strategy, zd.params, zd.phi);
  rep.row_defect = zd.strategy.row_defect();
  std::vector<double> res(std::max(n_samples, 0), 0.0);
  parallel_for(n_samples, [&](int i) {
    Rng rng(seed, static_cast<uint64_t>(i));
    const MemoryOneStrategy att = random_strategy(g.K, rng);
    res[i] = zd_residual(g, zd.strategy, att, zd.params.alpha, zd.params.beta, zd.params.gamma);
  });
  for (double v : res) rep.max_line_residual = std::max(rep.max_line_residual, v);
  return rep;
}

Classification classify(const ZdLinearParams& raw) {
  const ZdLinearParams p = raw.normalized();
  Classification c;
  if (p.is_zero()) return c;
  if (std::abs(p.alpha + p.beta) > 1e-12) c.theta = -p.gamma / (p.alpha + p.beta);
  if (std::abs(p.alpha) <= 1e-12) {
    c.kind = ZdClass::equalizer;
    return c;
  }
  c.chi = -p.beta / p.alpha;
  // chi < 0 (alpha, beta of one sign) is a decreasing line: neither class.
  c.kind = c.chi >= 1.0 ? ZdClass::extortion : c.chi >= 0.0 ? ZdClass::generous : ZdClass::general;
  return c;
}

}  // namespace zdmtd
