#include "zdmtd/markov.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>

namespace zdmtd {

namespace {

void check_pair(const MemoryOneStrategy& a, const MemoryOneStrategy& b) {
  if (a.K != b.K) throw std::invalid_argument("markov: strategies disagree on K");
}

double fixed_point_residual(const Eigen::MatrixXd& M, const Eigen::VectorXd& v) {
  return (M.transpose() * v - v).cwiseAbs().maxCoeff();
}

// Clips rounding-level negatives and renormalizes.
bool tidy(Eigen::VectorXd& v) {
  if (!v.allFinite() || v.minCoeff() < -1e-9) return false;
  v = v.cwiseMax(0.0);
  const double s = v.sum();
  if (!(s > 0.0)) return false;
  v /= s;
  return true;
}

StationaryDist cesaro(const Eigen::MatrixXd& M) {
  const Eigen::Index n = M.rows();
  Eigen::MatrixXd P = 0.5 * (Eigen::MatrixXd::Identity(n, n) + M);
  Eigen::RowVectorXd u = Eigen::RowVectorXd::Constant(n, 1.0 / static_cast<double>(n));
  Eigen::RowVectorXd w = u * P;
  for (int it = 0; it < kCesaroSquarings; ++it) {
    P = P * P;
    Eigen::RowVectorXd next = u * P;
    const double step = (next - w).cwiseAbs().maxCoeff();
    w = next;
    if (step < kCesaroStepTol) break;
  }
  Eigen::VectorXd v = w.transpose();
  tidy(v);
  const double res = fixed_point_residual(M, v);
  if (res > kCesaroResidualTol)
    throw StationaryError("markov: Cesaro limit did not converge within the squaring budget", res);
  return {v, StationaryMethod::cesaro, res};
}

struct LogDet {
  double log_abs;
  double sign;
};

LogDet log_det(const Eigen::MatrixXd& A) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const Eigen::MatrixXd& LU = lu.matrixLU();
  double la = 0.0, sg = lu.permutationP().determinant();
  for (Eigen::Index i = 0; i < LU.rows(); ++i) {
    const double d = LU(i, i);
    if (d == 0.0) return {-INFINITY, 0.0};
    la += std::log(std::abs(d));
    if (d < 0) sg = -sg;
  }
  return {la, sg};
}

}  // namespace

TransitionMatrix build_transition(const MemoryOneStrategy& pi_d, const MemoryOneStrategy& pi_a) {
  check_pair(pi_d, pi_a);
  const int K = pi_d.K, n = K * K;
  TransitionMatrix t{K, Eigen::MatrixXd(n, n)};
  for (int s = 0; s < n; ++s)
    for (int d = 0; d < K; ++d)
      t.M.row(s).segment(d * K, K) = pi_d.rows(s, d) * pi_a.rows.row(s);
  return t;
}

StationaryDist stationary(const TransitionMatrix& t) {
  const Eigen::MatrixXd& M = t.M;
  const Eigen::Index n = M.rows();
  Eigen::MatrixXd A = M.transpose() - Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd B = A;
  B.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
  Eigen::VectorXd v = lu.solve(rhs);
  // rcond() misses exactly singular systems (zero rows in B), so the pivots
  // of U are checked directly as well.
  const Eigen::VectorXd piv = lu.matrixLU().diagonal().cwiseAbs();
  const bool regular = piv.minCoeff() > 1e-13 * piv.maxCoeff();
  if (regular && lu.rcond() > 1e-13 && tidy(v)) {
    const double res = fixed_point_residual(M, v);
    if (res <= kDirectResidualTol) return {v, StationaryMethod::direct, res};
  }
  // Either the replaced-row system is singular (several recurrent classes) or
  // badly conditioned. Classify by the two smallest singular values of M^T - I.
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (n >= 2 && sv(n - 2) >= 1e-10) {
    Eigen::VectorXd nv = svd.matrixV().col(n - 1);
    if (nv.sum() < 0) nv = -nv;
    if (tidy(nv)) {
      const double res = fixed_point_residual(M, nv);
      if (res <= kDirectResidualTol) return {nv, StationaryMethod::direct, res};
    }
  }
  return cesaro(M);
}

UtilityPair long_run_utilities(const GameSpec& g, const MemoryOneStrategy& pi_d,
                               const MemoryOneStrategy& pi_a) {
  check_pair(pi_d, pi_a);
  if (g.K != pi_d.K) throw std::invalid_argument("markov: game and strategies disagree on K");
  const StationaryDist st = stationary(build_transition(pi_d, pi_a));
  return {st.v.dot(profit_vector(g, Player::defender)), st.v.dot(profit_vector(g, Player::attacker))};
}

UtilityPair det_utilities(const GameSpec& g, const MemoryOneStrategy& pi_d,
                          const MemoryOneStrategy& pi_a) {
  check_pair(pi_d, pi_a);
  if (g.K != pi_d.K) throw std::invalid_argument("markov: game and strategies disagree on K");
  const TransitionMatrix t = build_transition(pi_d, pi_a);
  const Eigen::Index n = t.M.rows();
  Eigen::MatrixXd D = t.M - Eigen::MatrixXd::Identity(n, n);
  auto with_last = [&](const Eigen::VectorXd& f) {
    D.col(n - 1) = f;
    return log_det(D);
  };
  const LogDet den = with_last(Eigen::VectorXd::Ones(n));
  if (den.sign == 0.0 || den.log_abs < std::log(1e-12))
    throw SingularDenominator("markov: determinant denominator vanishes; use stationary evaluation");
  auto ratio = [&](const Eigen::VectorXd& f) {
    const LogDet num = with_last(f);
    if (num.sign == 0.0) return 0.0;
    return num.sign * den.sign * std::exp(num.log_abs - den.log_abs);
  };
  return {ratio(profit_vector(g, Player::defender)), ratio(profit_vector(g, Player::attacker))};
}

double zd_residual(const GameSpec& g, const MemoryOneStrategy& pi_d, const MemoryOneStrategy& pi_a,
                   double alpha, double beta, double gamma) {
  const UtilityPair u = long_run_utilities(g, pi_d, pi_a);
  return std::abs(alpha * u.u_d + beta * u.u_a + gamma);
}

MemoryOneStrategy eps_mix(const MemoryOneStrategy& s, double eps) {
  MemoryOneStrategy out = s;
  out.rows = (1.0 - eps) * s.rows + Eigen::MatrixXd::Constant(s.rows.rows(), s.K, eps / s.K);
  return out;
}

UtilityPair mixed_utilities(const GameSpec& g, const MemoryOneStrategy& pi_d,
                            const MemoryOneStrategy& pi_a, double eps) {
  return long_run_utilities(g, eps_mix(pi_d, eps), eps_mix(pi_a, eps));
}

}  // namespace zdmtd
