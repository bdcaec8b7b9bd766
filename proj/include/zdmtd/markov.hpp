#pragma once

#include <stdexcept>

#include "zdmtd/game_model.hpp"

namespace zdmtd {

// Weight of the uniform blend used to make deterministic strategy pairs
// unichain before evaluation. Shared by mdp_br and every oracle.
constexpr double kEpsMix = 1e-8;

struct TransitionMatrix {
  int K = 0;
  Eigen::MatrixXd M;  // M(s, flat(d, a)) = pi_d(d|s) * pi_a(a|s)
};

enum class StationaryMethod { direct, cesaro };

struct StationaryDist {
  Eigen::VectorXd v;
  StationaryMethod method = StationaryMethod::direct;
  double residual = 0.0;  // ||v^T M - v^T||_inf
};

class StationaryError : public std::runtime_error {
 public:
  StationaryError(const std::string& what, double achieved)
      : std::runtime_error(what), residual(achieved) {}
  double residual;
};

class SingularDenominator : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr double kDirectResidualTol = 1e-10;
// Cesaro limit: the lazy chain (I + M)/2 has the same Cesaro projector as M
// and is aperiodic, so u (I + M)^n / 2^n converges to the Cesaro limit from u.
// Powers are taken by repeated squaring, at most kCesaroSquarings times
// (2^kCesaroSquarings steps); convergence is declared when successive iterates
// differ by less than kCesaroStepTol and the fixed-point residual is below
// kCesaroResidualTol.
constexpr int kCesaroSquarings = 60;
constexpr double kCesaroStepTol = 1e-13;
constexpr double kCesaroResidualTol = 1e-9;

TransitionMatrix build_transition(const MemoryOneStrategy& pi_d, const MemoryOneStrategy& pi_a);

StationaryDist stationary(const TransitionMatrix& M);

UtilityPair long_run_utilities(const GameSpec& g, const MemoryOneStrategy& pi_d,
                               const MemoryOneStrategy& pi_a);

// Ratio-of-determinants form of the long-run utilities; throws SingularDenominator when the
// denominator determinant vanishes (reducible chains).
UtilityPair det_utilities(const GameSpec& g, const MemoryOneStrategy& pi_d,
                          const MemoryOneStrategy& pi_a);

double zd_residual(const GameSpec& g, const MemoryOneStrategy& pi_d, const MemoryOneStrategy& pi_a,
                   double alpha, double beta, double gamma);

MemoryOneStrategy eps_mix(const MemoryOneStrategy& s, double eps = kEpsMix);

// long_run_utilities on the eps-mixed pair.
UtilityPair mixed_utilities(const GameSpec& g, const MemoryOneStrategy& pi_d,
                            const MemoryOneStrategy& pi_a, double eps = kEpsMix);

}  // namespace zdmtd
