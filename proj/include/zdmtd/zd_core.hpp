#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "zdmtd/game_model.hpp"

namespace zdmtd {

struct ZdLinearParams {
  double alpha = 0.0, beta = 0.0, gamma = 0.0;

  bool is_zero(double tol = 0.0) const;
  // Scaled so the largest |component| is 1; all-zero stays zero.
  ZdLinearParams normalized() const;
  ZdLinearParams scaled(double c) const { return {c * alpha, c * beta, c * gamma}; }
};

// phi(k) >= 0 with phi(K-1) = 0 (the last label carries the minimum).
struct FeasibilityParams {
  Eigen::VectorXd phi;

  double max() const { return phi.maxCoeff(); }
  double min() const { return phi.minCoeff(); }
  double max_except(int k) const;
  double min_except(int k) const;
  bool monotone(double tol = 0.0) const;  // phi(0) >= phi(1) >= ... >= phi(K-1)
};

struct WeightParams {
  Eigen::VectorXd omega;  // length K; the sum-to-one input is accepted, not relied on

  static WeightParams uniform(int K) { return {Eigen::VectorXd::Constant(K, 1.0 / K)}; }
};

enum class ZdClass { equalizer, extortion, generous, general };

struct Classification {
  ZdClass kind = ZdClass::general;
  double chi = 0.0;              // -beta/alpha, unset for equalizer/general
  std::optional<double> theta;   // -gamma/(alpha + beta) when alpha + beta != 0
  std::string label() const;
};

struct ZdStrategy {
  MemoryOneStrategy strategy;
  ZdLinearParams params;
  FeasibilityParams phi;
  double residual = 0.0;  // max-norm defect of sum_k phi_k (pi_d(k) - hat(k)) - f
  Classification classification;
  // omega(k, s) actually used at recursion step k in state s; rows where one
  // scalar served every state are flagged in scalar_omega. The last row and
  // rows with phi_k = 0 are NaN (not defined).
  Eigen::MatrixXd omega;
  std::vector<bool> scalar_omega;
};

struct ExistenceResult {
  bool exists = false;
  FeasibilityParams phi;            // valid when exists
  bool from_formula = false;        // construct_phi sufficed, no LP needed
  std::vector<std::string> witness; // violated constraints when !exists
};

class ConstructionError : public std::runtime_error {
 public:
  enum class Kind { degenerate, empty_interval };
  ConstructionError(Kind k, const std::string& what, double lo = 0.0, double hi = 0.0)
      : std::runtime_error(what), kind(k), lo(lo), hi(hi) {}
  Kind kind;
  double lo, hi;
};

constexpr double kZdResidualTol = 1e-8;

// f = alpha S^d + beta S^a + gamma 1, in flat state order.
Eigen::VectorXd zd_target(const GameSpec& g, const ZdLinearParams& p);

// Checks the existence inequalities for a given phi (phi(K-1) must be 0).
// Returns the violated constraints, empty when phi certifies existence.
std::vector<std::string> existence_violations(const GameSpec& g, const ZdLinearParams& p,
                                              const FeasibilityParams& phi, double tol = 1e-9);

// Tries construct_phi first; otherwise one LP per candidate argmax label over
// phi(0..K-2) >= 0. Works in whatever labeling g carries: the last label is
// the one pinned to phi = 0.
ExistenceResult existence_check(const GameSpec& g, const ZdLinearParams& p);

// Smallest phi(0) among feasibility parameters with label 0 carrying the
// maximum; nullopt when there are none. Small phi keeps the strategy away from
// the sticky hat rows.
std::optional<FeasibilityParams> minimal_phi(const GameSpec& g, const ZdLinearParams& p);

// The closed-form phi construction (may fail the existence recheck).
FeasibilityParams construct_phi(const GameSpec& g, const ZdLinearParams& p);

// Throws ConstructionError (degenerate when params are all zero or a zero phi
// meets a nonzero target; empty_interval when the per-state interval for some
// pi_d(k|s) is empty, which means phi does not certify existence).
ZdStrategy construct_strategy(const GameSpec& g, const ZdLinearParams& p,
                              const FeasibilityParams& phi,
                              const std::optional<WeightParams>& omega = std::nullopt);

double defining_residual(const GameSpec& g, const MemoryOneStrategy& s, const ZdLinearParams& p,
                    const FeasibilityParams& phi);

struct VerifyReport {
  double defining_residual = 0.0;
  double max_line_residual = 0.0;  // over sampled attackers; 0 when n_samples = 0
  double row_defect = 0.0;
  int n_samples = 0;
  bool passed(double tol = kZdResidualTol) const {
    return defining_residual <= tol && max_line_residual <= tol && row_defect <= 1e-12;
  }
};

VerifyReport verify(const GameSpec& g, const ZdStrategy& zd, int n_samples, uint64_t seed);

Classification classify(const ZdLinearParams& p);

}  // namespace zdmtd
