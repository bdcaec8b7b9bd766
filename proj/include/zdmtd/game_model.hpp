#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace zdmtd {

// Targets are zero-based in C++ (0..K-1); files and CLI output use the same
// zero-based labels except where noted.
// A state is the previous action pair (i, j) = (defender, attacker), stored
// row-major as flat = i*K + j.
inline int flat(int K, int i, int j) { return i * K + j; }
inline int state_def(int K, int s) { return s / K; }
inline int state_att(int K, int s) { return s % K; }

enum class Player { defender, attacker };

struct GameSpec {
  int K = 0;
  std::vector<double> u_d_cov, u_d_unc, u_a_cov, u_a_unc;

  // Throws std::invalid_argument on K < 2, length mismatch, non-finite entries
  // or u_d_cov[k] <= u_d_unc[k].
  void validate() const;

  bool operator==(const GameSpec&) const = default;
};

GameSpec make_game(std::vector<double> u_d_cov, std::vector<double> u_d_unc,
                   std::vector<double> u_a_cov, std::vector<double> u_a_unc);

struct UtilityPair {
  double u_d = 0.0;
  double u_a = 0.0;
};

// rows(s, k): probability of playing target k in state s. Shape K^2 x K.
struct MemoryOneStrategy {
  int K = 0;
  Eigen::MatrixXd rows;

  void validate(double tol = 1e-12) const;
  double row_defect() const;  // max over rows of |sum - 1| and negative mass

  static MemoryOneStrategy uniform(int K);
  static MemoryOneStrategy always(int K, int target);
  // Every row equals x (a memoryless strategy).
  static MemoryOneStrategy memoryless(const Eigen::VectorXd& x);
  // One action per state.
  static MemoryOneStrategy deterministic(int K, const std::vector<int>& policy);
};

UtilityPair one_shot_utilities(const GameSpec& g, int d, int a);

Eigen::VectorXd profit_vector(const GameSpec& g, Player p);

Eigen::VectorXd hat_indicator(int K, int k);

// perm[original] = label; inv[label] = original.
struct CanonicalPermutation {
  std::vector<int> perm;
  std::vector<int> inv;

  static CanonicalPermutation identity(int K);
  static CanonicalPermutation from_perm(std::vector<int> perm);
  CanonicalPermutation inverse() const;
  bool is_identity() const;
};

// Relabels target t as perm[t].
GameSpec permute_game(const GameSpec& g, const CanonicalPermutation& p);
MemoryOneStrategy permute_strategy(const MemoryOneStrategy& s, const CanonicalPermutation& p);
Eigen::VectorXd permute_states(const Eigen::VectorXd& v, const CanonicalPermutation& p);

// Rotates labels so the first argmax of u_d_cov lands on label 0.
std::pair<GameSpec, CanonicalPermutation> canonicalize(const GameSpec& g);

}  // namespace zdmtd
