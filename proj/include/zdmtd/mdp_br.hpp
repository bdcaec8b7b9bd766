#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "zdmtd/game_model.hpp"
#include "zdmtd/markov.hpp"

namespace zdmtd {

struct AttackerMdp {
  GameSpec game;
  MemoryOneStrategy pi_d;
  Eigen::MatrixXd reward;  // reward(s, a) = sum_d pi_d(d|s) u_a(d, a)

  int K() const { return game.K; }
  // Next-state distribution over K^2 states.
  Eigen::VectorXd transition(int s, int a) const;
};

struct BestResponse {
  std::vector<int> policy;  // attacker action per state
  double gain = 0.0;        // average attacker reward on the eps-mixed chain
  Eigen::VectorXd bias;     // relative values, bias(0) = 0
  double bellman_residual = 0.0;
};

constexpr double kBellmanTol = 1e-9;

AttackerMdp build_attacker_mdp(const GameSpec& g, const MemoryOneStrategy& pi_d);

// Howard policy iteration on the eps-mixed MDP: the defender strategy and the
// executed attacker action are both blended with uniform at weight eps, so
// every policy induces an irreducible chain. Improvement keeps the current
// action unless another is better by more than a rounding margin, and then
// takes the lowest-index maximizer.
BestResponse best_response(const AttackerMdp& mdp, double eps = kEpsMix);

// Deterministic attacker policies in enumeration order: code c gives
// policy[s] as the base-K digits of c, policy[0] most significant.
long long policy_count(int K);
std::vector<int> decode_policy(long long code, int K);

// Enumerates all K^(K^2) deterministic policies (K <= 3), evaluating each
// with mixed_utilities. Ties go to the lexicographically smallest policy,
// with policy[0] the most significant digit.
BestResponse exhaustive_br(const GameSpec& g, const MemoryOneStrategy& pi_d);

// Gain window within which attacker policies count as tied. Widened beyond
// 1e-9 by the worst-case eps-mixing shift of exact ties (see notes in README).
double br_tie_tolerance(const GameSpec& g);

// Attacker best response with defender-favoring tie-breaking, then both
// players' eps-mixed long-run utilities under that response. tie overrides
// br_tie_tolerance(g).
std::pair<UtilityPair, BestResponse> defender_utility_under_br(const GameSpec& g,
                                                               const MemoryOneStrategy& pi_d,
                                                               std::optional<double> tie = std::nullopt);

// Exhaustive counterpart of defender_utility_under_br (K <= 3): among all
// policies whose gain is within br_tie_tolerance of the best, the one with the
// highest defender utility, lexicographically first on ties.
std::pair<UtilityPair, BestResponse> exhaustive_defender_utility(const GameSpec& g,
                                                                 const MemoryOneStrategy& pi_d,
                                                                 std::optional<double> tie = std::nullopt);

}  // namespace zdmtd
