#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "zdmtd/game_model.hpp"
#include "zdmtd/scenarios.hpp"
#include "zdmtd/zd_core.hpp"

namespace zdmtd {

struct AttackerProfile {
  enum class Kind { fixed, best_response, type_switching } kind = Kind::best_response;
  MemoryOneStrategy strategy;  // fixed
  // type_switching: the attacker's game flips every period steps and its best
  // response is recomputed against the committed defender strategy, taking
  // effect lag steps after the flip.
  int period = 0;
  WorkerType initial_type = WorkerType::honest;
  GameSpec honest, malicious;
  int lag = 0;

  static AttackerProfile fixed(MemoryOneStrategy s);
  static AttackerProfile best_response();
  static AttackerProfile switching(int period, WorkerType initial, GameSpec honest, GameSpec malicious, int lag = 0);
};

struct TrajectoryPoint {
  int64_t step = 0;  // 1-based
  double avg_u_d = 0.0, avg_u_a = 0.0;
  std::string regime;
};

struct RegimeSummary {
  std::string regime;
  int64_t steps = 0;
  double avg_u_d = 0.0, avg_u_a = 0.0;
};

struct TrajectoryStats {
  int64_t steps = 0;
  uint64_t seed = 0;
  std::vector<TrajectoryPoint> series;  // every stride steps and at the last step
  double avg_u_d = 0.0, avg_u_a = 0.0;
  // Batch-means standard errors of the averages (kBatches equal batches).
  double se_u_d = 0.0, se_u_a = 0.0;
  std::vector<RegimeSummary> regimes;  // one per regime label, first-seen order

  bool operator==(const TrajectoryStats&) const;
};

constexpr int kBatches = 50;

// Called once per step with the 0-based step, both actions and the regime
// label in force.
using StepObserver = std::function<void(int64_t, int, int, const std::string&)>;

// For fixed and best_response profiles utilities come from g; for
// type_switching they come from the current type's game (g supplies K only).
TrajectoryStats simulate(const GameSpec& g, const MemoryOneStrategy& pi_d, const AttackerProfile& profile,
                         int64_t steps, uint64_t seed, int64_t stride = 1, const StepObserver& observer = {});

struct RegimeResidual {
  std::string regime;
  int64_t steps = 0;
  double avg_u_d = 0.0, avg_u_a = 0.0;
  // |alpha u_d + beta u_a + gamma| of the regime-restricted averages, with
  // utilities taken from the game the ZD parameters were built for.
  double residual = 0.0;
  double standard_error = 0.0;  // batch means over the regime's steps
  // The same line evaluated on the regime's own game, for reference.
  double residual_own_game = 0.0;
};

struct SwitchingReport {
  TrajectoryStats stats;
  std::vector<RegimeResidual> regimes;  // empty when no ZD parameters are given
};

// pi_d is committed once; design is the game its ZD parameters were built for.
SwitchingReport switching_experiment(const CrowdScenario& s, const MemoryOneStrategy& pi_d,
                                     const std::optional<ZdLinearParams>& params, const GameSpec& design,
                                     int64_t steps, uint64_t seed, int64_t stride = 1, int lag = 0);

// CSV with a comment header carrying the seed and config hash, then
// step,avg_u_d,avg_u_a,regime.
std::string trajectory_csv(const TrajectoryStats& t, const std::string& config_hash);

}  // namespace zdmtd
