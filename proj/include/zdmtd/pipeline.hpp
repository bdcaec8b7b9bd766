#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "zdmtd/game_model.hpp"
#include "zdmtd/mdp_br.hpp"
#include "zdmtd/zd_core.hpp"
#include "zdmtd/zd_programs.hpp"

namespace zdmtd {

enum class SolveMode { automatic, ideal, optimal };

SolveMode parse_mode(const std::string& s);  // "auto" | "ideal" | "optimal"
std::string to_string(SolveMode m);

struct PipelineOptions {
  SolveMode mode = SolveMode::automatic;
  std::optional<WeightParams> omega;
  // Multiplier applied to phi on the optimal path. Larger phi keeps the
  // strategy closer to the deterministic hat rows; at 1 the best-responding
  // attacker can settle well below the predicted value.
  double phi_scale = 100.0;
  int verify_samples = 0;
  uint64_t seed = 0;
};

struct PipelineResult {
  ZdSolveResult solve;  // params and cell in the original labels
  bool has_strategy = false;
  ZdStrategy zd;        // strategy, phi and omega in the original labels
  // Internal labeling used for construction: labels[t] for original target t.
  CanonicalPermutation labels;
  VerifyReport report;
};

// canonicalize, solve the parameter program, relabel the cell so its argmax-phi
// target is label 0 and its argmin-phi target is label K-1, construct the
// strategy there and map it back.
PipelineResult run_pipeline(const GameSpec& g, const PipelineOptions& opt = {});

// Labels for cell (i1, i2): i1 -> 0, i2 -> K-1, the rest in decreasing
// |f^c| so the closed-form phi chain is monotone.
CanonicalPermutation cell_labels(const GameSpec& g, const ZdLinearParams& p, const LambdaCell& c);

// Constructs the strategy for parameters p in cell c of g (original labels).
// Throws ConstructionError when existence fails.
ZdStrategy construct_in_cell(const GameSpec& g, const ZdLinearParams& p, const LambdaCell& c,
                             double phi_scale = 1.0,
                             const std::optional<WeightParams>& omega = std::nullopt);

// Tie window for evaluating a ZD strategy under best response. eps-mixing the
// defender breaks the linear relation by at most eps * max(phi) in the
// normalized parameters, so when alpha = 0 the exactly tied attacker gains
// spread by up to 2 eps max(phi) / |beta|; the window covers that spread.
double zd_tie_tolerance(const GameSpec& g, const ZdStrategy& zd);

// defender_utility_under_br with zd_tie_tolerance.
std::pair<UtilityPair, BestResponse> zd_utility_under_br(const GameSpec& g, const ZdStrategy& zd);

}  // namespace zdmtd
