#pragma once

#include "zdmtd/game_model.hpp"
#include "zdmtd/rng.hpp"

namespace zdmtd {

// Each row uniform on the simplex.
MemoryOneStrategy random_strategy(int K, Rng& rng);

// Independent uniform profits in [-5, 5] with covered - uncovered in
// [0.1, 5] for the defender.
GameSpec random_game(int K, Rng& rng);

// Games with a nonempty ZD parameter set at any K: the uncovered points lie on
// one line (or coincide, for roughly a third of draws) and the covered points
// fall on both sides of it. At K <= 3 this is random_game, which is already
// admissible generically for the ZD programs.
GameSpec random_zd_game(int K, Rng& rng);

enum class CorollaryKind { equalizer, extortion, generous };

// Games meeting one corollary's condition list in the canonical labeling
// (argmax of u_d_cov at label 0, the "K" role at label K-1), then relabeled
// by a random permutation when shuffle is set. Extortion draws chi in [1, 3],
// generous in [0.2, 1].
GameSpec corollary_game(int K, CorollaryKind kind, Rng& rng, bool shuffle = true);

}  // namespace zdmtd
