#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zdmtd/game_model.hpp"
#include "zdmtd/lp_core.hpp"

namespace zdmtd {

// Mixed-integer model in LP-file form. Names are 1-based to match the usual
// mathematical indexing: pid_k_i_j = pi_d(k | i, j), pia_k_i_j = pi_a(k | i, j).
struct LinTerm {
  double coef = 0.0;
  std::string var;
  bool operator==(const LinTerm&) const = default;
};

struct QuadTerm {
  double coef = 0.0;
  std::string a, b;
  bool operator==(const QuadTerm&) const = default;
};

struct MipRow {
  std::string name;
  std::vector<LinTerm> lin;
  std::vector<QuadTerm> quad;
  Relation rel = Relation::le;
  double rhs = 0.0;
  bool operator==(const MipRow&) const = default;
};

struct MipBound {
  std::string var;
  bool free = false;
  double lo = 0.0, hi = kLpInf;
  bool operator==(const MipBound&) const = default;
};

struct MipModel {
  std::vector<std::string> comments;  // header lines without the leading backslash
  Sense sense = Sense::maximize;
  std::string objective_name = "obj";
  std::vector<LinTerm> objective;
  std::vector<MipRow> rows;
  std::vector<MipBound> bounds;
  std::vector<std::string> binaries;

  bool operator==(const MipModel&) const = default;

  int count_prefix(const std::string& prefix) const;  // distinct variables by name prefix
};

// Big-M used by the emitter: 10 (1 + max |U|) K^2.
double big_m(const GameSpec& g);

MipModel build_mip(const GameSpec& g);
std::string write_lp(const MipModel& m);
// Parses the subset of the LP-file grammar that write_lp produces (see
// README). Throws std::runtime_error with a line number on malformed input.
MipModel parse_lp(const std::string& text);
inline std::string emit_mip(const GameSpec& g) { return write_lp(build_mip(g)); }

struct OneShotSse {
  std::vector<double> x;  // coverage distribution
  double value = 0.0;
  int attacked = -1;
};

// Multiple-LP one-shot SSE: one LP per candidate attacked target.
OneShotSse oneshot_sse(const GameSpec& g);

struct SseSeed {
  MemoryOneStrategy strategy;
  std::optional<double> tie;  // tie window for this seed's evaluation
};

struct SearchResult {
  MemoryOneStrategy strategy;
  double value = 0.0;
  int evaluations = 0;
  int best_seed = -1;  // index into seeds when a seed is the best, else -1
};

// Random-restart hill climbing over memory-one defender strategies scored by
// the defender's utility under attacker best response. budget counts
// candidate evaluations beyond the seeds; budget 0 returns the best seed.
SearchResult search_sse(const GameSpec& g, int budget, uint64_t seed, const std::vector<SseSeed>& seeds);

// Best defender-utility-under-BR over all K^(K^2) deterministic defender
// memory-one strategies (K <= 3). Lowest enumeration index wins ties.
SearchResult exhaustive_sse(const GameSpec& g);

double sse_upper_bound(const GameSpec& g);

struct SseBaseline {
  OneShotSse oneshot;
  SearchResult search;
  double upper_bound = 0.0;
};

}  // namespace zdmtd
