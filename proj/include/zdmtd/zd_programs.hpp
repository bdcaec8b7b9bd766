#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zdmtd/game_model.hpp"
#include "zdmtd/zd_core.hpp"

namespace zdmtd {

// Lambda(i1, i2): f^c(i1) <= 0 <= f^u(i1), f^c(i2) >= 0 >= f^u(i2), and
// f^u(k) = 0 for every other k.
struct LambdaCell {
  int i1 = -1, i2 = -1;
  bool valid() const { return i1 >= 0 && i2 >= 0 && i1 != i2; }
};

using Point2 = Eigen::Vector2d;  // (u_d, u_a)

struct HullPolygon {
  std::vector<Point2> vertices;  // counterclockwise; 1 or 2 vertices when degenerate

  bool contains(const Point2& p, double tol = 1e-9) const;
};

HullPolygon convex_hull(std::vector<Point2> pts);
HullPolygon hull(const GameSpec& g);

// Points where the line alpha u_d + beta u_a + gamma = 0 meets the hull
// (vertices on the line and edge crossings); empty when they miss.
std::vector<Point2> line_hull_points(const HullPolygon& h, const ZdLinearParams& p, double tol = 1e-9);

struct IdealSolution {
  bool found = false;
  ZdLinearParams params;  // normalized
  int role_one = -1;      // target at which the line meets (U_d^c, U_a^c)
  int role_k = -1;
  bool mirrored = false;  // alpha >= 0 >= beta instead of alpha <= 0 <= beta
  LambdaCell cell() const { return {role_one, role_k}; }
};

// Tries every argmax-of-U_d^c target in the "1" role, every other target in
// the "K" role, and both increasing-line sign patterns.
IdealSolution solve_ideal(const GameSpec& g);

struct CorollaryReport {
  bool equalizer = false;
  bool extortion = false;
  bool generous = false;
  std::optional<double> theta;
  std::optional<double> chi;
};

// Evaluates the three corollary condition lists with labels as given
// (label 0 in the "1" role, label K-1 in the "K" role).
CorollaryReport check_corollaries(const GameSpec& g, std::optional<double> theta = std::nullopt);

enum class SolveKind { ideal, optimal, none };
std::string to_string(SolveKind k);

struct ZdSolveResult {
  SolveKind kind = SolveKind::none;
  ZdLinearParams params;
  // Literal optimum for these parameters: the hull point on the line
  // with the largest u_d.
  UtilityPair predicted;
  // Defender value once the attacker best-responds along the line: the max-u_d
  // end when the line is increasing (or flat in u_a), the min-u_d end when it
  // is decreasing, -gamma/alpha when beta = 0. Candidates are ranked by this.
  double expected_br = 0.0;
  LambdaCell cell;
  bool mirrored = false;
  std::map<std::string, double> residuals;
};

struct OptimalOptions {
  bool ideal_shortcut = true;
};

ZdSolveResult solve_optimal(const GameSpec& g, const OptimalOptions& opt = {});

// Value of parameters p as seen by a best-responding attacker (see
// ZdSolveResult::expected_br) and the literal max-u_d point. nullopt when the
// line misses the hull or alpha = beta = 0.
struct LineValue {
  double expected_br;
  UtilityPair literal;
};
std::optional<LineValue> line_value(const HullPolygon& h, const ZdLinearParams& p);

// Violations of the Lambda(i1, i2) constraints for p, normalized by the
// max-abs of p; 0 when p lies in the cell.
double cell_violation(const GameSpec& g, const ZdLinearParams& p, const LambdaCell& c);

// The first cell containing p (lexicographic over ordered pairs), or invalid.
LambdaCell find_cell(const GameSpec& g, const ZdLinearParams& p, double tol = 1e-9);

}  // namespace zdmtd
