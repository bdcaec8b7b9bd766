#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace zdmtd {

// Dense two-phase simplex. Pivoting follows Bland's rule throughout: the
// entering column is the lowest-index column with negative reduced cost, the
// leaving row is the minimum-ratio row with ties broken by the lowest basic
// variable index. Identical inputs give identical outcomes.

enum class Relation { le, eq, ge };
enum class Sense { maximize, minimize };
enum class LpStatus { optimal, infeasible, unbounded };

constexpr double kLpInf = std::numeric_limits<double>::infinity();
constexpr double kLpFeasTol = 1e-8;

struct Constraint {
  std::vector<double> row;
  Relation rel = Relation::le;
  double rhs = 0.0;
};

struct LinearProgram {
  int n = 0;
  Sense sense = Sense::maximize;
  std::vector<double> objective;
  std::vector<Constraint> constraints;
  std::vector<double> lower;  // default 0
  std::vector<double> upper;  // default +inf

  explicit LinearProgram(int n_vars = 0);

  LinearProgram& add(std::vector<double> row, Relation rel, double rhs);
  LinearProgram& set_free(int i);
  LinearProgram& set_bounds(int i, double lo, double hi);
};

struct LpOutcome {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;
  double objective = 0.0;
  double max_violation = 0.0;  // over row-normalized constraints
  int iterations = 0;
};

// Thrown when the basis becomes numerically unusable (no acceptable pivot,
// iteration cap, or a final solution that fails re-verification). Never
// converted into an infeasible/unbounded status.
class LpNumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

LpOutcome solve_lp(const LinearProgram& lp);

struct Feasibility {
  bool feasible = false;
  std::vector<double> point;
};

// Objective is ignored.
Feasibility check_feasible(const LinearProgram& lp);

// Max violation of the constraints and bounds at x, each row scaled by its
// largest coefficient magnitude.
double max_violation(const LinearProgram& lp, const std::vector<double>& x);

std::string dump(const LinearProgram& lp);

}  // namespace zdmtd
