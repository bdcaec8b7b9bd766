#include "zdmtd/lp_core.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace zdmtd {

LinearProgram::LinearProgram(int n_vars)
    : n(n_vars), objective(n_vars, 0.0), lower(n_vars, 0.0), upper(n_vars, kLpInf) {}

LinearProgram& LinearProgram::add(std::vector<double> row, Relation rel, double rhs) {
  constraints.push_back({std::move(row), rel, rhs});
  return *this;
}

LinearProgram& LinearProgram::set_free(int i) { return set_bounds(i, -kLpInf, kLpInf); }

LinearProgram& LinearProgram::set_bounds(int i, double lo, double hi) {
  lower.at(i) = lo;
  upper.at(i) = hi;
  return *this;
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-10;
constexpr int kMaxIterations = 200000;

void check_dims(const LinearProgram& lp) {
  if (lp.n < 1) throw std::invalid_argument("lp: need at least one variable");
  const auto n = static_cast<size_t>(lp.n);
  if (lp.objective.size() != n || lp.lower.size() != n || lp.upper.size() != n)
    throw std::invalid_argument("lp: objective/bounds length mismatch");
  for (const auto& c : lp.constraints) {
    if (c.row.size() != n) throw std::invalid_argument("lp: constraint row length mismatch");
    if (!std::isfinite(c.rhs)) throw std::invalid_argument("lp: non-finite rhs");
    for (double a : c.row)
      if (!std::isfinite(a)) throw std::invalid_argument("lp: non-finite coefficient");
  }
  for (int i = 0; i < lp.n; ++i)
    if (std::isnan(lp.lower[i]) || std::isnan(lp.upper[i]) || lp.lower[i] == kLpInf ||
        lp.upper[i] == -kLpInf)
      throw std::invalid_argument("lp: invalid bound");
}

// Original variable i equals offset + sum over its columns of sign * y_col.
struct VarMap {
  double offset = 0.0;
  int col = -1;
  double sign = 1.0;
  int neg_col = -1;  // free variables: x = y_col - y_neg
};

class Tableau {
 public:
  Tableau(int m, int cols) : T(Eigen::MatrixXd::Zero(m, cols + 1)), basis(m, -1), cols_(cols) {}

  Eigen::MatrixXd T;  // last column is rhs
  std::vector<int> basis;
  int iterations = 0;

  int rows() const { return static_cast<int>(T.rows()); }
  int cols() const { return cols_; }
  double rhs(int r) const { return T(r, cols_); }

  void pivot(int r, int c) {
    const double p = T(r, c);
    T.row(r) /= p;
    for (int i = 0; i < rows(); ++i) {
      if (i == r) continue;
      const double f = T(i, c);
      if (f != 0.0) T.row(i) -= f * T.row(r);
    }
    basis[r] = c;
    ++iterations;
  }

  // Minimizes cost.y over columns with allowed[c]. Returns false if unbounded.
  bool minimize(const std::vector<double>& cost, const std::vector<bool>& allowed) {
    // Reduced costs, kept in step with the tableau across pivots.
    Eigen::RowVectorXd d(cols_ + 1);
    for (int c = 0; c <= cols_; ++c) d(c) = c < cols_ ? cost[c] : 0.0;
    for (int r = 0; r < rows(); ++r)
      if (cost[basis[r]] != 0.0) d -= cost[basis[r]] * T.row(r);
    while (true) {
      if (iterations > kMaxIterations) throw LpNumericalError("lp: iteration cap reached");
      int enter = -1;
      for (int c = 0; c < cols_ && enter < 0; ++c)
        if (allowed[c] && d(c) < -kCostTol) enter = c;
      if (enter < 0) return true;
      int leave = -1;
      double best = 0.0;
      for (int r = 0; r < rows(); ++r) {
        const double a = T(r, enter);
        if (a <= kPivotTol) continue;
        const double ratio = std::max(rhs(r), 0.0) / a;
        if (leave < 0 || ratio < best - 1e-12 * std::max(1.0, best) ||
            (std::abs(ratio - best) <= 1e-12 * std::max(1.0, best) && basis[r] < basis[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
      d -= d(enter) * T.row(leave);
    }
  }

 private:
  int cols_;
};

struct Prepared {
  std::vector<VarMap> map;
  int ycols = 0;
  struct Row {
    std::vector<double> a;
    Relation rel;
    double b;
  };
  std::vector<Row> rows;
  bool trivially_infeasible = false;
};

Prepared prepare(const LinearProgram& lp) {
  Prepared p;
  p.map.resize(lp.n);
  for (int i = 0; i < lp.n; ++i) {
    const double lo = lp.lower[i], hi = lp.upper[i];
    auto& m = p.map[i];
    if (std::isfinite(lo)) {
      m = {lo, p.ycols++, 1.0, -1};
    } else if (std::isfinite(hi)) {
      m = {hi, p.ycols++, -1.0, -1};
    } else {
      m.col = p.ycols++;
      m.neg_col = p.ycols++;
    }
    if (std::isfinite(lo) && std::isfinite(hi)) {
      if (hi < lo) p.trivially_infeasible = true;
      std::vector<double> a(p.ycols, 0.0);
      a[m.col] = 1.0;
      p.rows.push_back({std::move(a), Relation::le, hi - lo});
    }
  }
  for (auto& r : p.rows) r.a.resize(p.ycols, 0.0);

  for (const auto& c : lp.constraints) {
    std::vector<double> a(p.ycols, 0.0);
    double b = c.rhs;
    for (int i = 0; i < lp.n; ++i) {
      const auto& m = p.map[i];
      const double v = c.row[i];
      if (v == 0.0) continue;
      b -= v * m.offset;
      a[m.col] += v * m.sign;
      if (m.neg_col >= 0) a[m.neg_col] -= v;
    }
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) {
      const double tol = kLpFeasTol * std::max(1.0, std::abs(c.rhs));
      const bool ok = (c.rel == Relation::le && 0.0 <= b + tol) ||
                      (c.rel == Relation::ge && 0.0 >= b - tol) ||
                      (c.rel == Relation::eq && std::abs(b) <= tol);
      if (!ok) p.trivially_infeasible = true;
      continue;
    }
    for (double& v : a) v /= scale;
    b /= scale;
    p.rows.push_back({std::move(a), c.rel, b});
  }
  for (auto& r : p.rows) {
    if (r.b < 0.0) {
      for (double& v : r.a) v = -v;
      r.b = -r.b;
      if (r.rel == Relation::le)
        r.rel = Relation::ge;
      else if (r.rel == Relation::ge)
        r.rel = Relation::le;
    }
  }
  return p;
}

std::vector<double> recover(const Prepared& p, const std::vector<double>& y) {
  std::vector<double> x(p.map.size());
  for (size_t i = 0; i < p.map.size(); ++i) {
    const auto& m = p.map[i];
    x[i] = m.offset + m.sign * y[m.col];
    if (m.neg_col >= 0) x[i] = y[m.col] - y[m.neg_col];
  }
  return x;
}

LpOutcome run(const LinearProgram& lp, bool feasibility_only) {
  check_dims(lp);
  Prepared p = prepare(lp);
  LpOutcome out;
  if (p.trivially_infeasible) {
    out.status = LpStatus::infeasible;
    return out;
  }

  const int m = static_cast<int>(p.rows.size());
  // Column layout: y | slack/surplus | artificial.
  int n_slack = 0, n_art = 0;
  for (const auto& r : p.rows) {
    if (r.rel != Relation::eq) ++n_slack;
    if (r.rel != Relation::le) ++n_art;
  }
  const int first_slack = p.ycols, first_art = p.ycols + n_slack;
  const int cols = first_art + n_art;
  Tableau t(m, cols);
  {
    int si = first_slack, ai = first_art;
    for (int r = 0; r < m; ++r) {
      const auto& row = p.rows[r];
      for (int c = 0; c < p.ycols; ++c) t.T(r, c) = row.a[c];
      t.T(r, cols) = row.b;
      if (row.rel == Relation::le) {
        t.T(r, si) = 1.0;
        t.basis[r] = si++;
      } else {
        if (row.rel == Relation::ge) t.T(r, si++) = -1.0;
        t.T(r, ai) = 1.0;
        t.basis[r] = ai++;
      }
    }
  }

  std::vector<bool> allowed(cols, true);
  if (n_art > 0) {
    std::vector<double> cost(cols, 0.0);
    for (int c = first_art; c < cols; ++c) cost[c] = 1.0;
    if (!t.minimize(cost, allowed)) throw LpNumericalError("lp: phase 1 reported unbounded");
    double infeas = 0.0;
    for (int r = 0; r < m; ++r)
      if (t.basis[r] >= first_art) infeas += t.rhs(r);
    if (infeas > kLpFeasTol) {
      out.status = LpStatus::infeasible;
      out.iterations = t.iterations;
      return out;
    }
    // Drive zero-level artificials out of the basis; rows that cannot be
    // pivoted are redundant and keep their artificial pinned at zero.
    for (int r = 0; r < m; ++r) {
      if (t.basis[r] < first_art) continue;
      int best = -1;
      for (int c = 0; c < first_art; ++c)
        if (std::abs(t.T(r, c)) > kPivotTol && (best < 0 || std::abs(t.T(r, c)) > std::abs(t.T(r, best)) + 1e-12))
          best = c;
      if (best >= 0) t.pivot(r, best);
    }
    for (int c = first_art; c < cols; ++c) allowed[c] = false;
  }

  if (!feasibility_only) {
    std::vector<double> cost(cols, 0.0);
    const double sgn = lp.sense == Sense::maximize ? -1.0 : 1.0;
    for (int i = 0; i < lp.n; ++i) {
      const auto& mp = p.map[i];
      cost[mp.col] += sgn * lp.objective[i] * mp.sign;
      if (mp.neg_col >= 0) cost[mp.neg_col] -= sgn * lp.objective[i];
    }
    if (!t.minimize(cost, allowed)) {
      out.status = LpStatus::unbounded;
      out.iterations = t.iterations;
      return out;
    }
  }

  std::vector<double> y(cols, 0.0);
  for (int r = 0; r < m; ++r) y[t.basis[r]] = std::max(t.rhs(r), 0.0);
  out.x = recover(p, y);
  // Bounds hold exactly by construction of the shift; clip rounding.
  for (int i = 0; i < lp.n; ++i) out.x[i] = std::clamp(out.x[i], lp.lower[i], lp.upper[i]);
  out.status = LpStatus::optimal;
  out.iterations = t.iterations;
  out.objective = 0.0;
  for (int i = 0; i < lp.n; ++i) out.objective += lp.objective[i] * out.x[i];
  out.max_violation = max_violation(lp, out.x);
  if (out.max_violation > kLpFeasTol)
    throw LpNumericalError("lp: solution fails re-verification (violation " +
                           std::to_string(out.max_violation) + ")");
  return out;
}

}  // namespace

double max_violation(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (const auto& c : lp.constraints) {
    double lhs = 0.0, scale = 0.0;
    for (int i = 0; i < lp.n; ++i) {
      lhs += c.row[i] * x[i];
      scale = std::max(scale, std::abs(c.row[i]));
    }
    if (scale == 0.0) scale = 1.0;
    double v = 0.0;
    if (c.rel == Relation::le) v = lhs - c.rhs;
    if (c.rel == Relation::ge) v = c.rhs - lhs;
    if (c.rel == Relation::eq) v = std::abs(lhs - c.rhs);
    worst = std::max(worst, v / scale);
  }
  for (int i = 0; i < lp.n; ++i) {
    worst = std::max(worst, lp.lower[i] - x[i]);
    worst = std::max(worst, x[i] - lp.upper[i]);
  }
  return worst;
}

LpOutcome solve_lp(const LinearProgram& lp) { return run(lp, false); }

Feasibility check_feasible(const LinearProgram& lp) {
  LpOutcome o = run(lp, true);
  if (o.status != LpStatus::optimal) return {false, {}};
  return {true, std::move(o.x)};
}

std::string dump(const LinearProgram& lp) {
  std::ostringstream os;
  os.precision(17);
  os << (lp.sense == Sense::maximize ? "maximize" : "minimize");
  for (int i = 0; i < lp.n; ++i) os << ' ' << lp.objective[i] << "*x" << i;
  os << "\nsubject to\n";
  for (size_t r = 0; r < lp.constraints.size(); ++r) {
    const auto& c = lp.constraints[r];
    os << "  c" << r << ':';
    for (int i = 0; i < lp.n; ++i)
      if (c.row[i] != 0.0) os << ' ' << c.row[i] << "*x" << i;
    os << (c.rel == Relation::le ? " <= " : c.rel == Relation::ge ? " >= " : " = ") << c.rhs << '\n';
  }
  os << "bounds\n";
  for (int i = 0; i < lp.n; ++i) os << "  " << lp.lower[i] << " <= x" << i << " <= " << lp.upper[i] << '\n';
  return os.str();
}

}  // namespace zdmtd
