#include "zdmtd/zd_programs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zdmtd/lp_core.hpp"

namespace zdmtd {

namespace {

constexpr double kTol = 1e-9;
constexpr double kZeroCoef = 1e-12;

double fc(const GameSpec& g, const ZdLinearParams& p, int k) {
  return p.alpha * g.u_d_cov[k] + p.beta * g.u_a_cov[k] + p.gamma;
}
double fu(const GameSpec& g, const ZdLinearParams& p, int k) {
  return p.alpha * g.u_d_unc[k] + p.beta * g.u_a_unc[k] + p.gamma;
}

double game_scale(const GameSpec& g) {
  double m = 0.0;
  for (int k = 0; k < g.K; ++k)
    m = std::max({m, std::abs(g.u_d_cov[k]), std::abs(g.u_d_unc[k]), std::abs(g.u_a_cov[k]),
                  std::abs(g.u_a_unc[k])});
  return 1.0 + m;
}

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
}

std::vector<double> cov_row(const GameSpec& g, int k) { return {g.u_d_cov[k], g.u_a_cov[k], 1.0}; }
std::vector<double> unc_row(const GameSpec& g, int k) { return {g.u_d_unc[k], g.u_a_unc[k], 1.0}; }

// Ideal-ZD program with r1 in the "1" role and rk in the "K" role. Variables (alpha,
// beta, gamma). The mirrored pattern swaps the sign constraints only.
LinearProgram ideal_program(const GameSpec& g, int r1, int rk, bool mirrored) {
  LinearProgram lp(3);
  lp.set_free(2);
  if (mirrored) {
    lp.set_bounds(0, 0.0, kLpInf);
    lp.set_bounds(1, -kLpInf, 0.0);
  } else {
    lp.set_bounds(0, -kLpInf, 0.0);
    lp.set_bounds(1, 0.0, kLpInf);
  }
  lp.add(cov_row(g, r1), Relation::eq, 0.0);
  lp.add(cov_row(g, rk), Relation::ge, 0.0);
  lp.add(unc_row(g, r1), Relation::ge, 0.0);
  for (int k = 0; k < g.K; ++k)
    if (k != r1 && k != rk) lp.add(unc_row(g, k), Relation::eq, 0.0);
  lp.add(unc_row(g, rk), Relation::le, 0.0);
  return lp;
}

std::vector<double> nondegenerate_row(bool mirrored) {
  return mirrored ? std::vector<double>{1.0, -1.0, 0.0} : std::vector<double>{-1.0, 1.0, 0.0};
}

double ideal_violation(const GameSpec& g, const ZdLinearParams& p, int r1, int rk, bool mirrored) {
  double v = std::abs(fc(g, p, r1));
  v = std::max(v, -fc(g, p, rk));
  v = std::max(v, -fu(g, p, r1));
  v = std::max(v, fu(g, p, rk));
  for (int k = 0; k < g.K; ++k)
    if (k != r1 && k != rk) v = std::max(v, std::abs(fu(g, p, k)));
  v /= game_scale(g);
  const double sa = mirrored ? -p.alpha : p.alpha;
  const double sb = mirrored ? p.beta : -p.beta;
  return std::max({v, sa, sb, 0.0});
}

std::optional<ZdLinearParams> solve_ideal_lp(const GameSpec& g, int r1, int rk, bool mirrored) {
  LinearProgram lp = ideal_program(g, r1, rk, mirrored);
  lp.add(nondegenerate_row(mirrored), Relation::ge, 1.0);
  try {
    const Feasibility f = check_feasible(lp);
    if (!f.feasible) return std::nullopt;
    // Polish: with the scale pinned, push the uncovered point of r1 off the line.
    LinearProgram polish = ideal_program(g, r1, rk, mirrored);
    polish.add(nondegenerate_row(mirrored), Relation::eq, 1.0);
    polish.sense = Sense::maximize;
    polish.objective = unc_row(g, r1);
    polish.objective[2] = 1.0;
    ZdLinearParams p{f.point[0], f.point[1], f.point[2]};
    const LpOutcome out = solve_lp(polish);
    if (out.status == LpStatus::optimal) p = {out.x[0], out.x[1], out.x[2]};
    p = p.normalized();
    if (ideal_violation(g, p, r1, rk, mirrored) > kTol) return std::nullopt;
    if (std::abs(p.alpha) <= kZeroCoef && std::abs(p.beta) <= kZeroCoef) return std::nullopt;
    return p;
  } catch (const LpNumericalError&) {
    return std::nullopt;
  }
}

// Signed distance of p to the hull boundary (positive outside).
double hull_excess(const HullPolygon& h, const Point2& p) {
  const auto& v = h.vertices;
  if (v.empty()) return std::numeric_limits<double>::infinity();
  if (v.size() == 1) return (p - v[0]).norm();
  if (v.size() == 2) {
    const Point2 d = v[1] - v[0];
    const double t = std::clamp((p - v[0]).dot(d) / d.squaredNorm(), 0.0, 1.0);
    return (p - (v[0] + t * d)).norm();
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2& a = v[i];
    const Point2& b = v[(i + 1) % v.size()];
    worst = std::max(worst, -cross(a, b, p) / (b - a).norm());
  }
  if (worst <= 0.0) return 0.0;
  // Outside: distance to the nearest edge.
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2& a = v[i];
    const Point2 d = v[(i + 1) % v.size()] - a;
    const double t = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
    best = std::min(best, (p - (a + t * d)).norm());
  }
  return best;
}

// Null space of the uncovered equalities of cell (i1, i2), columns orthonormal.
Eigen::MatrixXd cell_null_space(const GameSpec& g, int i1, int i2) {
  const int m = g.K - 2;
  if (m == 0) return Eigen::Matrix3d::Identity();
  Eigen::MatrixXd A(m, 3);
  int r = 0;
  for (int k = 0; k < g.K; ++k) {
    if (k == i1 || k == i2) continue;
    A.row(r++) << g.u_d_unc[k], g.u_a_unc[k], 1.0;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = 1e-9 * std::max(1.0, sv.size() ? sv(0) : 0.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  return svd.matrixV().rightCols(3 - rank);
}

// Rays of the pencil/bundle spanned by N where one or more event planes vanish.
std::vector<Eigen::Vector3d> event_rays(const Eigen::MatrixXd& N, const std::vector<Eigen::Vector3d>& planes) {
  const Eigen::Index d = N.cols();
  std::vector<Eigen::Vector3d> out;
  auto push = [&](const Eigen::VectorXd& z) {
    if (z.norm() <= 1e-12) return;
    const Eigen::Vector3d p = N * z;
    out.push_back(p);
    out.push_back(-p);
  };
  if (d == 1) {
    push(Eigen::VectorXd::Ones(1));
    return out;
  }
  std::vector<Eigen::VectorXd> proj;
  for (const auto& e : planes) {
    Eigen::VectorXd r = N.transpose() * e;
    const double n = r.norm();
    if (n > 1e-12) proj.push_back(r / n);
  }
  if (d == 2) {
    for (const auto& r : proj) push(Eigen::Vector2d(-r(1), r(0)));
  } else {
    for (std::size_t a = 0; a < proj.size(); ++a)
      for (std::size_t b = a + 1; b < proj.size(); ++b)
        push(Eigen::Vector3d(proj[a].head<3>()).cross(Eigen::Vector3d(proj[b].head<3>())));
  }
  return out;
}

ZdLinearParams from_vec(const Eigen::Vector3d& v) { return ZdLinearParams{v(0), v(1), v(2)}.normalized(); }

void fill_residuals(const GameSpec& g, const HullPolygon& h, ZdSolveResult& r) {
  const ZdLinearParams& p = r.params;
  double eq = 0.0;
  for (int k = 0; k < g.K; ++k)
    if (k != r.cell.i1 && k != r.cell.i2) eq = std::max(eq, std::abs(fu(g, p, k)));
  r.residuals["equalities"] = eq / game_scale(g);
  r.residuals["cone"] = cell_violation(g, p, r.cell);
  const Point2 q(r.predicted.u_d, r.predicted.u_a);
  r.residuals["line"] = std::abs(p.alpha * q.x() + p.beta * q.y() + p.gamma);
  r.residuals["hull"] = hull_excess(h, q);
}

}  // namespace

bool HullPolygon::contains(const Point2& p, double tol) const { return hull_excess(*this, p) <= tol; }

HullPolygon convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() <= 2) return {pts};
  std::vector<Point2> h(2 * pts.size());
  std::size_t n = 0;
  for (const auto& p : pts) {
    while (n >= 2 && cross(h[n - 2], h[n - 1], p) <= 0.0) --n;
    h[n++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = n + 1; i-- > 0;) {
    while (n >= lower && cross(h[n - 2], h[n - 1], pts[i]) <= 0.0) --n;
    h[n++] = pts[i];
  }
  h.resize(n - 1);
  // All collinear: the chain degenerates to the two extremes.
  if (h.size() == 2 || (h.size() > 2 && std::all_of(h.begin(), h.end(), [&](const Point2& q) {
                          return cross(h[0], h[1], q) == 0.0;
                        }))) {
    return {{pts.front(), pts.back()}};
  }
  return {h};
}

HullPolygon hull(const GameSpec& g) {
  std::vector<Point2> pts;
  for (int k = 0; k < g.K; ++k) {
    pts.emplace_back(g.u_d_cov[k], g.u_a_cov[k]);
    pts.emplace_back(g.u_d_unc[k], g.u_a_unc[k]);
  }
  return convex_hull(std::move(pts));
}

std::vector<Point2> line_hull_points(const HullPolygon& h, const ZdLinearParams& p, double tol) {
  const double nrm = std::hypot(p.alpha, p.beta);
  std::vector<Point2> out;
  if (nrm == 0.0 || h.vertices.empty()) return out;
  const auto& v = h.vertices;
  std::vector<double> s(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) s[i] = (p.alpha * v[i].x() + p.beta * v[i].y() + p.gamma) / nrm;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (std::abs(s[i]) <= tol) out.push_back(v[i]);
  const std::size_t edges = v.size() == 1 ? 0 : (v.size() == 2 ? 1 : v.size());
  for (std::size_t i = 0; i < edges; ++i) {
    const std::size_t j = (i + 1) % v.size();
    if ((s[i] > tol && s[j] < -tol) || (s[i] < -tol && s[j] > tol)) {
      const double t = s[i] / (s[i] - s[j]);
      out.push_back(v[i] + t * (v[j] - v[i]));
    }
  }
  return out;
}

std::optional<LineValue> line_value(const HullPolygon& h, const ZdLinearParams& raw) {
  const ZdLinearParams p = raw.normalized();
  if (std::abs(p.alpha) <= kZeroCoef && std::abs(p.beta) <= kZeroCoef) return std::nullopt;
  const auto pts = line_hull_points(h, p);
  if (pts.empty()) return std::nullopt;
  auto hi = pts.front(), lo = pts.front();
  for (const auto& q : pts) {
    if (q.x() > hi.x() || (q.x() == hi.x() && q.y() > hi.y())) hi = q;
    if (q.x() < lo.x() || (q.x() == lo.x() && q.y() > lo.y())) lo = q;
  }
  LineValue lv{0.0, {hi.x(), hi.y()}};
  if (std::abs(p.beta) <= kZeroCoef) {
    lv.expected_br = -p.gamma / p.alpha;
  } else if (std::abs(p.alpha) <= kZeroCoef || p.alpha * p.beta < 0.0) {
    lv.expected_br = hi.x();
  } else {
    lv.expected_br = lo.x();
  }
  return lv;
}

double cell_violation(const GameSpec& g, const ZdLinearParams& raw, const LambdaCell& c) {
  const ZdLinearParams p = raw.normalized();
  if (p.is_zero()) return std::numeric_limits<double>::infinity();
  double v = 0.0;
  v = std::max(v, fc(g, p, c.i1));
  v = std::max(v, -fu(g, p, c.i1));
  v = std::max(v, -fc(g, p, c.i2));
  v = std::max(v, fu(g, p, c.i2));
  for (int k = 0; k < g.K; ++k)
    if (k != c.i1 && k != c.i2) v = std::max(v, std::abs(fu(g, p, k)));
  return v / game_scale(g);
}

LambdaCell find_cell(const GameSpec& g, const ZdLinearParams& p, double tol) {
  for (int i1 = 0; i1 < g.K; ++i1)
    for (int i2 = 0; i2 < g.K; ++i2)
      if (i1 != i2 && cell_violation(g, p, {i1, i2}) <= tol) return {i1, i2};
  return {};
}

IdealSolution solve_ideal(const GameSpec& g) {
  g.validate();
  const double top = *std::max_element(g.u_d_cov.begin(), g.u_d_cov.end());
  for (int r1 = 0; r1 < g.K; ++r1) {
    if (g.u_d_cov[r1] != top) continue;
    for (int rk = 0; rk < g.K; ++rk) {
      if (rk == r1) continue;
      for (bool mirrored : {false, true}) {
        if (auto p = solve_ideal_lp(g, r1, rk, mirrored)) return {true, *p, r1, rk, mirrored};
      }
    }
  }
  return {};
}

CorollaryReport check_corollaries(const GameSpec& g, std::optional<double> theta) {
  g.validate();
  const int K = g.K, one = 0, last = K - 1;
  const double tol = kTol * game_scale(g);
  CorollaryReport rep;

  const double ya = g.u_a_cov[one];
  rep.equalizer = g.u_a_cov[last] >= ya - tol && g.u_a_unc[one] >= ya - tol && g.u_a_unc[last] <= ya + tol;
  for (int k = 1; k < last; ++k) rep.equalizer = rep.equalizer && std::abs(g.u_a_unc[k] - ya) <= tol;

  if (!theta) {
    if (K >= 3) {
      // The k = 2 equality and the covered point at 1 both sit on the line
      // u_d - theta = chi (u_a - theta), which passes through (theta, theta).
      const double x1 = g.u_d_cov[one], y1 = g.u_a_cov[one];
      const double x2 = g.u_d_unc[1], y2 = g.u_a_unc[1];
      const double den = (x2 - x1) - (y2 - y1);
      if (std::abs(den) > tol) {
        const double t = (y1 - x1) / den;
        theta = x1 + t * (x2 - x1);
      }
    } else {
      for (bool mirrored : {false, true}) {
        const auto p = solve_ideal_lp(g, one, last, mirrored);
        if (p && std::abs(p->alpha + p->beta) > kZeroCoef) {
          theta = -p->gamma / (p->alpha + p->beta);
          break;
        }
      }
    }
  }
  if (!theta) return rep;
  rep.theta = theta;
  const double th = *theta;
  if (std::abs(ya - th) <= tol) return rep;
  const double chi = (g.u_d_cov[one] - th) / (ya - th);
  rep.chi = chi;
  auto h = [&](double ud, double ua) { return (ud - th) - chi * (ua - th); };
  bool common = h(g.u_d_cov[last], g.u_a_cov[last]) >= -tol && h(g.u_d_unc[last], g.u_a_unc[last]) <= tol &&
                h(g.u_d_unc[one], g.u_a_unc[one]) >= -tol;
  for (int k = 1; k < last; ++k) common = common && std::abs(h(g.u_d_unc[k], g.u_a_unc[k])) <= tol;
  rep.extortion = common && chi >= 1.0 - kTol;
  // chi < 0 would make the line decreasing, which no ideal parameter set has.
  rep.generous = common && chi <= 1.0 + kTol && chi >= 0.0;
  return rep;
}

std::string to_string(SolveKind k) {
  switch (k) {
    case SolveKind::ideal: return "ideal";
    case SolveKind::optimal: return "optimal";
    case SolveKind::none: return "none";
  }
  return "none";
}

ZdSolveResult solve_optimal(const GameSpec& g, const OptimalOptions& opt) {
  g.validate();
  const HullPolygon h = hull(g);
  if (opt.ideal_shortcut) {
    const IdealSolution s = solve_ideal(g);
    if (s.found) {
      ZdSolveResult r;
      r.kind = SolveKind::ideal;
      r.params = s.params;
      r.predicted = {g.u_d_cov[s.role_one], g.u_a_cov[s.role_one]};
      r.expected_br = r.predicted.u_d;
      r.cell = s.cell();
      r.mirrored = s.mirrored;
      fill_residuals(g, h, r);
      return r;
    }
  }

  std::vector<Eigen::Vector3d> shared{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
  for (const auto& v : h.vertices) shared.emplace_back(v.x(), v.y(), 1.0);

  ZdSolveResult best;
  bool have = false;
  for (int i1 = 0; i1 < g.K; ++i1) {
    for (int i2 = 0; i2 < g.K; ++i2) {
      if (i1 == i2) continue;
      const Eigen::MatrixXd N = cell_null_space(g, i1, i2);
      if (N.cols() == 0) continue;
      std::vector<Eigen::Vector3d> planes{{g.u_d_cov[i1], g.u_a_cov[i1], 1.0},
                                          {g.u_d_unc[i1], g.u_a_unc[i1], 1.0},
                                          {g.u_d_cov[i2], g.u_a_cov[i2], 1.0},
                                          {g.u_d_unc[i2], g.u_a_unc[i2], 1.0}};
      planes.insert(planes.end(), shared.begin(), shared.end());
      const LambdaCell cell{i1, i2};
      for (const auto& ray : event_rays(N, planes)) {
        const ZdLinearParams p = from_vec(ray);
        if (std::abs(p.alpha) <= kZeroCoef && std::abs(p.beta) <= kZeroCoef) continue;
        if (cell_violation(g, p, cell) > kTol) continue;
        const auto lv = line_value(h, p);
        if (!lv) continue;
        if (have && lv->expected_br <= best.expected_br + 1e-12) continue;
        have = true;
        best.kind = SolveKind::optimal;
        best.params = p;
        best.predicted = lv->literal;
        best.expected_br = lv->expected_br;
        best.cell = cell;
        best.mirrored = p.alpha > 0.0 && p.beta < 0.0;
      }
    }
  }
  if (have) fill_residuals(g, h, best);
  return best;
}

}  // namespace zdmtd
