#include "zdmtd/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace zdmtd {

SolveMode parse_mode(const std::string& s) {
  if (s == "auto") return SolveMode::automatic;
  if (s == "ideal") return SolveMode::ideal;
  if (s == "optimal") return SolveMode::optimal;
  throw std::invalid_argument("unknown mode '" + s + "' (expected auto, ideal or optimal)");
}

std::string to_string(SolveMode m) {
  switch (m) {
    case SolveMode::automatic: return "auto";
    case SolveMode::ideal: return "ideal";
    case SolveMode::optimal: return "optimal";
  }
  return "auto";
}

CanonicalPermutation cell_labels(const GameSpec& g, const ZdLinearParams& p, const LambdaCell& c) {
  const int K = g.K;
  std::vector<int> mid;
  for (int k = 0; k < K; ++k)
    if (k != c.i1 && k != c.i2) mid.push_back(k);
  auto fcov = [&](int k) { return std::abs(p.alpha * g.u_d_cov[k] + p.beta * g.u_a_cov[k] + p.gamma); };
  std::stable_sort(mid.begin(), mid.end(), [&](int a, int b) { return fcov(a) > fcov(b); });
  std::vector<int> perm(K);
  perm[c.i1] = 0;
  perm[c.i2] = K - 1;
  for (std::size_t r = 0; r < mid.size(); ++r) perm[mid[r]] = static_cast<int>(r) + 1;
  return CanonicalPermutation::from_perm(std::move(perm));
}

namespace {

// Relabels a strategy built in the g2 = permute_game(g, lab) labeling back.
ZdStrategy map_back(ZdStrategy zd, const CanonicalPermutation& lab) {
  const int K = zd.strategy.K;
  const CanonicalPermutation inv = lab.inverse();
  zd.strategy = permute_strategy(zd.strategy, inv);
  Eigen::VectorXd phi(K);
  for (int t = 0; t < K; ++t) phi(t) = zd.phi.phi(lab.perm[t]);
  zd.phi.phi = phi;
  // omega rows follow the construction's step order; columns are states.
  Eigen::MatrixXd om(zd.omega.rows(), zd.omega.cols());
  for (Eigen::Index r = 0; r < zd.omega.rows(); ++r)
    om.row(r) = permute_states(zd.omega.row(r).transpose(), inv).transpose();
  zd.omega = om;
  return zd;
}

}  // namespace

ZdStrategy construct_in_cell(const GameSpec& g, const ZdLinearParams& p, const LambdaCell& c, double phi_scale,
                             const std::optional<WeightParams>& omega) {
  const CanonicalPermutation lab = cell_labels(g, p, c);
  const GameSpec g2 = permute_game(g, lab);
  // The closed-form minimum is tried first; existence_check (formula, then
  // LPs) is the general fallback.
  std::optional<FeasibilityParams> min_phi = minimal_phi(g2, p);
  if (!min_phi) {
    const ExistenceResult ex = existence_check(g2, p);
    if (!ex.exists) {
      std::string why = "no feasibility parameters for cell";
      for (const auto& w : ex.witness) why += "; " + w;
      throw ConstructionError(ConstructionError::Kind::empty_interval, why);
    }
    min_phi = ex.phi;
  }
  FeasibilityParams phi = *min_phi;
  phi.phi *= phi_scale;
  std::optional<WeightParams> om2;
  if (omega) {
    om2 = WeightParams{Eigen::VectorXd(g.K)};
    for (int t = 0; t < g.K; ++t) om2->omega(lab.perm[t]) = omega->omega(t);
  }
  return map_back(construct_strategy(g2, p, phi, om2), lab);
}

double zd_tie_tolerance(const GameSpec& g, const ZdStrategy& zd) {
  const ZdLinearParams& p = zd.params;  // phi is in the same scale as p
  double tol = br_tie_tolerance(g);
  if (std::abs(p.beta) > 0.0) tol += 4.0 * kEpsMix * zd.phi.phi.cwiseAbs().maxCoeff() / std::abs(p.beta);
  return tol;
}

std::pair<UtilityPair, BestResponse> zd_utility_under_br(const GameSpec& g, const ZdStrategy& zd) {
  return defender_utility_under_br(g, zd.strategy, zd_tie_tolerance(g, zd));
}

PipelineResult run_pipeline(const GameSpec& g, const PipelineOptions& opt) {
  g.validate();
  const auto [gc, canon] = canonicalize(g);
  PipelineResult res;
  ZdSolveResult sr;
  if (opt.mode == SolveMode::ideal) {
    // The shortcut path of solve_optimal is exactly solve_ideal plus residuals.
    sr = solve_optimal(gc);
    if (sr.kind != SolveKind::ideal) sr = ZdSolveResult{};
  } else {
    sr = solve_optimal(gc, {opt.mode == SolveMode::automatic});
  }
  res.labels = canon;
  if (sr.kind == SolveKind::none) {
    res.solve = sr;
    return res;
  }
  const double scale = sr.kind == SolveKind::optimal ? opt.phi_scale : 1.0;
  const CanonicalPermutation back = canon.inverse();
  std::optional<WeightParams> om_c;
  if (opt.omega) {
    om_c = WeightParams{Eigen::VectorXd(g.K)};
    for (int t = 0; t < g.K; ++t) om_c->omega(canon.perm[t]) = opt.omega->omega(t);
  }
  ZdStrategy zd = construct_in_cell(gc, sr.params, sr.cell, scale, om_c);
  zd = map_back(std::move(zd), canon);
  // Cell in original labels.
  sr.cell = {back.perm[sr.cell.i1], back.perm[sr.cell.i2]};
  const CanonicalPermutation cl = cell_labels(gc, sr.params, {canon.perm[sr.cell.i1], canon.perm[sr.cell.i2]});
  std::vector<int> total(g.K);
  for (int t = 0; t < g.K; ++t) total[t] = cl.perm[canon.perm[t]];
  res.labels = CanonicalPermutation::from_perm(std::move(total));
  res.solve = sr;
  res.zd = std::move(zd);
  res.has_strategy = true;
  res.report = verify(g, res.zd, opt.verify_samples, opt.seed);
  return res;
}

}  // namespace zdmtd
