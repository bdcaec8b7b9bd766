#include "doctest.h"
#include "oracles.hpp"
#include "zdmtd/instances.hpp"
#include "zdmtd/pipeline.hpp"
#include "zdmtd/zd_programs.hpp"

using namespace zdmtd;

namespace {
// Equalizer conditions hold with the middle uncovered point level with the
// first covered one (-2).
GameSpec ideal_equalizer_game() { return make_game({5, 3, 2}, {0, -2, -1}, {-2, 1, 0}, {3, -2, -4}); }

double sorted_hull_area(const HullPolygon& h) {
  double a = 0.0;
  const auto& v = h.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& p = v[i];
    const auto& q = v[(i + 1) % v.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}
}  // namespace

TEST_CASE("hull examples") {
  const HullPolygon sq = convex_hull({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}});
  CHECK(sq.vertices.size() == 4);
  CHECK(sorted_hull_area(sq) == doctest::Approx(1.0));  // counterclockwise
  const GameSpec square = make_game({1, 1}, {0, 0}, {0, 1}, {0, 1});
  CHECK(hull(square).vertices.size() == 4);

  const HullPolygon one = convex_hull({{2, 3}, {2, 3}, {2, 3}, {2, 3}});
  CHECK(one.vertices.size() == 1);
  CHECK(one.contains({2, 3}));
  CHECK_FALSE(one.contains({2, 3.1}));
}

TEST_CASE("hull matches the brute-force vertex oracle") {
  for (uint64_t seed : {13u, 14u, 15u, 16u}) {
    Rng rng(seed);
    const GameSpec g = random_game(3, rng);
    std::vector<Eigen::Vector2d> pts;
    for (int k = 0; k < 3; ++k) {
      pts.emplace_back(g.u_d_cov[k], g.u_a_cov[k]);
      pts.emplace_back(g.u_d_unc[k], g.u_a_unc[k]);
    }
    const HullPolygon h = hull(g);
    const auto ref = oracle::brute_hull_vertices(pts);
    CHECK(h.vertices.size() == ref.size());
    for (const auto& v : ref) {
      bool found = false;
      for (const auto& w : h.vertices) found = found || (v - w).norm() < 1e-12;
      CHECK(found);
    }
    for (const auto& p : pts) CHECK(h.contains(p));
    CHECK(sorted_hull_area(h) > 0.0);
  }
}

TEST_CASE("line meets hull") {
  const HullPolygon sq = convex_hull({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  // u_a = 0.5 crosses two edges.
  CHECK(line_hull_points(sq, {0, 1, -0.5}).size() == 2);
  CHECK(line_hull_points(sq, {0, 1, -2}).empty());
  const auto v = line_value(sq, {1, -1, 0});
  REQUIRE(v.has_value());
  CHECK(v->literal.u_d == doctest::Approx(1.0));
}

TEST_CASE("ideal parameters on the equalizer instance") {
  const GameSpec g = ideal_equalizer_game();
  const IdealSolution s = solve_ideal(g);
  REQUIRE(s.found);
  CHECK(s.role_one == 0);
  // Every Lambda constraint holds at the returned parameters.
  CHECK(cell_violation(g, s.params, s.cell()) <= 1e-9);
  CHECK(check_corollaries(g).equalizer);
  // alpha = 0 is admissible: the horizontal line through the first covered point.
  const ZdLinearParams eq{0, 1, 2};
  CHECK(cell_violation(g, eq, {0, 2}) <= 1e-12);
}

TEST_CASE("ideal parameters do not exist when uncovered attacker values over-determine the line") {
  Rng rng(19);
  for (int t = 0; t < 20; ++t) {
    const GameSpec g = random_game(5, rng);
    CHECK_FALSE(solve_ideal(g).found);
  }
}

TEST_CASE("corollary conditions on the boundary chi = 1") {
  const GameSpec g = make_game({2, 1.5, 1}, {0, -1, -2}, {2, 1, 0}, {-1, -1, 0});
  const CorollaryReport r = check_corollaries(g, 0.0);
  REQUIRE(r.chi.has_value());
  CHECK(*r.chi == doctest::Approx(1.0));
  CHECK(r.extortion);
  CHECK(r.generous);
}

TEST_CASE("generic instances rarely meet the corollary conditions") {
  Rng rng(23);
  int any = 0;
  for (int t = 0; t < 50; ++t) {
    const CorollaryReport r = check_corollaries(canonicalize(random_game(4, rng)).first);
    any += r.equalizer || r.extortion || r.generous;
  }
  MESSAGE("generic K = 4 instances meeting a corollary: " << any << " / 50");
}

TEST_CASE("solve_optimal takes the ideal shortcut when available") {
  const GameSpec g = ideal_equalizer_game();
  const ZdSolveResult r = solve_optimal(g);
  CHECK(r.kind == SolveKind::ideal);
  CHECK(r.predicted.u_d == doctest::Approx(5.0));
  CHECK(cell_violation(g, r.params, r.cell) <= 1e-9);
}

TEST_CASE("solve_optimal reports a cell that contains its parameters") {
  Rng rng(37);
  for (int t = 0; t < 30; ++t) {
    const GameSpec g = random_game(3, rng);
    const ZdSolveResult r = solve_optimal(g, {false});
    if (r.kind == SolveKind::none) continue;
    CHECK(r.cell.valid());
    CHECK(cell_violation(g, r.params, r.cell) <= 1e-7);
    CHECK(r.expected_br <= *std::max_element(g.u_d_cov.begin(), g.u_d_cov.end()) + 1e-9);
  }
}

TEST_CASE("solve_optimal reports the only consistent cell") {
  // K = 3: target 1's uncovered point is the only one the line can pass
  // through while the first and last targets straddle it, so (0, 2) is the
  // sole cell with a nondegenerate line.
  const GameSpec g = make_game({4, 1, 3}, {-2, 0, -1}, {-3, 0, 2}, {3, 0, -2});
  const ZdSolveResult r = solve_optimal(g, {false});
  REQUIRE(r.kind != SolveKind::none);
  CHECK(cell_violation(g, r.params, r.cell) <= 1e-9);
  CHECK(find_cell(g, r.params).valid());
}

TEST_CASE("K = 2 optimum matches the parameter-grid oracle") {
  Rng rng(9);
  const GameSpec g = random_game(2, rng);
  const PipelineResult r = run_pipeline(g);
  if (r.solve.kind == SolveKind::none) {
    CHECK(oracle::k2_zd_grid(g, PipelineOptions{}.phi_scale, 0.05) == -1e300);
  } else {
    REQUIRE(r.has_strategy);
    const double real = zd_utility_under_br(g, r.zd).first.u_d;
    const double grid = oracle::k2_zd_grid(g, PipelineOptions{}.phi_scale, 0.02);
    CHECK(real >= grid - 1e-3);
    CHECK(r.solve.expected_br >= grid - 1e-3);
  }
}

TEST_CASE("pipeline: ideal instances reach the covered maximum under best response") {
  for (CorollaryKind kind : {CorollaryKind::equalizer, CorollaryKind::extortion, CorollaryKind::generous})
    for (int K : {3, 5}) {
      Rng rng(static_cast<uint64_t>(K) * 10 + static_cast<int>(kind));
      const GameSpec g = corollary_game(K, kind, rng);
      PipelineOptions o;
      o.verify_samples = 50;
      const PipelineResult r = run_pipeline(g, o);
      REQUIRE(r.solve.kind == SolveKind::ideal);
      CHECK(r.report.passed());
      const double best = *std::max_element(g.u_d_cov.begin(), g.u_d_cov.end());
      CHECK(zd_utility_under_br(g, r.zd).first.u_d == doctest::Approx(best).epsilon(1e-6));
    }
}

TEST_CASE("pipeline: mode ideal on a generic K = 4 instance is infeasible") {
  const GameSpec g = make_game({3, 2, 1, 4}, {-1, -2, -3, 0}, {-1, 0, -2, 1}, {2, 3, 1, 4});
  PipelineOptions o;
  o.mode = SolveMode::ideal;
  const PipelineResult r = run_pipeline(g, o);
  CHECK(r.solve.kind == SolveKind::none);
  CHECK_FALSE(r.has_strategy);
}

TEST_CASE("pipeline outputs are valid in the original labels") {
  Rng rng(61);
  for (int t = 0; t < 20; ++t) {
    const int K = 2 + t % 4;
    const GameSpec g = random_zd_game(K, rng);
    PipelineOptions o;
    o.verify_samples = 20;
    o.seed = t;
    const PipelineResult r = run_pipeline(g, o);
    if (!r.has_strategy) continue;
    r.zd.strategy.validate(1e-12);
    CHECK(r.report.passed());
    CHECK(defining_residual(g, r.zd.strategy, r.zd.params, r.zd.phi) <= 1e-8);
    // The construction labeling sends the cell's ends to 0 and K - 1.
    CHECK(r.labels.perm[r.solve.cell.i1] == 0);
    CHECK(r.labels.perm[r.solve.cell.i2] == K - 1);
    // In those labels the closed-form phi chain is monotone.
    const GameSpec g2 = permute_game(g, r.labels);
    CHECK(construct_phi(g2, r.zd.params).monotone(1e-12));
  }
}

TEST_CASE("mode parsing") {
  CHECK(parse_mode("auto") == SolveMode::automatic);
  CHECK(to_string(parse_mode("optimal")) == "optimal");
  CHECK_THROWS_AS(parse_mode("best"), std::invalid_argument);
}
