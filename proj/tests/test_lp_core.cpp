#include "doctest.h"
#include "zdmtd/instances.hpp"
#include "zdmtd/lp_core.hpp"

using namespace zdmtd;

TEST_CASE("single bounded variable") {
  LinearProgram lp(1);
  lp.objective = {1.0};
  lp.add({1.0}, Relation::le, 3.0);
  const LpOutcome r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.x[0] == doctest::Approx(3.0));
  CHECK(r.objective == doctest::Approx(3.0));
}

TEST_CASE("degenerate optimum face") {
  LinearProgram lp(2);
  lp.objective = {1.0, 1.0};
  lp.add({1.0, 1.0}, Relation::le, 1.0);
  const LpOutcome r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.objective == doctest::Approx(1.0));
  CHECK(r.x[0] + r.x[1] == doctest::Approx(1.0));
  // Bland's rule is deterministic: the same program gives the same point.
  CHECK(solve_lp(lp).x == r.x);
}

TEST_CASE("infeasible and unbounded programs") {
  LinearProgram lp(1);
  lp.set_free(0);
  lp.add({1.0}, Relation::le, -1.0);
  lp.add({1.0}, Relation::ge, 1.0);
  CHECK(solve_lp(lp).status == LpStatus::infeasible);
  CHECK_FALSE(check_feasible(lp).feasible);

  LinearProgram eq(1);
  eq.set_free(0);
  eq.add({1.0}, Relation::eq, 1.0);
  eq.add({1.0}, Relation::eq, 2.0);
  CHECK_FALSE(check_feasible(eq).feasible);

  LinearProgram ub(1);
  ub.objective = {1.0};
  CHECK(solve_lp(ub).status == LpStatus::unbounded);
}

TEST_CASE("empty constraint list with a free variable is feasible at the origin") {
  LinearProgram lp(1);
  lp.set_free(0);
  const Feasibility f = check_feasible(lp);
  REQUIRE(f.feasible);
  CHECK(f.point[0] == 0.0);
}

TEST_CASE("free variables, bounds and minimization") {
  LinearProgram lp(2);
  lp.sense = Sense::minimize;
  lp.objective = {1.0, -1.0};
  lp.set_free(0);
  lp.set_bounds(1, -2.0, 4.0);
  lp.add({1.0, 0.0}, Relation::ge, -3.0);
  lp.add({1.0, 1.0}, Relation::le, 10.0);
  const LpOutcome r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.x[0] == doctest::Approx(-3.0));
  CHECK(r.x[1] == doctest::Approx(4.0));
  CHECK(r.objective == doctest::Approx(-7.0));
  CHECK(max_violation(lp, r.x) <= 1e-12);
  CHECK(max_violation(lp, {-4.0, 4.0}) == doctest::Approx(1.0));
}

TEST_CASE("random feasible programs: solutions satisfy every row") {
  // Rows are built around a known interior point so feasibility is certain;
  // the optimum must be at least as good as that point.
  Rng rng(21);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(rng.below(5));
    const int m = 1 + static_cast<int>(rng.below(8));
    std::vector<double> x0(n);
    for (double& v : x0) v = rng.uniform(0.0, 2.0);
    LinearProgram lp(n);
    lp.objective.resize(n);
    for (double& c : lp.objective) c = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < n; ++i) lp.set_bounds(i, 0.0, 5.0);
    for (int r = 0; r < m; ++r) {
      std::vector<double> row(n);
      double dot = 0.0;
      for (int i = 0; i < n; ++i) dot += (row[i] = rng.uniform(-1.0, 1.0)) * x0[i];
      const int kind = static_cast<int>(rng.below(3));
      if (kind == 0) lp.add(row, Relation::le, dot + rng.uniform(0.0, 1.0));
      if (kind == 1) lp.add(row, Relation::ge, dot - rng.uniform(0.0, 1.0));
      if (kind == 2) lp.add(row, Relation::eq, dot);
    }
    const LpOutcome r = solve_lp(lp);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(max_violation(lp, r.x) <= 1e-8);
    double v0 = 0.0;
    for (int i = 0; i < n; ++i) v0 += lp.objective[i] * x0[i];
    CHECK(r.objective >= v0 - 1e-9);
  }
}

TEST_CASE("dump names every row") {
  LinearProgram lp(2);
  lp.objective = {1.0, 2.0};
  lp.add({1.0, 1.0}, Relation::le, 4.0);
  const std::string d = dump(lp);
  CHECK(d.find("c0: 1*x0 1*x1 <= 4") != std::string::npos);
}
