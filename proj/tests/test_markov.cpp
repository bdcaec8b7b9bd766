#include "doctest.h"
#include "oracles.hpp"
#include "zdmtd/instances.hpp"
#include "zdmtd/markov.hpp"
#include "zdmtd/sim.hpp"

using namespace zdmtd;

namespace {
GameSpec symmetric() { return make_game({1, 1}, {-1, -1}, {-1, -1}, {1, 1}); }

// pi_d repeats its own previous action; pi_a copies the defender's previous one.
MemoryOneStrategy repeat_self(int K) {
  std::vector<int> p(K * K);
  for (int s = 0; s < K * K; ++s) p[s] = state_def(K, s);
  return MemoryOneStrategy::deterministic(K, p);
}
MemoryOneStrategy repeat_attacker(int K) {
  std::vector<int> p(K * K);
  for (int s = 0; s < K * K; ++s) p[s] = state_att(K, s);
  return MemoryOneStrategy::deterministic(K, p);
}
}  // namespace

TEST_CASE("transition matrix examples") {
  const auto one = MemoryOneStrategy::always(2, 0);
  const TransitionMatrix t = build_transition(one, one);
  for (int s = 0; s < 4; ++s) CHECK(t.M.row(s) == Eigen::RowVector4d(1, 0, 0, 0));

  const TransitionMatrix u = build_transition(MemoryOneStrategy::uniform(2), MemoryOneStrategy::uniform(2));
  CHECK((u.M.array() - 0.25).abs().maxCoeff() == 0.0);

  // Copying the defender: from (i, j) both play i next.
  const TransitionMatrix cp = build_transition(repeat_self(2), repeat_self(2));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int s2 = 0; s2 < 4; ++s2) CHECK(cp.M(flat(2, i, j), s2) == (s2 == flat(2, i, i) ? 1.0 : 0.0));
}

TEST_CASE("transition matches the elementwise definition") {
  Rng rng(3);
  for (int K : {2, 3, 4}) {
    const auto d = random_strategy(K, rng), a = random_strategy(K, rng);
    CHECK((build_transition(d, a).M - oracle::transition(d, a)).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("stationary distribution examples") {
  const auto one = MemoryOneStrategy::always(2, 0);
  const StationaryDist s = stationary(build_transition(one, one));
  CHECK(s.v(0) == doctest::Approx(1.0));
  CHECK(s.v.tail(3).cwiseAbs().maxCoeff() <= 1e-14);

  const StationaryDist u = stationary(build_transition(MemoryOneStrategy::uniform(3), MemoryOneStrategy::uniform(3)));
  CHECK((u.v.array() - 1.0 / 9).abs().maxCoeff() <= 1e-14);
}

TEST_CASE("stationary matches the power-iteration oracle") {
  Rng rng(42);
  const auto d = random_strategy(2, rng), a = random_strategy(2, rng);
  const TransitionMatrix t = build_transition(d, a);
  const StationaryDist s = stationary(t);
  CHECK(s.method == StationaryMethod::direct);
  const Eigen::VectorXd ref = oracle::power_iteration(oracle::transition(d, a), 1000000);
  CHECK((s.v - ref).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(s.residual <= kDirectResidualTol);
}

TEST_CASE("reducible chains fall back to the Cesaro limit") {
  // Every state is absorbing: the Cesaro limit from uniform is uniform.
  const StationaryDist s = stationary(build_transition(repeat_self(2), repeat_attacker(2)));
  CHECK(s.method == StationaryMethod::cesaro);
  CHECK((s.v.array() - 0.25).abs().maxCoeff() <= 1e-9);

  // Periodic two-cycle: (0,0) <-> (1,1).
  const auto flip = MemoryOneStrategy::deterministic(2, {1, 1, 0, 0});
  const StationaryDist p = stationary(build_transition(flip, flip));
  CHECK(p.v(0) == doctest::Approx(0.5));
  CHECK(p.v(3) == doctest::Approx(0.5));
}

TEST_CASE("long-run utilities closed forms") {
  const GameSpec g = symmetric();
  const auto one = MemoryOneStrategy::always(2, 0);
  UtilityPair u = long_run_utilities(g, one, one);
  CHECK(u.u_d == doctest::Approx(1.0));
  CHECK(u.u_a == doctest::Approx(-1.0));

  Rng rng(8);
  const GameSpec g3 = random_game(3, rng);
  for (int m = 0; m < 3; ++m) {
    u = long_run_utilities(g3, MemoryOneStrategy::uniform(3), MemoryOneStrategy::always(3, m));
    CHECK(u.u_a == doctest::Approx(g3.u_a_cov[m] / 3 + 2.0 * g3.u_a_unc[m] / 3));
    CHECK(u.u_d == doctest::Approx(g3.u_d_cov[m] / 3 + 2.0 * g3.u_d_unc[m] / 3));
  }
}

TEST_CASE("long-run utilities agree with a long trajectory") {
  Rng rng(7);
  const GameSpec g = random_game(3, rng);
  const auto d = random_strategy(3, rng), a = random_strategy(3, rng);
  const UtilityPair u = long_run_utilities(g, d, a);
  const TrajectoryStats t = simulate(g, d, AttackerProfile::fixed(a), 1000000, 7, 1000000);
  CHECK(std::abs(t.avg_u_d - u.u_d) <= 3 * t.se_u_d);
  CHECK(std::abs(t.avg_u_a - u.u_a) <= 3 * t.se_u_a);
}

TEST_CASE("determinant form agrees with the stationary form") {
  const GameSpec g = symmetric();
  const auto one = MemoryOneStrategy::always(2, 0);
  const UtilityPair u = det_utilities(g, one, one);
  CHECK(u.u_d == doctest::Approx(1.0));
  CHECK(u.u_a == doctest::Approx(-1.0));

  Rng rng(12);
  for (int t = 0; t < 50; ++t) {
    const int K = 2 + t % 2;
    const GameSpec gk = random_game(K, rng);
    const auto d = random_strategy(K, rng), a = random_strategy(K, rng);
    const UtilityPair x = det_utilities(gk, d, a), y = long_run_utilities(gk, d, a);
    CHECK(std::abs(x.u_d - y.u_d) <= 1e-6 * std::max(1.0, std::abs(y.u_d)));
    CHECK(std::abs(x.u_a - y.u_a) <= 1e-6 * std::max(1.0, std::abs(y.u_a)));
  }
  CHECK_THROWS_AS(det_utilities(g, repeat_self(2), repeat_attacker(2)), SingularDenominator);
}

TEST_CASE("zd residual") {
  Rng rng(2);
  const GameSpec g = random_game(3, rng);
  const auto d = random_strategy(3, rng), a = random_strategy(3, rng);
  CHECK(zd_residual(g, d, a, 0, 0, 0) == 0.0);
  // Uniform is not a ZD strategy for this line; pinned from the first run.
  const GameSpec g2 = make_game({2, 3}, {-1, 0}, {-2, -1}, {4, 1});
  const double r = zd_residual(g2, MemoryOneStrategy::uniform(2), MemoryOneStrategy::always(2, 0), 1.0, 0.5, -0.25);
  CHECK(r > 0.01);
  CHECK(r == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("eps mixing") {
  const auto one = MemoryOneStrategy::always(2, 0);
  const auto m = eps_mix(one, 0.1);
  CHECK(m.rows(0, 0) == doctest::Approx(0.95));
  CHECK(m.rows(0, 1) == doctest::Approx(0.05));
  const GameSpec g = symmetric();
  const UtilityPair u = mixed_utilities(g, one, one);
  CHECK(u.u_d == doctest::Approx(1.0).epsilon(1e-7));
}
