#include "doctest.h"
#include "zdmtd/game_model.hpp"
#include "zdmtd/instances.hpp"

using namespace zdmtd;

namespace {
GameSpec symmetric() { return make_game({1, 1}, {-1, -1}, {-1, -1}, {1, 1}); }
}  // namespace

TEST_CASE("one-shot utilities read covered and uncovered entries") {
  const GameSpec g = symmetric();
  auto u = one_shot_utilities(g, 0, 0);
  CHECK(u.u_d == 1);
  CHECK(u.u_a == -1);
  u = one_shot_utilities(g, 0, 1);
  CHECK(u.u_d == -1);
  CHECK(u.u_a == 1);
  u = one_shot_utilities(g, 1, 1);
  CHECK(u.u_d == 1);
  CHECK(u.u_a == -1);
}

TEST_CASE("validate rejects malformed games") {
  CHECK_THROWS_AS(make_game({1}, {0}, {0}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(make_game({1, 2}, {0}, {0, 0}, {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(make_game({1, 0}, {0, 0}, {0, 0}, {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(make_game({1, NAN}, {0, 0}, {0, 0}, {1, 1}), std::invalid_argument);
}

TEST_CASE("profit vectors follow the flat state order") {
  const GameSpec g = make_game({1, 4}, {0, 2}, {-1, -3}, {5, 6});
  const Eigen::VectorXd sd = profit_vector(g, Player::defender);
  const Eigen::VectorXd sa = profit_vector(g, Player::attacker);
  CHECK(sd == Eigen::Vector4d(1, 2, 0, 4));
  CHECK(sa == Eigen::Vector4d(-1, 6, 5, -3));

  const GameSpec g3 = make_game({1, 1, 1}, {0, 0, 0}, {0, 0, 0}, {1, 1, 1});
  const Eigen::VectorXd s3 = profit_vector(g3, Player::defender);
  for (int s = 0; s < 9; ++s) CHECK(s3(s) == ((s == 0 || s == 4 || s == 8) ? 1.0 : 0.0));
}

TEST_CASE("hat indicator marks the block of the previous defender action") {
  CHECK(hat_indicator(2, 0) == Eigen::Vector4d(1, 1, 0, 0));
  CHECK(hat_indicator(2, 1) == Eigen::Vector4d(0, 0, 1, 1));
  Eigen::VectorXd e(9);
  e << 0, 0, 0, 1, 1, 1, 0, 0, 0;
  CHECK(hat_indicator(3, 1) == e);
}

TEST_CASE("canonicalize moves the first covered maximum to label 0") {
  const GameSpec g = make_game({3, 7, 5}, {0, 0, 0}, {0, 0, 0}, {1, 1, 1});
  auto [c, p] = canonicalize(g);
  CHECK(c.u_d_cov == std::vector<double>{7, 5, 3});
  CHECK(p.perm == std::vector<int>{2, 0, 1});
  CHECK(p.inv == std::vector<int>{1, 2, 0});

  const GameSpec already = make_game({7, 5, 3}, {0, 0, 0}, {0, 0, 0}, {1, 1, 1});
  CHECK(canonicalize(already).second.is_identity());

  const GameSpec tie = make_game({7, 7, 1}, {0, 0, 0}, {0, 0, 0}, {1, 1, 1});
  auto [ct, pt] = canonicalize(tie);
  CHECK(pt.is_identity());
  CHECK(ct == tie);
}

TEST_CASE("permutation round trips") {
  Rng rng(5);
  for (int K : {2, 3, 5}) {
    const GameSpec g = random_game(K, rng);
    const MemoryOneStrategy s = random_strategy(K, rng);
    std::vector<int> perm(K);
    for (int k = 0; k < K; ++k) perm[k] = (k + 1) % K;
    const auto p = CanonicalPermutation::from_perm(perm);
    CHECK(permute_game(permute_game(g, p), p.inverse()) == g);
    const MemoryOneStrategy back = permute_strategy(permute_strategy(s, p), p.inverse());
    CHECK((back.rows - s.rows).cwiseAbs().maxCoeff() == 0.0);
    // Relabeling a pair of strategies leaves every state probability attached
    // to the same (defender, attacker) targets.
    const GameSpec pg = permute_game(g, p);
    for (int k = 0; k < K; ++k) CHECK(pg.u_d_cov[perm[k]] == g.u_d_cov[k]);
  }
}

TEST_CASE("memory-one constructors produce valid rows") {
  CHECK_NOTHROW(MemoryOneStrategy::uniform(3).validate());
  const auto a = MemoryOneStrategy::always(3, 2);
  a.validate();
  for (int s = 0; s < 9; ++s) CHECK(a.rows(s, 2) == 1.0);
  const auto d = MemoryOneStrategy::deterministic(2, {1, 0, 1, 0});
  CHECK(d.rows(0, 1) == 1.0);
  CHECK(d.rows(1, 0) == 1.0);
  MemoryOneStrategy bad = MemoryOneStrategy::uniform(2);
  bad.rows(0, 0) = 0.7;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK(bad.row_defect() == doctest::Approx(0.2));
}
