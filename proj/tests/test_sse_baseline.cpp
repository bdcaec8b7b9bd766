#include "doctest.h"
#include "oracles.hpp"
#include "zdmtd/instances.hpp"
#include "zdmtd/pipeline.hpp"
#include "zdmtd/sse_baseline.hpp"

using namespace zdmtd;

namespace {
MemoryOneStrategy lift(const OneShotSse& o) {
  return MemoryOneStrategy::memoryless(Eigen::Map<const Eigen::VectorXd>(o.x.data(), static_cast<Eigen::Index>(o.x.size())));
}
}  // namespace

TEST_CASE("MIP variable and row counts") {
  Rng rng(1);
  const MipModel m2 = build_mip(random_game(2, rng));
  CHECK(m2.binaries.size() == 8);
  CHECK(m2.count_prefix("pia_") == 8);
  CHECK(m2.count_prefix("pid_") == 8);
  CHECK(m2.count_prefix("Q_") + m2.count_prefix("W_") + m2.count_prefix("Vd") + m2.count_prefix("Va") == 10);
  // Three families of K^3 rows plus two simplex rows per state.
  CHECK(m2.rows.size() == 3 * 8 + 2 * 4);

  const MipModel m3 = build_mip(random_game(3, rng));
  CHECK(m3.binaries.size() == 27);
  CHECK(m3.rows.size() == 3 * 27 + 2 * 9);
}

TEST_CASE("MIP header records K and a big-M above the utility span") {
  const GameSpec g = make_game({3, 7}, {-2, 1}, {-4, 0}, {5, 2});
  const std::string text = emit_mip(g);
  CHECK(text.find("\\ K = 2") != std::string::npos);
  CHECK(big_m(g) == doctest::Approx(10.0 * (1 + 7) * 4));
  CHECK(text.find("\\ Z = 320") != std::string::npos);
  CHECK(text.find("Binaries") != std::string::npos);
  CHECK(big_m(g) > 2 * 7);
}

TEST_CASE("MIP text round-trips byte for byte") {
  Rng rng(2);
  for (int K : {2, 3, 4}) {
    const GameSpec g = random_game(K, rng);
    const std::string a = emit_mip(g);
    const MipModel parsed = parse_lp(a);
    CHECK(parsed == build_mip(g));
    CHECK(write_lp(parsed) == a);
    CHECK(emit_mip(g) == a);
  }
}

TEST_CASE("LP parser rejects malformed input with a line number") {
  const std::string good = emit_mip(make_game({1, 1}, {-1, -1}, {-1, -1}, {1, 1}));
  std::string bad = good;
  bad.replace(bad.find("Subject To"), 10, "Subject Ta");
  try {
    parse_lp(bad);
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
  CHECK_THROWS(parse_lp("Maximize\n obj: + 1 Vd\nSubject To\n r: + 1 Vd <=\nEnd\n"));
}

TEST_CASE("one-shot SSE examples") {
  const GameSpec sym = make_game({1, 1}, {-1, -1}, {-1, -1}, {1, 1});
  const OneShotSse o = oneshot_sse(sym);
  CHECK(o.x[0] == doctest::Approx(0.5));
  CHECK(o.x[1] == doctest::Approx(0.5));
  CHECK(o.value == doctest::Approx(0.0).epsilon(1e-12));

  // Target 0 pays the attacker more uncovered than any target pays covered.
  const GameSpec dom = make_game({2, 1, 1}, {-1, -1, -1}, {0.5, -3, -3}, {6, 0, 0});
  const OneShotSse d = oneshot_sse(dom);
  CHECK(d.attacked == 0);
  CHECK(d.x[0] == doctest::Approx(1.0));
  CHECK(d.value == doctest::Approx(2.0));
}

TEST_CASE("one-shot SSE matches the coverage grid at K = 2") {
  // The value jumps where the attacker switches targets, so a grid at step h
  // can trail the optimum by h max|U_d^c - U_d^u|; 1e-5 keeps that below 1e-4.
  Rng rng(55);
  for (int t = 0; t < 20; ++t) {
    const GameSpec g = random_game(2, rng);
    const OneShotSse o = oneshot_sse(g);
    CHECK(std::abs(o.value - oracle::k2_oneshot_grid(g, 1e-5)) <= 1e-3);
    double sum = 0.0;
    for (double x : o.x) {
      CHECK(x >= 0.0);
      sum += x;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("upper bound") {
  CHECK(sse_upper_bound(make_game({3, 7, 5}, {0, 0, 0}, {0, 0, 0}, {1, 1, 1})) == 7.0);
  CHECK(sse_upper_bound(make_game({2, 2, 2}, {0, 0, 0}, {0, 0, 0}, {1, 1, 1})) == 2.0);
}

TEST_CASE("search: seeds are included and zero budget returns the best seed") {
  Rng rng(6);
  const GameSpec g = random_game(3, rng);
  const MemoryOneStrategy s = random_strategy(3, rng);
  const SearchResult r0 = search_sse(g, 0, 1, {{s, std::nullopt}});
  CHECK(r0.value == defender_utility_under_br(g, s).first.u_d);
  CHECK(r0.best_seed == 0);
  CHECK(r0.strategy.rows == s.rows);

  const SearchResult r = search_sse(g, 60, 1, {{s, std::nullopt}});
  CHECK(r.value >= r0.value);
  CHECK(r.value <= sse_upper_bound(g) + 1e-9);
  // Deterministic given the seed.
  const SearchResult again = search_sse(g, 60, 1, {{s, std::nullopt}});
  CHECK(again.value == r.value);
  CHECK(again.strategy.rows == r.strategy.rows);
}

TEST_CASE("search: sandwich with ZD and one-shot seeds") {
  Rng rng(71);
  for (int t = 0; t < 10; ++t) {
    const int K = 2 + t % 2;
    const GameSpec g = random_game(K, rng);
    std::vector<SseSeed> seeds;
    const OneShotSse o = oneshot_sse(g);
    const double oneshot_value = defender_utility_under_br(g, lift(o)).first.u_d;
    seeds.push_back({lift(o), std::nullopt});
    const PipelineResult p = run_pipeline(g);
    double zd_value = -1e300;
    if (p.has_strategy) {
      zd_value = zd_utility_under_br(g, p.zd).first.u_d;
      seeds.push_back({p.zd.strategy, zd_tie_tolerance(g, p.zd)});
    }
    const SearchResult r = search_sse(g, 30, t, seeds);
    CHECK(oneshot_value <= r.value + 1e-9);
    CHECK(zd_value <= r.value + 1e-9);
    CHECK(r.value <= sse_upper_bound(g) + 1e-9);
  }
}

TEST_CASE("search reaches the upper bound on ideal instances") {
  Rng rng(8);
  const GameSpec g = corollary_game(3, CorollaryKind::equalizer, rng);
  const PipelineResult p = run_pipeline(g);
  REQUIRE(p.has_strategy);
  const SearchResult r = search_sse(g, 10, 3, {{p.zd.strategy, zd_tie_tolerance(g, p.zd)}});
  CHECK(r.value == doctest::Approx(sse_upper_bound(g)).epsilon(1e-6));
}

TEST_CASE("exhaustive SSE over deterministic strategies") {
  Rng rng(4);
  const GameSpec g = random_game(2, rng);
  const SearchResult e = exhaustive_sse(g);
  CHECK(e.evaluations == 16);
  // Every deterministic strategy scores no better than the reported one.
  for (long long c = 0; c < 16; ++c) {
    std::vector<int> pol(4);
    long long x = c;
    for (int s = 3; s >= 0; --s, x /= 2) pol[s] = static_cast<int>(x % 2);
    CHECK(defender_utility_under_br(g, MemoryOneStrategy::deterministic(2, pol)).first.u_d <= e.value + 1e-12);
  }
  CHECK(e.value <= sse_upper_bound(g) + 1e-9);
}
