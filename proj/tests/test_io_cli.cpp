#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "zdmtd/instances.hpp"
#include "zdmtd/io.hpp"
#include "zdmtd/sse_baseline.hpp"

using namespace zdmtd;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("zdmtd_test_" + hex64(fnv1a(std::to_string(reinterpret_cast<uintptr_t>(this)) +
                                                                   std::to_string(std::rand()))));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
  const std::string cmd = std::string(ZDMTD_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("game JSON round-trips and is strict") {
  Rng rng(1);
  const GameSpec g = random_game(3, rng);
  CHECK(game_from_json(game_to_json(g)) == g);
  Json j = game_to_json(g);
  j["extra"] = 1;
  CHECK_THROWS_AS(game_from_json(j), FormatError);
  Json m = game_to_json(g);
  m.erase("u_a_unc");
  CHECK_THROWS_AS(game_from_json(m), FormatError);
  Json bad = game_to_json(g);
  bad["u_d_cov"] = Json::array({0, 0, 0});
  CHECK_THROWS_AS(game_from_json(bad), FormatError);
  CHECK_THROWS_AS(parse_json_text("{\"k\": 2,"), FormatError);
}

TEST_CASE("strategy JSON round-trips") {
  Rng rng(2);
  const MemoryOneStrategy s = random_strategy(3, rng);
  const MemoryOneStrategy back = strategy_from_json(parse_json_text(strategy_to_json(s).dump()));
  CHECK(back.rows == s.rows);
  Json j = strategy_to_json(s);
  j["pi"][0][0] = 2.0;
  CHECK_THROWS_AS(strategy_from_json(j), FormatError);
}

TEST_CASE("atomic writes and hashing") {
  TempDir d;
  const std::string p = d.file("nested/out.txt");
  write_file_atomic(p, "hello");
  CHECK(read_text_file(p) == "hello");
  write_file_atomic(p, "again");
  CHECK(read_text_file(p) == "again");
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(255) == "00000000000000ff");
}

TEST_CASE("cli: solve exit codes and artifacts") {
  TempDir d;
  // Equalizer instance: ideal parameters exist.
  write(d.file("ideal.json"), game_to_json(make_game({5, 3, 2}, {0, -2, -1}, {-2, 1, 0}, {3, -2, -4})).dump());
  CHECK(run("solve --game " + d.file("ideal.json") + " --mode auto --out " + d.file("a")) == 0);
  const Json r = read_json_file(d.file("a/result.json"));
  CHECK(r.at("kind") == "ideal");
  CHECK(r.contains("config_hash"));
  CHECK(fs::exists(d.file("a/strategy.json")));
  CHECK_NOTHROW(strategy_from_json(read_json_file(d.file("a/strategy.json"))));

  // Distinct uncovered attacker values at K = 4: no ideal parameters.
  write(d.file("k4.json"),
        game_to_json(make_game({3, 2, 1, 4}, {-1, -2, -3, 0}, {-1, 0, -2, 1}, {2, 3, 1, 4})).dump());
  CHECK(run("solve --game " + d.file("k4.json") + " --mode ideal --out " + d.file("b")) == 2);
  CHECK_FALSE(fs::exists(d.file("b/strategy.json")));

  write(d.file("bad.json"), "{\"k\": 2, \"u_d_cov\": [1,");
  CHECK(run("solve --game " + d.file("bad.json") + " --out " + d.file("c")) == 64);
  CHECK_FALSE(fs::exists(d.file("c")));
  CHECK(run("solve --game " + d.file("missing.json") + " --out " + d.file("c")) == 64);
  CHECK(run("solve --mode best --game " + d.file("ideal.json") + " --out " + d.file("c")) == 64);
  CHECK(run("frobnicate") == 64);

  // An impossible tolerance turns verification into a failure.
  CHECK(run("solve --game " + d.file("ideal.json") + " --tol-residual 0 --verify-samples 5 --out " + d.file("e")) == 3);
}

TEST_CASE("cli: solve is reproducible") {
  TempDir d;
  Rng rng(4);
  write(d.file("g.json"), game_to_json(random_game(3, rng)).dump());
  const int c1 = run("solve --game " + d.file("g.json") + " --seed 5 --out " + d.file("x"));
  const int c2 = run("solve --game " + d.file("g.json") + " --seed 5 --out " + d.file("y"));
  CHECK(c1 == c2);
  CHECK(read_text_file(d.file("x/result.json")) == read_text_file(d.file("y/result.json")));
}

TEST_CASE("cli: compare, emit-mip and simulate") {
  TempDir d;
  Rng rng(6);
  const GameSpec g = random_game(2, rng);
  write(d.file("g.json"), game_to_json(g).dump());
  REQUIRE(run("compare --game " + d.file("g.json") + " --budget 20 --seed 1 --out " + d.file("cmp.csv")) == 0);
  const std::string csv = read_text_file(d.file("cmp.csv"));
  CHECK(csv.rfind("# seed=1 config_hash=", 0) == 0);
  CHECK(csv.find("strategy,value,wall_time\n") != std::string::npos);
  CHECK(csv.find("\nsearch_sse,") != std::string::npos);
  CHECK(csv.find("\nupper_bound,") != std::string::npos);

  REQUIRE(run("emit-mip --game " + d.file("g.json") + " --out " + d.file("m.lp")) == 0);
  CHECK(read_text_file(d.file("m.lp")) == emit_mip(g));

  const std::string cfg = std::string(ZDMTD_SOURCE_DIR) + "/configs/crowd_honest_p10.json";
  REQUIRE(run("simulate --config " + cfg + " --steps 2000 --stride 100 --seed 3 --out " + d.file("t1.csv")) == 0);
  REQUIRE(run("simulate --config " + cfg + " --steps 2000 --stride 100 --seed 3 --out " + d.file("t2.csv")) == 0);
  CHECK(read_text_file(d.file("t1.csv")) == read_text_file(d.file("t2.csv")));
  CHECK(read_text_file(d.file("t1.csv")).find("step,avg_u_d,avg_u_a,regime") != std::string::npos);
  REQUIRE(run("simulate --config " + cfg + " --baseline oneshot --steps 2000 --stride 100 --seed 3 --out " +
              d.file("t3.csv")) == 0);
  CHECK(read_text_file(d.file("t3.csv")).find("step,zd_avg_u_d,baseline_avg_u_d,regime") != std::string::npos);
  CHECK(run("simulate --config " + cfg + " --baseline magic --steps 10 --out " + d.file("t4.csv")) == 64);
}
