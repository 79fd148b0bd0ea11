#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mitld/error.hpp"
#include "mitld/game_model.hpp"
#include "support.hpp"

using namespace mitld;

namespace {

GridWorldConfig two_event_grid() {
  GridWorldConfig cfg = GridWorldConfig::defaults();
  cfg.events.insert_or_assign("b1", DistributionSpec::geometric(0.8));
  cfg.events.insert_or_assign("b2", DistributionSpec::geometric(0.3));
  return cfg;
}

int find_state(const Game& g, const std::string& robot, std::uint32_t env, std::uint32_t pending) {
  for (std::size_t s = 0; s < g.state_count(); ++s) {
    const auto& st = g.state(static_cast<int>(s));
    if (st.robot == robot && st.env == env && st.pending == pending) return static_cast<int>(s);
  }
  return -1;
}

double prob_to(const Game& g, int s, int a, std::uint32_t e, const std::string& robot) {
  double p = 0.0;
  for (const auto& [t, pt] : *g.kernel(s, a, e)) {
    if (g.state(t).robot == robot) p += pt;
  }
  return p;
}

const char* kTwoCells =
    "events e\n"
    "actions go\n"
    "states a b a_e b_e d\n"
    "labels a_e {e}\n"
    "labels b_e {e}\n"
    "pending a_e {}\n"
    "pending b_e {}\n"
    "pending d {}\n"
    "trans a_e go {} -> d : 1\n"
    "trans b_e go {} -> d : 1\n"
    "trans d go {} -> d : 1\n";

}  // namespace

TEST_CASE("default grid config") {
  const auto cfg = GridWorldConfig::defaults();
  CHECK(cfg.width == 4);
  CHECK(cfg.height == 4);
  CHECK(cfg.stations.at("b3") == Cell{1, 2});
  CHECK(cfg.stations.at("b4") == Cell{3, 0});
  CHECK(cfg.slip_forward == 0.8);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("grid config text") {
  const auto cfg = GridWorldConfig::parse("width = 3\nheight = 2\nstart = (2,1)\nstations.goal = (0,0)\n"
                                          "events.e = geom:0.25\nslip = 0.6,0.2,0.2\n");
  CHECK(cfg.width == 3);
  CHECK(cfg.start == Cell{2, 1});
  CHECK(cfg.stations.size() == 1);
  CHECK(cfg.events.at("e") == DistributionSpec::geometric(0.25));
  CHECK(cfg.slip_left == 0.2);
  const auto back = GridWorldConfig::parse(cfg.to_string());
  CHECK(back.to_string() == cfg.to_string());

  CHECK_THROWS_AS(GridWorldConfig::parse("width = x\n"), ParseError);
  CHECK_THROWS_AS(GridWorldConfig::parse("start = (9,9)\n"), Error);
  CHECK_THROWS_AS(GridWorldConfig::parse("slip = 0.5,0.1,0.1\n"), Error);
}

TEST_CASE("grid world structure") {
  const Game g = build_gridworld(two_event_grid());
  CHECK(g.actions() == std::vector<std::string>{"N", "W", "E", "S"});
  CHECK(g.events() == std::vector<std::string>{"b1", "b2"});
  // 16 cells times disjoint (env, pending) pairs over two events: 3^2.
  CHECK(g.state_count() == 16 * 9);
  const auto& s0 = g.state(g.initial());
  CHECK(s0.robot == "(0, 0)");
  CHECK(s0.pending == 3u);
  CHECK(g.render(g.initial()) == "((0, 0), {}, {b1, b2})");
}

TEST_CASE("slipping moves") {
  const Game g = build_gridworld(two_event_grid());
  const int s = find_state(g, "(0, 0)", 0, 3);
  REQUIRE(s >= 0);
  // N: forward (0,1); left is W, off the grid; right is E.
  CHECK(prob_to(g, s, 0, 0, "(0, 1)") == doctest::Approx(0.8));
  CHECK(prob_to(g, s, 0, 0, "(0, 0)") == doctest::Approx(0.1));
  CHECK(prob_to(g, s, 0, 0, "(1, 0)") == doctest::Approx(0.1));
  // E from (0,0): right is S, off the grid.
  CHECK(prob_to(g, s, 2, 0, "(1, 0)") == doctest::Approx(0.8));
  CHECK(prob_to(g, s, 2, 0, "(0, 1)") == doctest::Approx(0.1));
  CHECK(prob_to(g, s, 2, 0, "(0, 0)") == doctest::Approx(0.1));
}

TEST_CASE("event outcomes move into the environment part") {
  const Game g = build_gridworld(two_event_grid());
  const int s = find_state(g, "(1, 1)", 0, 3);
  for (const auto& [t, p] : *g.kernel(s, 0, 1u)) {
    CHECK(g.state(t).env == 1u);
    CHECK(g.state(t).pending == 2u);
    CHECK(g.state(t).labels.count("b1") == 1);
    (void)p;
  }
  const int station = find_state(g, "(1, 2)", 0, 0);
  CHECK(g.state(station).labels == std::set<std::string>{"b3"});
}

TEST_CASE("every row is a distribution") {
  const Game g = build_gridworld(two_event_grid());
  for (std::size_t s = 0; s < g.state_count(); ++s) {
    const int si = static_cast<int>(s);
    const auto env = enabled_env_actions(g, si);
    for (std::size_t a = 0; a < g.actions().size(); ++a) {
      REQUIRE(g.available(si, static_cast<int>(a)));
      for (std::uint32_t e : env) {
        const auto* row = g.kernel(si, static_cast<int>(a), e);
        REQUIRE(row != nullptr);
        double sum = 0.0;
        for (const auto& [t, p] : *row) sum += p;
        CHECK(std::abs(sum - 1.0) < 1e-12);
      }
    }
  }
}

TEST_CASE("environment actions are the power set of pending events") {
  const Game g = build_gridworld(two_event_grid());
  CHECK(enabled_env_actions(g, g.initial()) == std::vector<std::uint32_t>{0, 1, 2, 3});
  const int s = find_state(g, "(0, 0)", 1, 2);
  CHECK(enabled_env_actions(g, s) == std::vector<std::uint32_t>{0, 2});
}

TEST_CASE("explicit game file") {
  const Game g = load_game(testing::data_path("toy.game"));
  CHECK(g.actions() == std::vector<std::string>{"go", "wait"});
  CHECK(g.state(g.initial()).robot == "far");
  CHECK(g.kernel(g.initial(), 0, 1u)->size() == 2);
}

TEST_CASE("explicit game validation names the row") {
  const std::string good = std::string(kTwoCells) +
                           "trans a go {} -> b : 1\ntrans a go {e} -> b_e : 1\n"
                           "trans b go {} -> b : 1\ntrans b go {e} -> b_e : 1\n";
  CHECK_NOTHROW(parse_game(good));

  const std::string bad_sum = std::string(kTwoCells) +
                              "trans a go {} -> b : 0.5\ntrans a go {e} -> b_e : 1\n"
                              "trans b go {} -> b : 1\ntrans b go {e} -> b_e : 1\n";
  try {
    parse_game(bad_sum);
    FAIL("expected a model error");
  } catch (const ModelError& e) {
    CHECK(std::string(e.what()).find("row ((a, {}, {e}), go, {})") != std::string::npos);
  }

  const std::string missing = std::string(kTwoCells) +
                              "trans a go {} -> b : 1\n"
                              "trans b go {} -> b : 1\ntrans b go {e} -> b_e : 1\n";
  CHECK_THROWS_AS(parse_game(missing), ModelError);

  const std::string wrong_env = std::string(kTwoCells) +
                                "trans a go {} -> b : 1\ntrans a go {e} -> b : 1\n"
                                "trans b go {} -> b : 1\ntrans b go {e} -> b_e : 1\n";
  CHECK_THROWS_AS(parse_game(wrong_env), ModelError);

  CHECK_THROWS_AS(parse_game("events e\nactions go\nstates a\nfrobnicate\n"), ParseError);
  CHECK_THROWS_AS(parse_game(std::string(kTwoCells) + "trans a go {} -> nowhere : 1\n"), ParseError);
}
