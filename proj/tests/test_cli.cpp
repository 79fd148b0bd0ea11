#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mitld/cli.hpp"
#include "support.hpp"

using namespace mitld;
namespace fs = std::filesystem;

namespace {

const char* kCase1 = "D{geom:0.8} b1 & F (b1 & F[0,3] b3) | D{geom:0.3} b2 & F (b2 & F[0,3] b4)";
const char* kCase2 = "D{geom:0.4} b1 & F (b1 & F[0,3] b3) | D{geom:0.7} b2 & F (b2 & F[0,3] b4)";

std::string scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mitld_test_cli";
  fs::create_directories(dir);
  return (dir / name).string();
}

ModelOptions model(const char* formula, int T) {
  ModelOptions o;
  o.formula = formula;
  o.uniform_T = T;
  return o;
}

std::string field(const std::string& out, const std::string& key) {
  std::istringstream in(out);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind(key + " ", 0) == 0) return line.substr(key.size() + 1);
  }
  return "";
}

}  // namespace

TEST_CASE("formula compilation") {
  const auto c = compile_formula(kCase1);
  CHECK(c.events.names() == std::vector<std::string>{"b1", "b2"});
  CHECK(EventSet::from_formula(c.phi_d).empty());
  try {
    compile_formula("F (");
    FAIL("expected an error");
  } catch (const CliError& e) {
    CHECK(e.code() == exit_code::kInput);
  }
  CHECK_THROWS_AS(compile_formula("!D{geom:0.5} e"), CliError);
}

TEST_CASE("translate") {
  TranslateArgs a;
  a.formula = kCase1;
  a.dot_path = scratch("case1.dot");
  a.oracle_path = testing::data_path("fig1.dta");
  a.oracle_words = 2000;
  std::ostringstream out, err;
  CHECK(cmd_translate(a, out, err) == 0);
  CHECK(field(out.str(), "oracle agreement").rfind("2000/2000", 0) == 0);
  CHECK(out.str().find("sta clocks x_b1 x_b2") != std::string::npos);
  CHECK(fs::file_size(*a.dot_path) > 0);

  TranslateArgs bad;
  bad.formula = "a U";
  std::ostringstream o2, e2;
  CHECK(cmd_translate(bad, o2, e2) == exit_code::kInput);
  CHECK(o2.str().empty());
  CHECK(e2.str().rfind("error: ", 0) == 0);
}

TEST_CASE("oracle words keep events unique") {
  const auto words = oracle_words({"b1", "b2"}, {"b3"}, 500, 20, 4);
  CHECK(words.size() == 500);
  for (const auto& w : words) {
    CHECK(w.size() >= 1);
    CHECK(w.size() <= 20);
    int b1 = 0;
    for (const auto& e : w.entries) b1 += static_cast<int>(e.symbol.count("b1"));
    CHECK(b1 <= 1);
  }
}

TEST_CASE("plan reports the achieved error bound") {
  std::ostringstream out, err;
  PlanArgs p;
  p.model = model(kCase1, 4);
  CHECK(cmd_plan(p, out, err) == 0);
  CHECK(field(out.str(), "epsilon_achieved") == "0.2401");
  const double v = std::stod(field(out.str(), "value"));
  CHECK(v >= 0.0);
  CHECK(v <= 1.0);

  std::ostringstream out2, err2;
  p.model = model(kCase2, 5);
  CHECK(cmd_plan(p, out2, err2) == 0);
  CHECK(field(out2.str(), "epsilon_achieved") == "0.07776");
}

TEST_CASE("plan exit codes") {
  std::ostringstream out, err;
  PlanArgs p;
  p.model = model(kCase1, 3);
  p.solve.max_iterations = 2;
  CHECK(cmd_plan(p, out, err) == exit_code::kNonConvergence);

  p.solve = SolveOptions{};
  p.model.grid_path = scratch("missing.cfg");
  CHECK(cmd_plan(p, out, err) == exit_code::kGameLoad);

  p.model.grid_path.reset();
  p.model.game_path = testing::data_path("toy.game");
  CHECK(cmd_plan(p, out, err) == exit_code::kProductBuild);

  p.model = model(kCase1, 3);
  p.model.epsilon = 0.1;
  CHECK(cmd_plan(p, out, err) == exit_code::kInput);
}

TEST_CASE("policy files bind to the model") {
  const std::string path = scratch("case2.policy");
  PlanArgs p;
  p.model = model(kCase2, 3);
  p.policy_path = path;
  std::ostringstream out, err;
  REQUIRE(cmd_plan(p, out, err) == 0);

  auto pipe = build_pipeline(p.model);
  std::ifstream in(path);
  const PolicyFile file = read_policy(in);
  CHECK(hex64(file.hash) == field(out.str(), "hash"));
  const Policy pi = policy_for(*pipe, file);
  CHECK(pi.action.size() == pipe->product->state_count());

  auto other = build_pipeline(model(kCase2, 4));
  try {
    policy_for(*other, file);
    FAIL("expected a stale policy");
  } catch (const CliError& e) {
    CHECK(e.code() == exit_code::kStalePolicy);
  }

  std::istringstream broken("# mitld policy\nhash 12\nstates 2\n0 N 0.5\n");
  CHECK_THROWS_AS(read_policy(broken), CliError);
}

TEST_CASE("simulate") {
  const std::string path = scratch("sim.policy");
  PlanArgs p;
  p.model = model(kCase2, 3);
  p.policy_path = path;
  std::ostringstream po, pe;
  REQUIRE(cmd_plan(p, po, pe) == 0);

  SimulateArgs s;
  s.model = p.model;
  s.policy_path = path;
  s.n = 5;
  s.seed = 3;
  s.show = 5;
  s.log_path = scratch("sim.log");
  std::ostringstream a, b, err;
  CHECK(cmd_simulate(s, a, err) == 0);
  CHECK(cmd_simulate(s, b, err) == 0);
  CHECK(a.str() == b.str());
  CHECK(a.str().find("# trajectory 4\n") != std::string::npos);
  CHECK(field(a.str(), "success").find("/5 rate") != std::string::npos);

  s.model = model(kCase2, 4);
  std::ostringstream c;
  CHECK(cmd_simulate(s, c, err) == exit_code::kStalePolicy);
}

TEST_CASE("monitor") {
  const std::string word = scratch("example.word");
  std::ofstream(word) << "0\n1 b1\n2\n3 b3\n";
  MonitorArgs m;
  m.formula = kCase1;
  m.word_path = word;
  std::ostringstream out, err;
  CHECK(cmd_monitor(m, out, err) == 0);
  CHECK(field(out.str(), "verdict") == "accept");
  CHECK(field(out.str(), "likelihood") == "0.2744");

  std::ofstream(word) << "0\n1 zz\n";
  std::ostringstream o2;
  CHECK(cmd_monitor(m, o2, err) == exit_code::kInput);

  m.word_path = scratch("nope.word");
  CHECK(cmd_monitor(m, o2, err) == exit_code::kInput);
}

TEST_CASE("bench") {
  BenchArgs b;
  b.model.formula = kCase1;
  b.uniform_T = {3, 4, 5};
  const auto rows = run_bench(b);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].T == "3");
  CHECK(rows[1].states > rows[0].states);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].value >= rows[i - 1].value);

  const std::string csv = bench_csv(rows);
  CHECK(csv.rfind("T,epsilon_achieved,state_count,value,iterations,wall_ms\n3,0.343,", 0) == 0);
  CHECK(csv.find("\n4,0.2401,") != std::string::npos);
  CHECK(csv.find("\n5,0.16807,") != std::string::npos);

  b.uniform_T.clear();
  b.epsilons = {0.2};
  const auto eps = run_bench(b);
  CHECK(eps[0].epsilon < 0.2);
  CHECK(eps[0].T == "b1=1;b2=5");
}

TEST_CASE("content hash") {
  auto a = build_pipeline(model(kCase1, 3));
  auto b = build_pipeline(model(kCase1, 3));
  auto c = build_pipeline(model(kCase1, 4));
  CHECK(a->hash == b->hash);
  CHECK(a->hash != c->hash);
  CHECK(hex64(a->hash).size() == 16);
}

TEST_CASE("truncation point lists") {
  CHECK(parse_points("b1=3,b2=5") == std::map<std::string, int>{{"b1", 3}, {"b2", 5}});
  CHECK_THROWS_AS(parse_points("b1"), CliError);
  CHECK_THROWS_AS(parse_points("b1=x"), CliError);
  CHECK_THROWS_AS(parse_points("b1=-2"), CliError);
}
