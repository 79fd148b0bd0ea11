#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "mitld/error.hpp"
#include "mitld/timed_automata.hpp"
#include "support.hpp"

using namespace mitld;

namespace {

const char* kPhiD = "F (b1 & F[0,3] b3) | F (b2 & F[0,3] b4)";

TimedWord unit(const testing::Word& w) { return TimedWord::unit(w); }

}  // namespace

TEST_CASE("clock vectors") {
  ClockVector v(3);
  v = v.advance(2);
  CHECK(v.values() == std::vector<int>{2, 2, 2});
  v = v.reset({0}, {2});
  CHECK(v.values() == std::vector<int>{0, 2, 0});
  CHECK(v.stopped(2));
  v = v.advance(3);
  CHECK(v.values() == std::vector<int>{3, 5, 0});
  CHECK(v.saturate({4, 4, 4}).values() == std::vector<int>{3, 4, 0});
}

TEST_CASE("guards") {
  ClockVector v({3, 1}, {false, false});
  CHECK(eval_constraint(ClockConstraint::compare(0, CompareOp::Le, 3), v));
  CHECK_FALSE(eval_constraint(ClockConstraint::compare(0, CompareOp::Lt, 3), v));
  CHECK(eval_constraint(ClockConstraint::diff_compare(0, 1, CompareOp::Eq, 2), v));
  CHECK(eval_constraint(ClockConstraint::disjunction(ClockConstraint::falsity(),
                                                     ClockConstraint::compare(1, CompareOp::Ne, 0)),
                        v));
  CHECK_THROWS_AS(eval_constraint(ClockConstraint::compare(5, CompareOp::Ge, 0), v), ModelError);

  std::vector<int> k(2, 0);
  ClockConstraint::conjunction(ClockConstraint::compare(0, CompareOp::Le, 3),
                               ClockConstraint::compare(1, CompareOp::Gt, 7))
      .max_constants(k);
  CHECK(k == std::vector<int>{3, 7});
}

TEST_CASE("hand-written automaton loads") {
  const Dta d = load_dta(testing::data_path("fig1.dta"));
  std::size_t non_sink = 0;
  for (std::size_t l = 0; l < d.location_count(); ++l) non_sink += !d.is_reject(static_cast<int>(l));
  CHECK(non_sink == 5);
  CHECK(d.reject().has_value());
  CHECK(d.accepting(d.location_index("l3")));
  CHECK(d.clocks().size() == 4);

  // 0: {}, 1: {b1}, 2: {}, 3: {b3}
  const auto run = run_dta(d, unit({{}, {"b1"}, {}, {"b3"}}));
  CHECK(run.accepted);
  CHECK(run.trace.size() == 5);
  CHECK(d.location_name(run.trace[2].first) == "l1");

  // b3 arrives one step after the window closes.
  CHECK_FALSE(run_dta(d, unit({{}, {"b1"}, {}, {}, {}, {}, {"b3"}})).accepted);
}

TEST_CASE("automaton text round trip") {
  const Dta d = load_dta(testing::data_path("fig1.dta"));
  std::ostringstream text;
  write_dta(d, text);
  const Dta back = parse_dta(text.str());
  CHECK(back.location_count() == d.location_count());
  CHECK(back.edges().size() == d.edges().size());

  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    const auto w = unit(testing::random_word(rng, {"b1", "b2", "b3", "b4"}, 12, 0.2));
    CHECK(run_dta(d, w).accepted == run_dta(back, w).accepted);
  }

  std::ostringstream dot;
  write_dta_dot(d, dot);
  CHECK(dot.str().find("digraph") != std::string::npos);
}

TEST_CASE("malformed automata are rejected") {
  CHECK_THROWS_AS(parse_dta("locations A\ninit B\n"), Error);
  CHECK_THROWS_AS(parse_dta("locations A B\nclocks x\ninit A\nedge A [y <= 1] {a} -> B\n"), Error);
  CHECK_THROWS_AS(parse_dta("locations A B\ninit A\nedge A [true] {a} -> B\nedge A [true] {a & c} -> A\n"),
                  ModelError);
  // Same symbol, overlapping guards.
  CHECK_THROWS_AS(
      parse_dta("locations A B\nclocks x\ninit A\nedge A [x <= 2] {a} -> B\nedge A [x >= 2] {a} -> A\n"),
      ModelError);
  // Disjoint guards are fine.
  CHECK_NOTHROW(
      parse_dta("locations A B\nclocks x\ninit A\nedge A [x <= 2] {a} -> B\nedge A [x > 2] {a} -> A\n"));
}

TEST_CASE("word files") {
  const TimedWord w = parse_word("0\n1 b1\n2\n3 b3, b4\n");
  REQUIRE(w.size() == 4);
  CHECK(w.entries[3].symbol == std::set<std::string>{"b3", "b4"});
  CHECK_THROWS_AS(parse_word("1 a\n"), Error);
  CHECK_THROWS_AS(parse_word("0 a\n0 b\n"), Error);
}

TEST_CASE("progression steps") {
  const Formula f = parse_formula("F[0,3] b3");
  CHECK(progress(f, {}) == parse_formula("F[0,2] b3"));
  CHECK(progress(f, {"b3"}) == Formula::truth());
  CHECK(progress(parse_formula("F[0,1] b3"), {}).interval() == Interval::closed(0, 0));
  CHECK(progress(progress(parse_formula("F[0,1] b3"), {}), {}) == Formula::falsity());
  CHECK(progress(parse_formula("a U[2,4] b"), {"a"}) == parse_formula("a U[1,3] b"));
  CHECK(progress(parse_formula("a U[2,4] b"), {"b"}) == Formula::falsity());
  CHECK(progress(parse_formula("a U b"), {"c"}) == Formula::falsity());
}

TEST_CASE("canonical form") {
  const Formula f = parse_formula("b & a & (a | false) & true");
  CHECK(canonicalize(f) == parse_formula("a & b"));
  Rng rng(5);
  testing::FormulaGen gen(rng, {"a", "b", "c"});
  for (int i = 0; i < 300; ++i) {
    const Formula g = gen.make(3);
    CHECK(canonicalize(canonicalize(g)) == canonicalize(g));
  }
  CHECK(canonicalize(parse_formula("a | b")) == canonicalize(parse_formula("b | a")));
}

TEST_CASE("progression automaton for the two-station goal") {
  const Dta d = build_dta(parse_formula(kPhiD));
  CHECK(d.progression_built());
  CHECK(d.location_name(d.initial()) == "Init");
  CHECK(d.accepting(d.location_index("accept")));
  // Unbounded eventualities never fail, so there is nothing to reject.
  CHECK_FALSE(d.reject().has_value());
  const Dta bounded = build_dta(parse_formula("F[0,2] a"));
  CHECK(bounded.is_reject(bounded.location_index("reject")));
  CHECK(run_dta(bounded, unit({{}, {}, {}})).rejected);
  CHECK(d.alphabet() == std::vector<std::string>{"b1", "b2", "b3", "b4"});
  CHECK(run_dta(d, unit({{}, {"b1"}, {}, {"b3"}})).accepted);
  CHECK_FALSE(run_dta(d, unit({{}, {"b1"}, {}, {}, {}, {}})).accepted);
}

TEST_CASE("progression agrees with the hand-written automaton") {
  const Dta p = build_dta(parse_formula(kPhiD));
  const Dta h = load_dta(testing::data_path("fig1.dta"));
  Rng rng(17);
  for (int i = 0; i < 2000; ++i) {
    const auto w = unit(testing::event_word(rng, {"b1", "b2"}, {"b3", "b4"}, 20));
    CHECK(run_dta(p, w).accepted == run_dta(h, w).accepted);
  }
}

TEST_CASE("progression is sound on random formulas") {
  Rng rng(23);
  const std::vector<std::string> props{"a", "b", "c"};
  testing::FormulaGen gen(rng, props);
  for (int i = 0; i < 200; ++i) {
    const Formula f = gen.make(3);
    const Dta d = build_dta(f);
    for (int j = 0; j < 20; ++j) {
      const auto w = testing::random_word(rng, props, 12);
      INFO(to_string(f));
      CHECK(run_dta(d, unit(w)).accepted == testing::holds(f, w));
    }
  }
}

TEST_CASE("location cap") {
  BuildOptions small;
  small.max_locations = 3;
  CHECK_THROWS_AS(build_dta(parse_formula(kPhiD), small), ModelError);
}

TEST_CASE("explicit clocks saturate at their ceiling") {
  const Dta d = load_dta(testing::data_path("fig1.dta"));
  // x1 and x2 appear in no guard.
  CHECK(d.clock_ceilings() == std::vector<int>{1, 1, 4, 4});
}

TEST_CASE("nested unbounded untils close") {
  const Formula f = parse_formula("(!b U c) U F a");
  BuildOptions o;
  o.max_locations = 64;
  const Dta d = build_dta(f, o);
  CHECK(d.location_count() < 64);
  Rng rng(11);
  const std::vector<std::string> props{"a", "b", "c"};
  for (int j = 0; j < 200; ++j) {
    const auto w = testing::random_word(rng, props, 12);
    CHECK(run_dta(d, unit(w)).accepted == testing::holds(f, w));
  }
}
