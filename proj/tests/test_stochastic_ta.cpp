#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <unordered_map>

#include "mitld/error.hpp"
#include "mitld/stochastic_ta.hpp"
#include "support.hpp"

using namespace mitld;

namespace {

const char* kCase1 = "D{geom:0.8} b1 & F (b1 & F[0,3] b3) | D{geom:0.3} b2 & F (b2 & F[0,3] b4)";

StaModel model_of(const std::string& text) {
  const Formula f = parse_formula(text);
  return StaModel(build_dta(substitute_dist(f)), EventSet::from_formula(f));
}

// Probability that the event first shows up at step k, chaining sta_step.
double chained(const StaModel& m, int k) {
  StaState q = m.initial_state({});
  double p = 1.0;
  for (int t = 1; t <= k; ++t) {
    auto [next, pr] = sta_step(m, q, t == k ? std::set<std::string>{"e"} : std::set<std::string>{});
    p *= pr;
    q = next;
  }
  return p;
}

}  // namespace

TEST_CASE("initial state") {
  const StaModel m = model_of(kCase1);
  const StaState q = m.initial_state({});
  CHECK(q.pending == 3u);
  CHECK(q.event_clocks.values() == std::vector<int>{0, 0});
  CHECK(m.dta().location_name(q.location) == "Init");
  CHECK_THROWS_AS(m.initial_state({"b1"}), Error);
  CHECK_THROWS_AS(model_of("D{geom:0.5} e & F a").initial_state({"e"}), Error);
}

TEST_CASE("events must be in the automaton alphabet") {
  const Dta d = build_dta(parse_formula("F a"));
  CHECK_THROWS_AS(StaModel(d, EventSet({{"e", DistributionSpec::geometric(0.5)}})), ModelError);
}

TEST_CASE("outcome distribution") {
  const StaModel m = model_of(kCase1);
  const StaState q = m.initial_state({});
  const auto dist = env_outcome_dist(m, q);
  REQUIRE(dist.size() == 4);
  const double expect[] = {0.2 * 0.7, 0.8 * 0.7, 0.2 * 0.3, 0.8 * 0.3};
  double sum = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    CHECK(dist[i].first == i);
    CHECK(dist[i].second == doctest::Approx(expect[i]).epsilon(1e-15));
    CHECK(outcome_probability(m, q, dist[i].first) == dist[i].second);
    sum += dist[i].second;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("hazard chaining gives the first-occurrence mass") {
  for (double p : {0.3, 0.4, 0.7, 0.8}) {
    const StaModel m = model_of("D{geom:" + format_double(p) + "} e");
    for (int k = 1; k <= 30; ++k) CHECK(std::abs(chained(m, k) - testing::geometric_mass(p, k)) < 1e-12);
  }
  const StaModel t = model_of("D{table:1:0.1,2:0.2,5:0.3,9:0.4} e");
  const std::map<int, double> mu{{1, 0.1}, {2, 0.2}, {5, 0.3}, {9, 0.4}};
  for (int k = 1; k <= 9; ++k) {
    const double want = mu.count(k) ? mu.at(k) : 0.0;
    CHECK(std::abs(chained(t, k) - want) < 1e-12);
  }
}

TEST_CASE("an event happens at most once") {
  const StaModel m = model_of(kCase1);
  auto [q1, p1] = sta_step(m, m.initial_state({}), {"b1"});
  CHECK(p1 == doctest::Approx(0.8 * 0.7));
  CHECK(q1.pending == 2u);
  CHECK(q1.event_clocks[0] == 0);
  CHECK(q1.event_clocks.stopped(0));
  CHECK_THROWS_AS(sta_step(m, q1, {"b1"}), Error);
}

TEST_CASE("monitor on the example word") {
  const StaModel m = model_of(kCase1);
  const auto r = monitor(m, parse_word("0\n1 b1\n2\n3 b3\n"));
  CHECK(r.verdict == MonitorResult::Verdict::Accept);
  // mu_b1(1) (1 - h_b2(1)) (1 - h_b2(2)) (1 - h_b2(3))
  CHECK(r.likelihood == doctest::Approx(0.8 * 0.7 * 0.7 * 0.7).epsilon(1e-14));
  CHECK(to_string(r.verdict) == "accept");
}

TEST_CASE("monitor verdicts") {
  const StaModel deadline = model_of("D{geom:0.5} e & F[0,3] a");
  const auto missed = monitor(deadline, parse_word("0\n1 e\n2\n3\n4 a\n"));
  CHECK(missed.verdict == MonitorResult::Verdict::Reject);
  CHECK(monitor(deadline, parse_word("0\n1 e\n2\n3 a\n")).verdict == MonitorResult::Verdict::Accept);

  // Both automata keep waiting for b2 after a missed b3 window.
  const TimedWord late = parse_word("0\n1 b1\n2\n3\n4\n5\n6 b3\n");
  const StaModel prog = model_of(kCase1);
  CHECK(monitor(prog, late).verdict == MonitorResult::Verdict::Inconclusive);
  const StaModel hand(load_dta(testing::data_path("fig1.dta")), prog.events());
  CHECK(monitor(hand, late).verdict == MonitorResult::Verdict::Inconclusive);

  const auto empty = monitor(prog, TimedWord{});
  CHECK(empty.verdict == MonitorResult::Verdict::Inconclusive);
  CHECK(empty.likelihood == 1.0);
  CHECK(to_string(MonitorResult::Verdict::Inconclusive) == "inconclusive-prefix");

  CHECK(monitor(prog, parse_word("0 b1\n")).likelihood == 0.0);
  CHECK(monitor(prog, parse_word("0\n1 b1\n2 b1\n")).likelihood == 0.0);
  CHECK_THROWS_AS(monitor(prog, parse_word("0 zz\n")), Error);
  CHECK_THROWS_AS(monitor(prog, parse_word("0\n2 b1\n")), Error);
}

TEST_CASE("truncated successor goes to the sink past T") {
  const Formula f = parse_formula("D{geom:0.5} e & F[0,1] a | D{geom:0.5} e & F e");
  const StaModel m(build_dta(substitute_dist(f)), EventSet::from_formula(f));
  const TruncatedSta mt(m, truncation_vector_uniform(f, m.events(), 2));
  CHECK(mt.event_point(0) == 2);
  StaState q = m.initial_state({});
  q = mt.step(q, {}).first;
  CHECK_FALSE(q.sink);
  q = mt.step(q, {}).first;
  CHECK_FALSE(q.sink);
  const auto [s, p] = mt.step(q, {"e"});
  CHECK(s.sink);
  CHECK(s.pending == 0u);
  CHECK(p == doctest::Approx(0.5));
  CHECK(mt.sink_state(1u).pending == 1u);
  CHECK(mt.sink_state(1u).sink);
}

TEST_CASE("sink mass of a single geometric event") {
  for (double p : {0.3, 0.4, 0.7, 0.8}) {
    for (int T : {0, 1, 2, 3, 5, 8}) {
      const Formula f = parse_formula("D{geom:" + format_double(p) + "} e");
      const StaModel m(build_dta(substitute_dist(f)), EventSet::from_formula(f));
      const TruncatedSta mt(m, truncation_vector_uniform(f, m.events(), T));
      std::unordered_map<std::vector<int>, std::pair<StaState, double>, KeyHash> mass;
      const StaState q0 = m.initial_state({});
      mass[q0.key()] = {q0, 1.0};
      double sink = 0.0;
      for (int step = 0; step <= T + 1; ++step) {
        decltype(mass) next;
        for (const auto& [_, entry] : mass) {
          const auto& [q, w] = entry;
          for (const auto& [e, pe] : env_outcome_dist(m, q)) {
            const StaState q2 = mt.successor(q, e, m.dta().symbol_mask(m.events().names_of(e)));
            if (q2.sink) {
              sink += w * pe;
            } else if (!m.accepting(q2)) {
              auto& slot = next.try_emplace(q2.key(), q2, 0.0).first->second;
              slot.second += w * pe;
            }
          }
        }
        mass.swap(next);
      }
      CHECK(std::abs(sink - std::pow(1.0 - p, T)) < 1e-12);
    }
  }
}

TEST_CASE("lemma estimate is deterministic across workers") {
  const Formula f = parse_formula(kCase1);
  const StaModel m(build_dta(substitute_dist(f)), EventSet::from_formula(f));
  const TruncatedSta mt(m, truncation_vector_uniform(f, m.events(), 3));
  const auto gen = bernoulli_generator(m, 0.3);
  const auto a = lemma_error_estimate(m, mt, 2000, 9, gen, 50, 1);
  const auto b = lemma_error_estimate(m, mt, 2000, 9, gen, 50, 3);
  CHECK(a.estimate.successes == b.estimate.successes);
  CHECK(a.accepted == b.accepted);
  CHECK(a.estimate.rate <= mt.truncation().epsilon_achieved);
  CHECK(a.accepted > 0);
}

TEST_CASE("proposition generators") {
  const StaModel m = model_of(kCase1);
  Rng rng(1);
  CHECK(all_false_generator()(rng, 0).empty());
  const auto gen = bernoulli_generator(m, 1.0);
  CHECK(gen(rng, 3) == std::set<std::string>{"b3", "b4"});
}

TEST_CASE("proportion intervals") {
  const auto big = proportion_ci(500, 1000);
  CHECK_FALSE(big.exact);
  CHECK(big.lo == doctest::Approx(0.5 - 1.959963984540054 * std::sqrt(0.25 / 1000)));
  const auto small = proportion_ci(0, 50);
  CHECK(small.exact);
  CHECK(small.lo == 0.0);
  // Clopper-Pearson upper bound for 0 of n: 1 - (alpha/2)^(1/n).
  CHECK(small.hi == doctest::Approx(1.0 - std::pow(0.025, 1.0 / 50)).epsilon(1e-9));
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 5) == derive_seed(1, 5));
  Rng a(42), b(42);
  for (int i = 0; i < 10; ++i) CHECK(a.uniform() == b.uniform());
}
