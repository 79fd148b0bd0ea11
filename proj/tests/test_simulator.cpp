#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mitld/error.hpp"
#include "mitld/simulator.hpp"
#include "mitld/solver.hpp"
#include "toy.hpp"

using namespace mitld;

TEST_CASE("rollouts are reproducible and end absorbed") {
  testing::Toy toy(4);
  const ProductMdp& m = *toy.product;
  const auto r = value_iteration(m);
  const Policy pi = extract_policy(m, r.value);
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto a = rollout(m, pi, derive_seed(1, i), 1000);
    const auto b = rollout(m, pi, derive_seed(1, i), 1000);
    CHECK(a.states == b.states);
    CHECK(a.actions.size() + 1 == a.states.size());
    CHECK(a.states.front() == m.initial());
    if (a.end == Trajectory::End::StepLimit) {
      // A missed window leaves an obligation the automaton cannot rule out;
      // the run circles in states worth nothing.
      CHECK(a.actions.size() == 1000);
      CHECK(r.value[a.states.back()] == 0.0);
    } else {
      CHECK(m.absorbing(a.states.back()));
    }
  }
}

TEST_CASE("step limit") {
  testing::Toy toy(4);
  const ProductMdp& m = *toy.product;
  const Policy pi = extract_policy(m, value_iteration(m).value);
  const auto t = rollout(m, pi, 3, 0);
  CHECK(t.states.size() == 1);
  CHECK(t.end == Trajectory::End::StepLimit);
  CHECK(to_string(t.end) == "step-limit");
}

TEST_CASE("undefined policy") {
  testing::Toy toy(2);
  Policy none;
  none.action.assign(toy.product->state_count(), -1);
  CHECK_THROWS_AS(rollout(*toy.product, none, 1, 10), Error);
}

TEST_CASE("trajectory text") {
  testing::Toy toy(3);
  const ProductMdp& m = *toy.product;
  const Policy pi = extract_policy(m, value_iteration(m).value);
  const auto t = rollout(m, pi, 5, 1000);
  const std::string text = render_trajectory(m, t);
  CHECK(text.rfind(m.render(0) + "\n", 0) == 0);
  CHECK(text.find("  -go-> (((far, {}, {e}), go), (Init, (0), {e}))\n") != std::string::npos);
  CHECK(text.find("end " + to_string(t.end) + "\n") != std::string::npos);
  std::size_t lines = 0;
  for (char c : text) lines += c == '\n';
  CHECK(lines == 2 + 2 * t.actions.size());
}

TEST_CASE("success estimate") {
  testing::Toy toy(5);
  const ProductMdp& m = *toy.product;
  const auto r = value_iteration(m);
  const Policy pi = extract_policy(m, r.value);
  const std::uint64_t n = 20000;
  const auto one = estimate_success(m, pi, n, 77, 1000, 1);
  const auto four = estimate_success(m, pi, n, 77, 1000, 4);
  CHECK(one.successes == four.successes);
  const double v = r.value[0];
  CHECK(std::abs(one.rate - v) <= 4.0 * std::sqrt(v * (1.0 - v) / static_cast<double>(n)));
  CHECK(one.lo <= one.rate);
  CHECK(one.hi >= one.rate);
  CHECK_THROWS_AS(estimate_success(m, pi, 0, 1), Error);
}
