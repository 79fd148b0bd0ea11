#include "mitld/solver.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "mitld/error.hpp"

namespace mitld {

namespace {

constexpr double kTieTolerance = 1e-12;

double best_q(const ProductMdp& m, const std::vector<double>& v, int z) {
  auto [b, e] = m.choices(z);
  double best = 0.0;
  for (auto c = b; c != e; ++c) best = std::max(best, q_value(m, v, z, *c));
  return best;
}

}  // namespace

double q_value(const ProductMdp& m, const std::vector<double>& value, int z, const ProductMdp::Choice& c) {
  double q = 0.0;
  for (std::size_t k = c.begin; k < c.end; ++k) {
    const int t = m.targets()[k];
    q += m.probs()[k] * (reward(m, z, t) + value[t]);
  }
  return q;
}

SolveResult value_iteration(const ProductMdp& m, const SolveOptions& options) {
  if (!(options.tolerance > 0.0)) throw Error("tolerance must be positive");
  if (options.max_iterations < 1) throw Error("iteration limit must be positive");
  const std::size_t n = m.state_count();
  SolveResult r;
  std::vector<double> cur(n, 0.0), next(n, 0.0);
  std::vector<double> deltas(std::max(1u, options.threads), 0.0);

  auto sweep = [&](std::size_t begin, std::size_t end, double& delta) {
    double d = 0.0;
    for (std::size_t z = begin; z < end; ++z) {
      const int zi = static_cast<int>(z);
      next[z] = m.absorbing(zi) ? 0.0 : best_q(m, cur, zi);
      d = std::max(d, std::abs(next[z] - cur[z]));
    }
    delta = d;
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (options.record_history) r.history.push_back(cur);
  for (int it = 1; it <= options.max_iterations; ++it) {
    if (workers == 1) {
      sweep(0, n, deltas[0]);
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back(sweep, n * w / workers, n * (w + 1) / workers, std::ref(deltas[w]));
      }
      for (auto& t : pool) t.join();
    }
    double delta = 0.0;
    for (unsigned w = 0; w < workers; ++w) delta = std::max(delta, deltas[w]);
    cur.swap(next);
    if (options.record_history) r.history.push_back(cur);
    r.iterations = it;
    r.residual = delta;
    if (delta < options.tolerance) {
      r.converged = true;
      break;
    }
  }
  r.value = std::move(cur);
  return r;
}

Policy extract_policy(const ProductMdp& m, const std::vector<double>& value) {
  Policy p;
  p.action.assign(m.state_count(), -1);
  for (std::size_t z = 0; z < m.state_count(); ++z) {
    const int zi = static_cast<int>(z);
    if (m.absorbing(zi)) continue;
    auto [b, e] = m.choices(zi);
    const double best = best_q(m, value, zi);
    for (auto c = b; c != e; ++c) {
      if (q_value(m, value, zi, *c) >= best - kTieTolerance) {
        p.action[z] = c->action;
        break;
      }
    }
  }
  return p;
}

std::vector<double> brute_force_reach(const ProductMdp& m, int horizon) {
  if (horizon < 1) throw Error("horizon must be at least 1");
  const std::size_t n = m.state_count();
  // W[z]: best probability of entering an accepting state within k steps.
  std::vector<double> w(n, 0.0), prev(n, 0.0);
  for (int k = 1; k <= horizon; ++k) {
    prev = w;
    for (std::size_t z = 0; z < n; ++z) {
      const int zi = static_cast<int>(z);
      if (m.absorbing(zi)) {
        w[z] = 0.0;
        continue;
      }
      double best = 0.0;
      auto [b, e] = m.choices(zi);
      for (auto c = b; c != e; ++c) {
        double total = 0.0;
        for (std::size_t i = c->begin; i < c->end; ++i) {
          const int t = m.targets()[i];
          total += m.probs()[i] * (m.accepting(t) ? 1.0 : prev[t]);
        }
        if (total > best) best = total;
      }
      w[z] = best;
    }
  }
  return w;
}

std::vector<double> evaluate_policy(const ProductMdp& m, const Policy& policy, double tolerance, int max_iterations) {
  const std::size_t n = m.state_count();
  std::vector<double> v(n, 0.0), next(n, 0.0);
  for (int it = 0; it < max_iterations; ++it) {
    double delta = 0.0;
    for (std::size_t z = 0; z < n; ++z) {
      const int zi = static_cast<int>(z);
      if (m.absorbing(zi)) {
        next[z] = 0.0;
        continue;
      }
      const int a = policy.action.at(z);
      auto [b, e] = m.choices(zi);
      auto c = std::find_if(b, e, [a](const ProductMdp::Choice& ch) { return ch.action == a; });
      if (c == e) throw Error("policy picks an unavailable action at state " + std::to_string(z));
      next[z] = q_value(m, v, zi, *c);
      delta = std::max(delta, std::abs(next[z] - v[z]));
    }
    v.swap(next);
    if (delta < tolerance) break;
  }
  return v;
}

double satisfaction_probability(const ProductMdp& m, const std::vector<double>& value) {
  return m.accepting(m.initial()) ? 1.0 : value[m.initial()];
}

}  // namespace mitld
