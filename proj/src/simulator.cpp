#include "mitld/simulator.hpp"

#include <algorithm>
#include <thread>

#include "mitld/error.hpp"

namespace mitld {

namespace {

Trajectory::End end_of(const ProductMdp& m, int z) {
  switch (m.state(z).kind) {
    case ProductKind::Accepting: return Trajectory::End::Accept;
    case ProductKind::Sink: return Trajectory::End::Sink;
    case ProductKind::Reject: return Trajectory::End::Reject;
    default: return Trajectory::End::StepLimit;
  }
}

std::string brace(const std::set<std::string>& names) {
  std::string out = "{";
  for (const auto& n : names) out += (out.size() > 1 ? ", " : "") + n;
  return out + "}";
}

}  // namespace

std::string to_string(Trajectory::End e) {
  switch (e) {
    case Trajectory::End::Accept: return "accept";
    case Trajectory::End::Sink: return "sink";
    case Trajectory::End::Reject: return "reject";
    case Trajectory::End::StepLimit: return "step-limit";
  }
  return "?";
}

Trajectory rollout(const ProductMdp& m, const Policy& policy, std::uint64_t seed, int max_steps) {
  Rng rng(seed);
  Trajectory t;
  int z = m.initial();
  t.states.push_back(z);
  for (int step = 0; step < max_steps && !m.absorbing(z); ++step) {
    const int a = policy.action.at(z);
    auto [b, e] = m.choices(z);
    auto c = std::find_if(b, e, [a](const ProductMdp::Choice& ch) { return ch.action == a; });
    if (a < 0 || c == e) throw Error("policy is undefined at product state " + std::to_string(z));
    const double u = rng.uniform();
    double acc = 0.0;
    int next = m.targets()[c->end - 1];
    for (std::size_t k = c->begin; k < c->end; ++k) {
      acc += m.probs()[k];
      if (u < acc) {
        next = m.targets()[k];
        break;
      }
    }
    t.actions.push_back(a);
    t.states.push_back(next);
    z = next;
  }
  t.end = end_of(m, z);
  return t;
}

ProportionEstimate estimate_success(const ProductMdp& m, const Policy& policy, std::uint64_t n,
                                    std::uint64_t seed, int max_steps, unsigned workers) {
  if (n == 0) throw Error("rollout count must be positive");
  workers = std::max(1u, workers);
  std::vector<std::uint64_t> wins(workers, 0);
  auto run = [&](std::uint64_t begin, std::uint64_t end, std::uint64_t& out) {
    for (std::uint64_t i = begin; i < end; ++i) {
      out += rollout(m, policy, derive_seed(seed, i), max_steps).end == Trajectory::End::Accept;
    }
  };
  if (workers == 1) {
    run(0, n, wins[0]);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back(run, n * w / workers, n * (w + 1) / workers, std::ref(wins[w]));
    }
    for (auto& th : pool) th.join();
  }
  std::uint64_t total = 0;
  for (auto w : wins) total += w;
  return proportion_ci(total, n);
}

std::string render_trajectory(const ProductMdp& m, const Trajectory& t) {
  std::string out = m.render(t.states.front()) + "\n";
  const Game& g = m.game();
  for (std::size_t i = 0; i < t.actions.size(); ++i) {
    const int z = t.states[i];
    const int next = t.states[i + 1];
    const std::string& a = m.actions()[t.actions[i]];
    out += "  -" + a + "-> ((" + g.render(m.state(z).game) + ", " + a + "), " + m.render_spec(z) + ")\n";
    out += "  -" + brace(g.event_names(g.state(m.state(next).game).env)) + "-> " + m.render(next) + "\n";
  }
  out += "end " + to_string(t.end) + "\n";
  return out;
}

}  // namespace mitld
