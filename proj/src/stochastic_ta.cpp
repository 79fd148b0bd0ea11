#include "mitld/stochastic_ta.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <thread>

#include "mitld/error.hpp"

namespace mitld {

namespace {

void append_clocks(std::vector<int>& out, const ClockVector& v) {
  out.push_back(static_cast<int>(v.size()));
  int bits = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(v[i]);
    if (v.stopped(i)) bits |= 1 << (i % 30);
    if (i % 30 == 29) {
      out.push_back(bits);
      bits = 0;
    }
  }
  out.push_back(bits);
}

// Moves q one unit step with the given event outcome; no probability, no truncation.
StaState advance(const StaModel& m, const StaState& q, std::uint32_t outcome, SymbolMask dta_symbol) {
  StaState next;
  std::vector<int> stop;
  for (std::size_t i = 0; i < m.events().size(); ++i) {
    if (outcome & (1u << i)) stop.push_back(static_cast<int>(i));
  }
  next.event_clocks = q.event_clocks.advance(1).reset({}, stop);
  next.pending = q.pending & ~outcome;
  auto move = m.dta().step_total(q.location, q.dta_clocks, dta_symbol, 1);
  next.location = move.location;
  next.dta_clocks = std::move(move.clocks);
  return next;
}

std::uint32_t checked_outcome(const StaModel& m, const StaState& q, const std::set<std::string>& symbol) {
  const std::uint32_t e = m.events().mask_of(symbol);
  if (e & ~q.pending) {
    throw Error("event '" + *m.events().names_of(e & ~q.pending).begin() +
                "' already occurred; external events occur at most once");
  }
  return e;
}

int sample_occurrence(const DistributionSpec& d, Rng& rng) {
  const double u = rng.uniform();
  if (d.kind() == DistributionSpec::Kind::Geometric) {
    const double p = d.parameter();
    if (p >= 1.0) return 1;
    const double k = 1.0 + std::floor(std::log1p(-u) / std::log1p(-p));
    return k >= static_cast<double>(INT_MAX) ? INT_MAX : static_cast<int>(k);
  }
  double acc = 0.0;
  for (const auto& [k, mass] : d.entries()) {
    acc += mass;
    if (u < acc) return k;
  }
  return INT_MAX;
}

}  // namespace

std::vector<int> StaState::key() const {
  std::vector<int> k{sink ? 1 : 0, location, static_cast<int>(pending)};
  append_clocks(k, dta_clocks);
  append_clocks(k, event_clocks);
  return k;
}

std::size_t KeyHash::operator()(const std::vector<int>& k) const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (int v : k) {
    h ^= static_cast<std::uint32_t>(v);
    h *= 0x100000001b3ULL;
  }
  return static_cast<std::size_t>(h);
}

StaModel::StaModel(Dta dta, EventSet events) : dta_(std::move(dta)), events_(std::move(events)) {
  for (const auto& name : events_.names()) {
    if (!std::binary_search(dta_.alphabet().begin(), dta_.alphabet().end(), name)) {
      throw ModelError("external event '" + name + "' does not appear in the automaton alphabet");
    }
  }
}

StaState StaModel::initial_state(const std::set<std::string>& first_label) const {
  if (events_.mask_of(first_label) != 0) {
    throw Error("initial label contains an external event; events cannot occur at time 0");
  }
  StaState q;
  q.event_clocks = ClockVector(events_.size());
  q.pending = events_.all();
  auto move = dta_.step_total(dta_.initial(), ClockVector(dta_.clocks().size()),
                              dta_.symbol_mask(first_label), 0);
  q.location = move.location;
  q.dta_clocks = std::move(move.clocks);
  return q;
}

double outcome_probability(const StaModel& m, const StaState& q, std::uint32_t outcome) {
  if (outcome & ~q.pending) return 0.0;
  double p = 1.0;
  for (std::size_t i = 0; i < m.events().size(); ++i) {
    if (!(q.pending & (1u << i))) continue;
    const double h = m.events().distribution(i).hazard(q.event_clocks[i] + 1);
    p *= (outcome & (1u << i)) ? h : 1.0 - h;
  }
  return p;
}

std::vector<std::pair<std::uint32_t, double>> env_outcome_dist(const StaModel& m, const StaState& q) {
  if (q.sink) throw Error("outcome distribution requested at the sink");
  std::vector<std::pair<std::uint32_t, double>> out;
  // Ascending enumeration of the submasks of pending.
  std::vector<std::uint32_t> subsets;
  std::uint32_t s = q.pending;
  while (true) {
    subsets.push_back(s);
    if (s == 0) break;
    s = (s - 1) & q.pending;
  }
  std::reverse(subsets.begin(), subsets.end());
  for (auto e : subsets) out.emplace_back(e, outcome_probability(m, q, e));
  return out;
}

std::pair<StaState, double> sta_step(const StaModel& m, const StaState& q, const std::set<std::string>& symbol) {
  if (q.sink) return {q, 1.0};
  const std::uint32_t e = checked_outcome(m, q, symbol);
  const double p = outcome_probability(m, q, e);
  return {advance(m, q, e, m.dta().symbol_mask(symbol)), p};
}

TruncatedSta::TruncatedSta(StaModel model, TruncationVector tv) : model_(std::move(model)), tv_(std::move(tv)) {
  for (const auto& name : model_.events().names()) {
    auto point = tv_.point(TruncationVector::event_clock(name));
    if (!point) throw Error("truncation vector has no entry for event '" + name + "'");
    event_points_.push_back(*point);
  }
}

StaState TruncatedSta::sink_state(std::uint32_t pending) const {
  StaState s;
  s.location = -1;
  s.pending = pending;
  s.sink = true;
  return s;
}

StaState TruncatedSta::successor(const StaState& q, std::uint32_t outcome, SymbolMask dta_symbol) const {
  if (q.sink) return q;
  // The advanced clock decides, whether or not the event fires on this step.
  for (std::size_t i = 0; i < event_points_.size(); ++i) {
    if ((q.pending & (1u << i)) && q.event_clocks[i] + 1 > event_points_[i]) {
      return sink_state(q.pending & ~outcome);
    }
  }
  StaState next = advance(model_, q, outcome, dta_symbol);
  next.dta_clocks = next.dta_clocks.saturate(model_.dta().clock_ceilings());
  return next;
}

std::pair<StaState, double> TruncatedSta::step(const StaState& q, const std::set<std::string>& symbol) const {
  if (q.sink) return {q, 1.0};
  const std::uint32_t e = checked_outcome(model_, q, symbol);
  const double p = outcome_probability(model_, q, e);
  return {successor(q, e, model_.dta().symbol_mask(symbol)), p};
}

std::string to_string(MonitorResult::Verdict v) {
  switch (v) {
    case MonitorResult::Verdict::Accept: return "accept";
    case MonitorResult::Verdict::Reject: return "reject";
    case MonitorResult::Verdict::Inconclusive: return "inconclusive-prefix";
  }
  return "?";
}

MonitorResult monitor(const StaModel& m, const TimedWord& w) {
  w.check();
  const auto& alphabet = m.dta().alphabet();
  for (std::size_t i = 0; i < w.entries.size(); ++i) {
    if (w.entries[i].time != static_cast<int>(i)) {
      throw Error("monitoring needs unit-step timestamps; entry " + std::to_string(i) + " has time " +
                  std::to_string(w.entries[i].time));
    }
    for (const auto& p : w.entries[i].symbol) {
      if (!std::binary_search(alphabet.begin(), alphabet.end(), p)) {
        throw Error("word references unknown proposition '" + p + "'");
      }
    }
  }
  MonitorResult r;
  auto settle = [&](const StaState& q) {
    if (r.verdict != MonitorResult::Verdict::Inconclusive) return;
    if (m.accepting(q)) r.verdict = MonitorResult::Verdict::Accept;
    else if (m.rejecting(q)) r.verdict = MonitorResult::Verdict::Reject;
  };
  if (w.entries.empty()) {
    if (m.dta().accepting(m.dta().initial())) r.verdict = MonitorResult::Verdict::Accept;
    return r;
  }

  const auto& first = w.entries[0].symbol;
  const std::uint32_t early = m.events().mask_of(first);
  StaState q;
  if (early == 0) {
    q = m.initial_state(first);
  } else {
    // mu(0) = 0: the word is possible for the automaton but has no weight.
    r.likelihood = 0.0;
    std::set<std::string> without;
    for (const auto& p : first) {
      if (!m.events().contains(p)) without.insert(p);
    }
    q = m.initial_state(without);
    auto move = m.dta().step_total(m.dta().initial(), ClockVector(m.dta().clocks().size()),
                                   m.dta().symbol_mask(first), 0);
    q.location = move.location;
    q.dta_clocks = move.clocks;
    std::vector<int> stop;
    for (std::size_t i = 0; i < m.events().size(); ++i) {
      if (early & (1u << i)) stop.push_back(static_cast<int>(i));
    }
    q.event_clocks = q.event_clocks.reset({}, stop);
    q.pending &= ~early;
  }
  r.trace.push_back(q);
  settle(q);
  for (std::size_t i = 1; i < w.entries.size(); ++i) {
    const auto& sym = w.entries[i].symbol;
    const std::uint32_t e = m.events().mask_of(sym);
    const std::uint32_t fresh = e & q.pending;
    if (e & ~q.pending) {
      r.likelihood = 0.0;
    } else if (r.likelihood != 0.0) {
      r.likelihood *= outcome_probability(m, q, fresh);
    }
    q = advance(m, q, fresh, m.dta().symbol_mask(sym));
    r.trace.push_back(q);
    settle(q);
  }
  return r;
}

PropositionGenerator all_false_generator() {
  return [](Rng&, int) { return std::set<std::string>{}; };
}

PropositionGenerator bernoulli_generator(const StaModel& m, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw Error("generator probability must lie in [0,1]");
  std::vector<std::string> props;
  for (const auto& a : m.dta().alphabet()) {
    if (!m.events().contains(a)) props.push_back(a);
  }
  return [props, q](Rng& rng, int) {
    std::set<std::string> out;
    for (const auto& p : props) {
      if (rng.bernoulli(q)) out.insert(p);
    }
    return out;
  };
}

LemmaEstimate lemma_error_estimate(const StaModel& m, const TruncatedSta& mt, std::uint64_t n,
                                   std::uint64_t seed, const PropositionGenerator& gen, int horizon,
                                   unsigned workers) {
  if (n == 0) throw Error("sample count must be positive");
  if (horizon < 0) throw Error("horizon must be non-negative");
  const std::size_t events = m.events().size();

  auto run_range = [&](std::uint64_t begin, std::uint64_t end, std::uint64_t& hits, std::uint64_t& acc) {
    std::vector<int> when(events);
    for (std::uint64_t i = begin; i < end; ++i) {
      Rng rng(derive_seed(seed, i));
      for (std::size_t e = 0; e < events; ++e) when[e] = sample_occurrence(m.events().distribution(e), rng);
      auto symbol_at = [&](int t) {
        auto s = gen(rng, t);
        for (std::size_t e = 0; e < events; ++e) {
          if (when[e] == t) s.insert(m.events().name(e));
        }
        return s;
      };
      const auto first = symbol_at(0);
      StaState q = m.initial_state(first);
      StaState qt = q;
      bool accepted = m.accepting(q);
      bool truncated_done = m.accepting(qt);
      bool hit = false;
      for (int t = 1; t <= horizon && !(accepted && truncated_done); ++t) {
        const auto sym = symbol_at(t);
        const std::uint32_t e = m.events().mask_of(sym);
        const SymbolMask ds = m.dta().symbol_mask(sym);
        if (!accepted) {
          q = advance(m, q, e & q.pending, ds);
          accepted = m.accepting(q);
        }
        if (!truncated_done) {
          qt = mt.successor(qt, e & qt.pending, ds);
          if (qt.sink) {
            hit = true;
            truncated_done = true;
          } else if (m.accepting(qt)) {
            truncated_done = true;
          }
        }
      }
      acc += accepted;
      hits += accepted && hit;
    }
  };

  workers = std::max(1u, workers);
  std::vector<std::uint64_t> hits(workers, 0), acc(workers, 0);
  if (workers == 1) {
    run_range(0, n, hits[0], acc[0]);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t b = n * w / workers, e = n * (w + 1) / workers;
      pool.emplace_back([&, w, b, e] { run_range(b, e, hits[w], acc[w]); });
    }
    for (auto& t : pool) t.join();
  }
  LemmaEstimate out;
  std::uint64_t total_hits = 0;
  for (unsigned w = 0; w < workers; ++w) {
    total_hits += hits[w];
    out.accepted += acc[w];
  }
  out.estimate = proportion_ci(total_hits, n);
  return out;
}

}  // namespace mitld
