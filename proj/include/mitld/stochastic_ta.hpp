#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mitld/formula.hpp"
#include "mitld/random.hpp"
#include "mitld/timed_automata.hpp"

namespace mitld {

/// (location, clocks, pending) of the stochastic timed automaton.
///
/// Event clocks are indexed like the EventSet. A sink state keeps only its
/// pending set; its location is -1.
struct StaState {
  int location = 0;
  ClockVector dta_clocks;
  ClockVector event_clocks;
  std::uint32_t pending = 0;
  bool sink = false;

  /// Flat integer key: equal keys mean equal states.
  std::vector<int> key() const;
  friend bool operator==(const StaState&, const StaState&) = default;
};

/// Hash for StaState::key().
struct KeyHash {
  std::size_t operator()(const std::vector<int>& k) const;
};

class StaModel {
 public:
  /// Throws ModelError when an event is missing from the automaton alphabet.
  StaModel(Dta dta, EventSet events);

  const Dta& dta() const { return dta_; }
  const EventSet& events() const { return events_; }

  /// (Init, 0, U) after the zero-time move on `first_label`.
  /// Throws Error if the label already contains an external event.
  StaState initial_state(const std::set<std::string>& first_label) const;

  bool accepting(const StaState& q) const { return !q.sink && dta_.accepting(q.location); }
  bool rejecting(const StaState& q) const { return !q.sink && dta_.is_reject(q.location); }

 private:
  Dta dta_;
  EventSet events_;
};

/// Outcome distribution over subsets of q.pending, ascending by mask.
std::vector<std::pair<std::uint32_t, double>> env_outcome_dist(const StaModel& m, const StaState& q);

/// Probability that exactly the events in `outcome` occur on the next step.
double outcome_probability(const StaModel& m, const StaState& q, std::uint32_t outcome);

/// Unit step on `symbol`. Returns the successor and the probability of the
/// event outcome symbol ∩ U. Throws Error if an event in `symbol` already occurred.
std::pair<StaState, double> sta_step(const StaModel& m, const StaState& q,
                                     const std::set<std::string>& symbol);

class TruncatedSta {
 public:
  /// Every event needs an entry in `tv`; throws Error otherwise.
  TruncatedSta(StaModel model, TruncationVector tv);

  const StaModel& model() const { return model_; }
  const TruncationVector& truncation() const { return tv_; }
  int event_point(std::size_t event) const { return event_points_[event]; }

  StaState sink_state(std::uint32_t pending) const;

  /// Like sta_step, but lands on the sink when a pending event clock passes
  /// its truncation point. Explicit-automaton clocks saturate above their
  /// largest guard constant.
  std::pair<StaState, double> step(const StaState& q, const std::set<std::string>& symbol) const;
  /// Successor for a symbol given as an event mask plus the automaton mask.
  StaState successor(const StaState& q, std::uint32_t outcome, SymbolMask dta_symbol) const;

 private:
  StaModel model_;
  TruncationVector tv_;
  std::vector<int> event_points_;
};

/// Verdict of a finite word against the model.
struct MonitorResult {
  enum class Verdict { Accept, Reject, Inconclusive };
  Verdict verdict = Verdict::Inconclusive;
  double likelihood = 1.0;
  std::vector<StaState> trace;
};

std::string to_string(MonitorResult::Verdict v);

/// Runs a unit-step word and multiplies the event-outcome probabilities.
/// An event that occurs twice, or at time 0, gives likelihood 0.
MonitorResult monitor(const StaModel& m, const TimedWord& w);

/// Agent propositions for one step of a sampled word.
using PropositionGenerator = std::function<std::set<std::string>(Rng&, int step)>;

/// Every non-event proposition false.
PropositionGenerator all_false_generator();
/// Each non-event proposition true with probability q, independently.
PropositionGenerator bernoulli_generator(const StaModel& m, double q);

struct LemmaEstimate {
  ProportionEstimate estimate;
  std::uint64_t accepted = 0;  ///< words accepted by the untruncated model
};

/// Monte Carlo estimate of P(accepted by m and sink reached in mt first).
/// Sample i uses the stream derive_seed(seed, i), so results do not depend
/// on `workers`.
LemmaEstimate lemma_error_estimate(const StaModel& m, const TruncatedSta& mt, std::uint64_t n,
                                   std::uint64_t seed, const PropositionGenerator& gen,
                                   int horizon = 50, unsigned workers = 1);

}  // namespace mitld
