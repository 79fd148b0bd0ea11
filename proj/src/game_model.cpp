#include "mitld/game_model.hpp"

#include <algorithm>
#include <cmath>

#include "mitld/error.hpp"

namespace mitld {

namespace {

constexpr double kRowTolerance = 1e-12;

std::string brace(const std::set<std::string>& names) {
  std::string out = "{";
  for (const auto& n : names) {
    if (out.size() > 1) out += ", ";
    out += n;
  }
  return out + "}";
}

}  // namespace

Game::Game(Spec spec)
    : events_(std::move(spec.events)),
      actions_(std::move(spec.actions)),
      states_(std::move(spec.states)),
      initial_(spec.initial),
      rows_(std::move(spec.rows)) {
  if (!std::is_sorted(events_.begin(), events_.end()) ||
      std::adjacent_find(events_.begin(), events_.end()) != events_.end()) {
    throw ModelError("event names must be sorted and distinct");
  }
  if (events_.size() > 16) throw ModelError("at most 16 external events are supported");
  if (actions_.empty()) throw ModelError("game has no actions");
  if (states_.empty()) throw ModelError("game has no states");
  const int n = static_cast<int>(states_.size());
  if (initial_ < 0 || initial_ >= n) throw ModelError("initial state out of range");
  if (rows_.size() != states_.size()) throw ModelError("transition table size mismatch");
  const std::uint32_t all = events_.empty() ? 0u : (1u << events_.size()) - 1u;

  for (int s = 0; s < n; ++s) {
    const auto& st = states_[s];
    if ((st.pending & ~all) || (st.env & ~all)) throw ModelError("state '" + st.robot + "' names unknown events");
    if (event_mask(st.labels) != st.env) {
      throw ModelError("labeling of state " + render(s) + " disagrees with its event outcome");
    }
  }

  for (int s = 0; s < n; ++s) {
    if (rows_[s].size() != actions_.size()) throw ModelError("transition table size mismatch");
    bool any = false;
    const std::uint32_t pending = states_[s].pending;
    for (std::size_t a = 0; a < actions_.size(); ++a) {
      const auto& rows = rows_[s][a];
      if (rows.empty()) continue;
      any = true;
      std::set<std::uint32_t> seen;
      for (const auto& row : rows) {
        const std::string where = "row (" + render(s) + ", " + actions_[a] + ", " +
                                  brace(event_names(row.outcome)) + ")";
        if (row.outcome & ~pending) {
          throw ModelError(where + ": outcome includes an event that already occurred");
        }
        if (!seen.insert(row.outcome).second) throw ModelError(where + ": duplicate row");
        double sum = 0.0;
        for (const auto& [t, p] : row.successors) {
          if (t < 0 || t >= n) throw ModelError(where + ": successor out of range");
          if (!(p >= 0.0 && p <= 1.0)) throw ModelError(where + ": probability outside [0,1]");
          sum += p;
          const auto& target = states_[t];
          if (target.env != row.outcome) {
            throw ModelError(where + ": successor " + render(t) + " is labeled with a different event outcome");
          }
          if (target.pending != (pending & ~row.outcome)) {
            throw ModelError(where + ": successor " + render(t) + " has inconsistent pending events");
          }
        }
        if (std::abs(sum - 1.0) > kRowTolerance) {
          throw ModelError(where + ": probabilities sum to " + format_double(sum) + ", not 1");
        }
      }
      for (std::uint32_t e : enabled_env_actions(*this, s)) {
        if (!seen.count(e)) {
          throw ModelError("row (" + render(s) + ", " + actions_[a] + ", " + brace(event_names(e)) +
                           ") is missing");
        }
      }
    }
    if (!any) throw ModelError("state " + render(s) + " has no available action");
  }
}

const std::vector<std::pair<int, double>>* Game::kernel(int s, int a, std::uint32_t e) const {
  for (const auto& row : rows_[s][a]) {
    if (row.outcome == e) return &row.successors;
  }
  return nullptr;
}

std::uint32_t Game::event_mask(const std::set<std::string>& props) const {
  std::uint32_t m = 0;
  for (std::size_t i = 0; i < events_.size(); ++i) {
    if (props.count(events_[i])) m |= 1u << i;
  }
  return m;
}

std::set<std::string> Game::event_names(std::uint32_t mask) const {
  std::set<std::string> out;
  for (std::size_t i = 0; i < events_.size(); ++i) {
    if (mask & (1u << i)) out.insert(events_[i]);
  }
  return out;
}

std::string Game::render(int s) const {
  const auto& st = states_[s];
  return "(" + st.robot + ", " + brace(event_names(st.env)) + ", " + brace(event_names(st.pending)) + ")";
}

std::vector<std::uint32_t> enabled_env_actions(const Game& g, int s) {
  const std::uint32_t pending = g.state(s).pending;
  std::vector<std::uint32_t> out;
  std::uint32_t e = pending;
  while (true) {
    out.push_back(e);
    if (e == 0) break;
    e = (e - 1) & pending;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace mitld
