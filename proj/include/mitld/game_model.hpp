#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mitld/distribution.hpp"

namespace mitld {

/// Factored game state: robot part, environment part (the last event
/// outcome) and the pending events.
struct GameState {
  std::string robot;
  std::uint32_t env = 0;
  std::uint32_t pending = 0;
  std::set<std::string> labels;  ///< L(s), including the events in `env`
};

/// Two-player probabilistic transition system with the environment turn
/// fused into P(s, a, e).
class Game {
 public:
  struct Row {
    std::uint32_t outcome = 0;
    std::vector<std::pair<int, double>> successors;
  };

  struct Spec {
    std::vector<std::string> events;   ///< U, sorted
    std::vector<std::string> actions;  ///< tie-break order
    std::vector<GameState> states;
    int initial = 0;
    /// rows[s][a]: empty when a is not available at s.
    std::vector<std::vector<std::vector<Row>>> rows;
  };

  /// Validates every transition; throws ModelError naming the offending row.
  explicit Game(Spec spec);

  const std::vector<std::string>& events() const { return events_; }
  const std::vector<std::string>& actions() const { return actions_; }
  std::size_t state_count() const { return states_.size(); }
  const GameState& state(int s) const { return states_[s]; }
  int initial() const { return initial_; }
  bool available(int s, int a) const { return !rows_[s][a].empty(); }
  /// Successor distribution for outcome e, or nullptr if (s, a, e) has no row.
  const std::vector<std::pair<int, double>>* kernel(int s, int a, std::uint32_t e) const;
  const std::vector<Row>& rows(int s, int a) const { return rows_[s][a]; }

  std::uint32_t event_mask(const std::set<std::string>& props) const;
  std::set<std::string> event_names(std::uint32_t mask) const;
  /// `((x, y), {b2}, {b1})` style text.
  std::string render(int s) const;

 private:
  std::vector<std::string> events_;
  std::vector<std::string> actions_;
  std::vector<GameState> states_;
  int initial_ = 0;
  std::vector<std::vector<std::vector<Row>>> rows_;
};

/// Power set of the pending events, ascending by mask.
std::vector<std::uint32_t> enabled_env_actions(const Game& g, int s);

struct Cell {
  int x = 0;
  int y = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Grid world with slipping motion; N is +y and E is +x.
struct GridWorldConfig {
  int width = 4;
  int height = 4;
  Cell start{0, 0};
  std::map<std::string, Cell> stations;
  std::map<std::string, DistributionSpec> events;
  double slip_forward = 0.8;
  double slip_left = 0.1;
  double slip_right = 0.1;

  /// Stations b3 at (1,2) and b4 at (3,0), no events.
  static GridWorldConfig defaults();
  /// Throws Error on out-of-grid cells or a bad slip triple.
  void validate() const;
  /// Reads `key = value` lines on top of defaults(); throws ParseError.
  static GridWorldConfig parse(std::string_view text);
  static GridWorldConfig load(const std::string& path);
  /// Text accepted by parse().
  std::string to_string() const;
};

/// Cells x {last outcome} x {pending}, actions N, W, E, S.
Game build_gridworld(const GridWorldConfig& cfg);

/// Explicit game text format; throws ParseError or ModelError.
Game parse_game(std::string_view text);
Game load_game(const std::string& path);

}  // namespace mitld
