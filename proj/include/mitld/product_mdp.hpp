#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mitld/game_model.hpp"
#include "mitld/stochastic_ta.hpp"

namespace mitld {

enum class ProductKind { Normal, Accepting, Sink, Reject };

struct ProductState {
  int game = 0;
  StaState spec;
  ProductKind kind = ProductKind::Normal;
};

/// Reachable product of a game with a truncated STA, stored as CSR.
///
/// Every state has one choice per available game action. Absorbing states
/// (accepting, sink, reject) carry a unit self-loop under every action.
class ProductMdp {
 public:
  struct Choice {
    int action;        ///< index into actions()
    std::size_t begin;  ///< into targets()/probs()
    std::size_t end;
  };

  std::size_t state_count() const { return states_.size(); }
  const ProductState& state(int z) const { return states_[z]; }
  int initial() const { return 0; }
  bool absorbing(int z) const { return states_[z].kind != ProductKind::Normal; }
  bool accepting(int z) const { return states_[z].kind == ProductKind::Accepting; }
  const std::vector<std::string>& actions() const { return actions_; }

  /// Choices of z, in action order.
  std::pair<const Choice*, const Choice*> choices(int z) const {
    return {choices_.data() + choice_begin_[z], choices_.data() + choice_begin_[z + 1]};
  }
  const std::vector<int>& targets() const { return targets_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t edge_count() const { return targets_.size(); }

  const Game& game() const { return *game_; }
  const TruncatedSta& sta() const { return *sta_; }

  /// `(((x, y), {e}, {Y}), (loc, (clocks), {Y}))` text.
  std::string render(int z) const;
  /// The `(loc, (clocks), {Y})` half of render().
  std::string render_spec(int z) const;

 private:
  friend ProductMdp build_product(const Game& g, const TruncatedSta& mt);
  const Game* game_ = nullptr;
  const TruncatedSta* sta_ = nullptr;
  std::vector<std::string> actions_;
  std::vector<ProductState> states_;
  std::vector<std::size_t> choice_begin_;
  std::vector<Choice> choices_;
  std::vector<int> targets_;
  std::vector<double> probs_;
};

/// Breadth-first construction from z0; `g` and `mt` must outlive the result.
/// Throws ModelError when the event sets differ or L(s0) holds an event.
ProductMdp build_product(const Game& g, const TruncatedSta& mt);

/// 1 exactly when z is not accepting and z' is.
int reward(const ProductMdp& m, int z, int z_next);

/// Action index per state; -1 marks absorbing states (printed as "stay").
struct Policy {
  std::vector<int> action;
};

struct ProductStats {
  std::size_t states = 0;
  std::size_t edges = 0;
  std::size_t accepting = 0;
  std::size_t sinks = 0;
  std::size_t rejects = 0;
  int horizon = 0;
  double sink_mass = 0.0;  ///< probability of sink states after `horizon` steps
};

/// Counts plus sink mass under `policy`, or a uniformly random choice when absent.
ProductStats stats(const ProductMdp& m, int horizon, const Policy* policy = nullptr);

/// Text dump: one `state` line per state and one `trans` line per edge.
void write_product(const ProductMdp& m, std::ostream& out);
void write_product_dot(const ProductMdp& m, std::ostream& out);

}  // namespace mitld
