#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mitld/formula.hpp"

namespace mitld {

/// Bitmask over a DTA alphabet; bit i is alphabet()[i].
using SymbolMask = std::uint32_t;

/// Integer clock values with per-clock stopped flags.
class ClockVector {
 public:
  ClockVector() = default;
  explicit ClockVector(std::size_t n) : values_(n, 0), stopped_(n, false) {}
  ClockVector(std::vector<int> values, std::vector<bool> stopped);

  std::size_t size() const { return values_.size(); }
  int operator[](std::size_t i) const { return values_[i]; }
  bool stopped(std::size_t i) const { return stopped_[i]; }
  const std::vector<int>& values() const { return values_; }

  /// Every running clock moves forward by t.
  ClockVector advance(int t) const;
  /// Clocks in `zero` are set to 0; clocks in `stop` are also frozen.
  ClockVector reset(const std::vector<int>& zero, const std::vector<int>& stop = {}) const;
  /// Caps each clock at ceiling[i]; a no-op for clocks below their cap.
  ClockVector saturate(const std::vector<int>& ceiling) const;

  friend bool operator==(const ClockVector&, const ClockVector&) = default;

 private:
  std::vector<int> values_;
  std::vector<bool> stopped_;
};

enum class CompareOp { Eq, Ne, Lt, Gt, Ge, Le };

/// Guard grammar over clock indices.
class ClockConstraint {
 public:
  enum class Kind { True, False, Compare, DiffCompare, And, Or };

  static ClockConstraint truth();
  static ClockConstraint falsity();
  static ClockConstraint compare(int clock, CompareOp op, int k);
  static ClockConstraint diff_compare(int clock, int other, CompareOp op, int k);
  static ClockConstraint conjunction(ClockConstraint a, ClockConstraint b);
  static ClockConstraint disjunction(ClockConstraint a, ClockConstraint b);

  Kind kind() const;
  int clock() const;
  int other_clock() const;
  CompareOp op() const;
  int constant() const;
  const ClockConstraint& lhs() const;
  const ClockConstraint& rhs() const;

  /// Largest constant compared against each clock (0 when unconstrained).
  void max_constants(std::vector<int>& out) const;
  /// Every clock index mentioned.
  void clocks(std::set<int>& out) const;

 private:
  struct Node;
  explicit ClockConstraint(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Throws ModelError if the constraint names a clock outside `v`.
bool eval_constraint(const ClockConstraint& c, const ClockVector& v);

std::string to_string(const ClockConstraint& c, const std::vector<std::string>& clock_names);

/// Unit-step timed word: entry i carries timestamp i unless given explicitly.
struct TimedWord {
  struct Entry {
    int time = 0;
    std::set<std::string> symbol;
  };
  std::vector<Entry> entries;

  static TimedWord unit(std::vector<std::set<std::string>> symbols);
  /// Throws Error unless timestamps start at 0 and strictly increase.
  void check() const;
  std::size_t size() const { return entries.size(); }
};

struct DtaEdge {
  int source = 0;
  Formula symbol = Formula::truth();  ///< propositional predicate
  ClockConstraint guard = ClockConstraint::truth();
  int target = 0;
  std::vector<int> resets;
};

/// Deterministic timed automaton with symbol predicates on edges.
///
/// A missing edge means the implicit move to the reject sink. The sink is a
/// real location when one exists so traces can name it.
class Dta {
 public:
  struct Spec {
    std::vector<std::string> locations;
    std::vector<std::string> clocks;
    std::vector<std::string> alphabet;  ///< empty: collect from edge predicates
    int initial = 0;
    std::vector<int> accepting;
    std::optional<int> reject;
    std::vector<DtaEdge> edges;
    std::vector<std::pair<int, ClockConstraint>> invariants;
    std::vector<Formula> location_formulas;  ///< progression-built only
  };

  /// Validates names, determinism and clock references; throws ModelError.
  explicit Dta(Spec spec);

  std::size_t location_count() const { return locations_.size(); }
  const std::string& location_name(int l) const { return locations_[l]; }
  int location_index(std::string_view name) const;
  const std::vector<std::string>& clocks() const { return clocks_; }
  int clock_index(std::string_view name) const;
  const std::vector<std::string>& alphabet() const { return alphabet_; }
  int initial() const { return initial_; }
  bool accepting(int l) const { return accepting_[l]; }
  std::optional<int> reject() const { return reject_; }
  bool is_reject(int l) const { return reject_ && *reject_ == l; }
  const std::vector<DtaEdge>& edges() const { return edges_; }
  const ClockConstraint& invariant(int l) const { return invariants_[l]; }
  /// Formula a progression-built location stands for.
  const std::optional<Formula>& location_formula(int l) const { return location_formulas_[l]; }
  bool progression_built() const { return !location_formulas_.empty() && location_formulas_[0].has_value(); }
  /// Per-clock largest guard constant plus one; values above it are indistinguishable.
  const std::vector<int>& clock_ceilings() const { return ceilings_; }

  SymbolMask symbol_mask(const std::set<std::string>& symbol) const;
  std::set<std::string> symbol_names(SymbolMask m) const;

  struct Move {
    int location;
    ClockVector clocks;
  };
  /// Lets `delay` time pass and reads one symbol. nullopt means the reject sink.
  std::optional<Move> step(int location, const ClockVector& clocks, SymbolMask symbol, int delay) const;
  /// Like step(), but lands on the reject location instead of nullopt when one exists.
  Move step_total(int location, const ClockVector& clocks, SymbolMask symbol, int delay) const;

 private:
  std::vector<std::string> locations_;
  std::vector<std::string> clocks_;
  std::vector<std::string> alphabet_;
  int initial_ = 0;
  std::vector<bool> accepting_;
  std::optional<int> reject_;
  std::vector<DtaEdge> edges_;
  std::vector<std::vector<int>> out_edges_;
  std::vector<std::vector<bool>> edge_minterms_;
  std::vector<ClockConstraint> invariants_;
  std::vector<std::optional<Formula>> location_formulas_;
  std::vector<int> ceilings_;
};

/// Evaluates a propositional formula (True/False/Atom/Not/And/Or).
bool eval_symbol(const Formula& predicate, const std::set<std::string>& symbol);

// ---------------------------------------------------------------------------
// Progression

/// Flattens, sorts, deduplicates and absorbs constants.
Formula canonicalize(const Formula& f);

/// Residual obligation after reading `symbol` at the current step.
Formula progress(const Formula& f, const std::set<std::string>& symbol);

struct BuildOptions {
  std::size_t max_locations = 100000;
};

/// Progression closure of a distribution-free co-safety formula.
Dta build_dta(const Formula& phi_d, const BuildOptions& options = {});

// ---------------------------------------------------------------------------
// Runs

struct RunResult {
  bool accepted = false;
  bool rejected = false;  ///< reached the reject sink
  std::vector<std::pair<int, ClockVector>> trace;
};

RunResult run_dta(const Dta& d, const TimedWord& w);

// ---------------------------------------------------------------------------
// Text formats

/// Reads the explicit DTA format; throws ParseError / ModelError.
Dta parse_dta(std::string_view text);
Dta load_dta(const std::string& path);
void write_dta(const Dta& d, std::ostream& out);
void write_dta_dot(const Dta& d, std::ostream& out);

/// Reads a word file: one line per step, `<time> prop*`.
TimedWord parse_word(std::string_view text);

}  // namespace mitld
