#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mitld/distribution.hpp"

namespace mitld {

/// Time interval [lo, hi] in steps; an empty `hi` means infinity.
struct Interval {
  int lo = 0;
  std::optional<int> hi;

  static Interval unbounded() { return {}; }
  static Interval closed(int lo, int hi) { return {lo, hi}; }

  bool bounded() const { return hi.has_value(); }
  /// [0, inf): printed without a bound.
  bool trivial() const { return lo == 0 && !hi; }
  bool singleton() const { return hi && *hi == lo; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

enum class FormulaKind { True, False, Atom, Not, And, Or, Until, DistEventually };

/// Immutable formula tree with cheap copies.
///
/// And/Or are n-ary (at least two operands). Eventually is stored as
/// Until(True, f, I). False is not part of the surface grammar the planner
/// needs, but it is the residual of a violated obligation, so it is a node.
class Formula {
 public:
  static Formula truth();
  static Formula falsity();
  static Formula atom(std::string name);
  static Formula negation(Formula operand);
  static Formula conjunction(std::vector<Formula> operands);
  static Formula disjunction(std::vector<Formula> operands);
  static Formula conjunction(Formula a, Formula b) { return conjunction({std::move(a), std::move(b)}); }
  static Formula disjunction(Formula a, Formula b) { return disjunction({std::move(a), std::move(b)}); }
  static Formula until(Formula left, Formula right, Interval interval = Interval::unbounded());
  static Formula eventually(Formula operand, Interval interval = Interval::unbounded());
  static Formula dist_eventually(std::string event, DistributionSpec dist);

  FormulaKind kind() const;
  bool is(FormulaKind k) const { return kind() == k; }
  /// Atom name, or the event of a DistEventually.
  const std::string& name() const;
  const std::vector<Formula>& operands() const;
  const Formula& operand() const { return operands().front(); }
  const Formula& left() const { return operands()[0]; }
  const Formula& right() const { return operands()[1]; }
  const Interval& interval() const;
  const DistributionSpec& distribution() const;

  bool is_eventually() const;

  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b);
  friend bool operator==(const Formula& a, const Formula& b) { return (a <=> b) == 0; }

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Printer whose output parse_formula() maps back to the same tree.
std::string to_string(const Formula& f);

/// Parses the concrete syntax; throws ParseError.
Formula parse_formula(std::string_view text);

/// All atom names in `f`, including DistEventually operands.
std::set<std::string> atoms(const Formula& f);

/// Number of Until nodes (Eventually included) and DistEventually nodes.
int temporal_operator_count(const Formula& f);

// ---------------------------------------------------------------------------
// Fragment checks and distribution handling

/// External events U with their first-occurrence distributions, ordered by name.
class EventSet {
 public:
  EventSet() = default;
  explicit EventSet(std::map<std::string, DistributionSpec> events);

  /// Collects the DistEventually nodes of `f`; throws Error if an event
  /// appears with two different distributions.
  static EventSet from_formula(const Formula& f);

  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }
  bool contains(std::string_view name) const { return index_of(name) >= 0; }
  int index_of(std::string_view name) const;
  const std::string& name(std::size_t i) const { return names_[i]; }
  const DistributionSpec& distribution(std::size_t i) const { return dists_[i]; }
  const std::vector<std::string>& names() const { return names_; }

  /// Bitmask of every event.
  std::uint32_t all() const { return size() == 0 ? 0u : ((1u << size()) - 1u); }
  std::uint32_t mask_of(const std::set<std::string>& props) const;
  std::set<std::string> names_of(std::uint32_t mask) const;

  friend bool operator==(const EventSet&, const EventSet&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<DistributionSpec> dists_;
};

struct Violation {
  enum class Kind {
    NegatedDistEventually,
    EventNotInU,
    EventReused,
    EventUnused,
    NestedDistEventually,
    OutsideCoSafety,
    SingularInterval,
  };
  Kind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(Violation::Kind k) const;
  std::string summary() const;
};

/// Checks the MITLD- fragment conditions against the event set `u`.
ValidationReport validate_mitld_minus(const Formula& f, const EventSet& u);

/// Pushes negations down to atoms (De Morgan, double negation, constants).
/// Negations above temporal operators are left in place.
Formula negation_normal_form(const Formula& f);

/// Replaces every DistEventually(a, mu) with Until(True, a, [0, inf)).
Formula substitute_dist(const Formula& f);

// ---------------------------------------------------------------------------
// Truncation

struct TruncationEntry {
  std::string clock;
  bool event_clock = false;
  int point = 0;
  friend bool operator==(const TruncationEntry&, const TruncationEntry&) = default;
};

/// Truncation points per clock plus the achieved formula-level error bound.
struct TruncationVector {
  std::vector<TruncationEntry> entries;  // sorted by clock name
  double epsilon_achieved = 0.0;

  std::optional<int> point(std::string_view clock) const;
  /// Clock identifier used for an event's clock.
  static std::string event_clock(std::string_view event) { return "x_" + std::string(event); }
  std::string to_string() const;
};

/// Per-event minimal truncation: T = min{T : tail(mu, T) < epsilon}.
TruncationVector truncation_vector(const Formula& f, const EventSet& u, double epsilon);

/// One common truncation point for every event clock.
TruncationVector truncation_vector_uniform(const Formula& f, const EventSet& u, int T);

/// Explicit per-event points, e.g. from `b1=3,b2=5`.
TruncationVector truncation_vector_explicit(const Formula& f, const EventSet& u,
                                            const std::map<std::string, int>& points);

}  // namespace mitld
