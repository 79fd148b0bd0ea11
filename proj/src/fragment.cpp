#include <algorithm>
#include <map>

#include "mitld/error.hpp"
#include "mitld/formula.hpp"

namespace mitld {

EventSet::EventSet(std::map<std::string, DistributionSpec> events) {
  if (events.size() > 16) throw Error("at most 16 external events are supported");
  for (auto& [name, dist] : events) {
    names_.push_back(name);
    dists_.push_back(dist);
  }
}

EventSet EventSet::from_formula(const Formula& f) {
  std::map<std::string, DistributionSpec> found;
  auto walk = [&found](const auto& self, const Formula& g) -> void {
    if (g.is(FormulaKind::DistEventually)) {
      auto [it, inserted] = found.emplace(g.name(), g.distribution());
      if (!inserted && !(it->second == g.distribution())) {
        throw Error("event '" + g.name() + "' has conflicting distributions " +
                    it->second.to_string() + " and " + g.distribution().to_string());
      }
    }
    for (const auto& c : g.operands()) self(self, c);
  };
  walk(walk, f);
  return EventSet(std::move(found));
}

int EventSet::index_of(std::string_view name) const {
  auto it = std::lower_bound(names_.begin(), names_.end(), name);
  if (it == names_.end() || *it != name) return -1;
  return static_cast<int>(it - names_.begin());
}

std::uint32_t EventSet::mask_of(const std::set<std::string>& props) const {
  std::uint32_t m = 0;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (props.count(names_[i])) m |= 1u << i;
  }
  return m;
}

std::set<std::string> EventSet::names_of(std::uint32_t mask) const {
  std::set<std::string> out;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (mask & (1u << i)) out.insert(names_[i]);
  }
  return out;
}

bool ValidationReport::has(Violation::Kind k) const {
  return std::any_of(violations.begin(), violations.end(),
                     [k](const Violation& v) { return v.kind == k; });
}

std::string ValidationReport::summary() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.message;
  }
  return out;
}

Formula negation_normal_form(const Formula& f) {
  auto rebuild = [](const Formula& g, auto&& fn) {
    std::vector<Formula> ops;
    ops.reserve(g.operands().size());
    for (const auto& c : g.operands()) ops.push_back(fn(c));
    return ops;
  };
  switch (f.kind()) {
    case FormulaKind::And:
      return Formula::conjunction(rebuild(f, negation_normal_form));
    case FormulaKind::Or:
      return Formula::disjunction(rebuild(f, negation_normal_form));
    case FormulaKind::Until:
      return Formula::until(negation_normal_form(f.left()), negation_normal_form(f.right()),
                            f.interval());
    case FormulaKind::Not: {
      const Formula& g = f.operand();
      switch (g.kind()) {
        case FormulaKind::True:
          return Formula::falsity();
        case FormulaKind::False:
          return Formula::truth();
        case FormulaKind::Not:
          return negation_normal_form(g.operand());
        case FormulaKind::And:
        case FormulaKind::Or: {
          std::vector<Formula> ops;
          for (const auto& c : g.operands()) ops.push_back(negation_normal_form(Formula::negation(c)));
          return g.is(FormulaKind::And) ? Formula::disjunction(std::move(ops))
                                        : Formula::conjunction(std::move(ops));
        }
        case FormulaKind::Until:
          return Formula::negation(Formula::until(negation_normal_form(g.left()),
                                                  negation_normal_form(g.right()), g.interval()));
        default:
          return f;
      }
    }
    default:
      return f;
  }
}

ValidationReport validate_mitld_minus(const Formula& f, const EventSet& u) {
  ValidationReport report;
  auto add = [&report](Violation::Kind k, std::string msg) {
    report.violations.push_back({k, std::move(msg)});
  };
  std::map<std::string, int> uses;

  auto walk = [&](const auto& self, const Formula& g, bool negated, bool temporal) -> void {
    switch (g.kind()) {
      case FormulaKind::DistEventually:
        ++uses[g.name()];
        if (negated) {
          add(Violation::Kind::NegatedDistEventually,
              "distribution eventuality on '" + g.name() + "' appears under negation");
        }
        if (temporal) {
          add(Violation::Kind::NestedDistEventually,
              "distribution eventuality on '" + g.name() + "' appears inside a temporal operator");
        }
        if (!u.contains(g.name())) {
          add(Violation::Kind::EventNotInU, "'" + g.name() + "' is not an external event");
        }
        return;
      case FormulaKind::Until:
        if (g.interval().singleton() && g.interval().lo > 0) {
          add(Violation::Kind::SingularInterval, "singleton interval in " + to_string(g));
        }
        break;
      default:
        break;
    }
    const bool under_not = negated || g.is(FormulaKind::Not);
    const bool under_temporal = temporal || g.is(FormulaKind::Until);
    for (const auto& c : g.operands()) self(self, c, under_not, under_temporal);
  };
  walk(walk, f, false, false);

  for (const auto& [name, count] : uses) {
    if (count > 1) {
      add(Violation::Kind::EventReused,
          "event '" + name + "' has " + std::to_string(count) + " distribution eventualities");
    }
  }
  for (const auto& name : u.names()) {
    if (!uses.count(name)) {
      add(Violation::Kind::EventUnused, "external event '" + name + "' has no distribution eventuality");
    }
  }

  // Co-safety: after pushing negations down, nothing but atoms may be negated.
  auto cosafe = [&](const auto& self, const Formula& g) -> void {
    if (g.is(FormulaKind::Not) && !g.operand().is(FormulaKind::Atom)) {
      if (!g.operand().is(FormulaKind::DistEventually)) {
        add(Violation::Kind::OutsideCoSafety,
            "negated temporal obligation " + to_string(g) + " is not co-safe");
      }
      return;
    }
    for (const auto& c : g.operands()) self(self, c);
  };
  cosafe(cosafe, negation_normal_form(f));
  return report;
}

Formula substitute_dist(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::DistEventually:
      return Formula::eventually(Formula::atom(f.name()));
    case FormulaKind::Not:
      return Formula::negation(substitute_dist(f.operand()));
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<Formula> ops;
      for (const auto& c : f.operands()) ops.push_back(substitute_dist(c));
      return f.is(FormulaKind::And) ? Formula::conjunction(std::move(ops))
                                    : Formula::disjunction(std::move(ops));
    }
    case FormulaKind::Until:
      return Formula::until(substitute_dist(f.left()), substitute_dist(f.right()), f.interval());
    default:
      return f;
  }
}

}  // namespace mitld
