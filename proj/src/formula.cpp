#include "mitld/formula.hpp"

#include <algorithm>
#include <limits>

#include "mitld/error.hpp"

namespace mitld {

struct Formula::Node {
  FormulaKind kind;
  std::string name;
  std::vector<Formula> operands;
  Interval interval;
  std::optional<DistributionSpec> dist;
};

namespace {

int hi_key(const Interval& i) { return i.hi ? *i.hi : std::numeric_limits<int>::max(); }

}  // namespace

Formula Formula::truth() {
  static const Formula t(std::make_shared<const Node>(Node{FormulaKind::True, {}, {}, {}, {}}));
  return t;
}

Formula Formula::falsity() {
  static const Formula f(std::make_shared<const Node>(Node{FormulaKind::False, {}, {}, {}, {}}));
  return f;
}

Formula Formula::atom(std::string name) {
  return Formula(std::make_shared<const Node>(Node{FormulaKind::Atom, std::move(name), {}, {}, {}}));
}

Formula Formula::negation(Formula operand) {
  return Formula(
      std::make_shared<const Node>(Node{FormulaKind::Not, {}, {std::move(operand)}, {}, {}}));
}

Formula Formula::conjunction(std::vector<Formula> operands) {
  if (operands.empty()) return truth();
  if (operands.size() == 1) return operands.front();
  return Formula(
      std::make_shared<const Node>(Node{FormulaKind::And, {}, std::move(operands), {}, {}}));
}

Formula Formula::disjunction(std::vector<Formula> operands) {
  if (operands.empty()) return falsity();
  if (operands.size() == 1) return operands.front();
  return Formula(
      std::make_shared<const Node>(Node{FormulaKind::Or, {}, std::move(operands), {}, {}}));
}

Formula Formula::until(Formula left, Formula right, Interval interval) {
  if (interval.lo < 0 || (interval.hi && *interval.hi < interval.lo)) {
    throw Error("invalid interval");
  }
  return Formula(std::make_shared<const Node>(
      Node{FormulaKind::Until, {}, {std::move(left), std::move(right)}, interval, {}}));
}

Formula Formula::eventually(Formula operand, Interval interval) {
  return until(truth(), std::move(operand), interval);
}

Formula Formula::dist_eventually(std::string event, DistributionSpec dist) {
  return Formula(std::make_shared<const Node>(
      Node{FormulaKind::DistEventually, std::move(event), {}, {}, std::move(dist)}));
}

FormulaKind Formula::kind() const { return node_->kind; }
const std::string& Formula::name() const { return node_->name; }
const std::vector<Formula>& Formula::operands() const { return node_->operands; }
const Interval& Formula::interval() const { return node_->interval; }

const DistributionSpec& Formula::distribution() const {
  if (!node_->dist) throw std::logic_error("formula has no distribution");
  return *node_->dist;
}

bool Formula::is_eventually() const {
  return kind() == FormulaKind::Until && left().is(FormulaKind::True);
}

std::strong_ordering operator<=>(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (auto c = x.kind <=> y.kind; c != 0) return c;
  if (auto c = x.name <=> y.name; c != 0) return c;
  if (auto c = x.interval.lo <=> y.interval.lo; c != 0) return c;
  if (auto c = hi_key(x.interval) <=> hi_key(y.interval); c != 0) return c;
  if (x.dist && y.dist && !(*x.dist == *y.dist)) {
    return *x.dist < *y.dist ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  if (auto c = x.operands.size() <=> y.operands.size(); c != 0) return c;
  for (std::size_t i = 0; i < x.operands.size(); ++i) {
    if (auto c = x.operands[i] <=> y.operands[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string bound_text(const Interval& i) {
  if (i.trivial()) return "";
  return "[" + std::to_string(i.lo) + "," + (i.hi ? std::to_string(*i.hi) : "inf") + "]";
}

// Operand slot of the enclosing operator. Top level is kTop.
enum Level { kTop = -1, kOr = 0, kAnd = 1, kUntil = 2, kUnary = 3 };

void print(const Formula& f, Level context, std::string& out) {
  switch (f.kind()) {
    case FormulaKind::True:
      out += "true";
      return;
    case FormulaKind::False:
      out += "false";
      return;
    case FormulaKind::Atom:
      out += f.name();
      return;
    case FormulaKind::DistEventually:
      out += "D{" + f.distribution().to_string() + "} " + f.name();
      return;
    case FormulaKind::Not:
      out += '!';
      print(f.operand(), kUnary, out);
      return;
    case FormulaKind::And:
    case FormulaKind::Or: {
      const bool is_and = f.is(FormulaKind::And);
      const Level own = is_and ? kAnd : kOr;
      // Nested operators of the same kind keep their parentheses so the
      // parser rebuilds the same tree.
      const bool wrap = context >= own;
      if (wrap) out += '(';
      for (std::size_t i = 0; i < f.operands().size(); ++i) {
        if (i > 0) out += is_and ? " & " : " | ";
        print(f.operands()[i], own, out);
      }
      if (wrap) out += ')';
      return;
    }
    case FormulaKind::Until: {
      if (f.is_eventually()) {
        out += "F" + bound_text(f.interval()) + " ";
        print(f.right(), kUnary, out);
        return;
      }
      const bool wrap = context >= kUntil;
      if (wrap) out += '(';
      print(f.left(), kUntil, out);
      out += " U" + bound_text(f.interval()) + " ";
      print(f.right(), kUntil, out);
      if (wrap) out += ')';
      return;
    }
  }
}

}  // namespace

std::string to_string(const Formula& f) {
  std::string out;
  print(f, kTop, out);
  return out;
}

std::set<std::string> atoms(const Formula& f) {
  std::set<std::string> out;
  auto walk = [&out](const auto& self, const Formula& g) -> void {
    if (g.is(FormulaKind::Atom) || g.is(FormulaKind::DistEventually)) out.insert(g.name());
    for (const auto& c : g.operands()) self(self, c);
  };
  walk(walk, f);
  return out;
}

int temporal_operator_count(const Formula& f) {
  int n = (f.is(FormulaKind::Until) || f.is(FormulaKind::DistEventually)) ? 1 : 0;
  for (const auto& c : f.operands()) n += temporal_operator_count(c);
  return n;
}

}  // namespace mitld
