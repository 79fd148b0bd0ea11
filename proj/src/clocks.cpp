#include <algorithm>

#include "mitld/error.hpp"
#include "mitld/timed_automata.hpp"

namespace mitld {

ClockVector::ClockVector(std::vector<int> values, std::vector<bool> stopped)
    : values_(std::move(values)), stopped_(std::move(stopped)) {
  if (stopped_.size() != values_.size()) throw Error("clock vector size mismatch");
  for (int v : values_) {
    if (v < 0) throw Error("clock values must be non-negative");
  }
}

ClockVector ClockVector::advance(int t) const {
  ClockVector out = *this;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!stopped_[i]) out.values_[i] += t;
  }
  return out;
}

ClockVector ClockVector::reset(const std::vector<int>& zero, const std::vector<int>& stop) const {
  ClockVector out = *this;
  for (int c : zero) out.values_.at(c) = 0;
  for (int c : stop) {
    out.values_.at(c) = 0;
    out.stopped_.at(c) = true;
  }
  return out;
}

ClockVector ClockVector::saturate(const std::vector<int>& ceiling) const {
  ClockVector out = *this;
  for (std::size_t i = 0; i < values_.size() && i < ceiling.size(); ++i) {
    out.values_[i] = std::min(out.values_[i], ceiling[i]);
  }
  return out;
}

struct ClockConstraint::Node {
  Kind kind;
  int clock = -1;
  int other = -1;
  CompareOp op = CompareOp::Ge;
  int k = 0;
  std::vector<ClockConstraint> children;
};

ClockConstraint ClockConstraint::truth() {
  static const ClockConstraint t(std::make_shared<const Node>(Node{Kind::True, -1, -1, CompareOp::Ge, 0, {}}));
  return t;
}

ClockConstraint ClockConstraint::falsity() {
  static const ClockConstraint f(std::make_shared<const Node>(Node{Kind::False, -1, -1, CompareOp::Ge, 0, {}}));
  return f;
}

ClockConstraint ClockConstraint::compare(int clock, CompareOp op, int k) {
  if (k < 0) throw Error("clock constants must be non-negative");
  return ClockConstraint(std::make_shared<const Node>(Node{Kind::Compare, clock, -1, op, k, {}}));
}

ClockConstraint ClockConstraint::diff_compare(int clock, int other, CompareOp op, int k) {
  if (k < 0) throw Error("clock constants must be non-negative");
  return ClockConstraint(std::make_shared<const Node>(Node{Kind::DiffCompare, clock, other, op, k, {}}));
}

ClockConstraint ClockConstraint::conjunction(ClockConstraint a, ClockConstraint b) {
  return ClockConstraint(std::make_shared<const Node>(
      Node{Kind::And, -1, -1, CompareOp::Ge, 0, {std::move(a), std::move(b)}}));
}

ClockConstraint ClockConstraint::disjunction(ClockConstraint a, ClockConstraint b) {
  return ClockConstraint(std::make_shared<const Node>(
      Node{Kind::Or, -1, -1, CompareOp::Ge, 0, {std::move(a), std::move(b)}}));
}

ClockConstraint::Kind ClockConstraint::kind() const { return node_->kind; }
int ClockConstraint::clock() const { return node_->clock; }
int ClockConstraint::other_clock() const { return node_->other; }
CompareOp ClockConstraint::op() const { return node_->op; }
int ClockConstraint::constant() const { return node_->k; }

const ClockConstraint& ClockConstraint::lhs() const { return node_->children.at(0); }
const ClockConstraint& ClockConstraint::rhs() const { return node_->children.at(1); }

void ClockConstraint::max_constants(std::vector<int>& out) const {
  switch (kind()) {
    case Kind::Compare:
    case Kind::DiffCompare: {
      auto bump = [&out](int c, int k) {
        if (c >= static_cast<int>(out.size())) out.resize(c + 1, 0);
        out[c] = std::max(out[c], k);
      };
      bump(clock(), constant());
      if (kind() == Kind::DiffCompare) bump(other_clock(), constant());
      return;
    }
    case Kind::And:
    case Kind::Or:
      lhs().max_constants(out);
      rhs().max_constants(out);
      return;
    default:
      return;
  }
}

void ClockConstraint::clocks(std::set<int>& out) const {
  switch (kind()) {
    case Kind::Compare:
      out.insert(clock());
      return;
    case Kind::DiffCompare:
      out.insert(clock());
      out.insert(other_clock());
      return;
    case Kind::And:
    case Kind::Or:
      lhs().clocks(out);
      rhs().clocks(out);
      return;
    default:
      return;
  }
}

namespace {

bool apply(CompareOp op, long a, long b) {
  switch (op) {
    case CompareOp::Eq: return a == b;
    case CompareOp::Ne: return a != b;
    case CompareOp::Lt: return a < b;
    case CompareOp::Gt: return a > b;
    case CompareOp::Ge: return a >= b;
    case CompareOp::Le: return a <= b;
  }
  return false;
}

const char* op_text(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
    case CompareOp::Le: return "<=";
  }
  return "?";
}

int value_of(const ClockVector& v, int clock) {
  if (clock < 0 || static_cast<std::size_t>(clock) >= v.size()) {
    throw ModelError("unknown clock index " + std::to_string(clock));
  }
  return v[clock];
}

}  // namespace

bool eval_constraint(const ClockConstraint& c, const ClockVector& v) {
  using Kind = ClockConstraint::Kind;
  switch (c.kind()) {
    case Kind::True: return true;
    case Kind::False: return false;
    case Kind::Compare: return apply(c.op(), value_of(v, c.clock()), c.constant());
    case Kind::DiffCompare:
      return apply(c.op(), static_cast<long>(value_of(v, c.clock())) - value_of(v, c.other_clock()),
                   c.constant());
    case Kind::And: return eval_constraint(c.lhs(), v) && eval_constraint(c.rhs(), v);
    case Kind::Or: return eval_constraint(c.lhs(), v) || eval_constraint(c.rhs(), v);
  }
  return false;
}

std::string to_string(const ClockConstraint& c, const std::vector<std::string>& names) {
  using Kind = ClockConstraint::Kind;
  auto name = [&names](int i) {
    return i >= 0 && static_cast<std::size_t>(i) < names.size() ? names[i] : "?" + std::to_string(i);
  };
  switch (c.kind()) {
    case Kind::True: return "true";
    case Kind::False: return "false";
    case Kind::Compare:
      return name(c.clock()) + " " + op_text(c.op()) + " " + std::to_string(c.constant());
    case Kind::DiffCompare:
      return name(c.clock()) + " - " + name(c.other_clock()) + " " + op_text(c.op()) + " " +
             std::to_string(c.constant());
    case Kind::And:
      return "(" + to_string(c.lhs(), names) + " && " + to_string(c.rhs(), names) + ")";
    case Kind::Or:
      return "(" + to_string(c.lhs(), names) + " || " + to_string(c.rhs(), names) + ")";
  }
  return "";
}

TimedWord TimedWord::unit(std::vector<std::set<std::string>> symbols) {
  TimedWord w;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    w.entries.push_back({static_cast<int>(i), std::move(symbols[i])});
  }
  return w;
}

void TimedWord::check() const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i == 0 && entries[0].time != 0) throw Error("timed word must start at time 0");
    if (i > 0 && entries[i].time <= entries[i - 1].time) {
      throw Error("timestamps must increase strictly (entry " + std::to_string(i) + ")");
    }
  }
}

}  // namespace mitld
