#include <algorithm>
#include <cctype>
#include <map>

#include "mitld/error.hpp"
#include "mitld/timed_automata.hpp"

namespace mitld {

namespace {

constexpr std::size_t kMaxAlphabet = 16;
constexpr std::size_t kMaxGuardGrid = 1u << 20;

bool eval_masked(const Formula& p, const std::vector<std::string>& alphabet, SymbolMask m) {
  switch (p.kind()) {
    case FormulaKind::True: return true;
    case FormulaKind::False: return false;
    case FormulaKind::Atom: {
      auto it = std::lower_bound(alphabet.begin(), alphabet.end(), p.name());
      return it != alphabet.end() && *it == p.name() && (m >> (it - alphabet.begin())) & 1u;
    }
    case FormulaKind::Not: return !eval_masked(p.operand(), alphabet, m);
    case FormulaKind::And:
      return std::all_of(p.operands().begin(), p.operands().end(),
                         [&](const Formula& c) { return eval_masked(c, alphabet, m); });
    case FormulaKind::Or:
      return std::any_of(p.operands().begin(), p.operands().end(),
                         [&](const Formula& c) { return eval_masked(c, alphabet, m); });
    default:
      throw ModelError("edge predicate must be propositional: " + to_string(p));
  }
}

// Integer clocks: beyond twice the largest constant every guard is constant,
// so a bounded grid decides joint satisfiability.
bool jointly_satisfiable(const ClockConstraint& a, const ClockConstraint& b, std::size_t clock_count) {
  std::set<int> used;
  a.clocks(used);
  b.clocks(used);
  if (used.empty()) {
    ClockVector zero(clock_count);
    return eval_constraint(a, zero) && eval_constraint(b, zero);
  }
  std::vector<int> maxk;
  a.max_constants(maxk);
  b.max_constants(maxk);
  int bound = 0;
  for (int k : maxk) bound = std::max(bound, k);
  const int span = 2 * bound + 2;
  std::vector<int> ids(used.begin(), used.end());
  std::size_t total = 1;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    total *= static_cast<std::size_t>(span + 1);
    if (total > kMaxGuardGrid) return true;  // too large to decide; treat as overlapping
  }
  std::vector<int> values(clock_count, 0);
  for (std::size_t n = 0; n < total; ++n) {
    std::size_t rest = n;
    for (int id : ids) {
      values[id] = static_cast<int>(rest % (span + 1));
      rest /= (span + 1);
    }
    ClockVector v(values, std::vector<bool>(clock_count, false));
    if (eval_constraint(a, v) && eval_constraint(b, v)) return true;
  }
  return false;
}

void check_clocks(const ClockConstraint& c, std::size_t count, const std::string& where) {
  std::set<int> used;
  c.clocks(used);
  for (int id : used) {
    if (id < 0 || static_cast<std::size_t>(id) >= count) {
      throw ModelError("unknown clock in " + where);
    }
  }
}

void collect_predicate_atoms(const Formula& p, std::set<std::string>& out) {
  for (const auto& a : atoms(p)) out.insert(a);
}

}  // namespace

bool eval_symbol(const Formula& p, const std::set<std::string>& symbol) {
  switch (p.kind()) {
    case FormulaKind::True: return true;
    case FormulaKind::False: return false;
    case FormulaKind::Atom: return symbol.count(p.name()) > 0;
    case FormulaKind::Not: return !eval_symbol(p.operand(), symbol);
    case FormulaKind::And:
      return std::all_of(p.operands().begin(), p.operands().end(),
                         [&](const Formula& c) { return eval_symbol(c, symbol); });
    case FormulaKind::Or:
      return std::any_of(p.operands().begin(), p.operands().end(),
                         [&](const Formula& c) { return eval_symbol(c, symbol); });
    default:
      throw Error("predicate must be propositional: " + to_string(p));
  }
}

Dta::Dta(Spec spec)
    : locations_(std::move(spec.locations)),
      clocks_(std::move(spec.clocks)),
      alphabet_(std::move(spec.alphabet)),
      initial_(spec.initial),
      reject_(spec.reject),
      edges_(std::move(spec.edges)) {
  const int n = static_cast<int>(locations_.size());
  if (n == 0) throw ModelError("automaton has no locations");
  {
    std::set<std::string> seen;
    for (const auto& l : locations_) {
      if (!seen.insert(l).second) throw ModelError("duplicate location '" + l + "'");
    }
    seen.clear();
    for (const auto& c : clocks_) {
      if (!seen.insert(c).second) throw ModelError("duplicate clock '" + c + "'");
    }
  }
  auto check_loc = [n](int l, const std::string& what) {
    if (l < 0 || l >= n) throw ModelError("dangling location in " + what);
  };
  check_loc(initial_, "initial location");
  if (reject_) check_loc(*reject_, "reject location");
  accepting_.assign(n, false);
  for (int l : spec.accepting) {
    check_loc(l, "accepting set");
    accepting_[l] = true;
  }
  if (reject_ && accepting_[*reject_]) throw ModelError("reject sink cannot be accepting");

  if (alphabet_.empty()) {
    std::set<std::string> collected;
    for (const auto& e : edges_) collect_predicate_atoms(e.symbol, collected);
    alphabet_.assign(collected.begin(), collected.end());
  } else {
    std::sort(alphabet_.begin(), alphabet_.end());
    alphabet_.erase(std::unique(alphabet_.begin(), alphabet_.end()), alphabet_.end());
  }
  if (alphabet_.size() > kMaxAlphabet) {
    throw ModelError("alphabet has " + std::to_string(alphabet_.size()) + " propositions; at most " +
                     std::to_string(kMaxAlphabet) + " supported");
  }

  invariants_.assign(n, ClockConstraint::truth());
  for (auto& [l, c] : spec.invariants) {
    check_loc(l, "invariant");
    check_clocks(c, clocks_.size(), "invariant of '" + locations_[l] + "'");
    invariants_[l] = c;
  }

  const SymbolMask minterm_count = SymbolMask{1} << alphabet_.size();
  out_edges_.assign(n, {});
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    check_loc(e.source, "edge source");
    check_loc(e.target, "edge from '" + locations_[e.source] + "'");
    check_clocks(e.guard, clocks_.size(), "guard of edge from '" + locations_[e.source] + "'");
    for (int r : e.resets) {
      if (r < 0 || static_cast<std::size_t>(r) >= clocks_.size()) {
        throw ModelError("unknown clock in reset of edge from '" + locations_[e.source] + "'");
      }
    }
    std::vector<bool> mt(minterm_count);
    for (SymbolMask m = 0; m < minterm_count; ++m) mt[m] = eval_masked(e.symbol, alphabet_, m);
    edge_minterms_.push_back(std::move(mt));
    out_edges_[e.source].push_back(static_cast<int>(i));
  }

  for (int l = 0; l < n; ++l) {
    const auto& out = out_edges_[l];
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t j = i + 1; j < out.size(); ++j) {
        const auto& a = edge_minterms_[out[i]];
        const auto& b = edge_minterms_[out[j]];
        bool overlap = false;
        for (SymbolMask m = 0; m < minterm_count && !overlap; ++m) overlap = a[m] && b[m];
        if (overlap && jointly_satisfiable(edges_[out[i]].guard, edges_[out[j]].guard, clocks_.size())) {
          const auto& ei = edges_[out[i]];
          const auto& ej = edges_[out[j]];
          throw ModelError("nondeterministic edges from '" + locations_[l] + "': {" +
                           to_string(ei.symbol) + "} -> " + locations_[ei.target] + " and {" +
                           to_string(ej.symbol) + "} -> " + locations_[ej.target]);
        }
      }
    }
  }

  ceilings_.assign(clocks_.size(), 0);
  std::vector<int> maxk;
  for (const auto& e : edges_) e.guard.max_constants(maxk);
  for (const auto& c : invariants_) c.max_constants(maxk);
  for (std::size_t i = 0; i < clocks_.size(); ++i) {
    ceilings_[i] = (i < maxk.size() ? maxk[i] : 0) + 1;
  }

  location_formulas_.assign(n, std::nullopt);
  if (!spec.location_formulas.empty()) {
    if (static_cast<int>(spec.location_formulas.size()) != n) {
      throw ModelError("location formula count mismatch");
    }
    for (int l = 0; l < n; ++l) location_formulas_[l] = spec.location_formulas[l];
  }
}

int Dta::location_index(std::string_view name) const {
  for (std::size_t i = 0; i < locations_.size(); ++i) {
    if (locations_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

int Dta::clock_index(std::string_view name) const {
  for (std::size_t i = 0; i < clocks_.size(); ++i) {
    if (clocks_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

SymbolMask Dta::symbol_mask(const std::set<std::string>& symbol) const {
  SymbolMask m = 0;
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    if (symbol.count(alphabet_[i])) m |= SymbolMask{1} << i;
  }
  return m;
}

std::set<std::string> Dta::symbol_names(SymbolMask m) const {
  std::set<std::string> out;
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    if (m & (SymbolMask{1} << i)) out.insert(alphabet_[i]);
  }
  return out;
}

std::optional<Dta::Move> Dta::step(int location, const ClockVector& clocks, SymbolMask symbol,
                                   int delay) const {
  symbol &= (SymbolMask{1} << alphabet_.size()) - 1;
  for (int t = 0; t < delay; ++t) {
    if (!eval_constraint(invariants_[location], clocks.advance(t))) return std::nullopt;
  }
  const ClockVector advanced = clocks.advance(delay);
  for (int id : out_edges_[location]) {
    if (!edge_minterms_[id][symbol]) continue;
    const DtaEdge& e = edges_[id];
    if (!eval_constraint(e.guard, advanced)) continue;
    ClockVector next = advanced.reset(e.resets);
    if (!eval_constraint(invariants_[e.target], next)) return std::nullopt;
    return Move{e.target, std::move(next)};
  }
  return std::nullopt;
}

Dta::Move Dta::step_total(int location, const ClockVector& clocks, SymbolMask symbol, int delay) const {
  if (auto m = step(location, clocks, symbol, delay)) return *m;
  if (!reject_) {
    throw ModelError("no enabled edge from '" + locations_[location] + "' and no reject sink");
  }
  return Move{*reject_, clocks.advance(delay)};
}

RunResult run_dta(const Dta& d, const TimedWord& w) {
  w.check();
  RunResult r;
  int loc = d.initial();
  ClockVector v(d.clocks().size());
  r.trace.emplace_back(loc, v);
  r.accepted = d.accepting(loc);
  int prev = 0;
  for (const auto& entry : w.entries) {
    const int delay = entry.time - prev;
    prev = entry.time;
    auto move = d.step(loc, v, d.symbol_mask(entry.symbol), delay);
    if (!move) {
      r.rejected = true;
      if (d.reject()) r.trace.emplace_back(*d.reject(), v.advance(delay));
      break;
    }
    loc = move->location;
    v = std::move(move->clocks);
    r.trace.emplace_back(loc, v);
    if (d.accepting(loc)) r.accepted = true;
    if (d.is_reject(loc)) {
      r.rejected = true;
      break;
    }
  }
  return r;
}

}  // namespace mitld
