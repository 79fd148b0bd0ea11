#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "mitld/error.hpp"
#include "mitld/timed_automata.hpp"

namespace mitld {

namespace {

constexpr std::size_t kMaxPredicateAtoms = 16;

Formula canonical_junction(FormulaKind kind, const std::vector<Formula>& ops) {
  const bool is_and = kind == FormulaKind::And;
  const FormulaKind absorbing = is_and ? FormulaKind::False : FormulaKind::True;
  const FormulaKind neutral = is_and ? FormulaKind::True : FormulaKind::False;
  std::vector<Formula> flat;
  for (const auto& op : ops) {
    Formula c = canonicalize(op);
    if (c.is(absorbing)) return c;
    if (c.is(neutral)) continue;
    if (c.is(kind)) {
      flat.insert(flat.end(), c.operands().begin(), c.operands().end());
    } else {
      flat.push_back(std::move(c));
    }
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  return is_and ? Formula::conjunction(std::move(flat)) : Formula::disjunction(std::move(flat));
}

// Quine-McCluskey over k variables. An implicant is (bits, care) where `care`
// marks the variables that appear as literals.
struct Implicant {
  std::uint32_t bits;
  std::uint32_t care;
  friend auto operator<=>(const Implicant&, const Implicant&) = default;
};

std::vector<Implicant> prime_implicants(const std::vector<std::uint32_t>& minterms, std::size_t k) {
  const std::uint32_t full = k == 32 ? ~0u : ((1u << k) - 1u);
  std::set<Implicant> current;
  for (auto m : minterms) current.insert({m, full});
  std::vector<Implicant> primes;
  while (!current.empty()) {
    std::set<Implicant> next;
    std::set<Implicant> used;
    std::vector<Implicant> cur(current.begin(), current.end());
    for (std::size_t i = 0; i < cur.size(); ++i) {
      for (std::size_t j = i + 1; j < cur.size(); ++j) {
        if (cur[i].care != cur[j].care) continue;
        const std::uint32_t diff = (cur[i].bits ^ cur[j].bits) & cur[i].care;
        if (diff == 0 || (diff & (diff - 1)) != 0) continue;
        next.insert({cur[i].bits & ~diff, cur[i].care & ~diff});
        used.insert(cur[i]);
        used.insert(cur[j]);
      }
    }
    for (const auto& c : cur) {
      if (!used.count(c)) primes.push_back(c);
    }
    current = std::move(next);
  }
  return primes;
}

bool covers(const Implicant& p, std::uint32_t m) { return (m & p.care) == (p.bits & p.care); }

// Sum-of-products predicate over `vars` true exactly on `minterms`.
Formula minimize(const std::vector<std::uint32_t>& minterms, const std::vector<std::string>& vars) {
  const std::size_t k = vars.size();
  if (minterms.empty()) return Formula::falsity();
  if (minterms.size() == (std::size_t{1} << k)) return Formula::truth();
  auto primes = prime_implicants(minterms, k);

  std::set<std::uint32_t> uncovered(minterms.begin(), minterms.end());
  std::vector<Implicant> chosen;
  for (auto m : minterms) {
    int count = 0;
    const Implicant* only = nullptr;
    for (const auto& p : primes) {
      if (covers(p, m)) {
        ++count;
        only = &p;
      }
    }
    if (count == 1 && std::find(chosen.begin(), chosen.end(), *only) == chosen.end()) {
      chosen.push_back(*only);
    }
  }
  for (const auto& c : chosen) {
    for (auto it = uncovered.begin(); it != uncovered.end();) {
      it = covers(c, *it) ? uncovered.erase(it) : std::next(it);
    }
  }
  while (!uncovered.empty()) {
    const Implicant* best = nullptr;
    std::size_t best_count = 0;
    for (const auto& p : primes) {
      std::size_t n = 0;
      for (auto m : uncovered) n += covers(p, m);
      if (n > best_count) {
        best_count = n;
        best = &p;
      }
    }
    chosen.push_back(*best);
    for (auto it = uncovered.begin(); it != uncovered.end();) {
      it = covers(*best, *it) ? uncovered.erase(it) : std::next(it);
    }
  }

  std::vector<Formula> terms;
  for (const auto& c : chosen) {
    std::vector<Formula> lits;
    for (std::size_t i = 0; i < k; ++i) {
      if (!(c.care & (1u << i))) continue;
      Formula a = Formula::atom(vars[i]);
      lits.push_back((c.bits & (1u << i)) ? a : Formula::negation(a));
    }
    terms.push_back(Formula::conjunction(std::move(lits)));
  }
  std::sort(terms.begin(), terms.end());
  return Formula::disjunction(std::move(terms));
}

using Clause = std::set<Formula>;

std::vector<Clause> clauses_of(const Formula& f) {
  if (f.is(FormulaKind::True)) return {Clause{}};
  if (f.is(FormulaKind::False)) return {};
  if (f.is(FormulaKind::Or)) {
    std::vector<Clause> out;
    for (const auto& op : f.operands()) {
      auto part = clauses_of(op);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  if (f.is(FormulaKind::And)) {
    std::vector<Clause> out{Clause{}};
    for (const auto& op : f.operands()) {
      std::vector<Clause> next;
      for (const auto& left : clauses_of(op)) {
        for (const auto& right : out) {
          Clause c = right;
          c.insert(left.begin(), left.end());
          next.push_back(std::move(c));
        }
      }
      out = std::move(next);
    }
    return out;
  }
  return {Clause{f}};
}

bool contradictory(const Clause& c) {
  for (const auto& lit : c) {
    if (lit.is(FormulaKind::Not) && c.count(lit.operand())) return true;
  }
  return false;
}

// Sorted DNF with absorbed clauses dropped. Nested unbounded operators make
// progression emit equivalent junctions in ever new shapes; this pins them to
// one representative so the location set stays finite.
Formula disjunctive_form(const Formula& f) {
  auto all = clauses_of(canonicalize(f));
  std::erase_if(all, contradictory);
  std::sort(all.begin(), all.end(),
            [](const Clause& a, const Clause& b) { return a.size() != b.size() ? a.size() < b.size() : a < b; });
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::vector<Clause> kept;
  for (const auto& c : all) {
    const bool absorbed = std::any_of(kept.begin(), kept.end(), [&](const Clause& k) {
      return std::includes(c.begin(), c.end(), k.begin(), k.end());
    });
    if (!absorbed) kept.push_back(c);
  }
  std::vector<Formula> terms;
  for (const auto& c : kept) {
    terms.push_back(canonicalize(Formula::conjunction(std::vector<Formula>(c.begin(), c.end()))));
  }
  return canonicalize(Formula::disjunction(std::move(terms)));
}

}  // namespace

Formula canonicalize(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::And:
    case FormulaKind::Or:
      return canonical_junction(f.kind(), f.operands());
    case FormulaKind::Not: {
      Formula g = canonicalize(f.operand());
      if (g.is(FormulaKind::True)) return Formula::falsity();
      if (g.is(FormulaKind::False)) return Formula::truth();
      if (g.is(FormulaKind::Not)) return g.operand();
      return Formula::negation(std::move(g));
    }
    case FormulaKind::Until: {
      Formula l = canonicalize(f.left());
      Formula r = canonicalize(f.right());
      if (r.is(FormulaKind::False)) return Formula::falsity();
      if (r.is(FormulaKind::True) && f.interval().lo == 0) return Formula::truth();
      // Time always moves on, so a delayed trivial obligation is met as well.
      if (r.is(FormulaKind::True) && l.is(FormulaKind::True)) return Formula::truth();
      if (l.is(FormulaKind::False)) return f.interval().lo == 0 ? r : Formula::falsity();
      return Formula::until(std::move(l), std::move(r), f.interval());
    }
    default:
      return f;
  }
}

Formula progress(const Formula& f, const std::set<std::string>& symbol) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
      return f;
    case FormulaKind::Atom:
      return symbol.count(f.name()) ? Formula::truth() : Formula::falsity();
    case FormulaKind::Not:
      return canonicalize(Formula::negation(progress(f.operand(), symbol)));
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<Formula> ops;
      for (const auto& c : f.operands()) ops.push_back(progress(c, symbol));
      return canonicalize(f.is(FormulaKind::And) ? Formula::conjunction(std::move(ops))
                                                 : Formula::disjunction(std::move(ops)));
    }
    case FormulaKind::Until: {
      const Interval& iv = f.interval();
      auto shifted = [&](int lo) {
        Interval next{lo, iv.hi ? std::optional<int>(*iv.hi - 1) : std::nullopt};
        return Formula::until(f.left(), f.right(), next);
      };
      Formula now_left = progress(f.left(), symbol);
      if (iv.lo > 0) {
        return canonicalize(Formula::conjunction(now_left, shifted(iv.lo - 1)));
      }
      Formula now_right = progress(f.right(), symbol);
      if (iv.hi && *iv.hi == 0) return now_right;
      Formula later = iv.hi ? shifted(0) : f;
      return canonicalize(
          Formula::disjunction(now_right, Formula::conjunction(now_left, std::move(later))));
    }
    case FormulaKind::DistEventually:
      throw Error("substitute distribution eventualities before progression: " + to_string(f));
  }
  return f;
}

Dta build_dta(const Formula& phi_d, const BuildOptions& options) {
  const Formula start = disjunctive_form(phi_d);
  const std::set<std::string> alphabet_set = atoms(start);
  if (alphabet_set.size() > kMaxPredicateAtoms) {
    throw ModelError("formula has more than 16 propositions");
  }

  std::vector<Formula> formulas{start};
  std::map<Formula, int> index{{start, 0}};
  std::vector<DtaEdge> edges;

  std::deque<int> frontier{0};
  while (!frontier.empty()) {
    const int loc = frontier.front();
    frontier.pop_front();
    const Formula f = formulas[loc];
    const auto vars_set = atoms(f);
    const std::vector<std::string> vars(vars_set.begin(), vars_set.end());
    const std::uint32_t count = 1u << vars.size();

    std::vector<int> target_order;
    std::map<int, std::vector<std::uint32_t>> by_target;
    for (std::uint32_t m = 0; m < count; ++m) {
      std::set<std::string> sigma;
      for (std::size_t i = 0; i < vars.size(); ++i) {
        if (m & (1u << i)) sigma.insert(vars[i]);
      }
      Formula next = disjunctive_form(progress(f, sigma));
      auto [it, inserted] = index.emplace(next, static_cast<int>(formulas.size()));
      if (inserted) {
        if (formulas.size() >= options.max_locations) {
          throw ModelError("progression automaton exceeds " + std::to_string(options.max_locations) +
                           " locations (at " + to_string(next) + ")");
        }
        formulas.push_back(next);
        frontier.push_back(it->second);
      }
      auto& bucket = by_target[it->second];
      if (bucket.empty()) target_order.push_back(it->second);
      bucket.push_back(m);
    }
    for (int target : target_order) {
      DtaEdge e;
      e.source = loc;
      e.target = target;
      e.symbol = minimize(by_target[target], vars);
      edges.push_back(std::move(e));
    }
  }

  Dta::Spec spec;
  spec.alphabet.assign(alphabet_set.begin(), alphabet_set.end());
  spec.initial = 0;
  int counter = 0;
  for (std::size_t i = 0; i < formulas.size(); ++i) {
    const Formula& g = formulas[i];
    if (g.is(FormulaKind::True)) {
      spec.locations.push_back("accept");
      spec.accepting.push_back(static_cast<int>(i));
    } else if (g.is(FormulaKind::False)) {
      spec.locations.push_back("reject");
      spec.reject = static_cast<int>(i);
    } else if (i == 0) {
      spec.locations.push_back("Init");
    } else {
      spec.locations.push_back("l" + std::to_string(++counter));
    }
  }
  spec.edges = std::move(edges);
  spec.location_formulas = formulas;
  return Dta(std::move(spec));
}

}  // namespace mitld
