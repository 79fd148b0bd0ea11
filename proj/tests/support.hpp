#pragma once

// Helpers shared by the unit tests and the acceptance binary. Nothing here
// calls into progression or the solver, so it can serve as an oracle.

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "mitld/formula.hpp"
#include "mitld/random.hpp"

namespace mitld::testing {

inline std::string data_path(const std::string& name) { return std::string(MITLD_DATA_DIR) + "/" + name; }

using Word = std::vector<std::set<std::string>>;

// Three-valued discrete-time semantics. Positions past the end of the word
// are unknown, so a finite prefix satisfies a formula only when every
// extension does.
enum class Truth { False, Unknown, True };

inline Truth operator&&(Truth a, Truth b) { return std::min(a, b); }
inline Truth operator||(Truth a, Truth b) { return std::max(a, b); }
inline Truth operator!(Truth a) { return static_cast<Truth>(2 - static_cast<int>(a)); }

inline Truth eval(const Formula& f, const Word& w, std::size_t i) {
  switch (f.kind()) {
    case FormulaKind::True: return Truth::True;
    case FormulaKind::False: return Truth::False;
    case FormulaKind::Atom:
      if (i >= w.size()) return Truth::Unknown;
      return w[i].count(f.name()) ? Truth::True : Truth::False;
    case FormulaKind::Not: return !eval(f.operand(), w, i);
    case FormulaKind::And: {
      Truth t = Truth::True;
      for (const auto& c : f.operands()) t = t && eval(c, w, i);
      return t;
    }
    case FormulaKind::Or: {
      Truth t = Truth::False;
      for (const auto& c : f.operands()) t = t || eval(c, w, i);
      return t;
    }
    case FormulaKind::Until:
    case FormulaKind::DistEventually: {
      const bool dist = f.is(FormulaKind::DistEventually);
      const Interval iv = dist ? Interval::unbounded() : f.interval();
      const Formula right = dist ? Formula::atom(f.name()) : f.right();
      const Formula left = dist ? Formula::truth() : f.left();
      // Every position from the end of the word on looks the same, so one
      // position past both the word and the lower bound stands for the rest.
      const std::size_t last =
          iv.hi ? i + static_cast<std::size_t>(*iv.hi) : std::max(w.size(), i + static_cast<std::size_t>(iv.lo)) + 1;
      Truth result = Truth::False;
      Truth prefix = Truth::True;
      for (std::size_t j = i; j <= last; ++j) {
        if (j - i >= static_cast<std::size_t>(iv.lo)) result = result || (prefix && eval(right, w, j));
        prefix = prefix && eval(left, w, j);
        if (prefix == Truth::False) break;
      }
      return result;
    }
  }
  return Truth::False;
}

inline bool holds(const Formula& f, const Word& w) { return eval(f, w, 0) == Truth::True; }

// Random co-safe formula over `props`: negation on atoms only, at most
// `budget` temporal operators, bounds up to `max_bound`, no singleton
// intervals.
class FormulaGen {
 public:
  FormulaGen(Rng& rng, std::vector<std::string> props, int max_bound = 5)
      : rng_(rng), props_(std::move(props)), max_bound_(max_bound) {}

  Formula make(int budget, int depth = 0) {
    const int pick = static_cast<int>(rng_.next() % (budget > 0 && depth < 4 ? 6 : 3));
    switch (pick) {
      case 0: return literal();
      case 1: return literal();
      case 2: return rng_.bernoulli(0.1) ? Formula::truth() : literal();
      case 3: {
        const int l = budget / 2;
        return rng_.bernoulli(0.5) ? Formula::conjunction(make(l, depth + 1), make(budget - l, depth + 1))
                                   : Formula::disjunction(make(l, depth + 1), make(budget - l, depth + 1));
      }
      case 4: return Formula::eventually(make(budget - 1, depth + 1), interval());
      default: {
        const int l = (budget - 1) / 2;
        return Formula::until(make(l, depth + 1), make(budget - 1 - l, depth + 1), interval());
      }
    }
  }

 private:
  Formula literal() {
    Formula a = Formula::atom(props_[rng_.next() % props_.size()]);
    return rng_.bernoulli(0.3) ? Formula::negation(a) : a;
  }

  Interval interval() {
    if (rng_.bernoulli(0.25)) return Interval::unbounded();
    const int lo = static_cast<int>(rng_.next() % static_cast<std::uint64_t>(max_bound_ + 1));
    if (lo == 0) return Interval::closed(0, 1 + static_cast<int>(rng_.next() % static_cast<std::uint64_t>(max_bound_)));
    if (lo == max_bound_) return Interval::closed(lo - 1, lo);
    return Interval::closed(lo, lo + 1 + static_cast<int>(rng_.next() % static_cast<std::uint64_t>(max_bound_ - lo)));
  }

  Rng& rng_;
  std::vector<std::string> props_;
  int max_bound_;
};

inline Word random_word(Rng& rng, const std::vector<std::string>& props, int max_length, double q = 0.5) {
  const int len = 1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(max_length));
  Word w(len);
  for (auto& s : w) {
    for (const auto& p : props) {
      if (rng.bernoulli(q)) s.insert(p);
    }
  }
  return w;
}

// Like random_word, but every event in `events` occurs at most once.
inline Word event_word(Rng& rng, const std::vector<std::string>& events, const std::vector<std::string>& props,
                       int max_length, double q = 0.3) {
  Word w = random_word(rng, props, max_length, q);
  for (const auto& e : events) {
    if (rng.bernoulli(0.5)) w[rng.next() % w.size()].insert(e);
  }
  return w;
}

// Closed-form geometric first-occurrence mass, support starting at 1.
inline double geometric_mass(double p, int k) { return k < 1 ? 0.0 : std::pow(1.0 - p, k - 1) * p; }

}  // namespace mitld::testing
