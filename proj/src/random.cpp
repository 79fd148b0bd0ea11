#include "mitld/random.hpp"

#include <algorithm>
#include <cmath>

#include "mitld/error.hpp"

namespace mitld {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

constexpr double kZ95 = 1.959963984540054;

// P[X <= k] for X ~ Binomial(n, p), summed in log space.
double binomial_cdf(std::uint64_t k, std::uint64_t n, double p) {
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return k >= n ? 1.0 : 0.0;
  const double lp = std::log(p), lq = std::log1p(-p);
  const double lgn = std::lgamma(static_cast<double>(n) + 1.0);
  double sum = 0.0;
  for (std::uint64_t i = 0; i <= k; ++i) {
    const double di = static_cast<double>(i);
    sum += std::exp(lgn - std::lgamma(di + 1.0) - std::lgamma(static_cast<double>(n - i) + 1.0) +
                    di * lp + static_cast<double>(n - i) * lq);
  }
  return std::min(sum, 1.0);
}

// Largest p with P[X <= k] >= target (decreasing in p), by bisection.
double solve_upper(std::uint64_t k, std::uint64_t n, double target) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (binomial_cdf(k, n, mid) >= target) lo = mid; else hi = mid;
  }
  return lo;
}

}  // namespace

ProportionEstimate proportion_ci(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) throw Error("proportion needs at least one trial");
  if (successes > trials) throw Error("more successes than trials");
  ProportionEstimate e;
  e.successes = successes;
  e.trials = trials;
  const double n = static_cast<double>(trials);
  e.rate = static_cast<double>(successes) / n;
  if (successes < 10 || trials - successes < 10) {
    e.exact = true;
    e.hi = successes == trials ? 1.0 : solve_upper(successes, trials, 0.025);
    // Lower bound mirrors the upper bound on failures.
    e.lo = successes == 0 ? 0.0 : 1.0 - solve_upper(trials - successes, trials, 0.025);
    return e;
  }
  const double half = kZ95 * std::sqrt(e.rate * (1.0 - e.rate) / n);
  e.lo = std::max(0.0, e.rate - half);
  e.hi = std::min(1.0, e.rate + half);
  return e;
}

}  // namespace mitld
