#pragma once

#include <cstdint>
#include <random>

namespace mitld {

/// One splitmix64 output for `x`; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of stream `index` under master seed `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// mt19937_64 stream with a uniform double built from the top 53 bits.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Binomial proportion with a two-sided 95% interval.
struct ProportionEstimate {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double rate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool exact = false;  ///< Clopper-Pearson instead of the normal approximation
};

/// Normal approximation, switching to Clopper-Pearson when either count is below 10.
ProportionEstimate proportion_ci(std::uint64_t successes, std::uint64_t trials);

}  // namespace mitld
