#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mitld/product_mdp.hpp"
#include "mitld/random.hpp"

namespace mitld {

struct Trajectory {
  enum class End { Accept, Sink, Reject, StepLimit };
  std::vector<int> states;   ///< z0, z1, ...
  std::vector<int> actions;  ///< actions[i] leads from states[i] to states[i+1]
  End end = End::StepLimit;
};

std::string to_string(Trajectory::End e);

/// Samples from the product under `policy` with Rng(seed) until absorption
/// or `max_steps` transitions. Throws Error if the policy is undefined at a
/// visited non-absorbing state.
Trajectory rollout(const ProductMdp& m, const Policy& policy, std::uint64_t seed, int max_steps);

/// Fraction of n rollouts that end accepting; rollout i uses derive_seed(seed, i).
ProportionEstimate estimate_success(const ProductMdp& m, const Policy& policy, std::uint64_t n,
                                    std::uint64_t seed, int max_steps = 1000, unsigned workers = 1);

/// One line per robot turn and per environment turn, then an `end` line.
std::string render_trajectory(const ProductMdp& m, const Trajectory& t);

}  // namespace mitld
