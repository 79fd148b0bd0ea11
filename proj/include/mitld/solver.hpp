#pragma once

#include <vector>

#include "mitld/product_mdp.hpp"

namespace mitld {

struct SolveOptions {
  double tolerance = 1e-10;
  int max_iterations = 100000;
  unsigned threads = 1;
  /// Every iterate, for the monotonicity checks; off by default.
  bool record_history = false;
};

struct SolveResult {
  std::vector<double> value;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  std::vector<std::vector<double>> history;
};

/// Jacobi value iteration for the maximal probability of reaching an
/// accepting state. V stays 0 on absorbing states.
SolveResult value_iteration(const ProductMdp& m, const SolveOptions& options = {});

/// Q(z, c) for the c-th choice of z.
double q_value(const ProductMdp& m, const std::vector<double>& value, int z, const ProductMdp::Choice& c);

/// Greedy policy; ties within 1e-12 go to the earliest action in the game's action order.
Policy extract_policy(const ProductMdp& m, const std::vector<double>& value);

/// Finite-horizon backward induction, independent of value_iteration.
std::vector<double> brute_force_reach(const ProductMdp& m, int horizon);

/// Reachability probability of a fixed policy, by iteration to `tolerance`.
std::vector<double> evaluate_policy(const ProductMdp& m, const Policy& policy, double tolerance = 1e-13,
                                    int max_iterations = 1000000);

/// Probability of satisfaction reported to users: 1 if z0 is accepting, else V(z0).
double satisfaction_probability(const ProductMdp& m, const std::vector<double>& value);

}  // namespace mitld
