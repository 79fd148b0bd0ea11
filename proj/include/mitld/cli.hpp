#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mitld/formula.hpp"
#include "mitld/game_model.hpp"
#include "mitld/product_mdp.hpp"
#include "mitld/solver.hpp"
#include "mitld/stochastic_ta.hpp"
#include "mitld/timed_automata.hpp"

namespace mitld {

/// Stable process exit codes.
namespace exit_code {
constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kInput = 2;          ///< formula, word or option error
constexpr int kGameLoad = 3;
constexpr int kProductBuild = 4;
constexpr int kNonConvergence = 5;
constexpr int kStalePolicy = 6;
}  // namespace exit_code

/// Error carrying the exit code of the stage that failed.
class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& message) : std::runtime_error(message), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

/// Parsed, validated formula with its events and distribution-free form.
struct CompiledFormula {
  Formula formula = Formula::truth();
  EventSet events;
  Formula phi_d = Formula::truth();
};

/// Throws CliError(kInput) on syntax or fragment violations.
CompiledFormula compile_formula(const std::string& text);

/// Formula text from `--formula` or the contents of `--formula-file`.
std::string read_formula_text(const std::optional<std::string>& text, const std::optional<std::string>& file);

struct ModelOptions {
  std::string formula;
  std::optional<std::string> grid_path;  ///< neither set: default grid
  std::optional<std::string> game_path;
  std::optional<double> epsilon;
  std::optional<int> uniform_T;
  std::map<std::string, int> points;  ///< explicit per-event truncation
};

/// Everything from formula text to product MDP, with stable addresses.
struct Pipeline {
  CompiledFormula formula;
  std::string environment_text;
  std::unique_ptr<Game> game;
  std::unique_ptr<TruncatedSta> sta;
  std::unique_ptr<ProductMdp> product;
  std::uint64_t hash = 0;

  const TruncationVector& truncation() const { return sta->truncation(); }
};

/// Throws CliError with the stage's exit code.
std::unique_ptr<Pipeline> build_pipeline(const ModelOptions& options);

/// FNV-1a 64 over the canonical formula, environment text and truncation.
std::uint64_t content_hash(const Formula& f, const std::string& environment, const TruncationVector& tv);
std::string hex64(std::uint64_t v);

/// Parses `b1=3,b2=5`.
std::map<std::string, int> parse_points(const std::string& text);

// ---------------------------------------------------------------------------
// Commands. Data goes to `out`, diagnostics to `err`; the return value is the exit code.

struct TranslateArgs {
  std::string formula;
  std::optional<std::string> dot_path;
  std::optional<std::string> dta_path;
  std::optional<std::string> oracle_path;
  int oracle_words = 10000;
  int oracle_max_length = 20;
  std::uint64_t seed = 1;
};
int cmd_translate(const TranslateArgs& args, std::ostream& out, std::ostream& err);

/// Random unit-step words over the events and propositions of Example-1-like
/// formulas: every event at most once, other propositions with probability 0.3.
std::vector<TimedWord> oracle_words(const std::vector<std::string>& events, const std::vector<std::string>& props,
                                    int count, int max_length, std::uint64_t seed);

struct OracleReport {
  int words = 0;
  int agree = 0;
  int accepted = 0;
};
OracleReport oracle_compare(const Dta& a, const Dta& b, const std::vector<TimedWord>& words);

struct PlanArgs {
  ModelOptions model;
  SolveOptions solve;
  std::optional<std::string> policy_path;
  std::optional<std::string> value_path;
  std::optional<std::string> product_path;
  int stats_horizon = 20;
};
int cmd_plan(const PlanArgs& args, std::ostream& out, std::ostream& err);

struct PolicyFile {
  std::uint64_t hash = 0;
  std::vector<std::string> actions;  ///< "stay" on absorbing states
  std::vector<double> values;
};
void write_policy(const Pipeline& p, const Policy& policy, const std::vector<double>& value, std::ostream& out);
/// Throws CliError(kInput) on malformed text.
PolicyFile read_policy(std::istream& in);
/// Maps names back to action indices; throws CliError(kStalePolicy) on mismatch.
Policy policy_for(const Pipeline& p, const PolicyFile& file);

struct SimulateArgs {
  ModelOptions model;
  std::string policy_path;
  std::uint64_t n = 5;
  std::uint64_t seed = 1;
  int max_steps = 1000;
  unsigned threads = 1;
  std::optional<std::string> log_path;
  int show = 1;  ///< trajectories printed to `out`
};
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);

struct MonitorArgs {
  std::string formula;
  std::string word_path;
  std::optional<std::string> dta_path;  ///< explicit automaton instead of progression
};
int cmd_monitor(const MonitorArgs& args, std::ostream& out, std::ostream& err);

struct BenchArgs {
  ModelOptions model;
  std::vector<int> uniform_T;
  std::vector<double> epsilons;
  SolveOptions solve;
};

struct BenchRow {
  std::string T;
  double epsilon = 0.0;
  std::size_t states = 0;
  double value = 0.0;
  int iterations = 0;
  double wall_ms = 0.0;
};
/// One solved run per T or ε, in the given order.
std::vector<BenchRow> run_bench(const BenchArgs& args);
std::string bench_csv(const std::vector<BenchRow>& rows);
int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err);

}  // namespace mitld
