#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mitld/cli.hpp"

namespace {

struct ModelFlags {
  std::optional<std::string> formula;
  std::optional<std::string> formula_file;
  std::optional<std::string> grid;
  std::optional<std::string> game;
  std::optional<double> epsilon;
  std::optional<int> uniform_T;
  std::optional<std::string> points;
};

void add_formula_flags(CLI::App* cmd, ModelFlags& f) {
  cmd->add_option("--formula", f.formula, "formula text");
  cmd->add_option("--formula-file", f.formula_file, "file holding the formula");
}

void add_model_flags(CLI::App* cmd, ModelFlags& f, bool truncation = true) {
  add_formula_flags(cmd, f);
  cmd->add_option("--grid", f.grid, "grid-world config (default grid when no environment is given)");
  cmd->add_option("--game", f.game, "explicit game file");
  if (!truncation) return;
  cmd->add_option("--epsilon", f.epsilon, "truncation error budget (default 0.1)");
  cmd->add_option("--T", f.uniform_T, "uniform truncation point for every event clock");
  cmd->add_option("--points", f.points, "explicit truncation points, e.g. b1=3,b2=5");
}

void add_solve_flags(CLI::App* cmd, mitld::SolveOptions& s) {
  cmd->add_option("--tol", s.tolerance, "value iteration tolerance")->capture_default_str();
  cmd->add_option("--max-iter", s.max_iterations, "value iteration cap")->capture_default_str();
  cmd->add_option("--threads", s.threads, "solver threads")->capture_default_str();
}

mitld::ModelOptions model_options(const ModelFlags& f) {
  mitld::ModelOptions o;
  o.formula = mitld::read_formula_text(f.formula, f.formula_file);
  o.grid_path = f.grid;
  o.game_path = f.game;
  o.epsilon = f.epsilon;
  if (o.epsilon && !(*o.epsilon > 0.0 && *o.epsilon < 1.0)) {
    throw mitld::CliError(mitld::exit_code::kInput, "--epsilon must lie in (0,1)");
  }
  o.uniform_T = f.uniform_T;
  if (f.points) o.points = mitld::parse_points(*f.points);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Policy synthesis for temporal goals with distribution eventualities"};
  app.require_subcommand(1);

  ModelFlags mf;
  mitld::TranslateArgs tr;
  auto* translate = app.add_subcommand("translate", "build the automaton for a formula");
  add_formula_flags(translate, mf);
  translate->add_option("--dot", tr.dot_path, "write the automaton as DOT");
  translate->add_option("--dta", tr.dta_path, "write the automaton in DTA format");
  translate->add_option("--oracle", tr.oracle_path, "compare against a hand-written DTA");
  translate->add_option("--oracle-words", tr.oracle_words, "number of random words")->capture_default_str();
  translate->add_option("--oracle-length", tr.oracle_max_length, "maximum word length")->capture_default_str();
  translate->add_option("--seed", tr.seed, "word generator seed")->capture_default_str();

  mitld::PlanArgs pl;
  auto* plan = app.add_subcommand("plan", "build the product and solve for the optimal policy");
  add_model_flags(plan, mf);
  add_solve_flags(plan, pl.solve);
  plan->add_option("--policy", pl.policy_path, "write the policy dump");
  plan->add_option("--values", pl.value_path, "write the value dump");
  plan->add_option("--product", pl.product_path, "write the product MDP");
  plan->add_option("--stats-horizon", pl.stats_horizon, "horizon for the sink-mass statistic")->capture_default_str();

  mitld::SimulateArgs si;
  auto* simulate = app.add_subcommand("simulate", "roll out a stored policy");
  add_model_flags(simulate, mf);
  simulate->add_option("--policy", si.policy_path, "policy dump from `plan`")->required();
  simulate->add_option("-n", si.n, "number of rollouts")->capture_default_str();
  simulate->add_option("--seed", si.seed, "base seed")->capture_default_str();
  simulate->add_option("--max-steps", si.max_steps, "step cap per rollout")->capture_default_str();
  simulate->add_option("--threads", si.threads, "worker threads")->capture_default_str();
  simulate->add_option("--log", si.log_path, "write every trajectory to this file");
  simulate->add_option("--show", si.show, "trajectories printed to stdout")->capture_default_str();

  mitld::MonitorArgs mo;
  auto* mon = app.add_subcommand("monitor", "check a timed word against a formula");
  add_formula_flags(mon, mf);
  mon->add_option("--word", mo.word_path, "word file")->required();
  mon->add_option("--dta", mo.dta_path, "use this automaton instead of the progression one");

  mitld::BenchArgs be;
  auto* bench = app.add_subcommand("bench", "sweep truncation points and print CSV");
  add_model_flags(bench, mf, false);
  add_solve_flags(bench, be.solve);
  bench->add_option("--T", be.uniform_T, "uniform truncation points")->delimiter(',');
  bench->add_option("--epsilons", be.epsilons, "error budgets")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : mitld::exit_code::kInput;
  }

  try {
    if (*translate) {
      tr.formula = mitld::read_formula_text(mf.formula, mf.formula_file);
      return mitld::cmd_translate(tr, std::cout, std::cerr);
    }
    if (*plan) {
      pl.model = model_options(mf);
      return mitld::cmd_plan(pl, std::cout, std::cerr);
    }
    if (*simulate) {
      si.model = model_options(mf);
      return mitld::cmd_simulate(si, std::cout, std::cerr);
    }
    if (*mon) {
      mo.formula = mitld::read_formula_text(mf.formula, mf.formula_file);
      return mitld::cmd_monitor(mo, std::cout, std::cerr);
    }
    if (*bench) {
      be.model = model_options(mf);
      return mitld::cmd_bench(be, std::cout, std::cerr);
    }
  } catch (const mitld::CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code();
  }
  return mitld::exit_code::kFailure;
}
