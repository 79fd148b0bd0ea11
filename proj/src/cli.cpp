#include "mitld/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mitld/error.hpp"
#include "mitld/random.hpp"
#include "mitld/simulator.hpp"

namespace mitld {

namespace {

constexpr double kDefaultEpsilon = 0.1;

std::string read_file(const std::string& path, int code) {
  std::ifstream in(path);
  if (!in) throw CliError(code, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string event_list(const EventSet& u) {
  std::string out;
  for (std::size_t i = 0; i < u.size(); ++i) {
    out += (out.empty() ? "" : " ") + u.name(i) + "=" + u.distribution(i).to_string();
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw CliError(exit_code::kFailure, "cannot write '" + path + "'");
  out << text;
}

}  // namespace

CompiledFormula compile_formula(const std::string& text) {
  Formula f = Formula::truth();
  try {
    f = parse_formula(text);
  } catch (const ParseError& e) {
    throw CliError(exit_code::kInput, std::string("formula:") + e.what());
  } catch (const Error& e) {
    throw CliError(exit_code::kInput, std::string("formula: ") + e.what());
  }
  EventSet u;
  try {
    u = EventSet::from_formula(f);
  } catch (const Error& e) {
    throw CliError(exit_code::kInput, e.what());
  }
  auto report = validate_mitld_minus(f, u);
  if (!report.ok()) throw CliError(exit_code::kInput, "formula outside the supported fragment: " + report.summary());
  return {f, u, substitute_dist(f)};
}

std::string read_formula_text(const std::optional<std::string>& text, const std::optional<std::string>& file) {
  if (text && file) throw CliError(exit_code::kInput, "give either --formula or --formula-file, not both");
  if (text) return *text;
  if (file) return read_file(*file, exit_code::kInput);
  throw CliError(exit_code::kInput, "a formula is required (--formula or --formula-file)");
}

std::uint64_t content_hash(const Formula& f, const std::string& environment, const TruncationVector& tv) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  };
  feed(to_string(canonicalize(f)));
  feed(environment);
  feed(tv.to_string());
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::map<std::string, int> parse_points(const std::string& text) {
  std::map<std::string, int> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw CliError(exit_code::kInput, "expected event=T, got '" + item + "'");
    try {
      std::size_t used = 0;
      const std::string num = item.substr(eq + 1);
      const int T = std::stoi(num, &used);
      if (used != num.size() || T < 0) throw std::invalid_argument(num);
      out[item.substr(0, eq)] = T;
    } catch (const std::exception&) {
      throw CliError(exit_code::kInput, "bad truncation point in '" + item + "'");
    }
  }
  return out;
}

std::unique_ptr<Pipeline> build_pipeline(const ModelOptions& options) {
  auto p = std::make_unique<Pipeline>();
  p->formula = compile_formula(options.formula);
  const EventSet& u = p->formula.events;

  if (options.game_path && options.grid_path) {
    throw CliError(exit_code::kInput, "give either --grid or --game, not both");
  }
  try {
    if (options.game_path) {
      p->environment_text = read_file(*options.game_path, exit_code::kGameLoad);
      p->game = std::make_unique<Game>(parse_game(p->environment_text));
    } else {
      GridWorldConfig cfg = options.grid_path ? GridWorldConfig::parse(read_file(*options.grid_path, exit_code::kGameLoad))
                                              : GridWorldConfig::defaults();
      if (cfg.events.empty()) {
        for (std::size_t i = 0; i < u.size(); ++i) cfg.events.insert_or_assign(u.name(i), u.distribution(i));
      }
      p->environment_text = cfg.to_string();
      p->game = std::make_unique<Game>(build_gridworld(cfg));
    }
  } catch (const CliError&) {
    throw;
  } catch (const Error& e) {
    throw CliError(exit_code::kGameLoad, std::string("environment: ") + e.what());
  }

  const int modes = options.epsilon.has_value() + options.uniform_T.has_value() + !options.points.empty();
  if (modes > 1) throw CliError(exit_code::kInput, "give only one of --epsilon, --uniform-T, --points");
  TruncationVector tv;
  try {
    if (options.uniform_T) {
      if (*options.uniform_T < 0) throw Error("--uniform-T must be non-negative");
      tv = truncation_vector_uniform(p->formula.formula, u, *options.uniform_T);
    } else if (!options.points.empty()) {
      tv = truncation_vector_explicit(p->formula.formula, u, options.points);
    } else {
      tv = truncation_vector(p->formula.formula, u, options.epsilon.value_or(kDefaultEpsilon));
    }
  } catch (const Error& e) {
    throw CliError(exit_code::kInput, std::string("truncation: ") + e.what());
  }

  try {
    StaModel model(build_dta(p->formula.phi_d), u);
    p->sta = std::make_unique<TruncatedSta>(std::move(model), tv);
    p->product = std::make_unique<ProductMdp>(build_product(*p->game, *p->sta));
  } catch (const Error& e) {
    throw CliError(exit_code::kProductBuild, std::string("product: ") + e.what());
  }
  p->hash = content_hash(p->formula.formula, p->environment_text, tv);
  return p;
}

// ---------------------------------------------------------------------------
// translate

std::vector<TimedWord> oracle_words(const std::vector<std::string>& events, const std::vector<std::string>& props,
                                    int count, int max_length, std::uint64_t seed) {
  std::vector<TimedWord> out;
  Rng rng(seed);
  for (int i = 0; i < count; ++i) {
    const int len = 1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(max_length));
    std::vector<int> when;
    for (std::size_t e = 0; e < events.size(); ++e) {
      // Half the words see the event, at a uniform position.
      when.push_back(rng.bernoulli(0.5) ? static_cast<int>(rng.next() % static_cast<std::uint64_t>(len)) : -1);
    }
    std::vector<std::set<std::string>> symbols(len);
    for (int t = 0; t < len; ++t) {
      for (std::size_t e = 0; e < events.size(); ++e) {
        if (when[e] == t) symbols[t].insert(events[e]);
      }
      for (const auto& p : props) {
        if (rng.bernoulli(0.3)) symbols[t].insert(p);
      }
    }
    out.push_back(TimedWord::unit(std::move(symbols)));
  }
  return out;
}

OracleReport oracle_compare(const Dta& a, const Dta& b, const std::vector<TimedWord>& words) {
  OracleReport r;
  for (const auto& w : words) {
    const bool x = run_dta(a, w).accepted;
    const bool y = run_dta(b, w).accepted;
    ++r.words;
    r.agree += x == y;
    r.accepted += x;
  }
  return r;
}

int cmd_translate(const TranslateArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const auto c = compile_formula(args.formula);
    const Dta d = build_dta(c.phi_d);
    std::size_t non_sink = 0;
    for (std::size_t l = 0; l < d.location_count(); ++l) non_sink += !d.is_reject(static_cast<int>(l));
    out << "formula " << to_string(c.formula) << "\n";
    out << "phi_d " << to_string(canonicalize(c.phi_d)) << "\n";
    out << "locations " << d.location_count() << " non-sink " << non_sink << "\n";
    for (std::size_t l = 0; l < d.location_count(); ++l) {
      const int li = static_cast<int>(l);
      out << "  " << d.location_name(li) << " = " << to_string(*d.location_formula(li)) << "\n";
    }
    write_dta(d, out);
    out << "sta events " << event_list(c.events) << "\n";
    out << "sta clocks";
    for (const auto& name : c.events.names()) out << " " << TruncationVector::event_clock(name);
    out << "\n";
    StaModel model(d, c.events);
    const StaState q0 = model.initial_state({});
    out << "sta initial (" << d.location_name(q0.location) << ", pending";
    for (const auto& name : c.events.names_of(q0.pending)) out << " " << name;
    out << ")\n";
    if (args.dot_path) {
      std::ostringstream dot;
      write_dta_dot(d, dot);
      write_text(*args.dot_path, dot.str());
    }
    if (args.dta_path) {
      std::ostringstream text;
      write_dta(d, text);
      write_text(*args.dta_path, text.str());
    }
    if (args.oracle_path) {
      const Dta oracle = load_dta(*args.oracle_path);
      std::vector<std::string> props;
      for (const auto& a : d.alphabet()) {
        if (!c.events.contains(a)) props.push_back(a);
      }
      auto words = oracle_words(c.events.names(), props, args.oracle_words, args.oracle_max_length, args.seed);
      auto r = oracle_compare(d, oracle, words);
      out << "oracle agreement " << r.agree << "/" << r.words << " (accepted " << r.accepted << ")\n";
      if (r.agree != r.words) {
        err << "error: automata disagree on " << (r.words - r.agree) << " words\n";
        return exit_code::kFailure;
      }
    }
    return exit_code::kOk;
  } catch (const CliError& e) {
    err << "error: " << e.what() << "\n";
    return e.code();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kInput;
  }
}

// ---------------------------------------------------------------------------
// plan

void write_policy(const Pipeline& p, const Policy& policy, const std::vector<double>& value, std::ostream& out) {
  const ProductMdp& m = *p.product;
  out << "# mitld policy\nhash " << hex64(p.hash) << "\nstates " << m.state_count() << "\n";
  for (std::size_t z = 0; z < m.state_count(); ++z) {
    const int a = policy.action[z];
    out << z << " " << (a < 0 ? "stay" : m.actions()[a]) << " " << fmt("%.17g", value[z]) << "\n";
  }
}

PolicyFile read_policy(std::istream& in) {
  PolicyFile f;
  std::size_t expected = 0;
  bool have_hash = false, have_states = false;
  int ln = 0;
  for (std::string line; std::getline(in, line);) {
    ++ln;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string first;
    ls >> first;
    if (first == "hash") {
      std::string h;
      ls >> h;
      try {
        f.hash = std::stoull(h, nullptr, 16);
      } catch (const std::exception&) {
        throw CliError(exit_code::kInput, "policy line " + std::to_string(ln) + ": bad hash");
      }
      have_hash = true;
    } else if (first == "states") {
      ls >> expected;
      have_states = true;
    } else {
      std::string action;
      double v = 0.0;
      if (!(ls >> action >> v) || first != std::to_string(f.actions.size())) {
        throw CliError(exit_code::kInput, "policy line " + std::to_string(ln) + ": expected '<state-id> <action> <value>'");
      }
      f.actions.push_back(action);
      f.values.push_back(v);
    }
  }
  if (!have_hash || !have_states) throw CliError(exit_code::kInput, "policy file lacks its header");
  if (f.actions.size() != expected) throw CliError(exit_code::kInput, "policy file is truncated");
  return f;
}

Policy policy_for(const Pipeline& p, const PolicyFile& file) {
  const ProductMdp& m = *p.product;
  if (file.hash != p.hash) {
    throw CliError(exit_code::kStalePolicy, "policy was computed for model " + hex64(file.hash) +
                                                ", current model is " + hex64(p.hash));
  }
  if (file.actions.size() != m.state_count()) {
    throw CliError(exit_code::kStalePolicy, "policy state count does not match the model");
  }
  Policy policy;
  policy.action.assign(m.state_count(), -1);
  for (std::size_t z = 0; z < m.state_count(); ++z) {
    if (file.actions[z] == "stay") continue;
    auto it = std::find(m.actions().begin(), m.actions().end(), file.actions[z]);
    if (it == m.actions().end()) throw CliError(exit_code::kStalePolicy, "unknown action '" + file.actions[z] + "'");
    policy.action[z] = static_cast<int>(it - m.actions().begin());
  }
  return policy;
}

int cmd_plan(const PlanArgs& args, std::ostream& out, std::ostream& err) {
  try {
    auto p = build_pipeline(args.model);
    const ProductMdp& m = *p->product;
    const auto solved = value_iteration(m, args.solve);
    const Policy policy = extract_policy(m, solved.value);
    const auto st = stats(m, args.stats_horizon);
    out << "value " << fmt("%.15g", satisfaction_probability(m, solved.value)) << "\n";
    out << "epsilon_achieved " << fmt("%.15g", p->truncation().epsilon_achieved) << "\n";
    out << "truncation " << p->truncation().to_string() << "\n";
    out << "states " << st.states << "\nedges " << st.edges << "\naccepting " << st.accepting << "\n";
    out << "sink_states " << st.sinks << "\nreject_states " << st.rejects << "\n";
    out << "sink_mass_uniform_h" << st.horizon << " " << fmt("%.15g", st.sink_mass) << "\n";
    out << "iterations " << solved.iterations << "\nresidual " << fmt("%.3g", solved.residual) << "\n";
    out << "hash " << hex64(p->hash) << "\n";
    if (m.state_count() > 0 && !m.absorbing(m.initial())) {
      out << "action0 " << m.actions()[policy.action[m.initial()]] << "\n";
    }
    if (args.policy_path) {
      std::ostringstream text;
      write_policy(*p, policy, solved.value, text);
      write_text(*args.policy_path, text.str());
    }
    if (args.value_path) {
      std::ostringstream text;
      text << "# mitld values\nhash " << hex64(p->hash) << "\nstates " << m.state_count() << "\n";
      for (std::size_t z = 0; z < m.state_count(); ++z) {
        text << z << " " << fmt("%.17g", solved.value[z]) << " " << m.render(static_cast<int>(z)) << "\n";
      }
      write_text(*args.value_path, text.str());
    }
    if (args.product_path) {
      std::ostringstream text;
      write_product(m, text);
      write_text(*args.product_path, text.str());
    }
    if (!solved.converged) {
      err << "error: value iteration stopped after " << solved.iterations << " iterations with residual "
          << fmt("%.3g", solved.residual) << "\n";
      return exit_code::kNonConvergence;
    }
    return exit_code::kOk;
  } catch (const CliError& e) {
    err << "error: " << e.what() << "\n";
    return e.code();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kFailure;
  }
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  try {
    auto p = build_pipeline(args.model);
    std::ifstream in(args.policy_path);
    if (!in) throw CliError(exit_code::kInput, "cannot open '" + args.policy_path + "'");
    const PolicyFile file = read_policy(in);
    const Policy policy = policy_for(*p, file);
    const ProductMdp& m = *p->product;
    if (args.n == 0) throw CliError(exit_code::kInput, "-n must be positive");

    std::unique_ptr<std::ofstream> log;
    if (args.log_path) {
      log = std::make_unique<std::ofstream>(*args.log_path);
      if (!*log) throw CliError(exit_code::kFailure, "cannot write '" + *args.log_path + "'");
    }
    const std::uint64_t logged = log ? args.n : std::min<std::uint64_t>(args.n, std::max(args.show, 0));
    for (std::uint64_t i = 0; i < logged; ++i) {
      const auto t = rollout(m, policy, derive_seed(args.seed, i), args.max_steps);
      const std::string text = "# trajectory " + std::to_string(i) + "\n" + render_trajectory(m, t);
      if (static_cast<int>(i) < args.show) out << text;
      if (log) *log << text;
    }
    const auto est = estimate_success(m, policy, args.n, args.seed, args.max_steps, args.threads);
    out << "success " << est.successes << "/" << est.trials << " rate " << fmt("%.6f", est.rate) << " ci95 ["
        << fmt("%.6f", est.lo) << ", " << fmt("%.6f", est.hi) << "]\n";
    out << "planned " << fmt("%.6f", file.values.at(m.initial())) << "\n";
    return exit_code::kOk;
  } catch (const CliError& e) {
    err << "error: " << e.what() << "\n";
    return e.code();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kFailure;
  }
}

// ---------------------------------------------------------------------------
// monitor

int cmd_monitor(const MonitorArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const auto c = compile_formula(args.formula);
    const TimedWord w = parse_word(read_file(args.word_path, exit_code::kInput));
    Dta d = args.dta_path ? load_dta(*args.dta_path) : build_dta(c.phi_d);
    StaModel model(std::move(d), c.events);
    const auto r = monitor(model, w);
    out << "verdict " << to_string(r.verdict) << "\n";
    out << "likelihood " << fmt("%.12g", r.likelihood) << "\n";
    out << "steps " << w.size() << "\n";
    return exit_code::kOk;
  } catch (const CliError& e) {
    err << "error: " << e.what() << "\n";
    return e.code();
  } catch (const ParseError& e) {
    err << "error: word:" << e.what() << "\n";
    return exit_code::kInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kInput;
  }
}

// ---------------------------------------------------------------------------
// bench

std::vector<BenchRow> run_bench(const BenchArgs& args) {
  std::vector<ModelOptions> runs;
  for (int T : args.uniform_T) {
    ModelOptions o = args.model;
    o.epsilon.reset();
    o.points.clear();
    o.uniform_T = T;
    runs.push_back(o);
  }
  for (double e : args.epsilons) {
    ModelOptions o = args.model;
    o.uniform_T.reset();
    o.points.clear();
    o.epsilon = e;
    runs.push_back(o);
  }
  if (runs.empty()) throw CliError(exit_code::kInput, "bench needs --T or --epsilons");
  std::vector<BenchRow> rows;
  for (const auto& o : runs) {
    const auto start = std::chrono::steady_clock::now();
    auto p = build_pipeline(o);
    const auto solved = value_iteration(*p->product, args.solve);
    if (!solved.converged) {
      throw CliError(exit_code::kNonConvergence, "value iteration did not converge");
    }
    const auto stop = std::chrono::steady_clock::now();
    BenchRow r;
    if (o.uniform_T) {
      r.T = std::to_string(*o.uniform_T);
    } else {
      for (const auto& e : p->truncation().entries) {
        if (e.event_clock) r.T += (r.T.empty() ? "" : ";") + e.clock.substr(2) + "=" + std::to_string(e.point);
      }
    }
    r.epsilon = p->truncation().epsilon_achieved;
    r.states = p->product->state_count();
    r.value = satisfaction_probability(*p->product, solved.value);
    r.iterations = solved.iterations;
    r.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    rows.push_back(r);
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = "T,epsilon_achieved,state_count,value,iterations,wall_ms\n";
  for (const auto& r : rows) {
    out += r.T + "," + fmt("%.15g", r.epsilon) + "," + std::to_string(r.states) + "," + fmt("%.15g", r.value) + "," +
           std::to_string(r.iterations) + "," + fmt("%.3f", r.wall_ms) + "\n";
  }
  return out;
}

int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
  try {
    out << bench_csv(run_bench(args));
    return exit_code::kOk;
  } catch (const CliError& e) {
    err << "error: " << e.what() << "\n";
    return e.code();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kFailure;
  }
}

}  // namespace mitld
