#include <cctype>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "mitld/error.hpp"
#include "mitld/timed_automata.hpp"

namespace mitld {

namespace {

struct Line {
  std::string text;
  int number;
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> out;
  int n = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++n;
    std::string line(text.substr(pos, end - pos));
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back({std::move(line), n});
    if (end == text.size()) break;
    pos = end + 1;
  }
  return out;
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

// Recursive-descent reader for clock guards such as `x3 > 3 && x4 <= 3`.
class GuardParser {
 public:
  GuardParser(std::string_view text, const std::vector<std::string>& clocks, int line, int col0)
      : s_(text), clocks_(clocks), line_(line), col0_(col0) {}

  ClockConstraint parse() {
    ClockConstraint c = disjunction();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "' in guard");
    return c;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line_, col0_ + static_cast<int>(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(std::string_view tok) {
    skip();
    if (s_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  std::string ident() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
    if (start == pos_) fail("expected clock name");
    return std::string(s_.substr(start, pos_ - start));
  }
  int clock_id(const std::string& name) {
    for (std::size_t i = 0; i < clocks_.size(); ++i) {
      if (clocks_[i] == name) return static_cast<int>(i);
    }
    fail("unknown clock '" + name + "'");
  }
  CompareOp op() {
    skip();
    if (eat("<=")) return CompareOp::Le;
    if (eat(">=")) return CompareOp::Ge;
    if (eat("!=")) return CompareOp::Ne;
    if (eat("==") || eat("=")) return CompareOp::Eq;
    if (eat("<")) return CompareOp::Lt;
    if (eat(">")) return CompareOp::Gt;
    fail("expected comparison operator");
  }
  int integer() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected non-negative integer constant");
    return std::stoi(std::string(s_.substr(start, pos_ - start)));
  }
  ClockConstraint disjunction() {
    ClockConstraint c = conjunction();
    while (eat("||")) c = ClockConstraint::disjunction(c, conjunction());
    return c;
  }
  ClockConstraint conjunction() {
    ClockConstraint c = primary();
    while (eat("&&")) c = ClockConstraint::conjunction(c, primary());
    return c;
  }
  ClockConstraint primary() {
    if (eat("(")) {
      ClockConstraint c = disjunction();
      if (!eat(")")) fail("expected ')'");
      return c;
    }
    skip();
    const std::size_t save = pos_;
    const std::string name = ident();
    if (name == "true") return ClockConstraint::truth();
    if (name == "false") return ClockConstraint::falsity();
    pos_ = save;
    const int x = clock_id(ident());
    if (eat("-")) {
      const int y = clock_id(ident());
      const CompareOp o = op();
      return ClockConstraint::diff_compare(x, y, o, integer());
    }
    const CompareOp o = op();
    return ClockConstraint::compare(x, o, integer());
  }

  std::string_view s_;
  const std::vector<std::string>& clocks_;
  int line_;
  int col0_;
  std::size_t pos_ = 0;
};

bool propositional(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
    case FormulaKind::Atom:
      return true;
    case FormulaKind::Not:
    case FormulaKind::And:
    case FormulaKind::Or:
      return std::all_of(f.operands().begin(), f.operands().end(), propositional);
    default:
      return false;
  }
}

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string out;
  for (const auto& s : v) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

}  // namespace

Dta parse_dta(std::string_view text) {
  Dta::Spec spec;
  std::map<std::string, int> loc_index;
  std::optional<std::string> init_name;
  std::optional<std::string> reject_name;
  std::vector<std::pair<std::string, int>> accepting_names;
  bool have_locations = false;

  struct PendingEdge {
    std::string source, target;
    std::string guard, predicate;
    std::vector<std::string> resets;
    int line, guard_col;
  };
  struct PendingInvariant {
    std::string location, guard;
    int line, guard_col;
  };
  std::vector<PendingEdge> pending_edges;
  std::vector<PendingInvariant> pending_invariants;

  for (const auto& [line, ln] : split_lines(text)) {
    auto w = words(line);
    if (w.empty()) continue;
    const std::string& kw = w[0];
    if (kw == "locations") {
      have_locations = true;
      for (std::size_t i = 1; i < w.size(); ++i) {
        if (!loc_index.emplace(w[i], static_cast<int>(spec.locations.size())).second) {
          throw ParseError("duplicate location '" + w[i] + "'", ln, 1);
        }
        spec.locations.push_back(w[i]);
      }
    } else if (kw == "clocks") {
      spec.clocks.insert(spec.clocks.end(), w.begin() + 1, w.end());
    } else if (kw == "alphabet") {
      spec.alphabet.insert(spec.alphabet.end(), w.begin() + 1, w.end());
    } else if (kw == "init") {
      if (w.size() != 2) throw ParseError("expected 'init <location>'", ln, 1);
      init_name = w[1];
    } else if (kw == "reject") {
      if (w.size() != 2) throw ParseError("expected 'reject <location>'", ln, 1);
      reject_name = w[1];
    } else if (kw == "accepting") {
      for (std::size_t i = 1; i < w.size(); ++i) accepting_names.emplace_back(w[i], ln);
    } else if (kw == "invariant" || kw == "edge") {
      const std::size_t lb = line.find('[');
      const std::size_t rb = line.find(']', lb == std::string::npos ? 0 : lb);
      if (lb == std::string::npos || rb == std::string::npos) {
        throw ParseError("expected '[guard]'", ln, static_cast<int>(line.size()) + 1);
      }
      auto head = words(line.substr(0, lb));
      if (head.size() != 2) throw ParseError("expected '" + kw + " <location> [guard]'", ln, 1);
      std::string guard = line.substr(lb + 1, rb - lb - 1);
      if (kw == "invariant") {
        if (!words(line.substr(rb + 1)).empty()) {
          throw ParseError("trailing text after invariant", ln, static_cast<int>(rb) + 2);
        }
        pending_invariants.push_back({head[1], guard, ln, static_cast<int>(lb) + 2});
        continue;
      }
      const std::size_t lc = line.find('{', rb);
      const std::size_t rc = line.find('}', lc == std::string::npos ? rb : lc);
      if (lc == std::string::npos || rc == std::string::npos) {
        throw ParseError("expected '{predicate}'", ln, static_cast<int>(rb) + 2);
      }
      if (!words(line.substr(rb + 1, lc - rb - 1)).empty()) {
        throw ParseError("unexpected text before predicate", ln, static_cast<int>(rb) + 2);
      }
      std::string rest = line.substr(rc + 1);
      const std::size_t arrow = rest.find("->");
      if (arrow == std::string::npos || !words(rest.substr(0, arrow)).empty()) {
        throw ParseError("expected '->'", ln, static_cast<int>(rc) + 2);
      }
      rest = rest.substr(arrow + 2);
      std::vector<std::string> resets;
      if (const std::size_t r = rest.find("reset{"); r != std::string::npos) {
        const std::size_t close = rest.find('}', r);
        if (close == std::string::npos) throw ParseError("unterminated reset{...}", ln, 1);
        std::string inner = rest.substr(r + 6, close - r - 6);
        for (char& c : inner) {
          if (c == ',') c = ' ';
        }
        resets = words(inner);
        if (!words(rest.substr(close + 1)).empty()) {
          throw ParseError("trailing text after reset set", ln, 1);
        }
        rest = rest.substr(0, r);
      }
      auto target = words(rest);
      if (target.size() != 1) throw ParseError("expected one target location", ln, 1);
      pending_edges.push_back({head[1], target[0], guard, line.substr(lc + 1, rc - lc - 1),
                               std::move(resets), ln, static_cast<int>(lb) + 2});
    } else {
      throw ParseError("unknown directive '" + kw + "'", ln, 1);
    }
  }

  if (!have_locations) throw ParseError("missing 'locations' line", 1, 1);
  if (!init_name) throw ParseError("missing 'init' line", 1, 1);
  if (!reject_name) {
    reject_name = "sink";
    if (!loc_index.count("sink")) {
      loc_index.emplace("sink", static_cast<int>(spec.locations.size()));
      spec.locations.push_back("sink");
    }
  }

  auto loc = [&loc_index](const std::string& name, int ln) {
    auto it = loc_index.find(name);
    if (it == loc_index.end()) throw ParseError("dangling location '" + name + "'", ln, 1);
    return it->second;
  };
  spec.initial = loc(*init_name, 1);
  spec.reject = loc(*reject_name, 1);
  for (const auto& [name, ln] : accepting_names) spec.accepting.push_back(loc(name, ln));

  for (const auto& inv : pending_invariants) {
    spec.invariants.emplace_back(loc(inv.location, inv.line),
                                 GuardParser(inv.guard, spec.clocks, inv.line, inv.guard_col).parse());
  }
  for (const auto& pe : pending_edges) {
    DtaEdge e;
    e.source = loc(pe.source, pe.line);
    e.target = loc(pe.target, pe.line);
    e.guard = GuardParser(pe.guard, spec.clocks, pe.line, pe.guard_col).parse();
    try {
      e.symbol = parse_formula(pe.predicate);
    } catch (const ParseError& err) {
      throw ParseError(std::string("bad predicate: ") + err.what(), pe.line, 1);
    }
    if (!propositional(e.symbol)) {
      throw ParseError("edge predicate must be propositional", pe.line, 1);
    }
    for (const auto& r : pe.resets) {
      auto it = std::find(spec.clocks.begin(), spec.clocks.end(), r);
      if (it == spec.clocks.end()) throw ParseError("unknown clock '" + r + "' in reset", pe.line, 1);
      e.resets.push_back(static_cast<int>(it - spec.clocks.begin()));
    }
    spec.edges.push_back(std::move(e));
  }
  return Dta(std::move(spec));
}

Dta load_dta(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_dta(buf.str());
}

void write_dta(const Dta& d, std::ostream& out) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < d.location_count(); ++i) names.push_back(d.location_name(static_cast<int>(i)));
  out << "locations " << join(names, " ") << "\n";
  if (!d.clocks().empty()) out << "clocks " << join(d.clocks(), " ") << "\n";
  if (!d.alphabet().empty()) out << "alphabet " << join(d.alphabet(), " ") << "\n";
  out << "init " << d.location_name(d.initial()) << "\n";
  std::vector<std::string> acc;
  for (std::size_t i = 0; i < d.location_count(); ++i) {
    if (d.accepting(static_cast<int>(i))) acc.push_back(names[i]);
  }
  out << "accepting" << (acc.empty() ? "" : " ") << join(acc, " ") << "\n";
  if (d.reject()) out << "reject " << d.location_name(*d.reject()) << "\n";
  for (std::size_t i = 0; i < d.location_count(); ++i) {
    const auto& inv = d.invariant(static_cast<int>(i));
    if (inv.kind() != ClockConstraint::Kind::True) {
      out << "invariant " << names[i] << " [" << to_string(inv, d.clocks()) << "]\n";
    }
  }
  for (const auto& e : d.edges()) {
    out << "edge " << names[e.source] << " [" << to_string(e.guard, d.clocks()) << "] {"
        << to_string(e.symbol) << "} -> " << names[e.target];
    if (!e.resets.empty()) {
      std::vector<std::string> r;
      for (int c : e.resets) r.push_back(d.clocks()[c]);
      out << " reset{" << join(r, ",") << "}";
    }
    out << "\n";
  }
}

void write_dta_dot(const Dta& d, std::ostream& out) {
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') q += '\\';
      q += c;
    }
    return q + "\"";
  };
  out << "digraph dta {\n  rankdir=LR;\n  __start [shape=point];\n";
  for (std::size_t i = 0; i < d.location_count(); ++i) {
    const int l = static_cast<int>(i);
    std::string label = d.location_name(l);
    if (d.progression_built() && d.location_formula(l)) {
      const auto& f = *d.location_formula(l);
      if (!f.is(FormulaKind::True) && !f.is(FormulaKind::False)) label += "\\n" + to_string(f);
    }
    out << "  n" << i << " [label=" << quote(label) << ", shape="
        << (d.accepting(l) ? "doublecircle" : "circle")
        << (d.is_reject(l) ? ", style=dashed" : "") << "];\n";
  }
  out << "  __start -> n" << d.initial() << ";\n";
  for (const auto& e : d.edges()) {
    std::string label = to_string(e.symbol);
    if (e.guard.kind() != ClockConstraint::Kind::True) label = to_string(e.guard, d.clocks()) + ", " + label;
    if (!e.resets.empty()) {
      std::vector<std::string> r;
      for (int c : e.resets) r.push_back(d.clocks()[c]);
      label += " / " + join(r, ",") + ":=0";
    }
    out << "  n" << e.source << " -> n" << e.target << " [label=" << quote(label) << "];\n";
  }
  out << "}\n";
}

TimedWord parse_word(std::string_view text) {
  TimedWord w;
  for (const auto& [line, ln] : split_lines(text)) {
    std::string cleaned = line;
    for (char& c : cleaned) {
      if (c == ',' || c == '{' || c == '}') c = ' ';
    }
    auto tokens = words(cleaned);
    if (tokens.empty()) continue;
    TimedWord::Entry e;
    try {
      std::size_t used = 0;
      e.time = std::stoi(tokens[0], &used);
      if (used != tokens[0].size() || e.time < 0) throw std::invalid_argument("time");
    } catch (const std::exception&) {
      throw ParseError("expected a non-negative integer timestamp", ln, 1);
    }
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      if (!std::all_of(tokens[i].begin(), tokens[i].end(), ident_char)) {
        throw ParseError("bad proposition '" + tokens[i] + "'", ln, 1);
      }
      e.symbol.insert(tokens[i]);
    }
    if (!w.entries.empty() && e.time <= w.entries.back().time) {
      throw ParseError("timestamps must increase strictly", ln, 1);
    }
    if (w.entries.empty() && e.time != 0) throw ParseError("first timestamp must be 0", ln, 1);
    w.entries.push_back(std::move(e));
  }
  return w;
}

}  // namespace mitld
