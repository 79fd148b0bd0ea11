#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "mitld/error.hpp"
#include "mitld/game_model.hpp"

namespace mitld {

namespace {

std::vector<std::string> split_words(const std::string& s) {
  std::string t = s;
  for (char& c : t) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(t);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

// Contents of the first `{...}` at or after `from`; advances `from` past it.
std::set<std::string> braced(const std::string& line, std::size_t& from, int ln) {
  const auto open = line.find('{', from);
  const auto close = line.find('}', open == std::string::npos ? from : open);
  if (open == std::string::npos || close == std::string::npos) {
    throw ParseError("expected '{...}'", ln, static_cast<int>(from) + 1);
  }
  auto w = split_words(line.substr(open + 1, close - open - 1));
  from = close + 1;
  return {w.begin(), w.end()};
}

}  // namespace

Game parse_game(std::string_view text) {
  std::vector<std::string> events, actions, state_names;
  std::map<std::string, std::set<std::string>> labels;
  std::map<std::string, std::set<std::string>> pending;
  std::optional<std::string> init;
  struct Trans {
    std::string s, a, t;
    std::set<std::string> e;
    double p;
    int line;
  };
  std::vector<Trans> trans;

  std::istringstream in{std::string(text)};
  int ln = 0;
  for (std::string line; std::getline(in, line);) {
    ++ln;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    auto w = split_words(line);
    if (w.empty()) continue;
    const std::string& kw = w[0];
    if (kw == "events") {
      events.insert(events.end(), w.begin() + 1, w.end());
    } else if (kw == "actions") {
      actions.insert(actions.end(), w.begin() + 1, w.end());
    } else if (kw == "states") {
      state_names.insert(state_names.end(), w.begin() + 1, w.end());
    } else if (kw == "init") {
      if (w.size() != 2) throw ParseError("expected 'init <state>'", ln, 1);
      init = w[1];
    } else if (kw == "labels" || kw == "pending") {
      const auto b = line.find('{');
      auto head = split_words(line.substr(0, b == std::string::npos ? line.size() : b));
      if (head.size() != 2) throw ParseError("expected '" + kw + " <state> {...}'", ln, 1);
      std::size_t from = 0;
      auto set = braced(line, from, ln);
      (kw == "labels" ? labels : pending)[head[1]] = std::move(set);
    } else if (kw == "trans") {
      const auto b = line.find('{');
      auto head = split_words(line.substr(0, b == std::string::npos ? line.size() : b));
      if (head.size() != 3) throw ParseError("expected 'trans <state> <action> {e} -> <state> : p'", ln, 1);
      std::size_t from = 0;
      auto e = braced(line, from, ln);
      std::string rest = line.substr(from);
      const auto arrow = rest.find("->");
      const auto colon = rest.find(':');
      if (arrow == std::string::npos || colon == std::string::npos || colon < arrow) {
        throw ParseError("expected '-> <state> : p'", ln, static_cast<int>(from) + 1);
      }
      auto target = split_words(rest.substr(arrow + 2, colon - arrow - 2));
      auto prob = split_words(rest.substr(colon + 1));
      if (target.size() != 1 || prob.size() != 1) throw ParseError("malformed transition", ln, 1);
      double p = 0.0;
      try {
        std::size_t used = 0;
        p = std::stod(prob[0], &used);
        if (used != prob[0].size()) throw std::invalid_argument(prob[0]);
      } catch (const std::exception&) {
        throw ParseError("bad probability '" + prob[0] + "'", ln, static_cast<int>(from + colon) + 2);
      }
      trans.push_back({head[1], head[2], target[0], std::move(e), p, ln});
    } else {
      throw ParseError("unknown directive '" + kw + "'", ln, 1);
    }
  }

  std::sort(events.begin(), events.end());
  if (std::adjacent_find(events.begin(), events.end()) != events.end()) {
    throw ParseError("duplicate event name", 1, 1);
  }
  std::sort(actions.begin(), actions.end());
  if (std::adjacent_find(actions.begin(), actions.end()) != actions.end()) {
    throw ParseError("duplicate action name", 1, 1);
  }
  if (state_names.empty()) throw ParseError("missing 'states' line", 1, 1);

  Game::Spec spec;
  spec.events = events;
  spec.actions = actions;
  std::map<std::string, int> sidx;
  auto mask_of = [&events](const std::set<std::string>& names, int line) {
    std::uint32_t m = 0;
    for (const auto& n : names) {
      auto it = std::lower_bound(events.begin(), events.end(), n);
      if (it == events.end() || *it != n) throw ParseError("'" + n + "' is not an event", line, 1);
      m |= 1u << (it - events.begin());
    }
    return m;
  };
  const std::uint32_t all = events.empty() ? 0u : (1u << events.size()) - 1u;
  for (const auto& name : state_names) {
    if (!sidx.emplace(name, static_cast<int>(spec.states.size())).second) {
      throw ParseError("duplicate state '" + name + "'", 1, 1);
    }
    GameState st;
    st.robot = name;
    if (auto it = labels.find(name); it != labels.end()) st.labels = it->second;
    for (const auto& l : st.labels) {
      if (std::binary_search(events.begin(), events.end(), l)) st.env |= mask_of({l}, 1);
    }
    st.pending = all;
    if (auto it = pending.find(name); it != pending.end()) st.pending = mask_of(it->second, 1);
    spec.states.push_back(std::move(st));
  }
  for (const auto& [name, _] : labels) {
    if (!sidx.count(name)) throw ParseError("labels for unknown state '" + name + "'", 1, 1);
  }
  for (const auto& [name, _] : pending) {
    if (!sidx.count(name)) throw ParseError("pending set for unknown state '" + name + "'", 1, 1);
  }
  spec.initial = init ? -1 : 0;
  if (init) {
    auto it = sidx.find(*init);
    if (it == sidx.end()) throw ParseError("unknown initial state '" + *init + "'", 1, 1);
    spec.initial = it->second;
  }

  spec.rows.assign(spec.states.size(), std::vector<std::vector<Game::Row>>(actions.size()));
  for (const auto& t : trans) {
    auto s = sidx.find(t.s);
    auto d = sidx.find(t.t);
    if (s == sidx.end()) throw ParseError("unknown state '" + t.s + "'", t.line, 1);
    if (d == sidx.end()) throw ParseError("unknown state '" + t.t + "'", t.line, 1);
    auto a = std::lower_bound(actions.begin(), actions.end(), t.a);
    if (a == actions.end() || *a != t.a) throw ParseError("unknown action '" + t.a + "'", t.line, 1);
    const std::uint32_t e = mask_of(t.e, t.line);
    auto& rows = spec.rows[s->second][a - actions.begin()];
    auto row = std::find_if(rows.begin(), rows.end(), [e](const Game::Row& r) { return r.outcome == e; });
    if (row == rows.end()) {
      rows.push_back({e, {}});
      row = rows.end() - 1;
    }
    row->successors.emplace_back(d->second, t.p);
  }
  for (auto& per_state : spec.rows) {
    for (auto& rows : per_state) {
      std::sort(rows.begin(), rows.end(), [](const Game::Row& x, const Game::Row& y) { return x.outcome < y.outcome; });
    }
  }
  return Game(std::move(spec));
}

Game load_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_game(buf.str());
}

}  // namespace mitld
