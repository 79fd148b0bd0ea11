#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "mitld/error.hpp"
#include "mitld/game_model.hpp"

namespace mitld {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

int parse_int(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("expected an integer, got '" + s + "'", line, 1);
  }
}

double parse_real(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("expected a number, got '" + s + "'", line, 1);
  }
}

Cell parse_cell(const std::string& v, int line) {
  std::string s = v;
  if (s.size() < 2 || s.front() != '(' || s.back() != ')') {
    throw ParseError("expected a cell '(x,y)', got '" + v + "'", line, 1);
  }
  s = s.substr(1, s.size() - 2);
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw ParseError("expected a cell '(x,y)', got '" + v + "'", line, 1);
  return {parse_int(trim(s.substr(0, comma)), line), parse_int(trim(s.substr(comma + 1)), line)};
}

std::string cell_text(Cell c) { return "(" + std::to_string(c.x) + ", " + std::to_string(c.y) + ")"; }

struct Move {
  int dx, dy;
};

}  // namespace

GridWorldConfig GridWorldConfig::defaults() {
  GridWorldConfig c;
  c.stations = {{"b3", {1, 2}}, {"b4", {3, 0}}};
  return c;
}

void GridWorldConfig::validate() const {
  if (width <= 0 || height <= 0) throw Error("grid dimensions must be positive");
  auto inside = [this](Cell c) { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; };
  if (!inside(start)) throw Error("start cell " + cell_text(start) + " lies outside the grid");
  for (const auto& [name, cell] : stations) {
    if (!inside(cell)) throw Error("station '" + name + "' at " + cell_text(cell) + " lies outside the grid");
    if (events.count(name)) throw Error("'" + name + "' cannot be both a station and an event");
  }
  for (double p : {slip_forward, slip_left, slip_right}) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error("slip probabilities must lie in [0,1]");
  }
  if (std::abs(slip_forward + slip_left + slip_right - 1.0) > 1e-12) {
    throw Error("slip probabilities must sum to 1");
  }
  if (events.size() > 16) throw Error("at most 16 external events are supported");
}

GridWorldConfig GridWorldConfig::parse(std::string_view text) {
  GridWorldConfig c = defaults();
  bool custom_stations = false;
  std::istringstream in{std::string(text)};
  int ln = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++ln;
    if (auto h = raw.find('#'); h != std::string::npos) raw.resize(h);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", ln, 1);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const int vcol = static_cast<int>(raw.find(value.empty() ? "=" : value)) + 1;
    if (key == "width") {
      c.width = parse_int(value, ln);
    } else if (key == "height") {
      c.height = parse_int(value, ln);
    } else if (key == "start") {
      c.start = parse_cell(value, ln);
    } else if (key.rfind("stations.", 0) == 0) {
      if (!custom_stations) c.stations.clear();
      custom_stations = true;
      c.stations[key.substr(9)] = parse_cell(value, ln);
    } else if (key.rfind("events.", 0) == 0) {
      try {
        c.events.insert_or_assign(key.substr(7), DistributionSpec::parse(value));
      } catch (const Error& e) {
        throw ParseError(e.what(), ln, vcol);
      }
    } else if (key == "slip") {
      std::vector<double> parts;
      std::stringstream ss(value);
      for (std::string p; std::getline(ss, p, ',');) parts.push_back(parse_real(trim(p), ln));
      if (parts.size() != 3) throw ParseError("slip needs three values f,l,r", ln, vcol);
      c.slip_forward = parts[0];
      c.slip_left = parts[1];
      c.slip_right = parts[2];
    } else {
      throw ParseError("unknown key '" + key + "'", ln, 1);
    }
  }
  try {
    c.validate();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), ln, 1);
  }
  return c;
}

GridWorldConfig GridWorldConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string GridWorldConfig::to_string() const {
  std::ostringstream out;
  out << "width = " << width << "\nheight = " << height << "\nstart = (" << start.x << "," << start.y << ")\n";
  for (const auto& [name, cell] : stations) out << "stations." << name << " = (" << cell.x << "," << cell.y << ")\n";
  for (const auto& [name, dist] : events) out << "events." << name << " = " << dist.to_string() << "\n";
  out << "slip = " << format_double(slip_forward) << "," << format_double(slip_left) << ","
      << format_double(slip_right) << "\n";
  return out.str();
}

Game build_gridworld(const GridWorldConfig& cfg) {
  cfg.validate();
  Game::Spec spec;
  for (const auto& [name, _] : cfg.events) spec.events.push_back(name);
  spec.actions = {"N", "W", "E", "S"};
  const std::vector<Move> dirs = {{0, 1}, {-1, 0}, {1, 0}, {0, -1}};
  const std::uint32_t all = spec.events.empty() ? 0u : (1u << spec.events.size()) - 1u;
  const int cells = cfg.width * cfg.height;
  auto cell_id = [&cfg](Cell c) { return c.y * cfg.width + c.x; };

  // State index by (pending, env, cell); env and pending are disjoint.
  std::map<std::tuple<std::uint32_t, std::uint32_t, int>, int> index;
  for (std::uint32_t y = all + 1; y-- > 0;) {
    if (y & ~all) continue;
    for (std::uint32_t e = 0; e <= all; ++e) {
      if (e & y) continue;
      for (int c = 0; c < cells; ++c) {
        GameState st;
        const Cell cell{c % cfg.width, c / cfg.width};
        st.robot = cell_text(cell);
        st.env = e;
        st.pending = y;
        for (const auto& [name, at] : cfg.stations) {
          if (at == cell) st.labels.insert(name);
        }
        for (std::size_t i = 0; i < spec.events.size(); ++i) {
          if (e & (1u << i)) st.labels.insert(spec.events[i]);
        }
        index[{y, e, c}] = static_cast<int>(spec.states.size());
        spec.states.push_back(std::move(st));
      }
    }
  }
  spec.initial = index.at({all, 0u, cell_id(cfg.start)});

  spec.rows.resize(spec.states.size());
  for (const auto& [key, s] : index) {
    const auto [y, env, c] = key;
    const Cell here{c % cfg.width, c / cfg.width};
    auto& per_action = spec.rows[s];
    per_action.resize(spec.actions.size());
    for (std::size_t a = 0; a < dirs.size(); ++a) {
      const Move f = dirs[a];
      const std::vector<std::pair<Move, double>> outcomes = {
          {f, cfg.slip_forward}, {{-f.dy, f.dx}, cfg.slip_left}, {{f.dy, -f.dx}, cfg.slip_right}};
      std::vector<std::pair<int, double>> motion;
      for (const auto& [m, p] : outcomes) {
        if (p == 0.0) continue;
        Cell next{here.x + m.dx, here.y + m.dy};
        if (next.x < 0 || next.y < 0 || next.x >= cfg.width || next.y >= cfg.height) next = here;
        const int id = cell_id(next);
        auto it = std::find_if(motion.begin(), motion.end(), [id](const auto& q) { return q.first == id; });
        if (it == motion.end()) motion.emplace_back(id, p); else it->second += p;
      }
      std::uint32_t e = y;
      std::vector<std::uint32_t> subsets;
      while (true) {
        subsets.push_back(e);
        if (e == 0) break;
        e = (e - 1) & y;
      }
      std::reverse(subsets.begin(), subsets.end());
      for (std::uint32_t out : subsets) {
        Game::Row row;
        row.outcome = out;
        for (const auto& [cid, p] : motion) row.successors.emplace_back(index.at({y & ~out, out, cid}), p);
        per_action[a].push_back(std::move(row));
      }
    }
  }
  return Game(std::move(spec));
}

}  // namespace mitld
