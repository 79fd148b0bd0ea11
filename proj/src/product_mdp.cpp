#include "mitld/product_mdp.hpp"

#include <algorithm>
#include <deque>
#include <ostream>
#include <unordered_map>

#include "mitld/error.hpp"

namespace mitld {

namespace {

ProductKind classify(const StaModel& m, const StaState& h) {
  if (h.sink) return ProductKind::Sink;
  if (m.accepting(h)) return ProductKind::Accepting;
  if (m.rejecting(h)) return ProductKind::Reject;
  return ProductKind::Normal;
}

// Absorbing states forget their clocks so equal outcomes share one state.
StaState normalize(StaState h, ProductKind kind) {
  if (kind != ProductKind::Normal) {
    h.dta_clocks = ClockVector();
    h.event_clocks = ClockVector();
  }
  return h;
}

std::vector<int> product_key(int game, const StaState& h) {
  std::vector<int> k = h.key();
  k.push_back(game);
  return k;
}

const char* kind_text(ProductKind k) {
  switch (k) {
    case ProductKind::Normal: return "normal";
    case ProductKind::Accepting: return "accepting";
    case ProductKind::Sink: return "sink";
    case ProductKind::Reject: return "reject";
  }
  return "?";
}

}  // namespace

ProductMdp build_product(const Game& g, const TruncatedSta& mt) {
  const StaModel& model = mt.model();
  if (g.events() != model.events().names()) {
    std::string a, b;
    for (const auto& e : g.events()) a += " " + e;
    for (const auto& e : model.events().names()) b += " " + e;
    throw ModelError("event sets differ: game has {" + a + " } but the formula has {" + b + " }");
  }
  ProductMdp m;
  m.game_ = &g;
  m.sta_ = &mt;
  m.actions_ = g.actions();

  std::unordered_map<std::vector<int>, int, KeyHash> index;
  auto intern = [&](int s, StaState h) {
    const ProductKind kind = classify(model, h);
    h = normalize(std::move(h), kind);
    auto key = product_key(s, h);
    auto [it, inserted] = index.emplace(std::move(key), static_cast<int>(m.states_.size()));
    if (inserted) m.states_.push_back({s, std::move(h), kind});
    return it->second;
  };

  const int s0 = g.initial();
  StaState h0;
  try {
    h0 = model.initial_state(g.state(s0).labels);
  } catch (const Error& e) {
    throw ModelError(std::string("initial state: ") + e.what());
  }
  intern(s0, std::move(h0));

  std::vector<std::pair<int, double>> row;
  m.choice_begin_.push_back(0);
  for (std::size_t z = 0; z < m.states_.size(); ++z) {
    // Copy: interning may grow states_.
    const int s = m.states_[z].game;
    const StaState h = m.states_[z].spec;
    const bool absorbing = m.states_[z].kind != ProductKind::Normal;
    std::vector<std::pair<std::uint32_t, double>> outcomes;
    if (!absorbing) outcomes = env_outcome_dist(model, h);
    for (std::size_t a = 0; a < g.actions().size(); ++a) {
      if (!g.available(s, static_cast<int>(a))) continue;
      row.clear();
      if (absorbing) {
        row.emplace_back(static_cast<int>(z), 1.0);
      } else {
        for (const auto& [e, pe] : outcomes) {
          if (pe <= 0.0) continue;
          const auto* succ = g.kernel(s, static_cast<int>(a), e);
          if (!succ) throw ModelError("game has no row for " + g.render(s) + " and action " + g.actions()[a]);
          for (const auto& [s2, ps] : *succ) {
            const double p = ps * pe;
            if (p <= 0.0) continue;
            const SymbolMask sym = model.dta().symbol_mask(g.state(s2).labels);
            const int target = intern(s2, mt.successor(h, e, sym));
            auto it = std::find_if(row.begin(), row.end(), [target](const auto& q) { return q.first == target; });
            if (it == row.end()) row.emplace_back(target, p); else it->second += p;
          }
        }
      }
      const std::size_t begin = m.targets_.size();
      for (const auto& [t, p] : row) {
        m.targets_.push_back(t);
        m.probs_.push_back(p);
      }
      m.choices_.push_back({static_cast<int>(a), begin, m.targets_.size()});
    }
    m.choice_begin_.push_back(m.choices_.size());
  }
  return m;
}

std::string ProductMdp::render(int z) const {
  return "(" + game_->render(states_[z].game) + ", " + render_spec(z) + ")";
}

std::string ProductMdp::render_spec(int z) const {
  const auto& st = states_[z];
  std::string spec;
  const auto& h = st.spec;
  if (h.sink) {
    spec = "sink";
  } else {
    std::string clocks;
    auto add = [&clocks](const ClockVector& v) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!clocks.empty()) clocks += ", ";
        clocks += std::to_string(v[i]);
      }
    };
    add(h.event_clocks);
    add(h.dta_clocks);
    spec = sta_->model().dta().location_name(h.location) + ", (" + clocks + ")";
  }
  std::string pending = "{";
  for (const auto& n : game_->event_names(h.pending)) pending += (pending.size() > 1 ? ", " : "") + n;
  pending += "}";
  return "(" + spec + ", " + pending + ")";
}

int reward(const ProductMdp& m, int z, int z_next) {
  return !m.accepting(z) && m.accepting(z_next) ? 1 : 0;
}

ProductStats stats(const ProductMdp& m, int horizon, const Policy* policy) {
  ProductStats s;
  s.states = m.state_count();
  s.edges = m.edge_count();
  s.horizon = horizon;
  for (std::size_t z = 0; z < m.state_count(); ++z) {
    switch (m.state(static_cast<int>(z)).kind) {
      case ProductKind::Accepting: ++s.accepting; break;
      case ProductKind::Sink: ++s.sinks; break;
      case ProductKind::Reject: ++s.rejects; break;
      default: break;
    }
  }
  std::vector<double> d(m.state_count(), 0.0), next;
  d[m.initial()] = 1.0;
  for (int t = 0; t < horizon; ++t) {
    next.assign(d.size(), 0.0);
    for (std::size_t z = 0; z < d.size(); ++z) {
      if (d[z] == 0.0) continue;
      const int zi = static_cast<int>(z);
      if (m.absorbing(zi)) {
        next[z] += d[z];
        continue;
      }
      auto [b, e] = m.choices(zi);
      const auto n = static_cast<double>(e - b);
      for (auto c = b; c != e; ++c) {
        double w = 1.0 / n;
        if (policy) w = c->action == policy->action.at(z) ? 1.0 : 0.0;
        if (w == 0.0) continue;
        for (std::size_t k = c->begin; k < c->end; ++k) next[m.targets()[k]] += d[z] * w * m.probs()[k];
      }
    }
    d.swap(next);
  }
  for (std::size_t z = 0; z < d.size(); ++z) {
    if (m.state(static_cast<int>(z)).kind == ProductKind::Sink) s.sink_mass += d[z];
  }
  return s;
}

void write_product(const ProductMdp& m, std::ostream& out) {
  out << "states " << m.state_count() << "\nactions";
  for (const auto& a : m.actions()) out << " " << a;
  out << "\ninit " << m.initial() << "\n";
  for (std::size_t z = 0; z < m.state_count(); ++z) {
    const int zi = static_cast<int>(z);
    out << "state " << z << " " << kind_text(m.state(zi).kind) << " " << m.render(zi) << "\n";
  }
  for (std::size_t z = 0; z < m.state_count(); ++z) {
    auto [b, e] = m.choices(static_cast<int>(z));
    for (auto c = b; c != e; ++c) {
      for (std::size_t k = c->begin; k < c->end; ++k) {
        out << "trans " << z << " " << m.actions()[c->action] << " " << m.targets()[k] << " "
            << format_double(m.probs()[k]) << "\n";
      }
    }
  }
}

void write_product_dot(const ProductMdp& m, std::ostream& out) {
  out << "digraph product {\n";
  for (std::size_t z = 0; z < m.state_count(); ++z) {
    const int zi = static_cast<int>(z);
    std::string label = m.render(zi);
    std::string q;
    for (char c : label) {
      if (c == '"') q += '\\';
      q += c;
    }
    out << "  z" << z << " [label=\"" << z << ": " << q << "\", shape="
        << (m.accepting(zi) ? "doublecircle" : "box") << "];\n";
  }
  for (std::size_t z = 0; z < m.state_count(); ++z) {
    const int zi = static_cast<int>(z);
    if (m.absorbing(zi)) continue;
    auto [b, e] = m.choices(zi);
    for (auto c = b; c != e; ++c) {
      for (std::size_t k = c->begin; k < c->end; ++k) {
        out << "  z" << z << " -> z" << m.targets()[k] << " [label=\"" << m.actions()[c->action] << " "
            << format_double(m.probs()[k]) << "\"];\n";
      }
    }
  }
  out << "}\n";
}

}  // namespace mitld
