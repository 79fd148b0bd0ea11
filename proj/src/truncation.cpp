#include <algorithm>
#include <map>

#include "mitld/error.hpp"
#include "mitld/formula.hpp"

namespace mitld {

namespace {

constexpr int kMaxScan = 10'000'000;

// Interval clocks of bounded untils; the same subformula in two branches
// shares its clock and keeps the larger point.
void collect_interval_clocks(const Formula& f, std::map<std::string, int>& out) {
  if (f.is(FormulaKind::Until) && f.interval().bounded()) {
    auto [it, inserted] = out.emplace("u:" + to_string(f), *f.interval().hi);
    if (!inserted) it->second = std::max(it->second, *f.interval().hi);
  }
  for (const auto& c : f.operands()) collect_interval_clocks(c, out);
}

int minimal_point(const DistributionSpec& d, double epsilon, const std::string& event) {
  if (d.kind() == DistributionSpec::Kind::FiniteTable && d.remainder() >= epsilon) {
    throw Error("event '" + event + "' (" + d.to_string() +
                ") cannot reach error bound " + format_double(epsilon) +
                "; minimum achievable bound is " + format_double(d.remainder()));
  }
  for (int T = 0; T <= kMaxScan; ++T) {
    if (d.tail(T) < epsilon) return T;
  }
  throw Error("no truncation point below " + std::to_string(kMaxScan) + " for event '" + event + "'");
}

TruncationVector assemble(const Formula& f, const EventSet& u, const std::map<std::string, int>& points) {
  std::map<std::string, TruncationEntry> entries;
  std::map<std::string, int> intervals;
  collect_interval_clocks(f, intervals);
  for (const auto& [clock, point] : intervals) entries[clock] = {clock, false, point};

  TruncationVector tv;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const int T = points.at(u.name(i));
    if (T < 0) throw Error("truncation point for '" + u.name(i) + "' must be non-negative");
    const std::string clock = TruncationVector::event_clock(u.name(i));
    entries[clock] = {clock, true, T};
    tv.epsilon_achieved = std::max(tv.epsilon_achieved, u.distribution(i).tail(T));
  }
  for (auto& [_, e] : entries) tv.entries.push_back(std::move(e));
  return tv;
}

}  // namespace

std::optional<int> TruncationVector::point(std::string_view clock) const {
  for (const auto& e : entries) {
    if (e.clock == clock) return e.point;
  }
  return std::nullopt;
}

std::string TruncationVector::to_string() const {
  std::string out;
  for (const auto& e : entries) {
    if (!out.empty()) out += ", ";
    out += e.clock + "=" + std::to_string(e.point);
  }
  return "{" + out + "} eps=" + format_double(epsilon_achieved);
}

TruncationVector truncation_vector(const Formula& f, const EventSet& u, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error("error bound must lie in (0,1), got " + format_double(epsilon));
  }
  std::map<std::string, int> points;
  for (std::size_t i = 0; i < u.size(); ++i) {
    points[u.name(i)] = minimal_point(u.distribution(i), epsilon, u.name(i));
  }
  return assemble(f, u, points);
}

TruncationVector truncation_vector_uniform(const Formula& f, const EventSet& u, int T) {
  std::map<std::string, int> points;
  for (const auto& name : u.names()) points[name] = T;
  return assemble(f, u, points);
}

TruncationVector truncation_vector_explicit(const Formula& f, const EventSet& u,
                                            const std::map<std::string, int>& points) {
  for (const auto& [name, _] : points) {
    if (!u.contains(name)) throw Error("truncation point for unknown event '" + name + "'");
  }
  for (const auto& name : u.names()) {
    if (!points.count(name)) throw Error("missing truncation point for event '" + name + "'");
  }
  return assemble(f, u, points);
}

}  // namespace mitld
