#include "mitld/distribution.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "mitld/error.hpp"

namespace mitld {

namespace {

constexpr double kMassSlack = 1e-12;

double parse_probability(std::string_view text, std::string_view what) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error("invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

int parse_step(std::string_view text) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error("invalid step '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) {
    throw std::logic_error("format_double: buffer too small");
  }
  return std::string(buf, ptr);
}

DistributionSpec DistributionSpec::geometric(double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw Error("geometric parameter must lie in (0,1], got " + format_double(p));
  }
  DistributionSpec d;
  d.kind_ = Kind::Geometric;
  d.p_ = p;
  return d;
}

DistributionSpec DistributionSpec::table(std::vector<std::pair<int, double>> pmf) {
  if (pmf.empty()) {
    throw Error("table distribution needs at least one entry");
  }
  std::sort(pmf.begin(), pmf.end());
  double total = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    const auto& [k, m] = pmf[i];
    if (k < 1) {
      throw Error("table step must be positive, got " + std::to_string(k));
    }
    if (i > 0 && pmf[i - 1].first == k) {
      throw Error("duplicate table step " + std::to_string(k));
    }
    if (!(m >= 0.0 && m <= 1.0)) {
      throw Error("table mass must lie in [0,1], got " + format_double(m));
    }
    total += m;
  }
  if (total > 1.0 + kMassSlack) {
    throw Error("table masses sum to " + format_double(total) + " > 1");
  }
  DistributionSpec d;
  d.kind_ = Kind::FiniteTable;
  d.entries_ = std::move(pmf);
  d.remainder_ = std::max(0.0, 1.0 - total);
  if (d.remainder_ < kMassSlack) d.remainder_ = 0.0;
  return d;
}

DistributionSpec DistributionSpec::parse(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error("unknown distribution '" + std::string(text) + "'");
  }
  std::string_view head = text.substr(0, colon);
  std::string_view body = text.substr(colon + 1);
  if (head == "geom") {
    return geometric(parse_probability(body, "geometric parameter"));
  }
  if (head == "table") {
    std::vector<std::pair<int, double>> pmf;
    while (!body.empty()) {
      auto comma = body.find(',');
      std::string_view item = body.substr(0, comma);
      auto sep = item.find(':');
      if (sep == std::string_view::npos) {
        throw Error("table entry '" + std::string(item) + "' must be step:mass");
      }
      pmf.emplace_back(parse_step(item.substr(0, sep)),
                       parse_probability(item.substr(sep + 1), "table mass"));
      if (comma == std::string_view::npos) break;
      body = body.substr(comma + 1);
    }
    return table(std::move(pmf));
  }
  throw Error("unknown distribution '" + std::string(head) + "'");
}

double DistributionSpec::pmf(int k) const {
  if (k < 1) return 0.0;
  if (kind_ == Kind::Geometric) {
    return std::pow(1.0 - p_, k - 1) * p_;
  }
  for (const auto& [step, mass] : entries_) {
    if (step == k) return mass;
  }
  return 0.0;
}

double DistributionSpec::tail(int T) const {
  if (T < 0) return 1.0;
  if (kind_ == Kind::Geometric) {
    return std::pow(1.0 - p_, T);
  }
  double sum = remainder_;
  for (auto it = entries_.rbegin(); it != entries_.rend() && it->first > T; ++it) {
    sum += it->second;
  }
  return sum;
}

double DistributionSpec::survival(int t) const { return tail(t - 1); }

double DistributionSpec::hazard(int t) const {
  if (t < 1) return 0.0;
  if (kind_ == Kind::Geometric) {
    if (t > 1 && p_ == 1.0) {
      throw ZeroSurvivalError("geom:1 event has already occurred before step " +
                              std::to_string(t));
    }
    return p_;
  }
  const double s = survival(t);
  if (s <= 0.0) {
    throw ZeroSurvivalError("distribution " + to_string() + " has no mass left at step " +
                            std::to_string(t));
  }
  return std::min(1.0, pmf(t) / s);
}

std::string DistributionSpec::to_string() const {
  if (kind_ == Kind::Geometric) {
    return "geom:" + format_double(p_);
  }
  std::string out = "table:";
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(entries_[i].first) + ":" + format_double(entries_[i].second);
  }
  return out;
}

bool operator==(const DistributionSpec& a, const DistributionSpec& b) {
  return a.kind_ == b.kind_ && a.p_ == b.p_ && a.entries_ == b.entries_;
}

bool operator<(const DistributionSpec& a, const DistributionSpec& b) {
  return std::tie(a.kind_, a.p_, a.entries_) < std::tie(b.kind_, b.p_, b.entries_);
}

}  // namespace mitld
