#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mitld {

/// First-occurrence distribution of an external event over discrete steps.
///
/// Both variants put their support on steps k >= 1; mu(0) is always zero.
/// A table whose masses sum to less than one assigns the remainder to
/// "not before the last listed step", so the tail past that step never
/// drops below the remainder.
class DistributionSpec {
 public:
  enum class Kind { Geometric, FiniteTable };

  /// mu(k) = (1-p)^(k-1) * p for k >= 1, with p in (0, 1].
  static DistributionSpec geometric(double p);
  /// Masses for explicit steps. Steps must be positive and distinct.
  static DistributionSpec table(std::vector<std::pair<int, double>> pmf);
  /// Parses `geom:<p>` or `table:k1:m1,k2:m2,...`.
  static DistributionSpec parse(std::string_view text);

  Kind kind() const { return kind_; }
  double parameter() const { return p_; }
  const std::vector<std::pair<int, double>>& entries() const { return entries_; }
  /// Mass not covered by table entries. Zero for geometric.
  double remainder() const { return remainder_; }

  double pmf(int k) const;
  /// Sum of mu(k) for k > T.
  double tail(int T) const;
  /// Sum of mu(k) for k >= t.
  double survival(int t) const;
  /// mu(t) / survival(t); throws ZeroSurvivalError when survival is zero.
  double hazard(int t) const;

  /// Canonical text form accepted by parse().
  std::string to_string() const;

  friend bool operator==(const DistributionSpec& a, const DistributionSpec& b);
  friend bool operator<(const DistributionSpec& a, const DistributionSpec& b);

 private:
  DistributionSpec() = default;

  Kind kind_ = Kind::Geometric;
  double p_ = 1.0;
  std::vector<std::pair<int, double>> entries_;  // sorted by step
  double remainder_ = 0.0;
};

/// Free-function forms of the distribution queries.
inline double tail(const DistributionSpec& d, int T) { return d.tail(T); }
inline double hazard(const DistributionSpec& d, int t) { return d.hazard(t); }

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

}  // namespace mitld
