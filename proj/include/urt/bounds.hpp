#pragma once

// Chernoff-type tail bounds for the child count of a node.
//
// X = I_{i+1} + ... + I_n with independent indicators, E I_j = 1/j, so
// E X = s = 1/(i+1) + ... + 1/n. Here n is the index of the last joining
// node, i.e. the tree has n+1 nodes.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace urt {

/// s = 1/(i+1) + ... + 1/n for 1 <= i <= n; zero when i = n.
double expected_children(std::uint32_t i, std::uint32_t n);

/// exp(-(a-s)^2 / (2a)), bounding P(X >= a). Requires a > s > 0
/// (std::domain_error otherwise).
double upper_tail_bound(double a, double s);

/// exp(-(s-a)^2 / (2s)), bounding P(X <= a). Requires 0 <= a < s.
double lower_tail_bound(double a, double s);

/// (e^{beta-1} beta^{-beta})^s with beta = a/s; the unrelaxed form of
/// upper_tail_bound, never larger than it. Requires a > s > 0.
double chernoff_upper_raw(double a, double s);

/// Bound on P(X > t ln n) for nodes i > n^{1-t+eps}: n^{-eps^2/(2t)}.
/// Requires 0 < eps < t < 1 and n >= 2.
double high_degree_bound(std::uint32_t n, double t, double eps);

/// Bound on P(X <= t ln n) for nodes i <= n^{1-t-eps} - 1:
/// n^{-eps^2/(2(t+eps))}. Requires 0 < t < 1, 0 < eps < 1-t and n >= 2.
double low_degree_bound(std::uint32_t n, double t, double eps);

/// (high_degree_bound, low_degree_bound); throws std::invalid_argument
/// naming the first slot whose parameter range is violated.
std::pair<double, double> lemma_bounds(std::uint32_t n, double t, double eps);

/// Node indices the high-degree bound covers: i > n^{1-t+eps}, i < n.
std::pair<std::uint32_t, std::uint32_t> high_degree_range(std::uint32_t n, double t, double eps);
/// Node indices the low-degree bound covers: 1 <= i <= n^{1-t-eps} - 1.
/// Empty (first > second) when no index qualifies.
std::pair<std::uint32_t, std::uint32_t> low_degree_range(std::uint32_t n, double t, double eps);

enum class TailMode { Exact, MonteCarlo };
std::string_view to_string(TailMode mode);

enum class TailSide { Upper, Lower };

/// One bound-vs-tail comparison. For the upper side the tail is
/// P(X > t ln n); for the lower side P(X <= t ln n).
struct TailBoundReport {
  TailSide side = TailSide::Upper;
  std::uint32_t i = 0;
  std::uint32_t n = 0;
  double t = 0;
  double eps = 0;
  double s = 0;
  double bound = 0;
  double tail = 0;
  std::optional<double> tail_se;  // Monte Carlo only
  TailMode mode = TailMode::Exact;

  double margin() const noexcept { return bound - tail; }
};

std::string tail_bound_csv_header();
std::string to_csv_row(const TailBoundReport& row);

}  // namespace urt
