#include "urt/bounds.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace urt {

double expected_children(std::uint32_t i, std::uint32_t n) {
  if (i < 1 || i > n) {
    throw std::invalid_argument("expected_children needs 1 <= i <= n, got i=" +
                                std::to_string(i) + ", n=" + std::to_string(n));
  }
  // Smallest terms first.
  double s = 0;
  for (std::uint32_t j = n; j > i; --j) s += 1.0 / j;
  return s;
}

double upper_tail_bound(double a, double s) {
  if (!(s > 0 && a > s)) throw std::domain_error("upper_tail_bound needs a > s > 0");
  return std::exp(-(a - s) * (a - s) / (2 * a));
}

double lower_tail_bound(double a, double s) {
  if (!(a >= 0 && a < s)) throw std::domain_error("lower_tail_bound needs 0 <= a < s");
  return std::exp(-(s - a) * (s - a) / (2 * s));
}

double chernoff_upper_raw(double a, double s) {
  if (!(s > 0 && a > s)) throw std::domain_error("chernoff_upper_raw needs a > s > 0");
  const double beta = a / s;
  return std::exp(s * (beta - 1 - beta * std::log(beta)));
}

namespace {

void check_n(std::uint32_t n) {
  if (n < 2) throw std::invalid_argument("tail bounds need n >= 2");
}

}  // namespace

double high_degree_bound(std::uint32_t n, double t, double eps) {
  check_n(n);
  if (!(0 < eps && eps < t && t < 1))
    throw std::invalid_argument("high-degree bound needs 0 < eps < t < 1");
  return std::exp(-eps * eps / (2 * t) * std::log(static_cast<double>(n)));
}

double low_degree_bound(std::uint32_t n, double t, double eps) {
  check_n(n);
  if (!(0 < t && t < 1 && 0 < eps && eps < 1 - t))
    throw std::invalid_argument("low-degree bound needs 0 < t < 1 and 0 < eps < 1 - t");
  return std::exp(-eps * eps / (2 * (t + eps)) * std::log(static_cast<double>(n)));
}

std::pair<double, double> lemma_bounds(std::uint32_t n, double t, double eps) {
  double high = 0, low = 0;
  try {
    high = high_degree_bound(n, t, eps);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("high-degree slot: ") + e.what());
  }
  try {
    low = low_degree_bound(n, t, eps);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("low-degree slot: ") + e.what());
  }
  return {high, low};
}

std::pair<std::uint32_t, std::uint32_t> high_degree_range(std::uint32_t n, double t, double eps) {
  const double cut = std::pow(static_cast<double>(n), 1 - t + eps);
  const auto first = static_cast<std::uint32_t>(std::floor(cut)) + 1;
  return {first, n - 1};
}

std::pair<std::uint32_t, std::uint32_t> low_degree_range(std::uint32_t n, double t, double eps) {
  const double cut = std::pow(static_cast<double>(n), 1 - t - eps) - 1;
  if (cut < 1) return {1, 0};
  return {1, static_cast<std::uint32_t>(std::floor(cut))};
}

std::string_view to_string(TailMode mode) {
  return mode == TailMode::Exact ? "exact" : "monte-carlo";
}

std::string tail_bound_csv_header() { return "side,i,n,t,eps,s,bound,tail,tail_se,mode,margin"; }

std::string to_csv_row(const TailBoundReport& row) {
  char buf[512];
  char se[40] = "";
  if (row.tail_se) std::snprintf(se, sizeof se, "%.17g", *row.tail_se);
  std::snprintf(buf, sizeof buf, "%s,%u,%u,%.17g,%.17g,%.17g,%.17g,%.17g,%s,%s,%.17g",
                row.side == TailSide::Upper ? "upper" : "lower", row.i, row.n, row.t, row.eps,
                row.s, row.bound, row.tail, se, std::string(to_string(row.mode)).c_str(),
                row.margin());
  return buf;
}

}  // namespace urt
