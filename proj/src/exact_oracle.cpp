#include "urt/exact_oracle.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "urt/bijection.hpp"
#include "urt/errors.hpp"
#include "urt/statistics.hpp"

namespace urt {

std::string_view to_string(ArithmeticMode mode) {
  return mode == ArithmeticMode::Exact ? "exact" : "floating";
}

namespace {

template <class Scalar>
Scalar reciprocal(std::uint64_t m) {
  if constexpr (std::is_same_v<Scalar, Rational>) {
    return Rational(1, static_cast<unsigned long>(m));
  } else {
    return 1.0 / static_cast<double>(m);
  }
}

double to_double(const Rational& q) { return q.get_d(); }

}  // namespace

TreeEnumeration::TreeEnumeration(std::uint32_t n) : n_(n) {
  if (n < 2 || n > kMaxEnumerationSize) {
    throw GuardError("enumeration needs 2 <= n <= " + std::to_string(kMaxEnumerationSize) +
                     ", got " + std::to_string(n));
  }
}

std::uint64_t TreeEnumeration::count() const noexcept {
  std::uint64_t c = 1;
  for (std::uint32_t m = 2; m < n_; ++m) c *= m;
  return c;
}

TreeEnumeration::iterator::iterator(std::uint32_t n) : digits_(n - 1, 0), done_(false) {
  tree_ = grow_from_sequence(digits_);
}

TreeEnumeration::iterator& TreeEnumeration::iterator::operator++() {
  // Digit e (node e+1) ranges over 0..e; the last node varies fastest.
  std::size_t e = digits_.size();
  while (e-- > 0) {
    if (digits_[e] < e) {
      ++digits_[e];
      tree_ = grow_from_sequence(digits_);
      return *this;
    }
    digits_[e] = 0;
  }
  done_ = true;
  return *this;
}

TreeEnumeration enumerate_trees(std::uint32_t n) { return TreeEnumeration(n); }

Statistic parse_statistic(std::string_view text) {
  auto fields = [&] {
    std::vector<std::string> out;
    std::size_t pos = 0;
    for (;;) {
      std::size_t end = text.find(':', pos);
      out.emplace_back(text.substr(pos, end == std::string_view::npos ? end : end - pos));
      if (end == std::string_view::npos) return out;
      pos = end + 1;
    }
  }();
  auto as_uint = [&](const std::string& s) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    // stoul would accept a sign
    if (s.empty() || !std::isdigit(static_cast<unsigned char>(s[0])) || used != s.size())
      throw std::invalid_argument("bad integer in statistic '" + std::string(text) + "'");
    return static_cast<std::uint32_t>(v);
  };
  const std::string& name = fields[0];
  if (name == "X" && fields.size() == 2) {
    const auto d = as_uint(fields[1]);
    if (d == 0) throw std::invalid_argument("X:d needs d >= 1");
    return FirstLevelDegree{d};
  }
  if (name == "level_size" && fields.size() == 2) return LevelSize{as_uint(fields[1])};
  if (name == "z_numerator" && fields.size() == 3) {
    double t = 0;
    try {
      t = std::stod(fields[2]);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad t in statistic '" + std::string(text) + "'");
    }
    if (!(t > 0 && t < 1)) throw std::invalid_argument("z_numerator needs 0 < t < 1");
    return ExceedanceNumerator{as_uint(fields[1]), t};
  }
  if (name == "max_degree" && fields.size() == 1) return MaxDegree{};
  if (name == "fixed_points" && fields.size() == 1) return FixedPoints{};
  throw std::invalid_argument("unregistered statistic '" + std::string(text) + "'");
}

std::string to_string(const Statistic& statistic) {
  struct Visitor {
    std::string operator()(const FirstLevelDegree& s) const { return "X:" + std::to_string(s.d); }
    std::string operator()(const LevelSize& s) const { return "level_size:" + std::to_string(s.k); }
    std::string operator()(const ExceedanceNumerator& s) const {
      char buf[64];
      std::snprintf(buf, sizeof buf, "z_numerator:%u:%g", s.k, s.t);
      return buf;
    }
    std::string operator()(const MaxDegree&) const { return "max_degree"; }
    std::string operator()(const FixedPoints&) const { return "fixed_points"; }
  };
  return std::visit(Visitor{}, statistic);
}

std::int64_t evaluate(const Statistic& statistic, const RecursiveTree& tree) {
  struct Visitor {
    const RecursiveTree& tree;
    std::int64_t operator()(const FirstLevelDegree& s) const {
      return static_cast<std::int64_t>(degree_counts_in_level(tree, 1).count(s.d));
    }
    std::int64_t operator()(const LevelSize& s) const {
      const auto sizes = level_sizes(tree);
      return s.k < sizes.size() ? static_cast<std::int64_t>(sizes[s.k]) : 0;
    }
    std::int64_t operator()(const ExceedanceNumerator& s) const {
      return static_cast<std::int64_t>(exceedance_count(tree, s.k, s.t));
    }
    std::int64_t operator()(const MaxDegree&) const { return max_degree(tree); }
    std::int64_t operator()(const FixedPoints&) const {
      return fixed_points_after_first(tree_to_permutation(tree));
    }
  };
  return std::visit(Visitor{tree}, statistic);
}

Rational ExactDistribution::total() const {
  Rational s = 0;
  for (const auto& [v, p] : support) s += p;
  return s;
}

Rational ExactDistribution::expectation() const {
  Rational s = 0;
  for (const auto& [v, p] : support) s += p * v;
  return s;
}

Rational ExactDistribution::factorial_moment(std::uint32_t k) const {
  Rational s = 0;
  for (const auto& [v, p] : support) s += p * falling_factorial(static_cast<long>(v), k);
  return s;
}

nlohmann::ordered_json to_json(const ExactDistribution& dist) {
  nlohmann::ordered_json support = nlohmann::ordered_json::object();
  for (const auto& [v, p] : dist.support) support[std::to_string(v)] = to_string(p);
  return {{"n", dist.n}, {"statistic", dist.statistic}, {"support", support}};
}

ExactDistribution exact_statistic_distribution(std::uint32_t n, const Statistic& statistic) {
  const TreeEnumeration trees(n);
  // Counts first, normalized once.
  std::map<std::int64_t, std::uint64_t> counts;
  for (const auto& tree : trees) ++counts[evaluate(statistic, tree)];
  ExactDistribution dist;
  dist.n = n;
  dist.statistic = to_string(statistic);
  const auto total = static_cast<unsigned long>(trees.count());
  for (const auto& [v, c] : counts) {
    Rational p(static_cast<unsigned long>(c), total);
    p.canonicalize();
    dist.support.emplace(v, p);
  }
  return dist;
}

Rational brute_force_moment(std::uint32_t n, const ExponentVector& k) {
  const TreeEnumeration trees(n);
  const auto d = static_cast<std::uint32_t>(k.dimension());
  Integer sum = 0;
  for (const auto& tree : trees) {
    const auto x = first_level_degree_counts(tree, d);
    Integer term = 1;
    for (std::uint32_t i = 0; i < d; ++i) term *= falling_factorial(static_cast<long>(x[i]), k[i]);
    sum += term;
  }
  Rational q(sum, Integer(static_cast<unsigned long>(trees.count())));
  q.canonicalize();
  return q;
}

template <class Scalar>
std::vector<std::vector<Scalar>> level_marginals(std::uint32_t n, std::uint32_t k_max) {
  std::vector<std::vector<Scalar>> rows;
  if (n == 0) return rows;
  rows.reserve(n);
  std::vector<Scalar> cumulative(k_max + 1, Scalar(0));  // sum over j < i
  std::vector<Scalar> row(k_max + 1, Scalar(0));
  row[0] = Scalar(1);
  rows.push_back(row);
  cumulative[0] = Scalar(1);
  for (std::uint32_t i = 1; i < n; ++i) {
    const Scalar inv = reciprocal<Scalar>(i);
    row[0] = Scalar(0);
    for (std::uint32_t k = 1; k <= k_max; ++k) row[k] = cumulative[k - 1] * inv;
    for (std::uint32_t k = 0; k <= k_max; ++k) cumulative[k] += row[k];
    rows.push_back(row);
  }
  return rows;
}

template <class Scalar>
std::vector<Scalar> level_pmf(std::uint32_t i, std::uint32_t k_max) {
  return level_marginals<Scalar>(i + 1, k_max).back();
}

template <class Scalar>
std::vector<Scalar> child_count_pmf(std::uint32_t i, std::uint32_t n) {
  if (i < 1 || i >= n) {
    throw std::invalid_argument("child_count_pmf needs 1 <= i < n, got i=" + std::to_string(i) +
                                ", n=" + std::to_string(n));
  }
  if (n - i > kMaxConvolutionLength) {
    throw GuardError("child_count_pmf: n - i = " + std::to_string(n - i) + " exceeds " +
                     std::to_string(kMaxConvolutionLength));
  }
  std::vector<Scalar> pmf{Scalar(1)};
  pmf.reserve(n - i + 1);
  for (std::uint32_t j = i + 1; j <= n; ++j) {
    const Scalar p = reciprocal<Scalar>(j);
    const Scalar q = Scalar(1) - p;
    pmf.push_back(Scalar(0));
    for (std::size_t x = pmf.size() - 1; x > 0; --x) pmf[x] = pmf[x] * q + pmf[x - 1] * p;
    pmf[0] *= q;
  }
  return pmf;
}

namespace {

// Smallest integer x with x > threshold, clamped at 0.
std::size_t first_above(double threshold) {
  if (threshold < 0) return 0;
  return static_cast<std::size_t>(std::floor(threshold)) + 1;
}

template <class Scalar>
Scalar tail_above(const std::vector<Scalar>& pmf, double threshold) {
  Scalar s(0);
  for (std::size_t x = first_above(threshold); x < pmf.size(); ++x) s += pmf[x];
  return s;
}

}  // namespace

double degree_tail(std::uint32_t i, std::uint32_t n, double threshold) {
  if (threshold < 0) return 1.0;
  if (n <= kMaxRationalSize) return degree_tail_exact(i, n, threshold).get_d();
  const auto pmf = child_count_pmf<double>(i, n);
  // Sum the short side to keep the rounding error relative to the result.
  const std::size_t start = first_above(threshold);
  if (start >= pmf.size()) return 0.0;
  double below = 0, above = 0;
  for (std::size_t x = 0; x < pmf.size(); ++x) (x < start ? below : above) += pmf[x];
  return above <= 0.5 ? above : 1.0 - below;
}

Rational degree_tail_exact(std::uint32_t i, std::uint32_t n, double threshold) {
  if (threshold < 0) return 1;
  return tail_above(child_count_pmf<Rational>(i, n), threshold);
}

namespace {

template <class Scalar>
Scalar level_size_expectation(std::uint32_t n, std::uint32_t k) {
  if (k >= n) return Scalar(0);
  std::vector<Scalar> cumulative(k + 1, Scalar(0));
  std::vector<Scalar> row(k + 1, Scalar(0));
  cumulative[0] = Scalar(1);
  for (std::uint32_t i = 1; i < n; ++i) {
    const Scalar inv = reciprocal<Scalar>(i);
    for (std::uint32_t m = k; m >= 1; --m) row[m] = cumulative[m - 1] * inv;
    for (std::uint32_t m = 1; m <= k; ++m) cumulative[m] += row[m];
  }
  return cumulative[k];
}

template <class Scalar>
Scalar exceedance_expectation(std::uint32_t n, std::uint32_t k, double t) {
  if (n < 2) return Scalar(0);
  const auto rows = level_marginals<Scalar>(n, k);
  const double threshold = t * std::log(static_cast<double>(n));
  // Children of node i come from nodes i+1..n-1; walk i downwards adding one
  // Bernoulli(1/i) per step to the child-count law.
  std::vector<Scalar> pmf{Scalar(1)};
  Scalar total(0);
  for (std::uint32_t i = n - 1; i >= 1; --i) {
    const Scalar& in_level = rows[i][k];
    if (in_level != Scalar(0)) total += in_level * tail_above(pmf, threshold - 1.0);
    if (i == 1) break;
    const Scalar p = reciprocal<Scalar>(i);
    const Scalar q = Scalar(1) - p;
    pmf.push_back(Scalar(0));
    for (std::size_t x = pmf.size() - 1; x > 0; --x) pmf[x] = pmf[x] * q + pmf[x - 1] * p;
    pmf[0] *= q;
  }
  return total;
}

}  // namespace

OracleValue expected_level_size(std::uint32_t n, std::uint32_t k) {
  if (n == 0) throw std::invalid_argument("expected_level_size: empty tree");
  if (n <= kMaxRationalSize)
    return {to_double(level_size_expectation<Rational>(n, k)), ArithmeticMode::Exact};
  return {level_size_expectation<double>(n, k), ArithmeticMode::Floating};
}

OracleValue expected_exceedance_count(std::uint32_t n, std::uint32_t k, double t) {
  if (!(t > 0 && t < 1)) throw std::invalid_argument("expected_exceedance_count: t must lie in (0, 1)");
  if (n >= 2 && n - 2 > kMaxConvolutionLength) {
    throw GuardError("expected_exceedance_count: n = " + std::to_string(n) +
                     " exceeds the convolution guard");
  }
  if (n <= kMaxRationalSize)
    return {to_double(exceedance_expectation<Rational>(n, k, t)), ArithmeticMode::Exact};
  return {exceedance_expectation<double>(n, k, t), ArithmeticMode::Floating};
}

template std::vector<Rational> level_pmf<Rational>(std::uint32_t, std::uint32_t);
template std::vector<double> level_pmf<double>(std::uint32_t, std::uint32_t);
template std::vector<std::vector<Rational>> level_marginals<Rational>(std::uint32_t, std::uint32_t);
template std::vector<std::vector<double>> level_marginals<double>(std::uint32_t, std::uint32_t);
template std::vector<Rational> child_count_pmf<Rational>(std::uint32_t, std::uint32_t);
template std::vector<double> child_count_pmf<double>(std::uint32_t, std::uint32_t);

}  // namespace urt
