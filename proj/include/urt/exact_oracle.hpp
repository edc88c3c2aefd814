#pragma once

// Ground truth for the uniform model.
//
// Exhaustive enumeration covers all (n-1)! attachment sequences for small n.
// The semi-analytic engines use two facts of uniform growth: the level of
// node i depends only on the choices of nodes 1..i, and its number of
// children depends only on the choices of later nodes, each of which picks
// node i independently with probability 1/(number of existing nodes).

#include <cstdint>
#include <iterator>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "urt/moments.hpp"
#include "urt/tree.hpp"

namespace urt {

inline constexpr std::uint32_t kMaxEnumerationSize = 11;
inline constexpr std::uint32_t kMaxConvolutionLength = 10000;
/// Semi-analytic engines use exact rationals up to this node count.
inline constexpr std::uint32_t kMaxRationalSize = 64;

enum class ArithmeticMode { Exact, Floating };
std::string_view to_string(ArithmeticMode mode);

/// Value computed by a semi-analytic engine together with its arithmetic mode.
struct OracleValue {
  double value;
  ArithmeticMode mode;
};

/// All uniform trees on n nodes in lexicographic order of the attachment
/// sequence (node 1's choice most significant). Throws GuardError unless
/// 2 <= n <= kMaxEnumerationSize.
class TreeEnumeration {
 public:
  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = RecursiveTree;
    using difference_type = std::ptrdiff_t;
    using pointer = const RecursiveTree*;
    using reference = const RecursiveTree&;

    iterator() = default;
    reference operator*() const { return tree_; }
    pointer operator->() const { return &tree_; }
    iterator& operator++();
    void operator++(int) { ++*this; }
    friend bool operator==(const iterator& a, const iterator& b) { return a.done_ == b.done_; }

   private:
    friend class TreeEnumeration;
    explicit iterator(std::uint32_t n);

    std::vector<std::uint32_t> digits_;
    RecursiveTree tree_;
    bool done_ = true;
  };

  explicit TreeEnumeration(std::uint32_t n);

  std::uint32_t size() const noexcept { return n_; }
  /// (n-1)!
  std::uint64_t count() const noexcept;
  iterator begin() const { return iterator(n_); }
  iterator end() const { return iterator(); }

 private:
  std::uint32_t n_;
};

TreeEnumeration enumerate_trees(std::uint32_t n);

/// Observables registered with the exact engines.
struct FirstLevelDegree { std::uint32_t d; };            // X[n,d]
struct LevelSize { std::uint32_t k; };                   // |L_n(k)|
struct ExceedanceNumerator { std::uint32_t k; double t; };  // numerator of Z_{n,k}(t)
struct MaxDegree {};
struct FixedPoints {};  // fixed points after the first of the bijection image

using Statistic =
    std::variant<FirstLevelDegree, LevelSize, ExceedanceNumerator, MaxDegree, FixedPoints>;

/// Parses "X:d", "level_size:k", "z_numerator:k:t", "max_degree" or
/// "fixed_points"; anything else is std::invalid_argument.
Statistic parse_statistic(std::string_view text);
std::string to_string(const Statistic& statistic);
std::int64_t evaluate(const Statistic& statistic, const RecursiveTree& tree);

struct ExactDistribution {
  std::uint32_t n = 0;
  std::string statistic;
  std::map<std::int64_t, Rational> support;

  Rational total() const;
  Rational expectation() const;
  /// E[(value)_k] under the law.
  Rational factorial_moment(std::uint32_t k) const;
};

/// {"n":..,"statistic":..,"support":{"value":"num/den"}}
nlohmann::ordered_json to_json(const ExactDistribution& dist);

ExactDistribution exact_statistic_distribution(std::uint32_t n, const Statistic& statistic);

/// Exact E(n,k) by averaging prod_i (X[n,i])_{k_i} over every tree.
Rational brute_force_moment(std::uint32_t n, const ExponentVector& k);

/// P(level(i) = k) for k = 0..k_max under uniform growth, via
/// P(level(i) = k) = (1/i) sum_{j<i} P(level(j) = k-1).
template <class Scalar>
std::vector<Scalar> level_pmf(std::uint32_t i, std::uint32_t k_max);

/// Row i holds P(level(i) = k) for k = 0..k_max, for nodes 0..n-1.
template <class Scalar>
std::vector<std::vector<Scalar>> level_marginals(std::uint32_t n, std::uint32_t k_max);

/// Law of X = sum_{j=i+1..n} Bern(1/j), the number of children node i
/// collects while nodes i+1..n join (node j joins when j nodes exist).
/// Requires 1 <= i < n and n - i <= kMaxConvolutionLength (GuardError).
template <class Scalar>
std::vector<Scalar> child_count_pmf(std::uint32_t i, std::uint32_t n);

/// P(X > threshold) for the X of child_count_pmf. The total degree of node
/// i satisfies P(deg > theta) = degree_tail(i, n, theta - 1).
double degree_tail(std::uint32_t i, std::uint32_t n, double threshold);
Rational degree_tail_exact(std::uint32_t i, std::uint32_t n, double threshold);

/// Exact E|L_n(k)| in a tree with n nodes.
OracleValue expected_level_size(std::uint32_t n, std::uint32_t k);

/// Exact expectation of the numerator of Z_{n,k}(t) in a tree with n
/// nodes: sum_i P(level(i) = k) P(deg_n(i) > t ln n). Requires
/// n - 2 <= kMaxConvolutionLength (GuardError).
OracleValue expected_exceedance_count(std::uint32_t n, std::uint32_t k, double t);

}  // namespace urt
