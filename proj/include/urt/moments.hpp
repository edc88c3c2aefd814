#pragma once

// Joint factorial moments of the first-level degree counts.
//
// E(n, k_1..k_d) = E[ prod_i (X[n,i])_{k_i} ] where X[n,i] is the number of
// first-level nodes of degree i in a uniform tree with n nodes. Conditioning
// on the attachment target of node n gives, with K = k_1 + ... + k_d,
//
//   E(n+1, k) = (1 - K/n) E(n, k) + (k_1/n) E(n, k - e_1)
//             + sum_{j=2..d} (k_j/n) E(n, k + e_{j-1} - e_j),
//
// anchored at the deterministic two-node tree (X[2,1] = 1).

#include <cstdint>
#include <initializer_list>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace urt {

using Rational = mpq_class;
using Integer = mpz_class;

/// "num/den" (or "num" for integers).
std::string to_string(const Rational& q);
Rational parse_rational(std::string_view text);

/// (a)_k = a (a-1) ... (a-k+1), (a)_0 = 1. Works for any ring-like scalar.
template <class Scalar>
Scalar falling_factorial(const Scalar& a, std::uint32_t k) {
  Scalar result(1);
  for (std::uint32_t i = 0; i < k; ++i) result *= a - Scalar(i);
  return result;
}

Integer falling_factorial(long a, std::uint32_t k);

struct IdentityCheck {
  bool shift;        // (a+1)_k - (a)_k = k (a)_{k-1}
  bool exchange;     // a[(a-1)_k (b+1)_l - (a)_k (b)_l] = l (a)_{k+1} (b)_{l-1} - k (a)_k (b)_l
  bool summation;    // sum_{a=k..n} (a)_k = (n+1)_{k+1} / (k+1)

  bool all() const noexcept { return shift && exchange && summation; }
};

/// Evaluates both sides of the three falling-factorial identities exactly.
/// Requires k >= 1 and n >= k (std::invalid_argument otherwise).
IdentityCheck check_identities(long a, long b, std::uint32_t k, std::uint32_t l, std::uint32_t n);

class ExponentVector {
 public:
  ExponentVector() : k_{0} {}
  ExponentVector(std::initializer_list<std::uint32_t> k);
  explicit ExponentVector(std::vector<std::uint32_t> k);

  /// Parses "0,1" or "0-1".
  static ExponentVector parse(std::string_view text);

  std::size_t dimension() const noexcept { return k_.size(); }
  std::uint32_t operator[](std::size_t i) const { return k_[i]; }
  const std::vector<std::uint32_t>& entries() const noexcept { return k_; }
  /// K = k_1 + ... + k_d.
  std::uint32_t total() const noexcept;

  /// Drops trailing zeros, keeping at least one entry.
  ExponentVector trimmed() const;
  /// Pads with zeros to dimension d (never truncates nonzero entries).
  ExponentVector padded(std::size_t d) const;

  /// Entries joined by `sep`.
  std::string to_string(char sep = '-') const;

  auto operator<=>(const ExponentVector&) const = default;

 private:
  std::vector<std::uint32_t> k_;
};

/// True iff `k` is majorized by `l`: every suffix sum of k is at most the
/// matching suffix sum of l. Throws std::invalid_argument on a length mismatch.
bool majorizes(const ExponentVector& l, const ExponentVector& k);

/// Smallest set containing k that is closed under the root move
/// (k_1 - 1) and the shift moves (k_{j-1} + 1, k_j - 1). All members keep
/// the dimension of k.
std::set<ExponentVector> dependency_closure(const ExponentVector& k);

/// Runs the recursion over the dependency closure of `k` in any scalar type
/// constructible from a pair of integers via make_ratio. Values are kept for
/// every n in [2, n_max] when `keep_history` is set.
template <class Scalar>
class MomentRecursion {
 public:
  explicit MomentRecursion(const ExponentVector& k);

  /// Current node count.
  std::uint32_t n() const noexcept { return n_; }
  /// Advances from n to n+1 nodes.
  void step();
  void advance_to(std::uint32_t n) {
    while (n_ < n) step();
  }

  const Scalar& value(const ExponentVector& v) const;
  const std::vector<ExponentVector>& vectors() const noexcept { return vectors_; }
  const std::vector<Scalar>& values() const noexcept { return values_; }

 private:
  struct Move {
    std::uint32_t coefficient;
    std::size_t target;
  };

  std::vector<ExponentVector> vectors_;
  std::vector<std::uint32_t> totals_;
  std::vector<std::vector<Move>> moves_;
  std::vector<Scalar> values_;
  std::vector<Scalar> scratch_;
  std::uint32_t n_ = 2;
};

extern template class MomentRecursion<Rational>;
extern template class MomentRecursion<double>;

/// Exact E(n, k) for n >= 2 (std::invalid_argument otherwise).
Rational exact_moment(std::uint32_t n, const ExponentVector& k);

/// Double-precision E(n, k) from the same recursion, for n too large for
/// exact arithmetic.
double approximate_moment(std::uint32_t n, const ExponentVector& k);

/// Exact values of E(m, v) for m in [2, n_max] and every v in the dependency
/// closure of k. Keys are trimmed exponent vectors.
class MomentTable {
 public:
  static MomentTable build(const ExponentVector& k, std::uint32_t n_max);

  std::uint32_t n_max() const noexcept { return n_max_; }
  bool contains(std::uint32_t n, const ExponentVector& v) const;
  /// Throws std::out_of_range outside the populated domain.
  const Rational& at(std::uint32_t n, const ExponentVector& v) const;
  const std::map<ExponentVector, std::vector<Rational>>& entries() const noexcept {
    return values_;
  }

  /// Checks (n)_K E(n+1,v) - (n-1)_K E(n,v) = (n-1)_{K-1} sum_j v_j E(n, moved v)
  /// for every stored n < n_max and v. Returns the number of failures.
  std::size_t count_recursion_failures() const;

  /// CSV rows "n,k,numerator,denominator" with k dash-joined, after a header.
  std::string to_csv() const;

 private:
  std::uint32_t n_max_ = 2;
  std::map<ExponentVector, std::vector<Rational>> values_;  // index n - 2
};

}  // namespace urt
