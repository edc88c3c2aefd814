#include "urt/moments.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace urt {

std::string to_string(const Rational& q) {
  Rational r = q;
  r.canonicalize();
  return r.get_str();
}

Rational parse_rational(std::string_view text) {
  Rational q;
  if (q.set_str(std::string(text), 10) != 0)
    throw std::invalid_argument("not a rational: '" + std::string(text) + "'");
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator");
  q.canonicalize();
  return q;
}

Integer falling_factorial(long a, std::uint32_t k) {
  return falling_factorial<Integer>(Integer(a), k);
}

IdentityCheck check_identities(long a, long b, std::uint32_t k, std::uint32_t l,
                               std::uint32_t n) {
  if (k < 1) throw std::invalid_argument("check_identities: k must be at least 1");
  if (n < k) throw std::invalid_argument("check_identities: n must be at least k");
  const Integer A(a), B(b);
  auto ff = [](const Integer& x, std::uint32_t m) { return falling_factorial<Integer>(x, m); };

  IdentityCheck r{};
  r.shift = ff(A + 1, k) - ff(A, k) == Integer(k) * ff(A, k - 1);

  // l = 0 leaves (b)_{-1} multiplied by zero.
  const Integer exchange_rhs_first = l == 0 ? Integer(0) : Integer(l) * ff(A, k + 1) * ff(B, l - 1);
  r.exchange = A * (ff(A - 1, k) * ff(B + 1, l) - ff(A, k) * ff(B, l)) ==
               exchange_rhs_first - Integer(k) * ff(A, k) * ff(B, l);

  Integer sum = 0;
  for (std::uint32_t x = k; x <= n; ++x) sum += ff(Integer(x), k);
  r.summation = sum * (k + 1) == ff(Integer(n + 1), k + 1);
  return r;
}

ExponentVector::ExponentVector(std::initializer_list<std::uint32_t> k)
    : ExponentVector(std::vector<std::uint32_t>(k)) {}

ExponentVector::ExponentVector(std::vector<std::uint32_t> k) : k_(std::move(k)) {
  if (k_.empty()) throw std::invalid_argument("exponent vector needs at least one entry");
}

ExponentVector ExponentVector::parse(std::string_view text) {
  std::vector<std::uint32_t> k;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find_first_of(",-", pos);
    if (end == std::string_view::npos) end = text.size();
    const auto field = text.substr(pos, end - pos);
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size())
      throw std::invalid_argument("bad exponent vector '" + std::string(text) + "'");
    k.push_back(v);
    pos = end + 1;
  }
  return ExponentVector(std::move(k));
}

std::uint32_t ExponentVector::total() const noexcept {
  return std::accumulate(k_.begin(), k_.end(), 0u);
}

ExponentVector ExponentVector::trimmed() const {
  std::vector<std::uint32_t> k = k_;
  while (k.size() > 1 && k.back() == 0) k.pop_back();
  return ExponentVector(std::move(k));
}

ExponentVector ExponentVector::padded(std::size_t d) const {
  std::vector<std::uint32_t> k = trimmed().k_;
  if (k.size() > d) throw std::invalid_argument("cannot pad exponent vector to a smaller dimension");
  k.resize(d, 0);
  return ExponentVector(std::move(k));
}

std::string ExponentVector::to_string(char sep) const {
  std::string s;
  for (std::size_t i = 0; i < k_.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(k_[i]);
  }
  return s;
}

bool majorizes(const ExponentVector& l, const ExponentVector& k) {
  if (l.dimension() != k.dimension())
    throw std::invalid_argument("majorizes: exponent vectors differ in length");
  std::uint64_t sl = 0, sk = 0;
  for (std::size_t i = k.dimension(); i-- > 0;) {
    sl += l[i];
    sk += k[i];
    if (sk > sl) return false;
  }
  return true;
}

namespace {

// Moves appearing in the recursion: (coefficient, resulting vector).
std::vector<std::pair<std::uint32_t, ExponentVector>> reduction_moves(const ExponentVector& v) {
  std::vector<std::pair<std::uint32_t, ExponentVector>> out;
  std::vector<std::uint32_t> e = v.entries();
  if (e[0] > 0) {
    --e[0];
    out.emplace_back(v[0], ExponentVector(e));
    ++e[0];
  }
  for (std::size_t j = 1; j < e.size(); ++j) {
    if (e[j] == 0) continue;
    ++e[j - 1];
    --e[j];
    out.emplace_back(v[j], ExponentVector(e));
    --e[j - 1];
    ++e[j];
  }
  return out;
}

template <class Scalar>
Scalar make_ratio(long num, unsigned long den);

template <>
Rational make_ratio<Rational>(long num, unsigned long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

template <>
double make_ratio<double>(long num, unsigned long den) {
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::set<ExponentVector> dependency_closure(const ExponentVector& k) {
  std::set<ExponentVector> seen{k};
  std::deque<ExponentVector> queue{k};
  while (!queue.empty()) {
    ExponentVector v = std::move(queue.front());
    queue.pop_front();
    for (auto& [coef, w] : reduction_moves(v)) {
      if (seen.insert(w).second) queue.push_back(std::move(w));
    }
  }
  return seen;
}

template <class Scalar>
MomentRecursion<Scalar>::MomentRecursion(const ExponentVector& k) {
  const auto closure = dependency_closure(k);
  vectors_.assign(closure.begin(), closure.end());
  auto index_of = [this](const ExponentVector& v) {
    return static_cast<std::size_t>(
        std::lower_bound(vectors_.begin(), vectors_.end(), v) - vectors_.begin());
  };
  for (const auto& v : vectors_) {
    totals_.push_back(v.total());
    std::vector<Move> moves;
    for (const auto& [coef, w] : reduction_moves(v)) moves.push_back({coef, index_of(w)});
    moves_.push_back(std::move(moves));
    // Two nodes: X[2,1] = 1 and X[2,d] = 0 for d >= 2.
    bool base_one = v[0] <= 1;
    for (std::size_t i = 1; i < v.dimension(); ++i) base_one = base_one && v[i] == 0;
    values_.push_back(Scalar(base_one ? 1 : 0));
  }
  scratch_ = values_;
}

template <class Scalar>
void MomentRecursion<Scalar>::step() {
  const std::uint32_t n = n_;
  for (std::size_t v = 0; v < vectors_.size(); ++v) {
    Scalar acc = values_[v] * Scalar(static_cast<long>(n) - static_cast<long>(totals_[v]));
    for (const auto& m : moves_[v]) acc += values_[m.target] * Scalar(m.coefficient);
    scratch_[v] = acc * make_ratio<Scalar>(1, n);
  }
  std::swap(values_, scratch_);
  ++n_;
}

template <class Scalar>
const Scalar& MomentRecursion<Scalar>::value(const ExponentVector& v) const {
  auto it = std::lower_bound(vectors_.begin(), vectors_.end(), v);
  if (it == vectors_.end() || *it != v)
    throw std::out_of_range("exponent vector " + v.to_string() + " not in closure");
  return values_[static_cast<std::size_t>(it - vectors_.begin())];
}

template class MomentRecursion<Rational>;
template class MomentRecursion<double>;

Rational exact_moment(std::uint32_t n, const ExponentVector& k) {
  if (n < 2) throw std::invalid_argument("exact_moment: n must be at least 2");
  MomentRecursion<Rational> rec(k);
  rec.advance_to(n);
  return rec.value(k);
}

double approximate_moment(std::uint32_t n, const ExponentVector& k) {
  if (n < 2) throw std::invalid_argument("approximate_moment: n must be at least 2");
  MomentRecursion<double> rec(k);
  rec.advance_to(n);
  return rec.value(k);
}

MomentTable MomentTable::build(const ExponentVector& k, std::uint32_t n_max) {
  if (n_max < 2) throw std::invalid_argument("MomentTable: n_max must be at least 2");
  MomentTable table;
  table.n_max_ = n_max;
  MomentRecursion<Rational> rec(k);
  for (;;) {
    for (std::size_t v = 0; v < rec.vectors().size(); ++v)
      table.values_[rec.vectors()[v].trimmed()].push_back(rec.values()[v]);
    if (rec.n() == n_max) break;
    rec.step();
  }
  return table;
}

bool MomentTable::contains(std::uint32_t n, const ExponentVector& v) const {
  return n >= 2 && n <= n_max_ && values_.count(v.trimmed()) > 0;
}

const Rational& MomentTable::at(std::uint32_t n, const ExponentVector& v) const {
  if (n < 2 || n > n_max_) throw std::out_of_range("MomentTable: n outside table");
  auto it = values_.find(v.trimmed());
  if (it == values_.end()) throw std::out_of_range("MomentTable: vector outside closure");
  return it->second[n - 2];
}

std::size_t MomentTable::count_recursion_failures() const {
  std::size_t failures = 0;
  for (const auto& [v, series] : values_) {
    const std::uint32_t K = v.total();
    for (std::uint32_t n = 2; n < n_max_; ++n) {
      const Rational lhs = Rational(falling_factorial(static_cast<long>(n), K)) * series[n - 1] -
                           Rational(falling_factorial(static_cast<long>(n) - 1, K)) * series[n - 2];
      Rational sum = 0;
      for (const auto& [coef, w] : reduction_moves(v)) sum += coef * at(n, w);
      const Rational rhs =
          K == 0 ? Rational(0) : Rational(falling_factorial(static_cast<long>(n) - 1, K - 1)) * sum;
      if (lhs != rhs) ++failures;
    }
  }
  return failures;
}

std::string MomentTable::to_csv() const {
  std::ostringstream out;
  out << "n,k,numerator,denominator\n";
  for (std::uint32_t n = 2; n <= n_max_; ++n) {
    for (const auto& [v, series] : values_) {
      const Rational& q = series[n - 2];
      out << n << ',' << v.to_string('-') << ',' << q.get_num().get_str() << ','
          << q.get_den().get_str() << '\n';
    }
  }
  return out.str();
}

}  // namespace urt
