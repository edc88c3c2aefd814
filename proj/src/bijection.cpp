#include "urt/bijection.hpp"

#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "urt/errors.hpp"

namespace urt {

nlohmann::json to_json(const Permutation& perm) { return perm.values; }

Permutation permutation_from_json(const nlohmann::json& j) {
  Permutation p{j.get<std::vector<std::uint32_t>>()};
  if (!is_permutation(p)) throw std::invalid_argument("array is not a permutation of 1..n");
  return p;
}

bool is_permutation(const Permutation& perm) {
  const std::size_t n = perm.values.size();
  std::vector<bool> seen(n + 1, false);
  for (std::uint32_t v : perm.values) {
    if (v < 1 || v > n || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

std::string_view to_string(SwapRule rule) {
  return rule == SwapRule::Parent ? "parent" : "offset";
}

SwapRule parse_swap_rule(std::string_view name) {
  if (name == "parent") return SwapRule::Parent;
  if (name == "offset") return SwapRule::Offset;
  throw std::invalid_argument("unknown swap rule '" + std::string(name) + "'");
}

namespace {

// Zero-based index swapped with index i when node i attaches to j.
std::uint32_t partner(SwapRule rule, std::uint32_t i, std::uint32_t j) {
  if (j == 0) return i;
  return rule == SwapRule::Parent ? j : i - j;
}

}  // namespace

Permutation tree_to_permutation(const RecursiveTree& tree, SwapRule rule) {
  const std::uint32_t n = tree.size();
  Permutation perm;
  perm.values.resize(n);
  std::iota(perm.values.begin(), perm.values.end(), 1u);
  for (std::uint32_t i = 1; i < n; ++i)
    std::swap(perm.values[i], perm.values[partner(rule, i, tree.parent(i))]);
  return perm;
}

RecursiveTree permutation_to_tree(const Permutation& perm, SwapRule rule) {
  if (!is_permutation(perm)) throw NotInImageError("not a permutation of 1..n");
  const std::uint32_t n = perm.size();
  if (n == 0 || perm.values[0] != 1) throw NotInImageError("sigma_1 must be 1");

  // Undo the swaps from the last node back. Value i+1 is untouched until
  // step i, which moves it from index i to the partner index; later steps
  // have already been undone, so its current index is that partner.
  std::vector<std::uint32_t> values = perm.values;
  std::vector<std::uint32_t> position(n + 1);
  for (std::uint32_t p = 0; p < n; ++p) position[values[p]] = p;

  std::vector<std::uint32_t> parents(n > 0 ? n - 1 : 0);
  for (std::uint32_t i = n - 1; i >= 1; --i) {
    const std::uint32_t pos = position[i + 1];
    if (pos == 0 || pos > i) throw NotInImageError("permutation is not in the image");
    std::uint32_t j = 0;
    if (pos != i) j = rule == SwapRule::Parent ? pos : i - pos;
    parents[i - 1] = j;
    const std::uint32_t other = values[i];
    std::swap(values[i], values[pos]);
    position[other] = pos;
    position[i + 1] = i;
  }
  return grow_from_sequence(parents);
}

std::uint32_t fixed_points_after_first(const Permutation& perm) {
  std::uint32_t count = 0;
  for (std::uint32_t p = 2; p <= perm.size(); ++p)
    if (perm.values[p - 1] == p) ++count;
  return count;
}

}  // namespace urt
