#pragma once

// Swap bijections between recursive trees on 0..n-1 and the permutations
// of 1..n that fix position 1.
//
// Both rules start from the identity and process nodes i = 1..n-1 in order;
// a node attached to the root leaves the permutation alone.
//
//  * SwapRule::Parent: node i attached to j >= 1 swaps positions i+1 and
//    j+1. In cycle notation node i joins the cycle of its parent, so the
//    fixed points after the first are exactly the childless children of
//    the root.
//  * SwapRule::Offset: node i attached to j swaps positions i+1 and i+1-j.
//    Also a bijection onto the same image, and its fixed-point count has the
//    same law as under Parent, but the two counts differ tree by tree from
//    five nodes on.
//
// Either map carries the uniform tree law to the uniform law on the image.

#include <cstdint>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "urt/tree.hpp"

namespace urt {

/// One-indexed values: values[p-1] holds sigma_p.
struct Permutation {
  std::vector<std::uint32_t> values;

  std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(values.size()); }
  /// sigma_p for 1 <= p <= n.
  std::uint32_t at(std::uint32_t p) const { return values.at(p - 1); }

  auto operator<=>(const Permutation&) const = default;
};

/// Serialized as a JSON array of one-indexed values.
nlohmann::json to_json(const Permutation& perm);
/// Throws std::invalid_argument unless the array is a permutation of 1..n.
Permutation permutation_from_json(const nlohmann::json& j);

/// True iff the values are a bijection of {1..n}.
bool is_permutation(const Permutation& perm);

enum class SwapRule { Parent, Offset };

std::string_view to_string(SwapRule rule);
/// "parent" or "offset".
SwapRule parse_swap_rule(std::string_view name);

Permutation tree_to_permutation(const RecursiveTree& tree, SwapRule rule = SwapRule::Parent);

/// Inverse of tree_to_permutation. Throws NotInImageError unless `perm` is
/// a permutation with sigma_1 = 1. The result is a deterministic uniform-model tree.
RecursiveTree permutation_to_tree(const Permutation& perm, SwapRule rule = SwapRule::Parent);

/// |{p in 2..n : sigma_p = p}|.
std::uint32_t fixed_points_after_first(const Permutation& perm);

}  // namespace urt
