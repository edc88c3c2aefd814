#pragma once

// Level and degree observables of a grown tree.

#include <cstdint>
#include <map>
#include <vector>

#include <json.hpp>

#include "urt/tree.hpp"

namespace urt {

/// Degree counts of the nodes on one level. For k = 1, counts[d] is the
/// number of first-level nodes of degree d.
struct LevelDegreeProfile {
  std::uint32_t k = 0;
  std::uint64_t level_size = 0;
  std::map<std::uint32_t, std::uint64_t> counts;

  std::uint64_t count(std::uint32_t d) const {
    auto it = counts.find(d);
    return it == counts.end() ? 0 : it->second;
  }

  friend bool operator==(const LevelDegreeProfile&, const LevelDegreeProfile&) = default;
};

/// {"k":int, "level_size":int, "counts":{"d":count}}
nlohmann::ordered_json to_json(const LevelDegreeProfile& profile);
LevelDegreeProfile profile_from_json(const nlohmann::json& j);

/// Entry k is the number of nodes at distance k from the root.
std::vector<std::uint64_t> level_sizes(const RecursiveTree& tree);

/// Number of level-k nodes with degree strictly greater than t*ln(n).
std::uint64_t exceedance_count(const RecursiveTree& tree, std::uint32_t k, double t);

/// Fraction of level-k nodes with degree strictly greater than t*ln(n).
/// Requires 0 < t < 1 and a nonempty level (EmptyLevelError otherwise).
double z_statistic(const RecursiveTree& tree, std::uint32_t k, double t);

LevelDegreeProfile degree_counts_in_level(const RecursiveTree& tree, std::uint32_t k);

std::map<std::uint32_t, std::uint64_t> degree_histogram(const RecursiveTree& tree);

/// Throws NoEdgesError on a single-node tree.
std::uint32_t max_degree(const RecursiveTree& tree);

/// X[n,1..d_max]: first-level degree counts as a dense vector, entry d-1
/// holding the count for degree d.
std::vector<std::uint32_t> first_level_degree_counts(const RecursiveTree& tree,
                                                     std::uint32_t d_max);

}  // namespace urt
