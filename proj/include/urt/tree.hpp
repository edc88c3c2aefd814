#pragma once

// Recursive trees on nodes 0..n-1 grown by uniform or degree-proportional
// attachment.
//
// Conventions used throughout the library:
//  * a tree "after n steps" has n nodes; node i attaches when i nodes exist,
//  * degree counts the parent edge, the root's degree is its child count,
//  * level is the distance from node 0.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "urt/rng.hpp"

namespace urt {

enum class GrowthModel : std::uint8_t { Uniform = 0, Preferential = 1 };

std::string_view to_string(GrowthModel model);
/// Accepts "uniform"/"urt" and "preferential"/"port" (case-sensitive).
GrowthModel parse_growth_model(std::string_view name);

/// Smallest node count a model can produce (1 for uniform, 2 for preferential).
std::uint32_t minimum_size(GrowthModel model) noexcept;

inline constexpr std::uint32_t kNoParent = 0xffffffffu;

class RecursiveTree {
 public:
  RecursiveTree() = default;

  /// Wraps raw arrays without checking them; run validate() on the result
  /// when the arrays come from outside the library. parent[0] is kNoParent.
  static RecursiveTree from_arrays(GrowthModel model, std::optional<std::uint64_t> seed,
                                   std::vector<std::uint32_t> parent,
                                   std::vector<std::uint32_t> degree,
                                   std::vector<std::uint32_t> level);

  std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(parent_.size()); }
  GrowthModel model() const noexcept { return model_; }
  /// Master seed the tree was grown from; empty for deterministic trees.
  const std::optional<std::uint64_t>& seed() const noexcept { return seed_; }

  std::uint32_t parent(std::uint32_t i) const { return parent_[i]; }
  std::uint32_t degree(std::uint32_t i) const { return degree_[i]; }
  std::uint32_t level(std::uint32_t i) const { return level_[i]; }

  std::span<const std::uint32_t> parents() const noexcept { return parent_; }
  std::span<const std::uint32_t> degrees() const noexcept { return degree_; }
  std::span<const std::uint32_t> levels() const noexcept { return level_; }

  /// Attachment targets of nodes 1..n-1.
  std::vector<std::uint32_t> attachment_sequence() const;

  friend bool operator==(const RecursiveTree&, const RecursiveTree&) = default;

 private:
  friend class TreeGrower;

  GrowthModel model_ = GrowthModel::Uniform;
  std::optional<std::uint64_t> seed_;
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> degree_;
  std::vector<std::uint32_t> level_;
};

/// Incremental growth, one node per step(). Preferential growth keeps an
/// endpoint list with both ends of every edge; a uniform draw from it picks
/// node j with probability degree[j] / (2 * edges).
class TreeGrower {
 public:
  /// Starts from the model's initial configuration: node 0 alone for the
  /// uniform model, the edge {0, 1} for the preferential model. The vectors
  /// of `storage` are reused for their capacity.
  TreeGrower(GrowthModel model, std::uint64_t seed, RecursiveTree&& storage = RecursiveTree{});

  void reserve(std::uint32_t n);

  void step() {
    const auto i = static_cast<std::uint32_t>(tree_.parent_.size());
    std::uint32_t p;
    if (tree_.model_ == GrowthModel::Uniform) {
      p = static_cast<std::uint32_t>(uniform_below(rng_, i));
    } else {
      p = endpoints_[uniform_below(rng_, endpoints_.size())];
      endpoints_.push_back(p);
      endpoints_.push_back(i);
    }
    tree_.parent_.push_back(p);
    tree_.level_.push_back(tree_.level_[p] + 1);
    tree_.degree_.push_back(1);
    ++tree_.degree_[p];
  }

  std::uint32_t node_count() const noexcept { return tree_.size(); }
  std::size_t edge_count() const noexcept { return tree_.parent_.size() - 1; }
  std::size_t endpoint_list_size() const noexcept { return endpoints_.size(); }
  const RecursiveTree& tree() const noexcept { return tree_; }

  RecursiveTree finish() &&;

 private:
  RecursiveTree tree_;
  Xoshiro256pp rng_;
  std::vector<std::uint32_t> endpoints_;
};

/// Grows a tree with n nodes. Throws std::invalid_argument when n is below
/// minimum_size(model).
RecursiveTree grow(GrowthModel model, std::uint32_t n, std::uint64_t seed);
/// Same, reusing the buffers of `storage`.
RecursiveTree grow(GrowthModel model, std::uint32_t n, std::uint64_t seed,
                   RecursiveTree&& storage);

/// Degrees of the root's children in grow(Uniform, n, seed), in node order.
/// Only the first level is tracked (one bit per node), but the random stream
/// is consumed exactly as grow() consumes it, so the result equals the
/// first-level degrees of the full tree grown from the same seed.
std::vector<std::uint32_t> grow_first_level(std::uint32_t n, std::uint64_t seed);

/// Builds the tree whose node e+1 attaches to parents[e]. Requires
/// parents[e] <= e; the result carries no seed.
RecursiveTree grow_from_sequence(std::span<const std::uint32_t> parents,
                                 GrowthModel model = GrowthModel::Uniform);

enum class InvariantKind {
  ArrayShape,          // parent/degree/level lengths agree, parent[0] unset
  ParentOrder,         // parent[i] < i
  LevelConsistency,    // level[0] = 0, level[i] = level[parent[i]] + 1
  Handshake,           // sum of degrees = 2(n-1)
  ChildCount,          // degree matches the number of children (+1 off root)
  MinimumDegree,       // every degree >= 1 when n >= 2
};

std::string_view to_string(InvariantKind kind);

struct Diagnostic {
  InvariantKind kind;
  std::string message;
};

/// One diagnostic per violated invariant; empty for a valid tree.
std::vector<Diagnostic> validate(const RecursiveTree& tree);

// Binary dump: "URT1", u64 n, u8 model tag, u64 seed, then n-1 u32 parents,
// all little-endian. Bit 7 of the tag marks a deterministic tree (seed 0).
void write_binary(std::ostream& out, const RecursiveTree& tree);
RecursiveTree read_binary(std::istream& in);

}  // namespace urt
