#include "urt/tree.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "urt/errors.hpp"

namespace urt {

std::string_view to_string(GrowthModel model) {
  return model == GrowthModel::Uniform ? "uniform" : "preferential";
}

GrowthModel parse_growth_model(std::string_view name) {
  if (name == "uniform" || name == "urt") return GrowthModel::Uniform;
  if (name == "preferential" || name == "port") return GrowthModel::Preferential;
  throw std::invalid_argument("unknown growth model '" + std::string(name) + "'");
}

std::uint32_t minimum_size(GrowthModel model) noexcept {
  return model == GrowthModel::Uniform ? 1 : 2;
}

RecursiveTree RecursiveTree::from_arrays(GrowthModel model, std::optional<std::uint64_t> seed,
                                         std::vector<std::uint32_t> parent,
                                         std::vector<std::uint32_t> degree,
                                         std::vector<std::uint32_t> level) {
  RecursiveTree t;
  t.model_ = model;
  t.seed_ = seed;
  t.parent_ = std::move(parent);
  t.degree_ = std::move(degree);
  t.level_ = std::move(level);
  return t;
}

std::vector<std::uint32_t> RecursiveTree::attachment_sequence() const {
  if (parent_.empty()) return {};
  return {parent_.begin() + 1, parent_.end()};
}

TreeGrower::TreeGrower(GrowthModel model, std::uint64_t seed, RecursiveTree&& storage)
    : tree_(std::move(storage)), rng_(seed) {
  tree_.model_ = model;
  tree_.seed_ = seed;
  tree_.parent_.clear();
  tree_.degree_.clear();
  tree_.level_.clear();

  tree_.parent_.push_back(kNoParent);
  tree_.degree_.push_back(0);
  tree_.level_.push_back(0);
  if (model == GrowthModel::Preferential) {
    tree_.parent_.push_back(0);
    tree_.degree_.push_back(1);
    tree_.level_.push_back(1);
    tree_.degree_[0] = 1;
    endpoints_ = {0, 1};
  }
}

void TreeGrower::reserve(std::uint32_t n) {
  tree_.parent_.reserve(n);
  tree_.degree_.reserve(n);
  tree_.level_.reserve(n);
  if (tree_.model_ == GrowthModel::Preferential && n >= 1)
    endpoints_.reserve(2 * static_cast<std::size_t>(n - 1));
}

RecursiveTree TreeGrower::finish() && { return std::move(tree_); }

RecursiveTree grow(GrowthModel model, std::uint32_t n, std::uint64_t seed) {
  return grow(model, n, seed, RecursiveTree{});
}

RecursiveTree grow(GrowthModel model, std::uint32_t n, std::uint64_t seed,
                   RecursiveTree&& storage) {
  if (n < minimum_size(model)) {
    throw std::invalid_argument("grow: " + std::string(to_string(model)) + " model needs n >= " +
                                std::to_string(minimum_size(model)) + ", got " +
                                std::to_string(n));
  }
  TreeGrower grower(model, seed, std::move(storage));
  grower.reserve(n);
  while (grower.node_count() < n) grower.step();
  return std::move(grower).finish();
}

std::vector<std::uint32_t> grow_first_level(std::uint32_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("grow_first_level: n must be at least 1");
  Xoshiro256pp rng(seed);
  std::vector<std::uint64_t> on_first_level((n + 63) / 64, 0);
  std::vector<std::uint32_t> ids;  // ascending
  std::vector<std::uint32_t> degrees;
  for (std::uint32_t i = 1; i < n; ++i) {
    const auto p = static_cast<std::uint32_t>(uniform_below(rng, i));
    if (p == 0) {
      on_first_level[i >> 6] |= std::uint64_t{1} << (i & 63);
      ids.push_back(i);
      degrees.push_back(1);
    } else if (on_first_level[p >> 6] >> (p & 63) & 1) {
      const auto slot = std::lower_bound(ids.begin(), ids.end(), p) - ids.begin();
      ++degrees[static_cast<std::size_t>(slot)];
    }
  }
  return degrees;
}

RecursiveTree grow_from_sequence(std::span<const std::uint32_t> parents, GrowthModel model) {
  const std::size_t n = parents.size() + 1;
  if (n > kNoParent) throw std::invalid_argument("grow_from_sequence: too many nodes");
  std::vector<std::uint32_t> parent(n), degree(n, 0), level(n, 0);
  parent[0] = kNoParent;
  for (std::size_t i = 1; i < n; ++i) {
    const std::uint32_t p = parents[i - 1];
    if (p >= i) {
      throw std::invalid_argument("grow_from_sequence: node " + std::to_string(i) +
                                  " attaches to " + std::to_string(p) +
                                  ", which does not exist yet");
    }
    parent[i] = p;
    level[i] = level[p] + 1;
    degree[i] = 1;
    ++degree[p];
  }
  return RecursiveTree::from_arrays(model, std::nullopt, std::move(parent), std::move(degree),
                                    std::move(level));
}

std::string_view to_string(InvariantKind kind) {
  switch (kind) {
    case InvariantKind::ArrayShape: return "array-shape";
    case InvariantKind::ParentOrder: return "parent-order";
    case InvariantKind::LevelConsistency: return "level-consistency";
    case InvariantKind::Handshake: return "handshake";
    case InvariantKind::ChildCount: return "child-count";
    case InvariantKind::MinimumDegree: return "minimum-degree";
  }
  return "unknown";
}

std::vector<Diagnostic> validate(const RecursiveTree& tree) {
  std::vector<Diagnostic> out;
  const auto parent = tree.parents();
  const auto degree = tree.degrees();
  const auto level = tree.levels();
  const std::size_t n = parent.size();

  if (n == 0 || degree.size() != n || level.size() != n || parent[0] != kNoParent) {
    out.push_back({InvariantKind::ArrayShape,
                   "arrays must have equal nonzero length with parent[0] unset"});
    return out;
  }

  auto first_bad = [n](auto&& bad) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < n; ++i)
      if (bad(i)) return i;
    return std::nullopt;
  };

  if (auto i = first_bad([&](std::size_t i) { return i > 0 && parent[i] >= i; })) {
    out.push_back({InvariantKind::ParentOrder,
                   "parent[" + std::to_string(*i) + "] = " + std::to_string(parent[*i]) +
                       " is not below " + std::to_string(*i)});
    // Level and child checks would index out of range.
    return out;
  }

  if (auto i = first_bad([&](std::size_t i) {
        return i == 0 ? level[0] != 0 : level[i] != level[parent[i]] + 1;
      })) {
    out.push_back({InvariantKind::LevelConsistency,
                   "level[" + std::to_string(*i) + "] = " + std::to_string(level[*i]) +
                       " is inconsistent with its parent"});
  }

  const std::uint64_t degree_sum = std::accumulate(degree.begin(), degree.end(), std::uint64_t{0});
  if (degree_sum != 2 * (n - 1)) {
    out.push_back({InvariantKind::Handshake, "degree sum " + std::to_string(degree_sum) +
                                                 " differs from 2(n-1) = " +
                                                 std::to_string(2 * (n - 1))});
  }

  std::vector<std::uint32_t> children(n, 0);
  for (std::size_t i = 1; i < n; ++i) ++children[parent[i]];
  if (auto i = first_bad([&](std::size_t i) {
        return degree[i] != children[i] + (i > 0 ? 1u : 0u);
      })) {
    out.push_back({InvariantKind::ChildCount,
                   "degree[" + std::to_string(*i) + "] = " + std::to_string(degree[*i]) +
                       " but node has " + std::to_string(children[*i]) + " children"});
  }

  if (n >= 2) {
    if (auto i = first_bad([&](std::size_t i) { return degree[i] == 0; })) {
      out.push_back({InvariantKind::MinimumDegree,
                     "node " + std::to_string(*i) + " has degree 0"});
    }
  }
  return out;
}

namespace {

constexpr std::array<char, 4> kMagic{'U', 'R', 'T', '1'};
constexpr std::uint8_t kDeterministicBit = 0x80;

template <class T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes;
  for (std::size_t b = 0; b < sizeof(T); ++b)
    bytes[b] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * b)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

template <class T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size()))
    throw FormatError("tree dump truncated");
  std::uint64_t v = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) v |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  return static_cast<T>(v);
}

}  // namespace

void write_binary(std::ostream& out, const RecursiveTree& tree) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint64_t>(out, tree.size());
  std::uint8_t tag = static_cast<std::uint8_t>(tree.model());
  if (!tree.seed()) tag |= kDeterministicBit;
  put_le<std::uint8_t>(out, tag);
  put_le<std::uint64_t>(out, tree.seed().value_or(0));
  for (std::uint32_t i = 1; i < tree.size(); ++i) put_le<std::uint32_t>(out, tree.parent(i));
}

RecursiveTree read_binary(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic)
    throw FormatError("not a URT1 tree dump");
  const auto n = get_le<std::uint64_t>(in);
  const auto tag = get_le<std::uint8_t>(in);
  const auto seed = get_le<std::uint64_t>(in);
  if (n == 0 || n > kNoParent) throw FormatError("tree dump has invalid node count");
  const std::uint8_t model_bits = tag & ~kDeterministicBit;
  if (model_bits > 1) throw FormatError("tree dump has unknown model tag");

  std::vector<std::uint32_t> parents(n - 1);
  for (auto& p : parents) p = get_le<std::uint32_t>(in);
  RecursiveTree tree;
  try {
    tree = grow_from_sequence(parents, static_cast<GrowthModel>(model_bits));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("tree dump: ") + e.what());
  }
  if (tag & kDeterministicBit) return tree;
  return RecursiveTree::from_arrays(tree.model(), seed,
                                    {tree.parents().begin(), tree.parents().end()},
                                    {tree.degrees().begin(), tree.degrees().end()},
                                    {tree.levels().begin(), tree.levels().end()});
}

}  // namespace urt
