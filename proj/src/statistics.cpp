#include "urt/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "urt/errors.hpp"

namespace urt {

nlohmann::ordered_json to_json(const LevelDegreeProfile& profile) {
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (const auto& [d, c] : profile.counts) counts[std::to_string(d)] = c;
  return {{"k", profile.k}, {"level_size", profile.level_size}, {"counts", counts}};
}

LevelDegreeProfile profile_from_json(const nlohmann::json& j) {
  LevelDegreeProfile p;
  p.k = j.at("k").get<std::uint32_t>();
  p.level_size = j.at("level_size").get<std::uint64_t>();
  for (const auto& [d, c] : j.at("counts").items())
    p.counts[static_cast<std::uint32_t>(std::stoul(d))] = c.get<std::uint64_t>();
  return p;
}

std::vector<std::uint64_t> level_sizes(const RecursiveTree& tree) {
  std::vector<std::uint64_t> sizes;
  for (std::uint32_t lv : tree.levels()) {
    if (lv >= sizes.size()) sizes.resize(lv + 1, 0);
    ++sizes[lv];
  }
  return sizes;
}

namespace {

void check_t(double t) {
  if (!(t > 0.0 && t < 1.0))
    throw std::invalid_argument("t must lie in (0, 1), got " + std::to_string(t));
}

}  // namespace

std::uint64_t exceedance_count(const RecursiveTree& tree, std::uint32_t k, double t) {
  check_t(t);
  const double threshold = t * std::log(static_cast<double>(tree.size()));
  const auto level = tree.levels();
  const auto degree = tree.degrees();
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < level.size(); ++i)
    if (level[i] == k && static_cast<double>(degree[i]) > threshold) ++count;
  return count;
}

double z_statistic(const RecursiveTree& tree, std::uint32_t k, double t) {
  check_t(t);
  const double threshold = t * std::log(static_cast<double>(tree.size()));
  const auto level = tree.levels();
  const auto degree = tree.degrees();
  std::uint64_t size = 0, count = 0;
  for (std::size_t i = 0; i < level.size(); ++i) {
    if (level[i] != k) continue;
    ++size;
    if (static_cast<double>(degree[i]) > threshold) ++count;
  }
  if (size == 0) throw EmptyLevelError("level " + std::to_string(k) + " is empty");
  return static_cast<double>(count) / static_cast<double>(size);
}

LevelDegreeProfile degree_counts_in_level(const RecursiveTree& tree, std::uint32_t k) {
  LevelDegreeProfile p;
  p.k = k;
  const auto level = tree.levels();
  const auto degree = tree.degrees();
  for (std::size_t i = 0; i < level.size(); ++i) {
    if (level[i] != k) continue;
    ++p.level_size;
    ++p.counts[degree[i]];
  }
  return p;
}

std::map<std::uint32_t, std::uint64_t> degree_histogram(const RecursiveTree& tree) {
  std::vector<std::uint64_t> dense;
  for (std::uint32_t d : tree.degrees()) {
    if (d >= dense.size()) dense.resize(d + 1, 0);
    ++dense[d];
  }
  std::map<std::uint32_t, std::uint64_t> hist;
  for (std::size_t d = 0; d < dense.size(); ++d)
    if (dense[d] != 0) hist.emplace(static_cast<std::uint32_t>(d), dense[d]);
  return hist;
}

std::uint32_t max_degree(const RecursiveTree& tree) {
  if (tree.size() < 2) throw NoEdgesError("max_degree: tree has no edges");
  const auto degree = tree.degrees();
  return *std::max_element(degree.begin(), degree.end());
}

std::vector<std::uint32_t> first_level_degree_counts(const RecursiveTree& tree,
                                                     std::uint32_t d_max) {
  std::vector<std::uint32_t> x(d_max, 0);
  const auto level = tree.levels();
  const auto degree = tree.degrees();
  for (std::size_t i = 1; i < level.size(); ++i) {
    if (level[i] == 1 && degree[i] <= d_max) ++x[degree[i] - 1];
  }
  return x;
}

}  // namespace urt
