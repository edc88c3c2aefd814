#pragma once

// Seeded Monte Carlo experiments over uniform and preferential trees.
//
// Replication r of every experiment grows its trees from
// derive_seed(master, r). The same stream is used at every n of a grid, so
// the trees at different sizes of one replication are prefixes of each other
// (common random numbers). Replication summaries are stored by index and
// reduced in index order, which makes every report independent of the
// number of worker threads.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "urt/rng.hpp"
#include "urt/tree.hpp"

namespace urt {

enum class ReportFormat { Json, Csv };

struct ExperimentConfig {
  std::string id;
  GrowthModel model = GrowthModel::Uniform;
  std::vector<std::uint32_t> n_grid;
  std::vector<std::uint32_t> k_grid;
  std::vector<double> t_grid;
  std::vector<double> eps_grid;
  std::uint32_t d_max = 3;
  std::uint64_t replications = 100;
  std::uint64_t seed = 1;
  unsigned workers = 0;  // 0: URT_THREADS or hardware concurrency
  std::optional<std::filesystem::path> output;
  ReportFormat format = ReportFormat::Json;
};

/// Known experiment ids.
const std::vector<std::string>& experiment_ids();

/// Grids used by the CLI when a flag is absent.
ExperimentConfig default_config(std::string_view id);

/// Throws std::invalid_argument on an unknown id, empty grid, zero
/// replications or a grid value outside the experiment's range.
void validate(const ExperimentConfig& config);

/// The reproducibility-relevant part of a config (no worker count, output
/// path or format).
nlohmann::ordered_json to_json(const ExperimentConfig& config);

struct ReportRow {
  nlohmann::ordered_json point;  // always carries "metric"
  double estimate = 0;
  std::optional<double> se;
  std::optional<double> exact;
  std::optional<double> limit;
};

struct ExperimentReport {
  std::string experiment;
  nlohmann::ordered_json config;
  std::uint64_t seed = 0;
  std::vector<ReportRow> rows;
  std::vector<std::string> notes;
  double runtime_ms = 0;

  /// First row whose point has the given metric and agrees with every
  /// member of `match`; nullptr when none does.
  const ReportRow* find(std::string_view metric,
                        const nlohmann::ordered_json& match = nlohmann::ordered_json::object()) const;
};

inline constexpr std::string_view kReportSchema = "urt-report/1";

/// {"schema", "experiment", "config", "seed", "rows", "notes"[, "runtime_ms"]}.
/// Runtime is left out unless asked for, so equal seeds give equal bytes.
std::string to_json(const ExperimentReport& report, bool include_runtime = false);
/// One line per row: experiment,metric,point,estimate,se,exact,limit,seed.
std::string to_csv(const ExperimentReport& report);

/// Worker count after applying URT_THREADS and hardware defaults.
unsigned resolve_workers(unsigned requested);

/// Calls fn(r, seed_r, scratch) for r = 0..reps-1 on `workers` threads,
/// where seed_r = derive_seed(master, r) and each thread owns one scratch
/// tree. Results are returned in replication order.
template <class Fn>
auto replicate(std::uint64_t reps, std::uint64_t master, unsigned workers, Fn&& fn) {
  using Summary = decltype(fn(std::uint64_t{}, std::uint64_t{}, std::declval<RecursiveTree&>()));
  std::vector<Summary> out(reps);
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::uint64_t>(reps, 1))));
  auto run_range = [&](std::uint64_t begin, std::uint64_t end) {
    RecursiveTree scratch;
    for (std::uint64_t r = begin; r < end; ++r) out[r] = fn(r, derive_seed(master, r), scratch);
  };
  if (workers == 1) {
    run_range(0, reps);
    return out;
  }
  {
    std::vector<std::jthread> threads;
    const std::uint64_t chunk = (reps + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t begin = std::min(reps, w * chunk);
      const std::uint64_t end = std::min(reps, begin + chunk);
      threads.emplace_back(run_range, begin, end);
    }
  }
  return out;
}

ExperimentReport run_theorem21(const ExperimentConfig& config);
ExperimentReport run_theorem31(const ExperimentConfig& config);
ExperimentReport run_degree_distribution(const ExperimentConfig& config);
ExperimentReport run_level_sizes(const ExperimentConfig& config);
ExperimentReport run_max_degree(const ExperimentConfig& config);
ExperimentReport run_higher_level_small_degree(const ExperimentConfig& config);
ExperimentReport run_tail_vs_bound(const ExperimentConfig& config);

/// Dispatches on config.id.
ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace urt
