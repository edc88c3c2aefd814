#include "urt/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>
#include <stdexcept>

#include "urt/bounds.hpp"
#include "urt/errors.hpp"
#include "urt/exact_oracle.hpp"
#include "urt/moments.hpp"
#include "urt/statistics.hpp"

namespace urt {

namespace {

using Json = nlohmann::ordered_json;

// Above this node count the theorem31 moment references use double precision.
constexpr std::uint32_t kExactMomentLimit = 4096;
// Exact level-size references are O(n k); skip them beyond this size.
constexpr std::uint32_t kLevelOracleLimit = 50'000'000;
constexpr std::uint32_t kMaxTheorem31Degree = 6;

struct MeanSe {
  double mean = 0;
  std::optional<double> se;
};

MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe r;
  if (xs.empty()) {
    r.mean = std::nan("");
    return r;
  }
  double sum = 0;
  for (double x : xs) sum += x;
  r.mean = sum / static_cast<double>(xs.size());
  if (xs.size() >= 2) {
    double ss = 0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return r;
}

ReportRow make_row(Json point, const MeanSe& m, std::optional<double> exact,
                   std::optional<double> limit) {
  return {std::move(point), m.mean, m.se, exact, limit};
}

double poisson1_pmf(std::uint32_t x) {
  return std::exp(-1.0 - std::lgamma(static_cast<double>(x) + 1.0));
}

double log_n(std::uint32_t n) { return std::log(static_cast<double>(n)); }

std::uint32_t checked_d_max(const ExperimentConfig& c, std::uint32_t cap) {
  if (c.d_max < 1 || c.d_max > cap)
    throw std::invalid_argument("d max must lie in 1.." + std::to_string(cap));
  return c.d_max;
}

ExperimentReport start_report(const ExperimentConfig& config) {
  validate(config);
  ExperimentReport report;
  report.experiment = config.id;
  report.config = to_json(config);
  report.seed = config.seed;
  return report;
}

template <class Body>
ExperimentReport timed(const ExperimentConfig& config, Body&& body) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report = start_report(config);
  body(report, resolve_workers(config.workers));
  report.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<double> column(std::size_t reps, auto&& value) {
  std::vector<double> xs(reps);
  for (std::size_t r = 0; r < reps; ++r) xs[r] = value(r);
  return xs;
}

}  // namespace

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids{
      "theorem21",  "theorem31",  "degree_distribution", "level_sizes",
      "max_degree", "higher_level_small_degree", "tail_vs_bound"};
  return ids;
}

ExperimentConfig default_config(std::string_view id) {
  ExperimentConfig c;
  c.id = std::string(id);
  if (id == "theorem21") {
    c.n_grid = {1000, 10000, 100000};
    c.k_grid = {1, 2};
    c.t_grid = {0.3, 0.5, 0.7};
    c.replications = 200;
  } else if (id == "theorem31") {
    c.n_grid = {10000};
    c.d_max = 3;
    c.replications = 10000;
  } else if (id == "degree_distribution") {
    c.n_grid = {100000};
    c.d_max = 5;
    c.replications = 10;
  } else if (id == "level_sizes") {
    c.n_grid = {1000, 10000, 100000};
    c.k_grid = {0, 1, 2, 3};
    c.replications = 200;
  } else if (id == "max_degree") {
    c.n_grid = {1000, 10000, 100000};
    c.replications = 200;
  } else if (id == "higher_level_small_degree") {
    c.n_grid = {2000, 20000};
    c.k_grid = {2, 3};
    c.d_max = 3;
    c.replications = 500;
  } else if (id == "tail_vs_bound") {
    c.n_grid = {1000, 2000};
    c.t_grid = {0.3, 0.5, 0.7};
    c.eps_grid = {0.1};
    c.replications = 2000;
  } else {
    throw std::invalid_argument("unknown experiment '" + std::string(id) + "'");
  }
  return c;
}

void validate(const ExperimentConfig& c) {
  const auto& ids = experiment_ids();
  if (std::find(ids.begin(), ids.end(), c.id) == ids.end())
    throw std::invalid_argument("unknown experiment '" + c.id + "'");
  if (c.replications < 1) throw std::invalid_argument("replications must be at least 1");
  if (c.n_grid.empty()) throw std::invalid_argument("n grid is empty");
  for (auto n : c.n_grid) {
    if (n < 2) throw std::invalid_argument("every n must be at least 2");
  }
  const bool needs_k = c.id == "theorem21" || c.id == "level_sizes" ||
                       c.id == "higher_level_small_degree";
  if (needs_k && c.k_grid.empty()) throw std::invalid_argument("k grid is empty");
  const bool needs_t = c.id == "theorem21" || c.id == "tail_vs_bound";
  if (needs_t && c.t_grid.empty()) throw std::invalid_argument("t grid is empty");
  for (double t : c.t_grid)
    if (!(t > 0 && t < 1)) throw std::invalid_argument("every t must lie in (0, 1)");
  if (c.id == "tail_vs_bound") {
    if (c.eps_grid.empty()) throw std::invalid_argument("eps grid is empty");
    for (double e : c.eps_grid)
      if (!(e > 0 && e < 1)) throw std::invalid_argument("every eps must lie in (0, 1)");
  }
  if (c.id == "theorem31") checked_d_max(c, kMaxTheorem31Degree);
  if (c.id == "degree_distribution" || c.id == "higher_level_small_degree")
    checked_d_max(c, 1000);
  if (c.id == "higher_level_small_degree") {
    for (auto k : c.k_grid)
      if (k < 2) throw std::invalid_argument("higher-level experiment needs k >= 2");
  }
  if (c.model == GrowthModel::Preferential && c.id != "degree_distribution" &&
      c.id != "max_degree") {
    throw std::invalid_argument(c.id + " is defined for the uniform model only");
  }
}

Json to_json(const ExperimentConfig& c) {
  return {{"experiment", c.id},   {"model", to_string(c.model)},
          {"n", c.n_grid},        {"k", c.k_grid},
          {"t", c.t_grid},        {"eps", c.eps_grid},
          {"dmax", c.d_max},      {"replications", c.replications},
          {"seed", c.seed}};
}

unsigned resolve_workers(unsigned requested) {
  if (const char* env = std::getenv("URT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
  }
  if (requested >= 1) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------------------

ExperimentReport run_theorem21(const ExperimentConfig& config) {
  return timed(config, [&](ExperimentReport& report, unsigned workers) {
    const auto& ks = config.k_grid;
    const auto& ts = config.t_grid;
    const bool first_level_only =
        std::all_of(ks.begin(), ks.end(), [](std::uint32_t k) { return k == 1; });
    struct Summary {
      std::vector<std::uint32_t> level;  // per k
      std::vector<std::uint32_t> count;  // per (k, t)
    };
    for (std::uint32_t n : config.n_grid) {
      const double ln = log_n(n);
      const auto reps = replicate(
          config.replications, config.seed, workers,
          [&](std::uint64_t, std::uint64_t seed, RecursiveTree& tree) {
            Summary s{std::vector<std::uint32_t>(ks.size(), 0),
                      std::vector<std::uint32_t>(ks.size() * ts.size(), 0)};
            if (first_level_only) {
              const auto degrees = grow_first_level(n, seed);
              for (std::size_t a = 0; a < ks.size(); ++a) {
                s.level[a] = static_cast<std::uint32_t>(degrees.size());
                for (std::uint32_t deg : degrees)
                  for (std::size_t b = 0; b < ts.size(); ++b)
                    if (static_cast<double>(deg) > ts[b] * ln) ++s.count[a * ts.size() + b];
              }
              return s;
            }
            tree = grow(GrowthModel::Uniform, n, seed, std::move(tree));
            const auto level = tree.levels();
            const auto degree = tree.degrees();
            for (std::size_t i = 0; i < level.size(); ++i) {
              for (std::size_t a = 0; a < ks.size(); ++a) {
                if (level[i] != ks[a]) continue;
                ++s.level[a];
                for (std::size_t b = 0; b < ts.size(); ++b)
                  if (static_cast<double>(degree[i]) > ts[b] * ln) ++s.count[a * ts.size() + b];
              }
            }
            return s;
          });

      for (std::size_t a = 0; a < ks.size(); ++a) {
        for (std::size_t b = 0; b < ts.size(); ++b) {
          const std::size_t idx = a * ts.size() + b;
          std::vector<double> z;
          for (const auto& s : reps)
            if (s.level[a] > 0) z.push_back(static_cast<double>(s.count[idx]) / s.level[a]);
          if (z.size() < reps.size()) {
            report.notes.push_back("n=" + std::to_string(n) + " k=" + std::to_string(ks[a]) +
                                   ": " + std::to_string(reps.size() - z.size()) +
                                   " replications with an empty level left out of z");
          }
          const double limit = std::pow(1 - ts[b], ks[a]);
          report.rows.push_back(make_row(
              Json{{"metric", "z"}, {"n", n}, {"k", ks[a]}, {"t", ts[b]}}, mean_se(z),
              std::nullopt, limit));

          std::optional<double> exact;
          try {
            exact = expected_exceedance_count(n, ks[a], ts[b]).value;
          } catch (const GuardError& e) {
            if (b == 0 && a == 0)
              report.notes.push_back("n=" + std::to_string(n) + ": no exact numerator (" +
                                     e.what() + ")");
          }
          const auto counts = column(reps.size(), [&](std::size_t r) {
            return static_cast<double>(reps[r].count[idx]);
          });
          report.rows.push_back(make_row(
              Json{{"metric", "z_numerator"}, {"n", n}, {"k", ks[a]}, {"t", ts[b]}},
              mean_se(counts), exact, std::nullopt));
        }
      }
    }
  });
}

// ---------------------------------------------------------------------------

namespace {

// Every exponent vector of dimension d with 1 <= K <= k_total.
std::vector<ExponentVector> vectors_up_to(std::uint32_t d, std::uint32_t k_total) {
  std::vector<std::uint32_t> top(d, 0);
  top[d - 1] = k_total;
  std::vector<ExponentVector> out;
  for (const auto& v : dependency_closure(ExponentVector(top)))
    if (v.total() >= 1) out.push_back(v);
  return out;
}

}  // namespace

ExperimentReport run_theorem31(const ExperimentConfig& config) {
  return timed(config, [&](ExperimentReport& report, unsigned workers) {
    const std::uint32_t d_max = checked_d_max(config, kMaxTheorem31Degree);
    const auto moment_vectors = vectors_up_to(d_max, 3);

    for (std::uint32_t n : config.n_grid) {
      const auto reps = replicate(config.replications, config.seed, workers,
                                  [&](std::uint64_t, std::uint64_t seed, RecursiveTree&) {
                                    std::vector<std::uint32_t> x(d_max, 0);
                                    for (std::uint32_t deg : grow_first_level(n, seed))
                                      if (deg <= d_max) ++x[deg - 1];
                                    return x;
                                  });
      const std::size_t R = reps.size();

      // Exact references from the moment recursion.
      std::vector<std::uint32_t> top(d_max, 0);
      top[d_max - 1] = 3;
      std::map<ExponentVector, double> reference;
      const bool exact_mode = n <= kExactMomentLimit;
      if (exact_mode) {
        MomentRecursion<Rational> rec{ExponentVector(top)};
        rec.advance_to(n);
        for (const auto& v : moment_vectors) reference[v] = rec.value(v).get_d();
      } else {
        MomentRecursion<double> rec{ExponentVector(top)};
        rec.advance_to(n);
        for (const auto& v : moment_vectors) reference[v] = rec.value(v);
        report.notes.push_back("n=" + std::to_string(n) +
                               ": moment references evaluated in double precision");
      }

      for (std::uint32_t d = 1; d <= d_max; ++d) {
        const auto xs = column(R, [&](std::size_t r) { return static_cast<double>(reps[r][d - 1]); });
        std::vector<std::uint32_t> unit(d_max, 0);
        unit[d - 1] = 1;
        report.rows.push_back(make_row(Json{{"metric", "mean_X"}, {"n", n}, {"d", d}},
                                       mean_se(xs), reference.at(ExponentVector(unit)), 1.0));

        // Marginal law and its total-variation distance to Poisson(1).
        std::map<std::uint32_t, std::uint64_t> hist;
        for (const auto& x : reps) ++hist[x[d - 1]];
        double tv = 0, covered = 0;
        for (const auto& [x, c] : hist) {
          const double p = static_cast<double>(c) / static_cast<double>(R);
          const double q = poisson1_pmf(x);
          tv += std::abs(p - q);
          covered += q;
          report.rows.push_back({Json{{"metric", "marginal_pmf"}, {"n", n}, {"d", d}, {"x", x}},
                                 p, std::sqrt(p * (1 - p) / static_cast<double>(R)),
                                 std::nullopt, q});
        }
        tv = 0.5 * (tv + std::max(0.0, 1.0 - covered));
        report.rows.push_back(
            {Json{{"metric", "tv_poisson"}, {"n", n}, {"d", d}}, tv, std::nullopt, std::nullopt, 0.0});
      }

      for (std::uint32_t d1 = 1; d1 <= d_max; ++d1) {
        for (std::uint32_t d2 = d1 + 1; d2 <= d_max; ++d2) {
          double m1 = 0, m2 = 0;
          for (const auto& x : reps) {
            m1 += x[d1 - 1];
            m2 += x[d2 - 1];
          }
          m1 /= static_cast<double>(R);
          m2 /= static_cast<double>(R);
          double c12 = 0, v1 = 0, v2 = 0;
          for (const auto& x : reps) {
            const double a = x[d1 - 1] - m1, b = x[d2 - 1] - m2;
            c12 += a * b;
            v1 += a * a;
            v2 += b * b;
          }
          const double corr = (v1 > 0 && v2 > 0) ? c12 / std::sqrt(v1 * v2) : std::nan("");
          report.rows.push_back({Json{{"metric", "corr"}, {"n", n}, {"d1", d1}, {"d2", d2}}, corr,
                                 R > 3 ? std::optional<double>(1.0 / std::sqrt(R - 3.0))
                                       : std::nullopt,
                                 std::nullopt, 0.0});
        }
      }

      for (const auto& v : moment_vectors) {
        const auto products = column(R, [&](std::size_t r) {
          double p = 1;
          for (std::uint32_t i = 0; i < d_max; ++i)
            p *= falling_factorial<double>(static_cast<double>(reps[r][i]), v[i]);
          return p;
        });
        report.rows.push_back(make_row(
            Json{{"metric", "factorial_moment"}, {"n", n}, {"k", v.to_string('-')}},
            mean_se(products), reference.at(v), 1.0));
      }

      std::map<std::vector<std::uint32_t>, std::uint64_t> joint;
      for (const auto& x : reps) ++joint[x];
      for (const auto& [x, c] : joint) {
        double q = 1;
        for (auto xi : x) q *= poisson1_pmf(xi);
        const double p = static_cast<double>(c) / static_cast<double>(R);
        report.rows.push_back({Json{{"metric", "joint_pmf"}, {"n", n}, {"x", x}}, p,
                               std::sqrt(p * (1 - p) / static_cast<double>(R)), std::nullopt, q});
      }
    }
  });
}

// ---------------------------------------------------------------------------

namespace {

double degree_limit(GrowthModel model, std::uint32_t d) {
  if (model == GrowthModel::Uniform) return std::ldexp(1.0, -static_cast<int>(d));
  const double x = d;
  return 4.0 / (x * (x + 1) * (x + 2));
}

// Limit mass of degrees above d_max.
double degree_tail_limit(GrowthModel model, std::uint32_t d_max) {
  if (model == GrowthModel::Uniform) return std::ldexp(1.0, -static_cast<int>(d_max));
  const double x = d_max;
  return 2.0 / ((x + 1) * (x + 2));
}

}  // namespace

ExperimentReport run_degree_distribution(const ExperimentConfig& config) {
  return timed(config, [&](ExperimentReport& report, unsigned workers) {
    const std::uint32_t d_max = config.d_max;
    for (std::uint32_t n : config.n_grid) {
      if (n < minimum_size(config.model)) throw std::invalid_argument("n below model minimum");
      // Entries 0..d_max-1 hold degrees 1..d_max, the last entry everything above.
      const auto reps = replicate(
          config.replications, config.seed, workers,
          [&](std::uint64_t, std::uint64_t seed, RecursiveTree& tree) {
            tree = grow(config.model, n, seed, std::move(tree));
            std::vector<std::uint64_t> counts(d_max + 1, 0);
            for (std::uint32_t deg : tree.degrees()) ++counts[std::min(deg, d_max + 1) - 1];
            return counts;
          });
      const double nd = n;
      for (std::uint32_t d = 1; d <= d_max + 1; ++d) {
        const auto frac = column(reps.size(), [&](std::size_t r) { return reps[r][d - 1] / nd; });
        const bool tail = d == d_max + 1;
        Json point{{"metric", tail ? "degree_fraction_above" : "degree_fraction"},
                   {"model", to_string(config.model)}, {"n", n}, {"d", tail ? d_max : d}};
        report.rows.push_back(make_row(
            std::move(point), mean_se(frac), std::nullopt,
            tail ? degree_tail_limit(config.model, d_max) : degree_limit(config.model, d)));
      }
      const auto sums = column(reps.size(), [&](std::size_t r) {
        std::uint64_t s = 0;
        for (auto c : reps[r]) s += c;
        return static_cast<double>(s) / nd;
      });
      report.rows.push_back(make_row(
          Json{{"metric", "fraction_sum"}, {"model", to_string(config.model)}, {"n", n}},
          mean_se(sums), 1.0, 1.0));
    }
  });
}

// ---------------------------------------------------------------------------

ExperimentReport run_level_sizes(const ExperimentConfig& config) {
  return timed(config, [&](ExperimentReport& report, unsigned workers) {
    const auto& ks = config.k_grid;
    for (std::uint32_t n : config.n_grid) {
      const auto reps = replicate(config.replications, config.seed, workers,
                                  [&](std::uint64_t, std::uint64_t seed, RecursiveTree& tree) {
                                    tree = grow(GrowthModel::Uniform, n, seed, std::move(tree));
                                    const auto sizes = level_sizes(tree);
                                    std::vector<std::uint64_t> out(ks.size(), 0);
                                    for (std::size_t a = 0; a < ks.size(); ++a)
                                      if (ks[a] < sizes.size()) out[a] = sizes[ks[a]];
                                    return out;
                                  });
      for (std::size_t a = 0; a < ks.size(); ++a) {
        const std::uint32_t k = ks[a];
        const double asymptotic = std::pow(log_n(n), k) / std::tgamma(k + 1.0);
        std::optional<double> exact;
        if (n <= kLevelOracleLimit) exact = expected_level_size(n, k).value;
        const auto sizes =
            column(reps.size(), [&](std::size_t r) { return static_cast<double>(reps[r][a]); });
        const MeanSe m = mean_se(sizes);
        report.rows.push_back(make_row(Json{{"metric", "level_size"}, {"n", n}, {"k", k}}, m,
                                       exact, asymptotic));
        MeanSe ratio{m.mean / asymptotic, std::nullopt};
        if (m.se) ratio.se = *m.se / asymptotic;
        std::optional<double> exact_ratio;
        if (exact) exact_ratio = *exact / asymptotic;
        report.rows.push_back(make_row(Json{{"metric", "level_ratio"}, {"n", n}, {"k", k}}, ratio,
                                       exact_ratio, 1.0));
      }
    }
  });
}

// ---------------------------------------------------------------------------

ExperimentReport run_max_degree(const ExperimentConfig& config) {
  return timed(config, [&](ExperimentReport& report, unsigned workers) {
    for (std::uint32_t n : config.n_grid) {
      if (n < minimum_size(config.model)) throw std::invalid_argument("n below model minimum");
      struct Summary {
        std::uint32_t max_degree;
        std::uint32_t root_degree;
      };
      const auto reps = replicate(config.replications, config.seed, workers,
                                  [&](std::uint64_t, std::uint64_t seed, RecursiveTree& tree) {
                                    tree = grow(config.model, n, seed, std::move(tree));
                                    return Summary{max_degree(tree), tree.degree(0)};
                                  });
      const double log2n = std::log2(static_cast<double>(n));
      std::optional<double> limit;
      if (config.model == GrowthModel::Uniform) limit = 1.0;

      auto ratios = column(reps.size(), [&](std::size_t r) { return reps[r].max_degree / log2n; });
      report.rows.push_back(make_row(
          Json{{"metric", "max_degree_ratio"}, {"stat", "mean"}, {"n", n}}, mean_se(ratios),
          std::nullopt, limit));
      std::vector<double> sorted = ratios;
      std::sort(sorted.begin(), sorted.end());
      auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(sorted.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = static_cast<std::size_t>(std::ceil(pos));
        return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
      };
      for (const auto& [name, q] : std::vector<std::pair<std::string, double>>{
               {"min", 0.0}, {"q10", 0.1}, {"median", 0.5}, {"q90", 0.9}, {"max", 1.0}}) {
        report.rows.push_back({Json{{"metric", "max_degree_ratio"}, {"stat", name}, {"n", n}},
                               quantile(q), std::nullopt, std::nullopt, limit});
      }

      // Diagnostic: the root alone has expected degree H_{n-1}.
      double harmonic = 0;
      for (std::uint32_t m = n - 1; m >= 1; --m) harmonic += 1.0 / m;
      const auto root = column(reps.size(), [&](std::size_t r) { return reps[r].root_degree / log2n; });
      std::optional<double> root_exact;
      if (config.model == GrowthModel::Uniform) root_exact = harmonic / log2n;
      report.rows.push_back(make_row(Json{{"metric", "root_degree_ratio"}, {"n", n}}, mean_se(root),
                                     root_exact, std::nullopt));
    }
  });
}

// ---------------------------------------------------------------------------

ExperimentReport run_higher_level_small_degree(const ExperimentConfig& config) {
  return timed(config, [&](ExperimentReport& report, unsigned workers) {
    const auto& ks = config.k_grid;
    const std::uint32_t d_max = config.d_max;
    const std::uint32_t k_top = *std::max_element(ks.begin(), ks.end());
    for (std::uint32_t n : config.n_grid) {
      struct Summary {
        std::vector<std::uint32_t> sizes;   // levels 0..k_top
        std::vector<std::uint32_t> counts;  // (k index, d) -> count
      };
      const auto reps = replicate(
          config.replications, config.seed, workers,
          [&](std::uint64_t, std::uint64_t seed, RecursiveTree& tree) {
            tree = grow(GrowthModel::Uniform, n, seed, std::move(tree));
            Summary s{std::vector<std::uint32_t>(k_top + 1, 0),
                      std::vector<std::uint32_t>(ks.size() * d_max, 0)};
            const auto level = tree.levels();
            const auto degree = tree.degrees();
            for (std::size_t i = 0; i < level.size(); ++i) {
              if (level[i] > k_top) continue;
              ++s.sizes[level[i]];
              if (degree[i] > d_max) continue;
              for (std::size_t a = 0; a < ks.size(); ++a)
                if (level[i] == ks[a]) ++s.counts[a * d_max + degree[i] - 1];
            }
            return s;
          });
      const double ln = log_n(n);
      for (std::size_t a = 0; a < ks.size(); ++a) {
        const std::uint32_t k = ks[a];
        const auto prev = column(reps.size(), [&](std::size_t r) {
          return static_cast<double>(reps[r].sizes[k - 1]);
        });
        const MeanSe prev_m = mean_se(prev);
        report.rows.push_back(make_row(Json{{"metric", "previous_level_size"}, {"n", n}, {"k", k}},
                                       prev_m, std::nullopt, std::nullopt));
        for (std::uint32_t d = 1; d <= d_max; ++d) {
          const std::size_t idx = a * d_max + d - 1;
          const auto counts = column(reps.size(), [&](std::size_t r) {
            return static_cast<double>(reps[r].counts[idx]);
          });
          const MeanSe cm = mean_se(counts);
          Json point{{"n", n}, {"k", k}, {"d", d}};
          auto with_metric = [&](const char* metric) {
            Json p{{"metric", metric}};
            p.update(point);
            return p;
          };
          report.rows.push_back(make_row(with_metric("count"), cm, std::nullopt, std::nullopt));

          // Delta-method error of the ratio of two means.
          MeanSe ratio{cm.mean / prev_m.mean, std::nullopt};
          if (reps.size() >= 2) {
            double ss = 0;
            for (std::size_t r = 0; r < reps.size(); ++r) {
              const double e = counts[r] - ratio.mean * prev[r];
              ss += e * e;
            }
            ratio.se = std::sqrt(ss / (reps.size() - 1.0) / reps.size()) / prev_m.mean;
          }
          report.rows.push_back(make_row(with_metric("ratio_of_means"), ratio, std::nullopt, 1.0));

          std::vector<double> prop;
          for (const auto& s : reps)
            if (s.sizes[k] > 0) prop.push_back(static_cast<double>(s.counts[idx]) / s.sizes[k]);
          const MeanSe pm = mean_se(prop);
          report.rows.push_back(make_row(with_metric("proportion"), pm, std::nullopt, 1.0 / (k * ln)));
          MeanSe scaled{pm.mean * k * ln, std::nullopt};
          if (pm.se) scaled.se = *pm.se * k * ln;
          report.rows.push_back(make_row(with_metric("scaled_proportion"), scaled, std::nullopt, 1.0));
        }
      }
    }
  });
}

// ---------------------------------------------------------------------------

namespace {

// Roughly geometric sample of the integers in [lo, hi], endpoints included.
std::vector<std::uint32_t> log_grid(std::uint32_t lo, std::uint32_t hi, int points = 10) {
  std::vector<std::uint32_t> out;
  if (lo > hi) return out;
  out.push_back(lo);
  const double ratio = static_cast<double>(hi) / lo;
  for (int m = 1; m < points; ++m) {
    const auto v = static_cast<std::uint32_t>(std::llround(lo * std::pow(ratio, m / double(points))));
    if (v > out.back() && v < hi) out.push_back(v);
  }
  if (hi > out.back()) out.push_back(hi);
  return out;
}

TailBoundReport evaluate_tail(TailSide side, std::uint32_t i, std::uint32_t n, double t,
                              double eps, double bound, std::uint64_t reps, std::uint64_t master) {
  TailBoundReport row;
  row.side = side;
  row.i = i;
  row.n = n;
  row.t = t;
  row.eps = eps;
  row.s = expected_children(i, n);
  row.bound = bound;
  const double threshold = t * log_n(n);
  if (n - i <= kMaxConvolutionLength) {
    row.mode = TailMode::Exact;
    const auto pmf = child_count_pmf<double>(i, n);
    double above = 0, below = 0;
    for (std::size_t x = 0; x < pmf.size(); ++x)
      (static_cast<double>(x) > threshold ? above : below) += pmf[x];
    row.tail = side == TailSide::Upper ? above : below;
  } else {
    row.mode = TailMode::MonteCarlo;
    Xoshiro256pp rng(derive_seed(master, (static_cast<std::uint64_t>(n) << 32) | i));
    std::uint64_t hits = 0;
    for (std::uint64_t r = 0; r < reps; ++r) {
      std::uint32_t x = 0;
      for (std::uint32_t j = i + 1; j <= n; ++j) x += uniform_below(rng, j) == 0;
      const bool above = static_cast<double>(x) > threshold;
      hits += side == TailSide::Upper ? above : !above;
    }
    row.tail = static_cast<double>(hits) / static_cast<double>(reps);
    row.tail_se = std::sqrt(row.tail * (1 - row.tail) / static_cast<double>(reps));
  }
  return row;
}

}  // namespace

ExperimentReport run_tail_vs_bound(const ExperimentConfig& config) {
  return timed(config, [&](ExperimentReport& report, unsigned) {
    for (std::uint32_t n : config.n_grid) {
      for (double t : config.t_grid) {
        for (double eps : config.eps_grid) {
          for (TailSide side : {TailSide::Upper, TailSide::Lower}) {
            const bool upper = side == TailSide::Upper;
            const char* name = upper ? "high-degree" : "low-degree";
            double bound = 0;
            try {
              bound = upper ? high_degree_bound(n, t, eps) : low_degree_bound(n, t, eps);
            } catch (const std::invalid_argument& e) {
              char buf[200];
              std::snprintf(buf, sizeof buf, "skipped %s bound at n=%u t=%g eps=%g: %s", name, n,
                            t, eps, e.what());
              report.notes.emplace_back(buf);
              continue;
            }
            const auto [lo, hi] = upper ? high_degree_range(n, t, eps) : low_degree_range(n, t, eps);
            for (std::uint32_t i : log_grid(lo, hi)) {
              const auto row = evaluate_tail(side, i, n, t, eps, bound, config.replications, config.seed);
              ReportRow out;
              out.point = Json{{"metric", "tail_vs_bound"}, {"side", name},    {"n", n},
                               {"i", i},                    {"t", t},          {"eps", eps},
                               {"s", row.s},                {"mode", to_string(row.mode)},
                               {"margin", row.margin()}};
              out.estimate = row.tail;
              out.se = row.tail_se;
              if (row.mode == TailMode::Exact) out.exact = row.tail;
              out.limit = row.bound;
              report.rows.push_back(std::move(out));
            }
          }
        }
      }
    }
  });
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  const std::string& id = config.id;
  if (id == "theorem21") return run_theorem21(config);
  if (id == "theorem31") return run_theorem31(config);
  if (id == "degree_distribution") return run_degree_distribution(config);
  if (id == "level_sizes") return run_level_sizes(config);
  if (id == "max_degree") return run_max_degree(config);
  if (id == "higher_level_small_degree") return run_higher_level_small_degree(config);
  if (id == "tail_vs_bound") return run_tail_vs_bound(config);
  throw std::invalid_argument("unknown experiment '" + id + "'");
}

}  // namespace urt
