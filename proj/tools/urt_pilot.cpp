// Pilot runs that calibrate the finite-n thresholds used by the acceptance
// suite. Every threshold is the largest pilot deviation times a slack
// factor; the acceptance suite runs with seeds outside the pilot set.
// Twenty pilot runs put the noise-driven thresholds near three standard
// errors of a fresh run.
//
//   urt_pilot --out tests/golden/thresholds.json

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "urt/experiments.hpp"

using Json = nlohmann::ordered_json;

namespace {

constexpr double kSlack = 1.5;
constexpr std::uint64_t kFirstPilotSeed = 1001;
constexpr int kPilotRuns = 20;

std::vector<std::uint64_t> pilot_seeds() {
  std::vector<std::uint64_t> s(kPilotRuns);
  for (int i = 0; i < kPilotRuns; ++i) s[i] = kFirstPilotSeed + i;
  return s;
}

const std::vector<std::uint64_t> kPilotSeeds = pilot_seeds();

double max_abs(const std::vector<double>& v, double centre = 0) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x - centre));
  return m;
}

Json band(const std::vector<double>& values) {
  const double half = kSlack * max_abs(values, 1.0);
  return Json::array({1.0 - half, 1.0 + half});
}

urt::ExperimentConfig config(const char* id, unsigned workers) {
  auto c = urt::default_config(id);
  c.workers = workers;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Calibrates acceptance thresholds from pilot runs"};
  std::string out = "thresholds.json";
  unsigned workers = 0;
  app.add_option("--out", out, "Output JSON file");
  app.add_option("--workers", workers, "Worker threads (0: all)");
  CLI11_PARSE(app, argc, argv);

  Json golden;
  golden["pilot_seeds"] = kPilotSeeds;
  golden["slack"] = kSlack;

  {
    auto c = config("theorem31", workers);
    c.n_grid = {100000};
    c.d_max = 3;
    c.replications = 100000;
    Json tv = Json::object(), corr = Json::object(), thr_tv = Json::object(),
         thr_corr = Json::object();
    std::vector<std::vector<double>> tvs(3), corrs(3);
    for (auto seed : kPilotSeeds) {
      c.seed = seed;
      std::cerr << "theorem31 seed " << seed << "\n";
      const auto r = urt::run_theorem31(c);
      for (std::uint32_t d = 1; d <= 3; ++d)
        tvs[d - 1].push_back(r.find("tv_poisson", {{"d", d}})->estimate);
      int p = 0;
      for (std::uint32_t d1 = 1; d1 <= 3; ++d1)
        for (std::uint32_t d2 = d1 + 1; d2 <= 3; ++d2, ++p)
          corrs[p].push_back(r.find("corr", {{"d1", d1}, {"d2", d2}})->estimate);
    }
    for (std::uint32_t d = 1; d <= 3; ++d) {
      tv[std::to_string(d)] = tvs[d - 1];
      thr_tv[std::to_string(d)] = kSlack * max_abs(tvs[d - 1]);
    }
    const char* pairs[] = {"1-2", "1-3", "2-3"};
    for (int p = 0; p < 3; ++p) {
      corr[pairs[p]] = corrs[p];
      thr_corr[pairs[p]] = kSlack * max_abs(corrs[p]);
    }
    golden["theorem31"] = {{"n", 100000},
                           {"replications", 100000},
                           {"pilot", {{"tv_poisson", tv}, {"corr", corr}}},
                           {"thresholds", {{"tv_poisson", thr_tv}, {"abs_corr", thr_corr}}}};
  }

  {
    Json dev = Json::object();
    for (auto model : {urt::GrowthModel::Uniform, urt::GrowthModel::Preferential}) {
      auto c = config("degree_distribution", workers);
      c.model = model;
      c.n_grid = {1000000};
      c.d_max = 5;
      c.replications = 1;
      std::vector<double> worst;
      for (auto seed : kPilotSeeds) {
        c.seed = seed;
        const auto r = urt::run_degree_distribution(c);
        double m = 0;
        for (std::uint32_t d = 1; d <= 5; ++d) {
          const auto* row = r.find("degree_fraction", {{"d", d}});
          m = std::max(m, std::abs(row->estimate - *row->limit));
        }
        worst.push_back(m);
      }
      dev[std::string(urt::to_string(model))] = worst;
    }
    golden["degree_distribution"] = {
        {"n", 1000000}, {"d_max", 5}, {"pilot_max_deviation", dev}, {"tolerance", 0.01}};
  }

  {
    auto c = config("max_degree", workers);
    c.n_grid = {1000000};
    c.replications = 50;
    std::vector<double> means;
    for (auto seed : kPilotSeeds) {
      c.seed = seed;
      means.push_back(urt::run_max_degree(c).find("max_degree_ratio", {{"stat", "mean"}})->estimate);
    }
    golden["max_degree"] = {{"n", 1000000}, {"replications", 50}, {"pilot_mean_ratio", means},
                            {"band", band(means)}};
  }

  {
    auto c = config("level_sizes", workers);
    c.n_grid = {1000000};
    c.k_grid = {1, 2, 3, 4};
    c.replications = 50;
    Json pilot = Json::object(), bands = Json::object();
    std::vector<std::vector<double>> ratios(4);
    for (auto seed : kPilotSeeds) {
      c.seed = seed;
      const auto r = urt::run_level_sizes(c);
      for (std::uint32_t k = 1; k <= 4; ++k)
        ratios[k - 1].push_back(r.find("level_ratio", {{"k", k}})->estimate);
    }
    for (std::uint32_t k = 1; k <= 4; ++k) {
      pilot[std::to_string(k)] = ratios[k - 1];
      bands[std::to_string(k)] = band(ratios[k - 1]);
    }
    golden["level_sizes"] = {
        {"n", 1000000}, {"replications", 50}, {"pilot_ratio", pilot}, {"band", bands}};
  }

  {
    auto c = config("higher_level_small_degree", workers);
    c.n_grid = {2000};
    c.k_grid = {2};
    c.d_max = 1;
    c.replications = 2000;
    std::vector<double> ratios;
    for (auto seed : kPilotSeeds) {
      c.seed = seed;
      ratios.push_back(urt::run_higher_level_small_degree(c)
                           .find("ratio_of_means", {{"k", 2}, {"d", 1}})
                           ->estimate);
    }
    golden["higher_level_small_degree"] = {{"n", 2000}, {"k", 2}, {"d", 1},
                                           {"replications", 2000}, {"pilot_ratio", ratios},
                                           {"band", band(ratios)}};
  }

  std::ofstream(out) << golden.dump(2) << "\n";
  std::cerr << "wrote " << out << "\n";
  return 0;
}
