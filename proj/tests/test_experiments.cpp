#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include <json.hpp>

#include "urt/experiments.hpp"

using namespace urt;
using Json = nlohmann::ordered_json;

namespace {

ExperimentConfig small(const char* id) {
  auto c = default_config(id);
  c.replications = 200;
  c.workers = 1;
  c.seed = 17;
  return c;
}

}  // namespace

TEST_CASE("every id has a valid default") {
  for (const auto& id : experiment_ids()) CHECK_NOTHROW(validate(default_config(id)));
  CHECK_THROWS_AS(default_config("nope"), std::invalid_argument);
}

TEST_CASE("invalid configs are rejected") {
  auto c = small("theorem21");
  c.replications = 0;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = small("theorem21");
  c.t_grid = {1.0};
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = small("theorem21");
  c.n_grid.clear();
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = small("theorem31");
  c.d_max = 7;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = small("higher_level_small_degree");
  c.k_grid = {1};
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = small("level_sizes");
  c.model = GrowthModel::Preferential;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c.id = "unknown";
  CHECK_THROWS_AS(run_experiment(c), std::invalid_argument);
}

TEST_CASE("theorem 2.1 runner") {
  auto c = small("theorem21");
  c.n_grid = {500, 2000};
  c.k_grid = {1, 2};
  c.t_grid = {1e-9, 0.5};
  auto r = run_theorem21(c);
  for (std::uint32_t n : {500u, 2000u}) {
    const auto* z0 = r.find("z", {{"n", n}, {"k", 1}, {"t", 1e-9}});
    REQUIRE(z0);
    CHECK(z0->estimate == 1.0);
    CHECK(*z0->se == 0.0);
    const auto* z = r.find("z", {{"n", n}, {"k", 2}, {"t", 0.5}});
    REQUIRE(z);
    CHECK(*z->limit == doctest::Approx(0.25));
    const auto* num = r.find("z_numerator", {{"n", n}, {"k", 1}, {"t", 0.5}});
    REQUIRE(num);
    REQUIRE(num->exact);
    CHECK(std::abs(num->estimate - *num->exact) < 4 * *num->se);
  }
}

TEST_CASE("theorem 3.1 runner") {
  auto c = small("theorem31");
  c.n_grid = {60, 3000};
  c.replications = 5000;
  c.d_max = 3;
  auto r = run_theorem31(c);
  for (std::uint32_t n : {60u, 3000u}) {
    const auto* m = r.find("mean_X", {{"n", n}, {"d", 1}});
    REQUIRE(m);
    CHECK(*m->exact == 1.0);
    CHECK(std::abs(m->estimate - 1.0) < 4 * *m->se);
    const auto* m2 = r.find("mean_X", {{"n", n}, {"d", 2}});
    CHECK(*m2->exact == doctest::Approx((n - 2.0) / (n - 1.0)));
    for (std::uint32_t d = 1; d <= 3; ++d) {
      const auto* tv = r.find("tv_poisson", {{"n", n}, {"d", d}});
      REQUIRE(tv);
      CHECK(tv->estimate >= 0);
      CHECK(tv->estimate <= 1);
    }
    const auto* corr = r.find("corr", {{"n", n}, {"d1", 1}, {"d2", 2}});
    REQUIRE(corr);
    CHECK(std::abs(corr->estimate) <= 1);
    const auto* fm = r.find("factorial_moment", {{"n", n}, {"k", "1-1-0"}});
    REQUIRE(fm);
    REQUIRE(fm->exact);
    CHECK(std::abs(fm->estimate - *fm->exact) < 5 * *fm->se);
  }
}

TEST_CASE("degree distribution runner") {
  for (auto model : {GrowthModel::Uniform, GrowthModel::Preferential}) {
    auto c = small("degree_distribution");
    c.model = model;
    c.n_grid = {20000};
    c.replications = 3;
    c.d_max = 5;
    auto r = run_degree_distribution(c);
    CHECK(r.find("fraction_sum")->estimate == doctest::Approx(1.0).epsilon(1e-12));
    const auto* d1 = r.find("degree_fraction", {{"d", 1}});
    REQUIRE(d1);
    CHECK(*d1->limit == doctest::Approx(model == GrowthModel::Uniform ? 0.5 : 2.0 / 3));
    CHECK(std::abs(d1->estimate - *d1->limit) < 0.02);
  }
}

TEST_CASE("level size runner") {
  auto c = small("level_sizes");
  c.n_grid = {2000};
  c.k_grid = {0, 1, 2};
  c.replications = 1000;
  auto r = run_level_sizes(c);
  const auto* l0 = r.find("level_size", {{"k", 0}});
  CHECK(l0->estimate == 1.0);
  CHECK(*l0->se == 0.0);
  for (std::uint32_t k : {1u, 2u}) {
    const auto* l = r.find("level_size", {{"k", k}});
    REQUIRE(l->exact);
    CHECK(std::abs(l->estimate - *l->exact) < 4 * *l->se);
  }
}

TEST_CASE("max degree runner") {
  auto c = small("max_degree");
  c.n_grid = {2, 5000};
  auto r = run_max_degree(c);
  const auto* two = r.find("max_degree_ratio", {{"stat", "mean"}, {"n", 2}});
  CHECK(two->estimate == 1.0);
  const auto* lo = r.find("max_degree_ratio", {{"stat", "min"}, {"n", 5000}});
  const auto* med = r.find("max_degree_ratio", {{"stat", "median"}, {"n", 5000}});
  const auto* hi = r.find("max_degree_ratio", {{"stat", "max"}, {"n", 5000}});
  CHECK(lo->estimate <= med->estimate);
  CHECK(med->estimate <= hi->estimate);
  const auto* root = r.find("root_degree_ratio", {{"n", 5000}});
  CHECK(std::abs(root->estimate - *root->exact) < 4 * *root->se);
  CHECK(hi->estimate >= root->estimate);
}

TEST_CASE("higher level runner") {
  auto c = small("higher_level_small_degree");
  c.n_grid = {2000};
  c.k_grid = {2, 3};
  c.d_max = 2;
  auto r = run_higher_level_small_degree(c);
  for (std::uint32_t k : {2u, 3u})
    for (std::uint32_t d : {1u, 2u}) {
      const auto* count = r.find("count", {{"k", k}, {"d", d}});
      REQUIRE(count);
      CHECK(count->estimate >= 0);
      const auto* prop = r.find("proportion", {{"k", k}, {"d", d}});
      CHECK(prop->estimate >= 0);
      CHECK(prop->estimate <= 1);
      CHECK(*prop->limit == doctest::Approx(1 / (k * std::log(2000.0))));
    }
}

TEST_CASE("tail versus bound runner") {
  auto c = small("tail_vs_bound");
  c.n_grid = {1000, 30000};
  c.t_grid = {0.3, 0.5, 0.7, 0.95};
  c.eps_grid = {0.1, 0.28};
  c.replications = 2000;
  auto r = run_tail_vs_bound(c);
  int exact = 0, mc = 0;
  for (const auto& row : r.rows) {
    if (row.point["mode"] == "exact") {
      ++exact;
      CHECK(row.point["margin"].get<double>() >= 0);
    } else {
      ++mc;
      CHECK(row.estimate <= *row.limit + 4 * *row.se);
    }
  }
  CHECK(exact > 0);
  CHECK(mc > 0);
  CHECK_FALSE(r.notes.empty());  // t = 0.95 with eps = 0.28 leaves no room for either slot
}

TEST_CASE("reports are reproducible and independent of worker count") {
  for (const char* id : {"theorem21", "theorem31", "level_sizes", "tail_vs_bound"}) {
    auto c = small(id);
    c.n_grid = {300, 1200};
    c.replications = 150;
    const auto one = to_json(run_experiment(c));
    c.workers = 3;
    const auto three = to_json(run_experiment(c));
    CHECK(one == three);
    CHECK(to_csv(run_experiment(c)) == to_csv(run_experiment(c)));
    c.seed = 18;
    CHECK(to_json(run_experiment(c)) != one);
  }
}

TEST_CASE("report schema") {
  auto c = small("level_sizes");
  c.n_grid = {100};
  c.k_grid = {1};
  c.replications = 10;
  auto report = run_level_sizes(c);
  auto j = nlohmann::json::parse(to_json(report));
  CHECK(j["schema"] == "urt-report/1");
  CHECK(j["experiment"] == "level_sizes");
  CHECK(j["seed"] == 17);
  CHECK(j["config"]["replications"] == 10);
  CHECK_FALSE(j["config"].contains("workers"));
  CHECK_FALSE(j.contains("runtime_ms"));
  CHECK(nlohmann::json::parse(to_json(report, true)).contains("runtime_ms"));
  for (const auto& row : j["rows"]) {
    CHECK(row.contains("point"));
    CHECK(row["point"].contains("metric"));
    CHECK(row.contains("estimate"));
    CHECK(row.contains("se"));
    CHECK(row.contains("exact"));
    CHECK(row.contains("limit"));
    CHECK(row["seed"] == 17);
  }
  const auto csv = to_csv(report);
  CHECK(csv.rfind("experiment,metric,point,estimate,se,exact,limit,seed\n", 0) == 0);
  CHECK(csv.find("level_sizes,level_size,n=100;k=1,") != std::string::npos);
}

TEST_CASE("worker resolution") {
  CHECK(resolve_workers(3) >= 1);
  setenv("URT_THREADS", "5", 1);
  CHECK(resolve_workers(2) == 5);
  unsetenv("URT_THREADS");
  CHECK(resolve_workers(2) == 2);
}

TEST_CASE("replicate returns summaries in replication order") {
  auto out = replicate(100, 9, 4, [](std::uint64_t r, std::uint64_t seed, RecursiveTree&) {
    return std::pair{r, seed};
  });
  for (std::uint64_t r = 0; r < 100; ++r) {
    CHECK(out[r].first == r);
    CHECK(out[r].second == derive_seed(9, r));
  }
}
