// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Pass criterion numbers to run a subset:
//
//   acceptance            all ten
//   acceptance 6 7        only criteria 6 and 7

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "urt/bijection.hpp"
#include "urt/bounds.hpp"
#include "urt/exact_oracle.hpp"
#include "urt/experiments.hpp"
#include "urt/moments.hpp"
#include "urt/statistics.hpp"

using namespace urt;
using Json = nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> failures;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (failures.size() < 10) failures.push_back(what);
    }
  }
};

struct Criterion {
  int id;
  std::string title;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Json golden() {
  std::ifstream in(URT_GOLDEN_DIR "/thresholds.json");
  if (!in) throw std::runtime_error("missing golden file " URT_GOLDEN_DIR "/thresholds.json");
  return Json::parse(in);
}

std::vector<ExponentVector> vectors_up_to(std::uint32_t d, std::uint32_t K) {
  std::vector<ExponentVector> out;
  std::vector<std::uint32_t> v(d, 0);
  auto rec = [&](auto&& self, std::uint32_t pos, std::uint32_t left) -> void {
    if (pos == d) {
      out.emplace_back(v);
      return;
    }
    for (std::uint32_t x = 0; x <= left; ++x) {
      v[pos] = x;
      self(self, pos + 1, left - x);
    }
  };
  rec(rec, 0, K);
  return out;
}

ExperimentConfig config(const char* id, std::uint64_t seed) {
  auto c = default_config(id);
  c.seed = seed;
  return c;
}

const ReportRow& row(const ExperimentReport& r, const char* metric, const nlohmann::ordered_json& m) {
  const auto* p = r.find(metric, m);
  if (!p) throw std::runtime_error(std::string("report has no row ") + metric + " " + m.dump());
  return *p;
}

Outcome exact_moments() {
  Outcome o;
  int compared = 0;
  for (std::uint32_t n = 2; n <= 8; ++n) {
    o.require(exact_moment(n, ExponentVector{1}) == 1, "E(" + std::to_string(n) + ",(1)) != 1");
    for (std::uint32_t d = 1; d <= 3; ++d)
      for (const auto& k : vectors_up_to(d, 3)) {
        const Rational rec = exact_moment(n, k);
        const Rational brute = brute_force_moment(n, k);
        o.require(rec == brute, "n=" + std::to_string(n) + " k=" + k.to_string() + ": " +
                                    to_string(rec) + " vs " + to_string(brute));
        ++compared;
      }
  }
  o.detail = std::to_string(compared) + " (n,k) pairs equal as rationals";
  return o;
}

Outcome bijection_suite() {
  Outcome o;
  std::uint64_t trees = 0;
  for (std::uint32_t n = 2; n <= 8; ++n) {
    std::map<Permutation, int> hits;
    for (const auto& t : enumerate_trees(n)) {
      ++trees;
      const Permutation p = tree_to_permutation(t);
      ++hits[p];
      o.require(permutation_to_tree(p).attachment_sequence() == t.attachment_sequence(),
                "round trip failed at n=" + std::to_string(n));
      o.require(fixed_points_after_first(p) == degree_counts_in_level(t, 1).count(1),
                "fixed points differ from X[n,1] at n=" + std::to_string(n));
    }
    std::vector<std::uint32_t> rest(n - 1);
    std::iota(rest.begin(), rest.end(), 2u);
    std::size_t expected = 0;
    do {
      std::vector<std::uint32_t> v{1};
      v.insert(v.end(), rest.begin(), rest.end());
      o.require(hits.count(Permutation{v}) == 1, "permutation missing from image at n=" + std::to_string(n));
      ++expected;
    } while (std::next_permutation(rest.begin(), rest.end()));
    o.require(hits.size() == expected, "image larger than the permutations fixing 1");
    for (const auto& [p, c] : hits) o.require(c == 1, "pushforward not uniform at n=" + std::to_string(n));
  }
  o.detail = std::to_string(trees) + " trees, image and pushforward checked";
  return o;
}

Outcome identities() {
  Outcome o;
  Xoshiro256pp rng(3003);
  for (int rep = 0; rep < 1000; ++rep) {
    const long a = long(uniform_below(rng, 101)) - 50;
    const long b = long(uniform_below(rng, 101)) - 50;
    const auto k = std::uint32_t(1 + uniform_below(rng, 6));
    const auto l = std::uint32_t(uniform_below(rng, 7));
    const auto n = std::uint32_t(k + uniform_below(rng, 41 - k));
    o.require(check_identities(a, b, k, l, n).all(),
              "a=" + std::to_string(a) + " b=" + std::to_string(b) + " k=" + std::to_string(k) +
                  " l=" + std::to_string(l) + " n=" + std::to_string(n));
  }
  o.detail = "1000 random tuples";
  return o;
}

Outcome tail_domination() {
  Outcome o;
  int checked = 0;
  // Quadratic bounds at every integer a on a fixed (i, n) grid.
  for (std::uint32_t n : {3u, 10u, 50u, 200u, 500u, 1000u, 2000u})
    for (std::uint32_t i = 1; i < n; i = i < 8 ? i + 1 : i * 5 / 4) {
      const double s = expected_children(i, n);
      for (int a = 0; a <= 40; ++a) {
        if (a > s) {
          o.require(upper_tail_bound(a, s) >= degree_tail(i, n, a - 1),
                    fmt("upper i=%g n=%g a=%g", i, n, a));
        } else if (a < s) {
          o.require(lower_tail_bound(a, s) >= 1 - degree_tail(i, n, a),
                    fmt("lower i=%g n=%g a=%g", i, n, a));
        } else {
          continue;
        }
        ++checked;
      }
    }
  // Lemma-level bounds through the experiment runner, exact rows only.
  auto c = config("tail_vs_bound", 4004);
  c.n_grid = {1000, 2000};
  c.t_grid = {0.3, 0.5, 0.7};
  c.eps_grid = {0.05, 0.1, 0.2};
  const auto r = run_tail_vs_bound(c);
  for (const auto& rw : r.rows) {
    if (rw.point["mode"] != "exact") continue;
    o.require(rw.point["margin"].get<double>() >= 0, "lemma violation at " + rw.point.dump());
    ++checked;
  }
  o.detail = std::to_string(checked) + " comparisons, " +
             std::to_string(o.failures.size()) + " violations";
  return o;
}

Outcome cross_engine() {
  Outcome o;
  auto c = config("theorem21", 5005);
  c.n_grid = {2000};
  c.k_grid = {1, 2};
  c.t_grid = {0.3, 0.5, 0.7};
  c.replications = 2000;
  const auto r = run_theorem21(c);
  double worst = 0;
  for (std::uint32_t k : {1u, 2u})
    for (double t : {0.3, 0.5, 0.7}) {
      const auto& rw = row(r, "z_numerator", {{"k", k}, {"t", t}});
      const double z = std::abs(rw.estimate - rw.exact.value()) / rw.se.value();
      worst = std::max(worst, z);
      o.require(z < 4, fmt("k=%g t=%g off by %.2f SE", k, t, z));
    }
  o.detail = fmt("largest deviation %.2f SE", worst);
  return o;
}

Outcome theorem21_trend() {
  Outcome o;
  auto c = config("theorem21", 6006);
  c.n_grid = {1000, 10000, 100000, 1000000};
  c.k_grid = {1};
  c.t_grid = {0.5};
  c.replications = 60000;
  const auto r = run_theorem21(c);
  std::ostringstream s;
  double prev = INFINITY;
  for (std::uint32_t n : c.n_grid) {
    const auto& rw = row(r, "z", {{"n", n}});
    const double gap = std::abs(rw.estimate - rw.limit.value());
    s << (prev == INFINITY ? "" : " > ") << fmt("%.4f", gap);
    o.require(gap < prev, "|Z - 0.5| did not decrease at n=" + std::to_string(n));
    prev = gap;
  }
  o.detail = "|mean Z - 0.5| = " + s.str() + " (R=60000)";
  return o;
}

Outcome theorem31_stats() {
  Outcome o;
  const auto g = golden()["theorem31"]["thresholds"];
  auto c = config("theorem31", 7007);
  c.n_grid = {100000};
  c.replications = 100000;
  c.d_max = 3;
  const auto r = run_theorem31(c);
  const auto& m = row(r, "mean_X", {{"d", 1}});
  const double z = std::abs(m.estimate - 1) / m.se.value();
  o.require(z < 4, fmt("E X[n,1] off by %.2f SE", z));
  double tv_slack = 0, corr_slack = 0;
  for (std::uint32_t d = 1; d <= 3; ++d) {
    const double tv = row(r, "tv_poisson", {{"d", d}}).estimate;
    const double thr = g["tv_poisson"][std::to_string(d)].get<double>();
    tv_slack = std::max(tv_slack, tv / thr);
    o.require(tv < thr, fmt("TV(d=%g) = %.5f above %.5f", d, tv, thr));
  }
  for (std::uint32_t d1 = 1; d1 <= 3; ++d1)
    for (std::uint32_t d2 = d1 + 1; d2 <= 3; ++d2) {
      const double corr = std::abs(row(r, "corr", {{"d1", d1}, {"d2", d2}}).estimate);
      const double thr =
          g["abs_corr"][std::to_string(d1) + "-" + std::to_string(d2)].get<double>();
      corr_slack = std::max(corr_slack, corr / thr);
      o.require(corr < thr, fmt("|corr(%g,%g)| = %.5f above threshold", d1, d2, corr));
    }
  o.detail = fmt("mean X1 %.2f SE from 1; max TV/threshold %.2f, max |corr|/threshold %.2f", z,
                 tv_slack, corr_slack);
  return o;
}

Outcome degree_limits() {
  Outcome o;
  const double tol = golden()["degree_distribution"]["tolerance"].get<double>();
  double worst = 0;
  for (auto model : {GrowthModel::Uniform, GrowthModel::Preferential}) {
    auto c = config("degree_distribution", 8008);
    c.model = model;
    c.n_grid = {1000000};
    c.replications = 1;
    c.d_max = 5;
    const auto r = run_degree_distribution(c);
    for (std::uint32_t d = 1; d <= 5; ++d) {
      const auto& rw = row(r, "degree_fraction", {{"d", d}});
      const double dev = std::abs(rw.estimate - rw.limit.value());
      worst = std::max(worst, dev);
      o.require(dev <= tol, std::string(to_string(model)) + fmt(" d=%g off by %.4f", d, dev));
    }
  }
  o.detail = fmt("largest deviation %.5f (tolerance %.2f)", worst, tol);
  return o;
}

Outcome level_sizes_check() {
  Outcome o;
  auto c = config("level_sizes", 9009);
  c.n_grid = {2000};
  c.k_grid = {1};
  c.replications = 2000;
  auto r = run_level_sizes(c);
  const auto& l1 = row(r, "level_size", {{"k", 1}});
  const double z = std::abs(l1.estimate - l1.exact.value()) / l1.se.value();
  o.require(z < 4, fmt("mean |L(1)| off by %.2f SE", z));

  c.n_grid = {1000, 10000, 100000, 1000000};
  c.k_grid = {1, 2, 3};
  c.replications = 2000;
  r = run_level_sizes(c);
  std::ostringstream s;
  for (std::uint32_t k : {1u, 2u, 3u}) {
    double prev_mc = INFINITY, prev_exact = INFINITY;
    s << " k=" << k << ":";
    for (std::uint32_t n : c.n_grid) {
      const auto& rw = row(r, "level_ratio", {{"n", n}, {"k", k}});
      const double gap = std::abs(rw.estimate - 1);
      const double gap_exact = std::abs(rw.exact.value() - 1);
      o.require(gap < prev_mc, fmt("k=%g simulated ratio gap grew at n=%g", k, n));
      o.require(gap_exact < prev_exact, fmt("k=%g exact ratio gap grew at n=%g", k, n));
      prev_mc = gap;
      prev_exact = gap_exact;
      s << fmt(" %.3f", rw.estimate);
    }
  }
  o.detail = fmt("|L(1)| %.2f SE from exact; ratios", z) + s.str();
  return o;
}

Outcome reproducibility() {
  Outcome o;
  if (std::getenv("URT_THREADS")) unsetenv("URT_THREADS");
  int compared = 0;
  for (const auto& id : experiment_ids()) {
    auto c = default_config(id);
    c.seed = 10010;
    c.replications = std::min<std::uint64_t>(c.replications, 64);
    for (auto& n : c.n_grid) n = std::min<std::uint32_t>(n, 3000);
    std::string json_ref, csv_ref;
    for (unsigned w : {1u, 2u, 3u, 8u}) {
      c.workers = w;
      const auto r = run_experiment(c);
      const auto json = to_json(r);
      const auto csv = to_csv(r);
      if (json_ref.empty()) {
        json_ref = json;
        csv_ref = csv;
        const auto again = run_experiment(c);
        o.require(to_json(again) == json, id + ": rerun differs");
      } else {
        o.require(json == json_ref && csv == csv_ref,
                  id + ": workers=" + std::to_string(w) + " differs");
      }
      ++compared;
    }
  }
  o.detail = std::to_string(compared) + " reports across 1/2/3/8 workers, byte-identical";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "exact moments equal enumeration (n<=8, d<=3, K<=3)", 120, exact_moments},
      {2, "bijection: round trip, image, uniform pushforward, fixed points (n<=8)", 60,
       bijection_suite},
      {3, "falling-factorial identities on random tuples", 10, identities},
      {4, "tail bounds dominate exact tails (n<=2000)", 300, tail_domination},
      {5, "simulated exceedance counts match the exact expectation (n=2000)", 300, cross_engine},
      {6, "|mean Z(0.5) - 0.5| decreases along n=1e3..1e6", 1800, theorem21_trend},
      {7, "first-level counts at n=1e5: mean, TV to Poisson(1), correlations", 1200,
       theorem31_stats},
      {8, "degree fractions at n=1e6 match their limits", 600, degree_limits},
      {9, "level sizes: exact mean at n=2000, ratio trend for k<=3", 1800, level_sizes_check},
      {10, "reports byte-identical across reruns and worker counts", 600, reproducibility},
  };

  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_s) {
      o.pass = false;
      o.failures.push_back(fmt("took %.0f s, budget %.0f s", secs, c.budget_s));
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.title << " -- "
              << o.detail << fmt(" [%.1f s]", secs) << "\n";
    for (const auto& f : o.failures) std::cout << "      " << f << "\n";
    std::cout.flush();
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
