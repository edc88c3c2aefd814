#include "urt/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "urt/bijection.hpp"
#include "urt/bounds.hpp"
#include "urt/errors.hpp"
#include "urt/exact_oracle.hpp"
#include "urt/experiments.hpp"
#include "urt/moments.hpp"
#include "urt/statistics.hpp"
#include "urt/tree.hpp"

namespace urt {

namespace {

using Json = nlohmann::ordered_json;

struct TreeSource {
  std::string model = "uniform";
  std::uint32_t n = 0;
  std::uint64_t seed = 1;
  std::string input;
};

void add_tree_source(CLI::App* cmd, TreeSource& src, bool allow_input) {
  cmd->add_option("--model", src.model, "uniform | preferential")->capture_default_str();
  cmd->add_option("--n", src.n, "node count");
  cmd->add_option("--seed", src.seed, "master seed")->capture_default_str();
  if (allow_input) cmd->add_option("--in", src.input, "binary tree dump (URT1)");
}

RecursiveTree load_tree(const TreeSource& src, std::ostream& err) {
  if (!src.input.empty()) {
    std::ifstream in(src.input, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open " + src.input);
    return read_binary(in);
  }
  if (src.n == 0) throw std::invalid_argument("--n is required without --in");
  const GrowthModel model = parse_growth_model(src.model);
  err << "# seed=" << src.seed << " config="
      << Json{{"model", to_string(model)}, {"n", src.n}}.dump() << "\n";
  return grow(model, src.n, src.seed);
}

std::vector<std::uint32_t> parse_list(const std::string& text) {
  std::vector<std::uint32_t> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(field, &used);
    } catch (const std::exception&) {
      used = std::string::npos;
    }
    if (used != field.size()) throw std::invalid_argument("bad integer list '" + text + "'");
    out.push_back(static_cast<std::uint32_t>(v));
  }
  return out;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Uniform random recursive tree laboratory"};
  app.name(args.empty() ? "urt" : args[0]);
  app.require_subcommand(1);

  // generate
  TreeSource gen;
  std::string gen_out;
  bool gen_parents = false;
  auto* generate = app.add_subcommand("generate", "grow a tree");
  add_tree_source(generate, gen, false);
  generate->add_option("--out", gen_out, "write a binary dump");
  generate->add_flag("--parents", gen_parents, "print the attachment sequence");

  // stats
  TreeSource st;
  std::uint32_t st_k = 1;
  double st_t = 0.5;
  auto* stats = app.add_subcommand("stats", "level and degree statistics of one tree");
  add_tree_source(stats, st, true);
  stats->add_option("--k", st_k, "level for the profile and z")->capture_default_str();
  stats->add_option("--t", st_t, "threshold fraction for z")->capture_default_str();

  // bijection
  std::string bij_parents, bij_perm, bij_rule = "parent";
  auto* bijection = app.add_subcommand("bijection", "tree <-> permutation");
  auto* bij_opt_parents = bijection->add_option("--parents", bij_parents, "attachment sequence, e.g. 0,1");
  auto* bij_opt_perm = bijection->add_option("--perm", bij_perm, "one-indexed permutation, e.g. 1,3,2");
  bij_opt_parents->excludes(bij_opt_perm);
  bijection->add_option("--rule", bij_rule, "swap rule: parent | offset")->capture_default_str();

  // moments
  std::uint32_t mom_n = 0;
  std::string mom_k;
  bool mom_table = false;
  auto* moments = app.add_subcommand("moments", "exact joint factorial moment E(n,k)");
  moments->add_option("--n", mom_n, "node count")->required();
  moments->add_option("--k", mom_k, "exponent vector, e.g. 0,1")->required();
  moments->add_flag("--table", mom_table, "CSV dump of E(m,v) for m <= n over the closure");

  // enumerate
  std::uint32_t en_n = 0;
  std::string en_stat = "X:1";
  auto* enumerate = app.add_subcommand("enumerate", "exact law of a statistic by enumeration");
  enumerate->add_option("--n", en_n, "node count (2..11)")->required();
  enumerate->add_option("--stat", en_stat,
                        "X:d | level_size:k | z_numerator:k:t | max_degree | fixed_points")
      ->capture_default_str();

  // bounds
  std::uint32_t bd_i = 1, bd_n = 0;
  double bd_t = 0.5, bd_eps = 0.1;
  auto* bounds = app.add_subcommand("bounds", "tail bounds for the child count of node i");
  bounds->add_option("--i", bd_i, "node index")->capture_default_str();
  bounds->add_option("--n", bd_n, "index of the last joining node")->required();
  bounds->add_option("--t", bd_t)->capture_default_str();
  bounds->add_option("--eps", bd_eps)->capture_default_str();

  // experiment
  std::string ex_id, ex_model = "uniform", ex_n, ex_k, ex_format = "json", ex_out;
  std::vector<double> ex_t, ex_eps;
  std::optional<std::uint32_t> ex_dmax;
  std::optional<std::uint64_t> ex_reps, ex_seed;
  unsigned ex_workers = 0;
  bool ex_timing = false;
  auto* experiment = app.add_subcommand("experiment", "run a Monte Carlo experiment");
  experiment->add_option("id", ex_id, "experiment id")->required();
  experiment->add_option("--model", ex_model)->capture_default_str();
  experiment->add_option("--n", ex_n, "comma-separated node counts");
  experiment->add_option("--k", ex_k, "comma-separated levels");
  experiment->add_option("--t", ex_t, "comma-separated thresholds")->delimiter(',');
  experiment->add_option("--eps", ex_eps, "comma-separated eps values")->delimiter(',');
  experiment->add_option("--dmax", ex_dmax);
  experiment->add_option("--reps", ex_reps, "replications");
  experiment->add_option("--seed", ex_seed, "master seed");
  experiment->add_option("--workers", ex_workers, "threads (URT_THREADS overrides)");
  experiment->add_option("--out", ex_out, "output file (default stdout)");
  experiment->add_option("--format", ex_format, "json | csv")->capture_default_str();
  experiment->add_flag("--timing", ex_timing, "include runtime_ms in the JSON report");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitInvalid;
  }

  try {
    if (*generate) {
      const RecursiveTree tree = load_tree(gen, err);
      if (!gen_out.empty()) {
        std::ofstream f(gen_out, std::ios::binary);
        write_binary(f, tree);
        if (!f) throw std::invalid_argument("cannot write " + gen_out);
      }
      Json j{{"n", tree.size()}, {"model", to_string(tree.model())}, {"seed", gen.seed}};
      const auto sizes = level_sizes(tree);
      j["height"] = sizes.size() - 1;
      if (tree.size() >= 2) j["max_degree"] = max_degree(tree);
      if (gen_parents) j["parents"] = tree.attachment_sequence();
      out << j.dump() << "\n";
    } else if (*stats) {
      const RecursiveTree tree = load_tree(st, err);
      Json hist = Json::object();
      for (const auto& [d, c] : degree_histogram(tree)) hist[std::to_string(d)] = c;
      Json j{{"n", tree.size()},
             {"level_sizes", level_sizes(tree)},
             {"degree_histogram", hist},
             {"profile", to_json(degree_counts_in_level(tree, st_k))}};
      if (tree.size() >= 2) j["max_degree"] = max_degree(tree);
      j["z"] = {{"k", st_k}, {"t", st_t}, {"value", z_statistic(tree, st_k, st_t)}};
      out << j.dump() << "\n";
    } else if (*bijection) {
      const SwapRule rule = parse_swap_rule(bij_rule);
      RecursiveTree tree;
      Permutation perm;
      if (!bij_perm.empty()) {
        perm.values = parse_list(bij_perm);
        tree = permutation_to_tree(perm, rule);
      } else {
        tree = grow_from_sequence(parse_list(bij_parents));
        perm = tree_to_permutation(tree, rule);
      }
      out << Json{{"parents", tree.attachment_sequence()},
                  {"permutation", to_json(perm)},
                  {"fixed_points_after_first", fixed_points_after_first(perm)}}
                 .dump()
          << "\n";
    } else if (*moments) {
      const ExponentVector k = ExponentVector::parse(mom_k);
      if (mom_table) {
        out << MomentTable::build(k, mom_n).to_csv();
      } else {
        out << to_string(exact_moment(mom_n, k)) << "\n";
      }
    } else if (*enumerate) {
      const Statistic statistic = parse_statistic(en_stat);
      out << to_json(exact_statistic_distribution(en_n, statistic)).dump() << "\n";
    } else if (*bounds) {
      Json j{{"i", bd_i}, {"n", bd_n}, {"t", bd_t}, {"eps", bd_eps},
             {"s", expected_children(bd_i, bd_n)}};
      try {
        j["high_degree_bound"] = high_degree_bound(bd_n, bd_t, bd_eps);
      } catch (const std::invalid_argument&) {
        j["high_degree_bound"] = nullptr;
      }
      try {
        j["low_degree_bound"] = low_degree_bound(bd_n, bd_t, bd_eps);
      } catch (const std::invalid_argument&) {
        j["low_degree_bound"] = nullptr;
      }
      std::optional<double> tail;
      if (bd_i < bd_n) tail = degree_tail(bd_i, bd_n, bd_t * std::log(static_cast<double>(bd_n)));
      j["tail_above_t_log_n"] = optional_json(tail);
      out << j.dump() << "\n";
    } else if (*experiment) {
      ExperimentConfig config = default_config(ex_id);
      config.model = parse_growth_model(ex_model);
      if (!ex_n.empty()) config.n_grid = parse_list(ex_n);
      if (!ex_k.empty()) config.k_grid = parse_list(ex_k);
      if (!ex_t.empty()) config.t_grid = ex_t;
      if (!ex_eps.empty()) config.eps_grid = ex_eps;
      if (ex_dmax) config.d_max = *ex_dmax;
      if (ex_reps) config.replications = *ex_reps;
      if (ex_seed) config.seed = *ex_seed;
      config.workers = ex_workers;
      if (ex_format == "csv") {
        config.format = ReportFormat::Csv;
      } else if (ex_format != "json") {
        throw std::invalid_argument("--format must be json or csv");
      }
      validate(config);
      err << "# seed=" << config.seed << " workers=" << resolve_workers(config.workers)
          << " config=" << to_json(config).dump() << "\n";

      const ExperimentReport report = run_experiment(config);
      const std::string text =
          config.format == ReportFormat::Csv ? to_csv(report) : to_json(report, ex_timing);
      if (ex_out.empty()) {
        out << text;
      } else {
        std::ofstream f(ex_out, std::ios::binary);
        f << text;
        if (!f) throw std::invalid_argument("cannot write " + ex_out);
      }
      err << "# runtime_ms=" << report.runtime_ms << "\n";
    }
  } catch (const GuardError& e) {
    err << "guard: " << e.what() << "\n";
    return kExitGuard;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitOk;
}

}  // namespace urt
