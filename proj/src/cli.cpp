#include "pruneclust/cli.hpp"

#include "pruneclust/io.hpp"
#include "pruneclust/parallel.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#ifndef PRUNECLUST_VERSION
#define PRUNECLUST_VERSION "dev"
#endif

namespace pruneclust {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataOptions {
  std::string input;
  bool no_header = false;
  std::string labels;
  std::string linkage = "average";
  std::string tree_file;
};

void add_data_options(CLI::App* cmd, DataOptions& opts, bool with_tree_file) {
  cmd->add_option("-i,--input", opts.input, "CSV dataset, one observation per row")->required();
  cmd->add_flag("--no-header", opts.no_header, "first row is data, not column names");
  cmd->add_option("--labels", opts.labels, "label column (name or 0-based index), excluded from features");
  cmd->add_option("--linkage", opts.linkage, "average | single | complete")
      ->check(CLI::IsMember({"average", "single", "complete"}));
  if (with_tree_file) {
    cmd->add_option("--tree", opts.tree_file, "use a saved dendrogram JSON instead of building one");
  }
}

io::Dataset load(const DataOptions& opts) {
  io::DatasetFile file{opts.input, !opts.no_header, std::nullopt};
  if (!opts.labels.empty()) file.label_column = opts.labels;
  return io::read_dataset(file);
}

Dendrogram tree_for(const DataOptions& opts, const DataMatrix& data) {
  if (!opts.tree_file.empty()) {
    auto tree = io::read_dendrogram(opts.tree_file);
    if (tree.n_leaves() != data.rows()) {
      throw ValidationError("dendrogram has " + std::to_string(tree.n_leaves()) + " leaves but dataset has " +
                            std::to_string(data.rows()) + " rows");
    }
    return tree;
  }
  return agglomerate(pairwise_distances(data), parse_linkage(opts.linkage));
}

json invocation(const std::string& command, int argc, const char* const* argv, std::optional<std::uint64_t> seed) {
  json args = json::array();
  for (int i = 1; i < argc; ++i) args.push_back(argv[i]);
  json out = {{"command", command}, {"args", std::move(args)}, {"version", PRUNECLUST_VERSION}};
  if (seed) out["seed"] = *seed;
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + path);
  return f;
}

json frontier_json(std::span<const NodeRef> frontier) {
  json ids = json::array();
  for (NodeRef r : frontier) ids.push_back(r.id);
  return ids;
}

struct PruneOptions {
  std::string method = "weakest";
  std::optional<Index> k;
  std::optional<double> height;
  std::optional<double> alpha;
  std::string policy = "nearest_up";
};

void add_prune_options(CLI::App* cmd, PruneOptions& opts) {
  cmd->add_option("--method", opts.method, "horizontal | weakest | dp")
      ->check(CLI::IsMember({"horizontal", "weakest", "dp"}));
  cmd->add_option("--k", opts.k, "number of clusters");
  cmd->add_option("--height", opts.height, "cut height (horizontal only)");
  cmd->add_option("--alpha", opts.alpha, "complexity parameter (weakest only)");
  cmd->add_option("--policy", opts.policy, "size policy for weakest: nearest_up | skip")
      ->check(CLI::IsMember({"nearest_up", "skip"}));
}

struct PruneResult {
  std::optional<std::vector<NodeRef>> frontier;  // absent when skipped
  json detail;
};

PruneResult run_prune(const PruneOptions& opts, const Dendrogram& tree, const LossTable& table) {
  const int selectors = (opts.k ? 1 : 0) + (opts.height ? 1 : 0) + (opts.alpha ? 1 : 0);
  if (selectors != 1) throw UsageError("give exactly one of --k, --height, --alpha");
  if (opts.height && opts.method != "horizontal") throw UsageError("--height needs --method horizontal");
  if (opts.alpha && opts.method != "weakest") throw UsageError("--alpha needs --method weakest");

  PruneResult result;
  result.detail = {{"method", opts.method}};
  if (opts.k) result.detail["requested_k"] = *opts.k;
  if (opts.height) result.detail["height"] = *opts.height;
  if (opts.alpha) result.detail["alpha"] = *opts.alpha;

  if (opts.method == "horizontal") {
    result.frontier = opts.k ? horizontal_frontier_by_k(tree, *opts.k) : horizontal_frontier_by_height(tree, *opts.height);
  } else if (opts.method == "dp") {
    result.frontier = dp_optimal(tree, table, *opts.k).frontier;
  } else {
    const auto seq = weakest_link_sequence(tree, table);
    std::optional<PruneStep> step;
    if (opts.alpha) {
      step = step_for_alpha(seq, *opts.alpha);
    } else {
      result.detail["policy"] = opts.policy;
      step = select_for_k(seq, *opts.k, parse_size_policy(opts.policy));
    }
    if (step) {
      result.frontier = step->frontier;
      result.detail["step_alpha"] = step->alpha;
    }
  }
  return result;
}

int cmd_tree(const DataOptions& d, const std::string& out_path, std::ostream& out) {
  const auto ds = load(d);
  const auto tree = tree_for(d, ds.data);
  if (out_path.empty()) {
    out << io::dendrogram_to_json(tree).dump(2) << '\n';
  } else {
    io::write_dendrogram(tree, out_path);
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dendrogram pruning: horizontal cuts, weakest-link cost-complexity pruning, DP optimum, gap statistic"};
  app.set_version_flag("--version", PRUNECLUST_VERSION);
  app.require_subcommand(1);

  DataOptions data;
  PruneOptions prune;
  std::string out_path, partition_path;
  std::uint64_t seed = 1;
  Index kmax = 10, compare_kmax = 25, b = 50, kmin = 2, replicates = 200;
  std::string rule = "argmax", sim = "null";
  bool normalized = false, no_dp = false;
  std::optional<Index> n_fixed, p_fixed, c_fixed;
  Index nmin = 30, nmax = 100, pmin = 1, pmax = 50, cmin = 3, cmax = 15;

  auto* tree_cmd = app.add_subcommand("tree", "build a dendrogram and write it as JSON");
  add_data_options(tree_cmd, data, false);
  tree_cmd->add_option("-o,--out", out_path, "output JSON (default stdout)");

  auto* prune_cmd = app.add_subcommand("prune", "prune to one partition; summary JSON on stdout");
  add_data_options(prune_cmd, data, true);
  add_prune_options(prune_cmd, prune);
  prune_cmd->add_option("--partition", partition_path, "write row_index,cluster_id CSV here");

  auto* seq_cmd = app.add_subcommand("sequence", "emit the full weakest-link pruning sequence as JSON");
  add_data_options(seq_cmd, data, true);
  seq_cmd->add_option("-o,--out", out_path, "output JSON (default stdout)");

  auto* gap_cmd = app.add_subcommand("gap", "gap statistic over the weakest-link sequence");
  add_data_options(gap_cmd, data, false);
  gap_cmd->add_option("--kmax", kmax, "largest k evaluated")->capture_default_str();
  gap_cmd->add_option("--B", b, "reference replicates")->capture_default_str();
  gap_cmd->add_option("--seed", seed, "RNG seed")->capture_default_str();
  gap_cmd->add_option("--rule", rule, "argmax | first-se")->check(CLI::IsMember({"argmax", "first-se"}));
  gap_cmd->add_option("--policy", prune.policy, "nearest_up | skip")->check(CLI::IsMember({"nearest_up", "skip"}));
  gap_cmd->add_flag("--normalized", normalized, "use centroid WSS instead of pairwise loss as W_k");
  gap_cmd->add_option("-o,--out", out_path, "write PREFIX.csv and PREFIX.json");

  auto add_sim_options = [&](CLI::App* cmd) {
    cmd->add_option("--sim", sim, "null | clustered")->check(CLI::IsMember({"null", "clustered"}));
    cmd->add_option("--replicates", replicates, "number of datasets")->capture_default_str();
    cmd->add_option("--seed", seed, "master RNG seed")->capture_default_str();
    cmd->add_option("--nmin", nmin)->capture_default_str();
    cmd->add_option("--nmax", nmax)->capture_default_str();
    cmd->add_option("--pmin", pmin)->capture_default_str();
    cmd->add_option("--pmax", pmax)->capture_default_str();
    cmd->add_option("--cmin", cmin)->capture_default_str();
    cmd->add_option("--cmax", cmax)->capture_default_str();
    cmd->add_option("--n", n_fixed, "fixed observation count (sets nmin = nmax)");
    cmd->add_option("--p", p_fixed, "fixed feature count");
    cmd->add_option("--c", c_fixed, "fixed cluster count");
  };

  auto* sim_cmd = app.add_subcommand("simulate", "generate synthetic datasets as CSV");
  add_sim_options(sim_cmd);
  sim_cmd->add_option("-o,--out", out_path, "write PREFIX_<id>.csv per dataset and PREFIX.json");

  auto* cmp_cmd = app.add_subcommand("compare", "batch horizontal vs weakest-link vs DP experiment");
  add_sim_options(cmp_cmd);
  cmp_cmd->add_option("--kmin", kmin)->capture_default_str();
  cmp_cmd->add_option("--kmax", compare_kmax)->capture_default_str();
  cmp_cmd->add_flag("--no-dp", no_dp, "skip the dynamic-programming oracle");
  cmp_cmd->add_option("-o,--out", out_path, "write PREFIX.csv and PREFIX.json");

  auto* cls_cmd = app.add_subcommand("classify", "majority-vote confusion matrix against a label column");
  add_data_options(cls_cmd, data, true);
  add_prune_options(cls_cmd, prune);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  auto sim_spec = [&] {
    SimSpec spec;
    spec.n_range = n_fixed ? IndexRange{*n_fixed, *n_fixed} : IndexRange{nmin, nmax};
    spec.p_range = p_fixed ? IndexRange{*p_fixed, *p_fixed} : IndexRange{pmin, pmax};
    if (sim == "clustered") spec.c_range = c_fixed ? IndexRange{*c_fixed, *c_fixed} : IndexRange{cmin, cmax};
    spec.replicates = replicates;
    spec.seed = seed;
    spec.validate();
    return spec;
  };

  try {
    if (command == "tree") return cmd_tree(data, out_path, out);

    if (command == "prune" || command == "classify") {
      const auto ds = load(data);
      const auto tree = tree_for(data, ds.data);
      const auto table = node_losses(ds.data, tree);
      if (command == "classify") {
        if (!ds.labels) throw UsageError("classify needs --labels");
        if (!prune.k && !prune.height && !prune.alpha) {
          prune.k = static_cast<Index>(std::set<std::string>(ds.labels->begin(), ds.labels->end()).size());
        }
      }
      auto result = run_prune(prune, tree, table);
      json summary = result.detail;
      summary["invocation"] = invocation(command, argc, argv, std::nullopt);
      summary["n_observations"] = ds.data.rows();
      if (!result.frontier) {
        summary["skipped"] = true;
        summary["loss_r"] = nullptr;
        out << summary.dump(2) << '\n';
        return 0;
      }
      const auto partition = partition_of(tree, *result.frontier);
      summary["skipped"] = false;
      summary["k"] = partition.k();
      summary["loss_r"] = tree_loss(table, *result.frontier);
      summary["wss_centroid"] = wss_centroid(ds.data, partition);
      summary["frontier"] = frontier_json(*result.frontier);
      if (command == "classify") {
        summary["confusion"] = io::confusion_to_json(majority_vote_eval(partition, *ds.labels));
      } else {
        summary["assignment"] = partition.assignment();
        if (!partition_path.empty()) {
          auto f = open_out(partition_path);
          io::write_partition_csv(f, partition);
        }
      }
      out << summary.dump(2) << '\n';
      return 0;
    }

    if (command == "sequence") {
      const auto ds = load(data);
      const auto tree = tree_for(data, ds.data);
      auto doc = io::sequence_to_json(weakest_link_sequence(tree, node_losses(ds.data, tree)));
      doc["invocation"] = invocation(command, argc, argv, std::nullopt);
      if (out_path.empty()) {
        out << doc.dump(2) << '\n';
      } else {
        open_out(out_path) << doc.dump(2) << '\n';
      }
      return 0;
    }

    if (command == "gap") {
      const auto ds = load(data);
      GapOptions options;
      options.size_policy = parse_size_policy(prune.policy);
      options.linkage = parse_linkage(data.linkage);
      options.normalized = normalized;
      const auto curve = gap_curve(ds.data, std::min(kmax, ds.data.rows()), b, seed, options);
      json summary = {{"chosen_k", choose_k(curve, parse_selection_rule(rule))},
                      {"rule", rule},
                      {"B", b},
                      {"kmax", curve.k_values.size()},
                      {"invocation", invocation(command, argc, argv, seed)}};
      if (out_path.empty()) {
        io::write_gap_csv(out, curve);
        err << summary.dump(2) << '\n';
      } else {
        auto csv = open_out(out_path + ".csv");
        io::write_gap_csv(csv, curve);
        open_out(out_path + ".json") << summary.dump(2) << '\n';
        out << summary.dump(2) << '\n';
      }
      return 0;
    }

    if (command == "simulate") {
      const auto spec = sim_spec();
      if (out_path.empty() && spec.replicates != 1) throw UsageError("--out is required for more than one replicate");
      json manifest = {{"invocation", invocation(command, argc, argv, seed)}, {"datasets", json::array()}};
      for (Index r = 0; r < spec.replicates; ++r) {
        const auto rep = draw_replicate(spec, r);
        const auto* labels = spec.c_range ? &rep.sample.labels : nullptr;
        if (out_path.empty()) {
          io::write_dataset_csv(out, rep.sample.data, labels);
          continue;
        }
        std::ostringstream name;
        name << out_path << '_' << std::setw(3) << std::setfill('0') << r << ".csv";
        auto f = open_out(name.str());
        io::write_dataset_csv(f, rep.sample.data, labels);
        manifest["datasets"].push_back({{"dataset_id", r}, {"file", name.str()}, {"n", rep.n}, {"p", rep.p}, {"c", rep.c}});
      }
      if (!out_path.empty()) {
        open_out(out_path + ".json") << manifest.dump(2) << '\n';
        out << manifest.dump(2) << '\n';
      }
      return 0;
    }

    if (command == "compare") {
      const auto spec = sim_spec();
      const auto rows = compare_experiment(spec, kmin, compare_kmax, !no_dp, thread_count_from_env());
      auto summary = io::summary_to_json(io::summarize_compare(rows));
      summary["invocation"] = invocation(command, argc, argv, seed);
      if (out_path.empty()) {
        io::write_compare_csv(out, rows);
        err << summary.dump(2) << '\n';
      } else {
        auto csv = open_out(out_path + ".csv");
        io::write_compare_csv(csv, rows);
        open_out(out_path + ".json") << summary.dump(2) << '\n';
        out << summary.dump(2) << '\n';
      }
      return 0;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace pruneclust
