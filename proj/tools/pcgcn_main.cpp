// pcgcn command-line tool.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pcgcn/analysis.hpp"
#include "pcgcn/checkpoint.hpp"
#include "pcgcn/config.hpp"
#include "pcgcn/dataset.hpp"
#include "pcgcn/driver.hpp"
#include "pcgcn/graph_io.hpp"
#include "pcgcn/svd.hpp"

namespace fs = std::filesystem;
using namespace pcgcn;

namespace {

// Bad flags, unknown config keys or unusable values: exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* app, CommonArgs& args, bool out_required) {
  app->add_option("-c,--config", args.config, "INI config file")->check(CLI::ExistingFile);
  app->add_option("--set", args.overrides, "Override a config key (section.key=value)")->take_all();
  app->add_option("--seed", args.seed, "Master seed; rederives every module seed");
  auto* out = app->add_option("-o,--out", args.out, "Output path");
  if (out_required) out->required();
}

Config resolve(const CommonArgs& args) {
  try {
    Config config = args.config.empty() ? Config{} : read_config(args.config);
    if (args.seed) apply_master_seed(config, *args.seed);
    apply_overrides(config, args.overrides);
    config.search.validate();
    if (config.data.dir.empty()) config.lfr.validate();
    return config;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

Config run_config(const fs::path& run_dir, const std::vector<std::string>& overrides) {
  Config config = read_config(run_dir / "config.resolved");
  try {
    apply_overrides(config, overrides);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return config;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string final_csv(const FinalResult& r) {
  return "test_f1,best_val_f1,best_epoch\n" + format_number(r.test_f1) + ',' + format_number(r.best_val_f1) + ',' +
         std::to_string(r.best_epoch) + '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Policy-guided cluster search for ClusterGCN training"};
  app.require_subcommand(1);

  CommonArgs gen_args;
  auto* gen = app.add_subcommand("gen-lfr", "Generate an LFR dataset directory");
  add_common(gen, gen_args, true);

  std::string svd_input;
  CommonArgs svd_args;
  auto* svd_cmd = app.add_subcommand("svd-features", "Write SVD node features for an edge list");
  add_common(svd_cmd, svd_args, true);
  svd_cmd->add_option("-i,--input", svd_input, "Edge list")->required()->check(CLI::ExistingFile);

  CommonArgs search_args;
  auto* search_cmd = app.add_subcommand("search", "Run the policy search and write a run directory");
  add_common(search_cmd, search_args, true);

  std::string final_run;
  CommonArgs final_args;
  auto* final_cmd = app.add_subcommand("train-final", "Train on the best clusters of a run");
  final_cmd->add_option("-r,--run", final_run, "Run directory")->required()->check(CLI::ExistingDirectory);
  final_cmd->add_option("--set", final_args.overrides, "Override a config key")->take_all();
  final_cmd->add_option("-o,--out", final_args.out, "Output directory (defaults to the run directory)");

  CommonArgs base_args;
  auto* base_cmd = app.add_subcommand("baseline", "ClusterGCN on unit weights");
  add_common(base_cmd, base_args, true);

  std::vector<std::string> entropy_runs;
  std::string entropy_out;
  std::string entropy_clusters = "best_clusters.tsv";
  auto* entropy_cmd = app.add_subcommand("entropy", "Per-cluster label entropy of one or more runs");
  entropy_cmd->add_option("-r,--run", entropy_runs, "Run directory (repeatable)")->required();
  entropy_cmd->add_option("-o,--out", entropy_out, "CSV output")->required();
  entropy_cmd->add_option("--clusters", entropy_clusters, "Cluster file inside each run");

  std::string eval_run;
  std::string eval_model;
  std::string eval_split = "test";
  auto* eval_cmd = app.add_subcommand("eval", "Micro-F1 of a saved model on a split");
  eval_cmd->add_option("-r,--run", eval_run, "Run directory")->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--model", eval_model, "Model checkpoint (defaults to <run>/gcn.ckpt)");
  eval_cmd->add_option("--split", eval_split, "train, val or test")->check(CLI::IsMember({"train", "val", "test"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) {
      const Config config = resolve(gen_args);
      const Dataset data = make_lfr_dataset(config);
      save_dataset(gen_args.out, data.graph, data.splits);
      write_config(fs::path(gen_args.out) / "config.resolved", config);
      std::cerr << "wrote " << data.graph.num_nodes() << " nodes, " << data.graph.num_edges() << " edges to "
                << gen_args.out << '\n';
    } else if (svd_cmd->parsed()) {
      const Config config = resolve(svd_args);
      const Graph g = load_graph(svd_input, {}, {}, config.data.task);
      SvdOptions options;
      options.dim = config.data.svd_dim;
      options.seed = config.data.svd_seed;
      write_features(svd_args.out, svd_features(g, options));
    } else if (search_cmd->parsed()) {
      const Config config = resolve(search_args);
      const Dataset data = load_or_generate(config);
      const Matrix embeddings = state_embeddings(data, config.data);
      const SearchResult result = search(config.search, data, embeddings, [](const SearchRecord& r) {
        std::cerr << "step " << r.step << " eps " << format_number(r.epsilon) << " reward "
                  << format_number(r.reward) << " val_f1 " << format_number(r.val_f1) << (r.best ? " *" : "")
                  << '\n';
      });
      save_run(search_args.out, config, result);
    } else if (final_cmd->parsed()) {
      const fs::path run = final_run;
      const Config config = run_config(run, final_args.overrides);
      const Dataset data = load_or_generate(config);
      const ClusterConfig clusters = read_clusters(run / "best_clusters.tsv", data.train.graph);
      const FinalResult result = final_train(clusters, config.search, data);
      const fs::path out = final_args.out.empty() ? run : fs::path(final_args.out);
      write_text(out / "final.csv", final_csv(result));
      save_gcn(out / "final_gcn.ckpt", result.model);
      std::cout << "test_f1 " << format_number(result.test_f1) << '\n';
    } else if (base_cmd->parsed()) {
      const Config config = resolve(base_args);
      const Dataset data = load_or_generate(config);
      const BaselineResult result = baseline_clustergcn(config.search, data);
      const fs::path out = base_args.out;
      write_text(out / "baseline.csv", final_csv(result.final));
      write_clusters(out / "baseline_clusters.tsv", result.clusters);
      save_gcn(out / "baseline_gcn.ckpt", result.final.model);
      write_config(out / "config.resolved", config);
      std::cout << "test_f1 " << format_number(result.final.test_f1) << '\n';
    } else if (entropy_cmd->parsed()) {
      std::vector<EntropyReport> reports;
      for (const auto& r : entropy_runs) {
        const fs::path run = r;
        const Config config = run_config(run, {});
        const Dataset data = load_or_generate(config);
        const ClusterConfig clusters = read_clusters(run / entropy_clusters, data.train.graph);
        const std::string name = run.filename().empty() ? run.parent_path().filename().string()
                                                        : run.filename().string();
        reports.push_back(cluster_entropies(name, clusters, data.train.graph.labels()));
      }
      write_text(entropy_out, entropy_csv(reports));
    } else if (eval_cmd->parsed()) {
      const fs::path run = eval_run;
      const Config config = run_config(run, {});
      const Dataset data = load_or_generate(config);
      const nn::GcnModel model = load_gcn(eval_model.empty() ? run / "gcn.ckpt" : fs::path(eval_model));
      const Graph& g = eval_split == "train" ? data.train.graph : eval_split == "val" ? data.val.graph : data.test.graph;
      std::cout << format_number(evaluate(model, g)) << '\n';
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n' << app.help();
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
