#include "pcgcn/driver.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "pcgcn/checkpoint.hpp"
#include "pcgcn/lfr.hpp"
#include "pcgcn/svd.hpp"

namespace pcgcn {
namespace {

PartitionOptions partition_options(const SearchConfig& cfg) {
  PartitionOptions o = cfg.partition;
  o.k = cfg.k;
  o.seed = cfg.seeds.partition;
  return o;
}

PolicyOptions policy_options(const SearchConfig& cfg) {
  PolicyOptions o;
  o.p = cfg.p;
  o.m = cfg.m;
  o.hidden = cfg.policy_hidden;
  o.gamma = cfg.gamma;
  o.alpha_theta = cfg.alpha_theta;
  o.alpha_w = cfg.alpha_w;
  o.window = cfg.window;
  return o;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

Matrix state_embeddings(const Dataset& data, const DataOptions& options) {
  SvdOptions svd;
  svd.dim = options.svd_dim;
  svd.seed = options.svd_seed;
  return svd_features(data.train.graph, svd);
}

TrainOptions train_options(const SearchConfig& cfg, int epochs) {
  TrainOptions o;
  o.iters = epochs;
  o.lr = cfg.lr;
  o.hidden = cfg.hidden;
  o.kind = cfg.model;
  o.dropout = cfg.dropout;
  o.seed = cfg.seeds.gcn_init;
  o.bsize = cfg.bsize;
  return o;
}

SearchResult search(const SearchConfig& cfg, const Dataset& data, const Matrix& embeddings,
                    const std::function<void(const SearchRecord&)>& on_step) {
  cfg.validate();
  const Graph& train = data.train.graph;
  if (cfg.k > train.num_nodes()) throw std::invalid_argument("k exceeds the number of training nodes");
  if (train.num_edges() == 0) throw std::invalid_argument("training graph has no edges to weight");

  Rng policy_rng(cfg.seeds.policy_init);
  Rng explore_rng(cfg.seeds.exploration);
  EdgeHistory history(train.num_edges(), cfg.m, cfg.p);
  Matrix states = build_edge_states(train, train.features(), embeddings, history, cfg.threads);

  SearchResult result;
  result.policy = PolicyModel::create(states.cols(), policy_options(cfg), policy_rng);
  const PartitionOptions part = partition_options(cfg);
  const TrainOptions inner = train_options(cfg, cfg.iters);
  const auto original_weights = train.edge_weights();
  std::optional<nn::GcnModel> previous;
  std::vector<Transition> pending;

  for (int t = 0; t < cfg.T; ++t) {
    const auto start = std::chrono::steady_clock::now();
    SearchRecord rec;
    rec.step = t;
    rec.epsilon = epsilon(t, cfg.eps_start, cfg.eps_end, cfg.eps_decay);
    const ActionVector actions = select_actions(result.policy, states, rec.epsilon, explore_rng);
    rec.action_hist = actions.histogram(cfg.p);

    const Graph reweighted = train.with_edge_weights(actions.weights());
    const ClusterConfig clusters = partition(reweighted, part);
    const Graph restored = restore_weights(reweighted, train, clusters);
    if (restored.edge_weights() != original_weights) throw std::logic_error("edge weights were not restored");

    TrainExtras extras;
    extras.val = &data.val.graph;
    if (cfg.warm_start && previous) extras.init = &*previous;
    TrainResult trained = train_clustergcn(restored, clusters, inner, extras);
    rec.val_f1 = trained.report.val_f1;

    const EdgeRewards rewards = edge_rewards(restored, trained.report.predictions);
    rec.reward = rewards.mean;
    if (!std::isfinite(trained.report.final_loss) || !std::isfinite(rec.val_f1) || !std::isfinite(rec.reward)) {
      rec.skipped = true;
    } else {
      if (rec.val_f1 > result.best_val_f1) {
        result.best_val_f1 = rec.val_f1;
        result.best = clusters;
        result.best_step = t;
        result.best_model = trained.model;
        rec.best = true;
      }
      history.push(actions.index, rewards.scores);
      Matrix next = build_edge_states(train, train.features(), embeddings, history, cfg.threads);
      if (cfg.update == UpdateRule::kActorCritic) {
        actor_critic_update(result.policy, states, actions, rec.reward, next);
      } else {
        pending.push_back({states, actions, rec.reward});
        if (static_cast<int>(pending.size()) == cfg.window) {
          reinforce_update(result.policy, pending, cfg.gamma, cfg.window);
          pending.clear();
        }
      }
      states = std::move(next);
      if (cfg.warm_start) previous = std::move(trained.model);
    }
    if (cfg.timing) {
      rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    result.log.push_back(rec);
    if (on_step) on_step(result.log.back());
  }
  if (!pending.empty()) reinforce_update(result.policy, pending, cfg.gamma, cfg.window);
  if (result.best_step < 0) throw std::runtime_error("every search step failed");
  return result;
}

FinalResult final_train(const ClusterConfig& clusters, const SearchConfig& cfg, const Dataset& data) {
  const TrainOptions options = train_options(cfg, cfg.final_epochs);
  FinalResult out;
  out.best_val_f1 = -1.0;
  TrainExtras extras;
  extras.on_epoch = [&](int epoch, const nn::GcnModel& model) {
    const double f1 = evaluate(model, data.val.graph);
    if (f1 > out.best_val_f1) {
      out.best_val_f1 = f1;
      out.best_epoch = epoch;
      out.model = model;
    }
  };
  TrainResult trained = train_clustergcn(data.train.graph, clusters, options, extras);
  out.loss_trace = std::move(trained.report.loss_trace);
  out.test_f1 = evaluate(out.model, data.test.graph);
  return out;
}

BaselineResult baseline_clustergcn(const SearchConfig& cfg, const Dataset& data) {
  cfg.validate();
  const Graph& train = data.train.graph;
  const std::vector<Weight> unit(train.num_edges(), 1);
  BaselineResult out;
  out.clusters = partition(train.with_edge_weights(unit), partition_options(cfg));
  out.final = final_train(out.clusters, cfg, data);
  return out;
}

Dataset make_lfr_dataset(const Config& config) {
  Graph g = generate_lfr(config.lfr);
  SvdOptions svd;
  svd.dim = config.data.svd_dim;
  svd.seed = config.data.svd_seed;
  g.set_features(svd_features(g, svd));
  SplitMasks splits =
      stratified_split(g.labels(), config.data.train_fraction, config.data.val_fraction, config.data.split_seed);
  return Dataset::from_parts(std::move(g), std::move(splits));
}

Dataset load_or_generate(const Config& config) {
  if (config.data.dir.empty()) return make_lfr_dataset(config);
  return load_dataset(config.data.dir, config.data.task);
}

std::string metrics_csv(const std::vector<SearchRecord>& log, int p) {
  std::ostringstream out;
  out << "step,epsilon,reward,val_f1,best";
  for (int a = 0; a <= p; ++a) out << ",action_hist_" << a;
  out << ",wall_ms\n";
  for (const auto& r : log) {
    out << r.step << ',' << format_number(r.epsilon) << ',' << format_number(r.reward) << ','
        << format_number(r.val_f1) << ',' << (r.best ? 1 : 0);
    for (auto c : r.action_hist) out << ',' << c;
    out << ',' << format_number(r.wall_ms) << '\n';
  }
  return out.str();
}

void save_run(const std::filesystem::path& dir, const Config& config, const SearchResult& result) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "metrics.csv");
    if (!out) throw std::runtime_error("cannot write " + (dir / "metrics.csv").string());
    out << metrics_csv(result.log, config.search.p);
  }
  write_clusters(dir / "best_clusters.tsv", result.best);
  save_policy(dir / "policy.ckpt", result.policy);
  save_gcn(dir / "gcn.ckpt", result.best_model);
  write_config(dir / "config.resolved", config);
}

}  // namespace pcgcn
