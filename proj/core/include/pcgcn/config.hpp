#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pcgcn/graph.hpp"
#include "pcgcn/lfr.hpp"
#include "pcgcn/nn.hpp"
#include "pcgcn/partition.hpp"

namespace pcgcn {

enum class UpdateRule { kActorCritic, kReinforce };

struct SearchSeeds {
  std::uint64_t partition = 11;
  std::uint64_t gcn_init = 12;
  std::uint64_t policy_init = 13;
  std::uint64_t exploration = 14;
};

struct SearchConfig {
  int T = 200;
  int k = 8;
  int bsize = 1;
  int iters = 50;
  double lr = 0.01;
  int p = 3;
  double eps_start = 0.9;
  double eps_end = 0.05;
  double eps_decay = 100.0;
  double gamma = 0.95;
  double alpha_theta = 0.001;
  double alpha_w = 0.001;
  int m = 5;
  nn::LayerKind model = nn::LayerKind::kGcn;
  UpdateRule update = UpdateRule::kActorCritic;
  SearchSeeds seeds;
  int final_epochs = 1500;

  int hidden = 128;
  double dropout = 0.0;
  int policy_hidden = 64;
  /// REINFORCE return window.
  int window = 10;
  /// Reuse the previous step's GCN instead of a fresh one each step.
  bool warm_start = false;
  /// Threads used to build edge states.
  int threads = 1;
  /// Record wall-clock time per step (otherwise wall_ms is written as 0).
  bool timing = false;
  PartitionOptions partition;

  /// Throws std::invalid_argument on an unusable combination.
  void validate() const;
};

/// Options for building a dataset from a generated or loaded graph.
struct DataOptions {
  /// Dataset directory; empty means generate an LFR graph from [lfr].
  std::string dir;
  TaskKind task = TaskKind::kMulticlass;
  double train_fraction = 0.6;
  double val_fraction = 0.1;
  int svd_dim = 16;
  std::uint64_t split_seed = 21;
  std::uint64_t svd_seed = 22;
};

/// Everything a run can be configured with. In the INI form the keys are
/// grouped as [search], [policy], [gcn], [partition], [seeds], [lfr] and [data].
struct Config {
  SearchConfig search;
  LfrParams lfr;
  DataOptions data;
};

/// Sets `section.key` from its textual value. Throws std::invalid_argument
/// for unknown keys or unparsable values.
void set_config_value(Config& config, std::string_view key, std::string_view value);
std::string get_config_value(const Config& config, std::string_view key);
/// All `section.key` names in file order.
std::vector<std::string> config_keys();

/// Parses an INI file; every key must be known.
Config read_config(const std::filesystem::path& path);
/// Applies `key=value` strings in order.
void apply_overrides(Config& config, const std::vector<std::string>& overrides);
/// Rederives every seed from one master seed.
void apply_master_seed(Config& config, std::uint64_t master);

std::string to_ini(const Config& config);
void write_config(const std::filesystem::path& path, const Config& config);

std::string_view layer_kind_name(nn::LayerKind kind);
nn::LayerKind parse_layer_kind(std::string_view name);
std::string_view update_rule_name(UpdateRule rule);
UpdateRule parse_update_rule(std::string_view name);
std::string_view task_name(TaskKind task);
TaskKind parse_task(std::string_view name);

}  // namespace pcgcn
