#include "pcgcn/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace pcgcn {
namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw std::invalid_argument("bad value `" + s + "` for " + std::string(key));
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("bad value `" + s + "` for " + std::string(key));
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

struct Entry {
  std::string name;
  std::function<void(Config&, std::string_view)> set;
  std::function<std::string(const Config&)> get;
};

template <typename T, typename Access>
Entry numeric(std::string name, Access access) {
  Entry e;
  e.name = name;
  e.set = [name, access](Config& c, std::string_view v) { access(c) = parse_number<T>(name, v); };
  e.get = [access](const Config& c) {
    if constexpr (std::is_floating_point_v<T>) {
      return format_double(access(const_cast<Config&>(c)));
    } else {
      return std::to_string(access(const_cast<Config&>(c)));
    }
  };
  return e;
}

template <typename Access>
Entry boolean(std::string name, Access access) {
  Entry e;
  e.name = name;
  e.set = [name, access](Config& c, std::string_view v) { access(c) = parse_bool(name, v); };
  e.get = [access](const Config& c) { return std::string(access(const_cast<Config&>(c)) ? "true" : "false"); };
  return e;
}

template <typename Parse, typename Name, typename Access>
Entry named(std::string name, Parse parse, Name to_name, Access access) {
  Entry e;
  e.name = name;
  e.set = [parse, access](Config& c, std::string_view v) { access(c) = parse(trim(v)); };
  e.get = [to_name, access](const Config& c) { return std::string(to_name(access(const_cast<Config&>(c)))); };
  return e;
}

template <typename Access>
Entry text(std::string name, Access access) {
  Entry e;
  e.name = name;
  e.set = [access](Config& c, std::string_view v) { access(c) = trim(v); };
  e.get = [access](const Config& c) { return access(const_cast<Config&>(c)); };
  return e;
}

#define FIELD(expr) [](Config& c) -> auto& { return c.expr; }

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = [] {
    std::vector<Entry> r;
    r.push_back(numeric<int>("search.T", FIELD(search.T)));
    r.push_back(numeric<int>("search.k", FIELD(search.k)));
    r.push_back(numeric<int>("search.bsize", FIELD(search.bsize)));
    r.push_back(numeric<int>("search.iters", FIELD(search.iters)));
    r.push_back(numeric<double>("search.lr", FIELD(search.lr)));
    r.push_back(numeric<int>("search.final_epochs", FIELD(search.final_epochs)));
    r.push_back(named("search.model", parse_layer_kind, layer_kind_name, FIELD(search.model)));
    r.push_back(named("search.update", parse_update_rule, update_rule_name, FIELD(search.update)));
    r.push_back(boolean("search.warm_start", FIELD(search.warm_start)));
    r.push_back(numeric<int>("search.threads", FIELD(search.threads)));
    r.push_back(boolean("search.timing", FIELD(search.timing)));

    r.push_back(numeric<int>("policy.p", FIELD(search.p)));
    r.push_back(numeric<double>("policy.eps_start", FIELD(search.eps_start)));
    r.push_back(numeric<double>("policy.eps_end", FIELD(search.eps_end)));
    r.push_back(numeric<double>("policy.eps_decay", FIELD(search.eps_decay)));
    r.push_back(numeric<double>("policy.gamma", FIELD(search.gamma)));
    r.push_back(numeric<double>("policy.alpha_theta", FIELD(search.alpha_theta)));
    r.push_back(numeric<double>("policy.alpha_w", FIELD(search.alpha_w)));
    r.push_back(numeric<int>("policy.m", FIELD(search.m)));
    r.push_back(numeric<int>("policy.hidden", FIELD(search.policy_hidden)));
    r.push_back(numeric<int>("policy.window", FIELD(search.window)));

    r.push_back(numeric<int>("gcn.hidden", FIELD(search.hidden)));
    r.push_back(numeric<double>("gcn.dropout", FIELD(search.dropout)));

    r.push_back(named("partition.objective", parse_objective, objective_name, FIELD(search.partition.objective)));
    r.push_back(numeric<int>("partition.coarsen_factor", FIELD(search.partition.coarsen_factor)));
    r.push_back(numeric<double>("partition.min_shrink", FIELD(search.partition.min_shrink)));
    r.push_back(numeric<int>("partition.base_restarts", FIELD(search.partition.base_restarts)));
    r.push_back(numeric<int>("partition.refine_sweeps", FIELD(search.partition.refine_sweeps)));

    r.push_back(numeric<std::uint64_t>("seeds.partition", FIELD(search.seeds.partition)));
    r.push_back(numeric<std::uint64_t>("seeds.gcn_init", FIELD(search.seeds.gcn_init)));
    r.push_back(numeric<std::uint64_t>("seeds.policy_init", FIELD(search.seeds.policy_init)));
    r.push_back(numeric<std::uint64_t>("seeds.exploration", FIELD(search.seeds.exploration)));
    r.push_back(numeric<std::uint64_t>("seeds.split", FIELD(data.split_seed)));
    r.push_back(numeric<std::uint64_t>("seeds.svd", FIELD(data.svd_seed)));
    r.push_back(numeric<std::uint64_t>("seeds.lfr", FIELD(lfr.seed)));

    r.push_back(numeric<NodeId>("lfr.n", FIELD(lfr.n)));
    r.push_back(numeric<double>("lfr.avg_degree", FIELD(lfr.avg_degree)));
    r.push_back(numeric<NodeId>("lfr.max_degree", FIELD(lfr.max_degree)));
    r.push_back(numeric<NodeId>("lfr.min_community", FIELD(lfr.min_community)));
    r.push_back(numeric<NodeId>("lfr.max_community", FIELD(lfr.max_community)));
    r.push_back(numeric<double>("lfr.mu", FIELD(lfr.mu)));
    r.push_back(numeric<double>("lfr.degree_exponent", FIELD(lfr.degree_exponent)));
    r.push_back(numeric<double>("lfr.community_exponent", FIELD(lfr.community_exponent)));

    r.push_back(text("data.dir", FIELD(data.dir)));
    r.push_back(named("data.task", parse_task, task_name, FIELD(data.task)));
    r.push_back(numeric<double>("data.train_fraction", FIELD(data.train_fraction)));
    r.push_back(numeric<double>("data.val_fraction", FIELD(data.val_fraction)));
    r.push_back(numeric<int>("data.svd_dim", FIELD(data.svd_dim)));
    return r;
  }();
  return entries;
}

#undef FIELD

const Entry& find_entry(std::string_view key) {
  for (const auto& e : registry()) {
    if (e.name == key) return e;
  }
  throw std::invalid_argument("unknown config key `" + std::string(key) + "`");
}

}  // namespace

void SearchConfig::validate() const {
  if (T < 1) throw std::invalid_argument("T must be >= 1");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (bsize < 1 || bsize > k) throw std::invalid_argument("bsize must lie in [1, k]");
  if (iters < 1) throw std::invalid_argument("iters must be >= 1");
  if (final_epochs < 1) throw std::invalid_argument("final_epochs must be >= 1");
  if (!(lr > 0.0)) throw std::invalid_argument("lr must be positive");
  if (!(eps_decay > 0.0)) throw std::invalid_argument("eps_decay must be positive");
  if (!(eps_start <= 1.0 && eps_start >= eps_end && eps_end >= 0.0)) {
    throw std::invalid_argument("need 1 >= eps_start >= eps_end >= 0");
  }
  if (!(alpha_theta > 0.0) || !(alpha_w > 0.0)) throw std::invalid_argument("alpha_theta and alpha_w must be positive");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("dropout must lie in [0, 1)");
  if (hidden < 1) throw std::invalid_argument("gcn hidden width must be >= 1");
  if (p < 1 || p > 30) throw std::invalid_argument("p must lie in [1, 30]");
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (policy_hidden < 1) throw std::invalid_argument("policy hidden width must be >= 1");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  if (window < 1) throw std::invalid_argument("window must be >= 1");
}

std::string_view layer_kind_name(nn::LayerKind kind) { return kind == nn::LayerKind::kHogcn ? "hogcn" : "gcn"; }

nn::LayerKind parse_layer_kind(std::string_view name) {
  if (name == "gcn") return nn::LayerKind::kGcn;
  if (name == "hogcn") return nn::LayerKind::kHogcn;
  throw std::invalid_argument("unknown model `" + std::string(name) + "` (expected gcn or hogcn)");
}

std::string_view update_rule_name(UpdateRule rule) {
  return rule == UpdateRule::kReinforce ? "reinforce" : "actor-critic";
}

UpdateRule parse_update_rule(std::string_view name) {
  if (name == "actor-critic") return UpdateRule::kActorCritic;
  if (name == "reinforce") return UpdateRule::kReinforce;
  throw std::invalid_argument("unknown update rule `" + std::string(name) + "` (expected actor-critic or reinforce)");
}

std::string_view task_name(TaskKind task) { return task == TaskKind::kMultilabel ? "multilabel" : "multiclass"; }

TaskKind parse_task(std::string_view name) {
  if (name == "multiclass") return TaskKind::kMulticlass;
  if (name == "multilabel") return TaskKind::kMultilabel;
  throw std::invalid_argument("unknown task `" + std::string(name) + "` (expected multiclass or multilabel)");
}

void set_config_value(Config& config, std::string_view key, std::string_view value) {
  find_entry(key).set(config, value);
}

std::string get_config_value(const Config& config, std::string_view key) { return find_entry(key).get(config); }

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& e : registry()) keys.push_back(e.name);
  return keys;
}

Config read_config(const std::filesystem::path& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw std::runtime_error("cannot read config " + path.string() + ": " + e.message() + " (line " +
                             std::to_string(e.line()) + ")");
  }
  Config config;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw std::invalid_argument("config key `" + section + "` is outside any section");
    for (const auto& [key, value] : body) set_config_value(config, section + "." + key, value.data());
  }
  return config;
}

void apply_overrides(Config& config, const std::vector<std::string>& overrides) {
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("override `" + item + "` is not key=value");
    set_config_value(config, trim(std::string_view(item).substr(0, eq)), std::string_view(item).substr(eq + 1));
  }
}

void apply_master_seed(Config& config, std::uint64_t master) {
  auto& s = config.search.seeds;
  s.partition = derive_seed(master, 1);
  s.gcn_init = derive_seed(master, 2);
  s.policy_init = derive_seed(master, 3);
  s.exploration = derive_seed(master, 4);
  config.data.split_seed = derive_seed(master, 5);
  config.data.svd_seed = derive_seed(master, 6);
  config.lfr.seed = derive_seed(master, 7);
}

std::string to_ini(const Config& config) {
  std::ostringstream out;
  std::string section;
  for (const auto& e : registry()) {
    const auto dot = e.name.find('.');
    const std::string sec = e.name.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) out << '\n';
      out << '[' << sec << "]\n";
      section = sec;
    }
    out << e.name.substr(dot + 1) << " = " << e.get(config) << '\n';
  }
  return out.str();
}

void write_config(const std::filesystem::path& path, const Config& config) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_ini(config);
}

}  // namespace pcgcn
