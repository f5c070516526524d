#include <doctest.h>

#include <fstream>
#include <sstream>

#include "../support/temp_dir.hpp"
#include "pcgcn/checkpoint.hpp"
#include "pcgcn/config.hpp"
#include "pcgcn/driver.hpp"

using namespace pcgcn;

namespace {

Config small_config() {
  Config c;
  c.lfr.n = 200;
  c.lfr.min_community = 20;
  c.search.T = 4;
  c.search.k = 4;
  c.search.iters = 3;
  c.search.hidden = 16;
  c.search.policy_hidden = 8;
  c.search.final_epochs = 6;
  c.data.svd_dim = 8;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Fixture {
  Config config = small_config();
  Dataset data = make_lfr_dataset(config);
  Matrix embeddings = state_embeddings(data, config.data);
};

}  // namespace

TEST_CASE_FIXTURE(Fixture, "search log") {
  std::vector<SearchRecord> streamed;
  const SearchResult r = search(config.search, data, embeddings, [&](const SearchRecord& rec) { streamed.push_back(rec); });
  REQUIRE(r.log.size() == 4);
  CHECK(streamed.size() == 4);
  double best = -1.0;
  for (std::size_t t = 0; t < r.log.size(); ++t) {
    const SearchRecord& rec = r.log[t];
    CHECK(rec.step == static_cast<int>(t));
    std::int64_t total = 0;
    for (auto c : rec.action_hist) total += c;
    CHECK(total == static_cast<std::int64_t>(data.train.graph.num_edges()));
    CHECK(rec.action_hist.size() == 4);
    CHECK(rec.best == (rec.val_f1 > best));
    if (rec.best) best = rec.val_f1;
    CHECK(rec.wall_ms == 0.0);
  }
  CHECK(r.best_val_f1 == best);
  CHECK(r.log[static_cast<std::size_t>(r.best_step)].best);
  CHECK(r.best.k == 4);
}

TEST_CASE_FIXTURE(Fixture, "single step search") {
  config.search.T = 1;
  const SearchResult r = search(config.search, data, embeddings);
  REQUIRE(r.log.size() == 1);
  CHECK(r.log[0].best);
  CHECK(r.best_step == 0);
}

TEST_CASE_FIXTURE(Fixture, "search is deterministic for both update rules and thread counts") {
  for (auto rule : {UpdateRule::kActorCritic, UpdateRule::kReinforce}) {
    config.search.update = rule;
    config.search.threads = 1;
    const SearchResult a = search(config.search, data, embeddings);
    config.search.threads = 3;
    const SearchResult b = search(config.search, data, embeddings);
    CHECK(metrics_csv(a.log, 3) == metrics_csv(b.log, 3));
    CHECK(a.best == b.best);
  }
}

TEST_CASE_FIXTURE(Fixture, "metrics and run directory") {
  const SearchResult r = search(config.search, data, embeddings);
  const std::string csv = metrics_csv(r.log, 3);
  CHECK(csv.rfind("step,epsilon,reward,val_f1,best,action_hist_0,action_hist_1,action_hist_2,action_hist_3,wall_ms\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  TempDir dir;
  save_run(dir.path(), config, r);
  for (const char* name : {"metrics.csv", "best_clusters.tsv", "policy.ckpt", "gcn.ckpt", "config.resolved"}) {
    CHECK(std::filesystem::exists(dir / name));
  }
  CHECK(slurp(dir / "metrics.csv") == csv);
  CHECK(read_clusters(dir / "best_clusters.tsv", data.train.graph) == r.best);
  const Config back = read_config(dir / "config.resolved");
  CHECK(to_ini(back) == to_ini(config));
  CHECK(load_gcn(dir / "gcn.ckpt").layers.size() == r.best_model.layers.size());
}

TEST_CASE_FIXTURE(Fixture, "baseline is final training on the unit-weight partition") {
  const BaselineResult base = baseline_clustergcn(config.search, data);
  const std::vector<Weight> unit(data.train.graph.num_edges(), 1);
  PartitionOptions po = config.search.partition;
  po.k = config.search.k;
  po.seed = config.search.seeds.partition;
  CHECK(base.clusters == partition(data.train.graph.with_edge_weights(unit), po));
  const FinalResult again = final_train(base.clusters, config.search, data);
  CHECK(again.test_f1 == base.final.test_f1);
  CHECK(again.best_epoch == base.final.best_epoch);
  CHECK(base.final.best_epoch >= 1);
  CHECK(base.final.best_epoch <= 6);
  CHECK(base.final.loss_trace.size() == 24);
}

TEST_CASE("config keys") {
  Config c;
  SUBCASE("unknown keys are rejected") {
    CHECK_THROWS_AS(set_config_value(c, "search.nope", "1"), std::invalid_argument);
    CHECK_THROWS_AS(apply_overrides(c, {"policy.p"}), std::invalid_argument);
    TempDir dir;
    std::ofstream(dir / "bad.ini") << "[search]\nT = 3\nbogus = 1\n";
    CHECK_THROWS_AS(read_config(dir / "bad.ini"), std::invalid_argument);
  }
  SUBCASE("bad values are rejected") {
    CHECK_THROWS_AS(set_config_value(c, "search.T", "many"), std::invalid_argument);
    CHECK_THROWS_AS(set_config_value(c, "search.model", "gat"), std::invalid_argument);
  }
  SUBCASE("every key round-trips through text") {
    for (const auto& key : config_keys()) {
      const std::string value = get_config_value(c, key);
      Config copy;
      set_config_value(copy, key, value);
      CHECK(get_config_value(copy, key) == value);
    }
    apply_overrides(c, {"search.T=7", "policy.gamma=0.5", "search.model=hogcn", "search.update=reinforce"});
    CHECK(c.search.T == 7);
    CHECK(c.search.gamma == 0.5);
    CHECK(c.search.model == nn::LayerKind::kHogcn);
    TempDir dir;
    write_config(dir / "c.ini", c);
    CHECK(to_ini(read_config(dir / "c.ini")) == to_ini(c));
  }
  SUBCASE("master seed fans out to distinct module seeds") {
    apply_master_seed(c, 42);
    Config d;
    apply_master_seed(d, 42);
    CHECK(to_ini(c) == to_ini(d));
    CHECK(c.search.seeds.partition != c.search.seeds.gcn_init);
    apply_master_seed(d, 43);
    CHECK(c.search.seeds.partition != d.search.seeds.partition);
  }
}
