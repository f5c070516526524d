#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "../support/temp_dir.hpp"

namespace {

const std::string kSmall =
    " --set lfr.n=200 --set lfr.min_community=20 --set search.T=3 --set search.k=4 --set search.iters=2"
    " --set gcn.hidden=8 --set policy.hidden=8 --set search.final_epochs=3 --set data.svd_dim=8";

int run(const std::string& args) {
  const std::string cmd = std::string(PCGCN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("gen-lfr writes a dataset directory") {
  TempDir dir;
  REQUIRE(run("gen-lfr -o " + (dir / "data").string() + kSmall) == 0);
  for (const char* name : {"edges.tsv", "features.csv", "labels.csv", "splits.tsv", "config.resolved"}) {
    CHECK(std::filesystem::exists(dir / "data" / name));
  }
  REQUIRE(run("svd-features -i " + (dir / "data" / "edges.tsv").string() + " -o " + (dir / "f.csv").string()) == 0);
  CHECK(std::filesystem::exists(dir / "f.csv"));
}

TEST_CASE("search is reproducible and feeds the downstream commands") {
  TempDir dir;
  const std::string a = (dir / "a").string();
  const std::string b = (dir / "b").string();
  REQUIRE(run("search --seed 5 -o " + a + kSmall) == 0);
  REQUIRE(run("search --seed 5 -o " + b + kSmall) == 0);
  CHECK(slurp(dir / "a" / "metrics.csv") == slurp(dir / "b" / "metrics.csv"));
  CHECK(slurp(dir / "a" / "best_clusters.tsv") == slurp(dir / "b" / "best_clusters.tsv"));

  REQUIRE(run("train-final -r " + a) == 0);
  CHECK(slurp(dir / "a" / "final.csv").rfind("test_f1,best_val_f1,best_epoch\n", 0) == 0);
  REQUIRE(run("eval -r " + a + " --split test") == 0);

  REQUIRE(run("baseline --seed 5 -o " + (dir / "base").string() + kSmall) == 0);
  CHECK(std::filesystem::exists(dir / "base" / "baseline.csv"));

  REQUIRE(run("entropy -r " + a + " -r " + b + " -o " + (dir / "h.csv").string()) == 0);
  const std::string csv = slurp(dir / "h.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 4);
}

TEST_CASE("exit codes") {
  TempDir dir;
  CHECK(run("search -o " + (dir / "x").string() + " --set search.bogus=1") == 1);
  CHECK(run("search -o " + (dir / "x").string() + " --set policy.p=0") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("search -o " + (dir / "y").string() + " --set data.dir=" + (dir / "missing").string()) == 2);
}
