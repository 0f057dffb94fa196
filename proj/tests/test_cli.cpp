#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "doctest.h"
#include "hmrs/commands.hpp"
#include "hmrs/error.hpp"
#include "hmrs/graph_io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("hmrs_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

hmrs::ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return hmrs::parse_experiment_config(in);
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse("# grid\np = 10, 20\nn = 300\nd_in_max = 1,2\nseed_base = 5\nseed_count = 3\n"
                         "tau = median_fraction(0.2)\nlambda_ridge = 0.2\n");
  CHECK(cfg.p_values == std::vector<std::size_t>{10, 20});
  CHECK(cfg.n == 300);
  CHECK(cfg.d_values == std::vector<std::size_t>{1, 2});
  CHECK(cfg.seeds == std::vector<std::uint64_t>{5, 6, 7});
  CHECK(cfg.learner.tau == hmrs::Tau::median_fraction(0.2));
  CHECK(cfg.learner.lambda_ridge == 0.2);
  CHECK_FALSE(cfg.d_max_explicit);
  CHECK(cfg.learner_for(2, 6).d_max == 2);

  const auto explicit_dmax = parse("d_max = 3\n");
  CHECK(explicit_dmax.learner_for(1, 0).d_max == 3);

  const auto round = parse(hmrs::to_config_text(cfg));
  CHECK(round.p_values == cfg.p_values);
  CHECK(round.seeds == cfg.seeds);
  CHECK(round.learner.tau == cfg.learner.tau);

  CHECK_THROWS_AS(parse("p = 3\np = 4\n"), hmrs::ConfigError);
  CHECK_THROWS_AS(parse("colour = blue\n"), hmrs::ConfigError);
  CHECK_THROWS_AS(parse("seeds = 1\nseed_base = 2\n"), hmrs::ConfigError);
  CHECK_THROWS_AS(parse("rho = 2\n"), hmrs::ConfigError);
  CHECK_THROWS_AS(parse("n = abc\n"), hmrs::ConfigError);
  CHECK_THROWS_AS(parse("just a line\n"), hmrs::ConfigError);
}

TEST_CASE("synth is deterministic and round-trips the truth") {
  TempDir a("synth_a"), b("synth_b");
  auto cfg = parse("p = 3\nn = 10\nd_in_max = 1\n");
  hmrs::cmd_synth(cfg, 7, a.path);
  hmrs::cmd_synth(cfg, 7, b.path);
  for (const char* f : {"data.csv", "truth.txt", "manifest.txt"}) {
    CHECK(slurp(a.path / f) == slurp(b.path / f));
  }
  const auto data = hmrs::read_csv(a.path / "data.csv");
  CHECK(data.n() == 10);
  CHECK(data.p() == 3);
  CHECK((data.values.array() > 0).all());
  const auto truth = hmrs::read_edge_list(a.path / "truth.txt");
  CHECK(truth.size() == 3);
  TempDir c("synth_c");
  hmrs::write_edge_list(c.path / "again.txt", truth);
  CHECK(hmrs::read_edge_list(c.path / "again.txt") == truth);
  CHECK(slurp(a.path / "manifest.txt").find("seed = 7") != std::string::npos);

  auto empty = parse("p = 4\nn = 10\nd_in_max = 0\n");
  TempDir d("synth_d");
  hmrs::cmd_synth(empty, 1, d.path);
  CHECK(hmrs::read_edge_list(d.path / "truth.txt").edge_count() == 0);
}

TEST_CASE("learn and eval") {
  TempDir t("learn");
  {
    std::ofstream csv(t.path / "one.csv");
    csv << "a\n1.5\n2.5\n0.7\n";
  }
  const auto single = hmrs::cmd_learn(t.path / "one.csv", hmrs::HmrsConfig{}, t.path / "one");
  CHECK(single.dag.edge_count() == 0);
  CHECK(fs::exists(t.path / "one" / "result.json"));

  {
    std::ofstream csv(t.path / "zero.csv");
    csv << "a,b\n1.5,2\n2.5,0\n";
  }
  try {
    hmrs::cmd_learn(t.path / "zero.csv", hmrs::HmrsConfig{}, t.path / "zero");
    FAIL("expected a validation error");
  } catch (const hmrs::DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find("column b") != std::string::npos);
  }

  auto cfg = parse("p = 6\nn = 400\nd_in_max = 1\n");
  hmrs::cmd_synth(cfg, 3, t.path / "syn");
  const auto learned = hmrs::cmd_learn(t.path / "syn" / "data.csv", cfg.learner_for(1, 3), t.path / "fit");
  for (const char* f : {"estimated.txt", "ordering.txt", "score_trace.csv", "graph.dot", "result.json"}) {
    CHECK(fs::exists(t.path / "fit" / f));
  }
  const auto result = nlohmann::json::parse(slurp(t.path / "fit" / "result.json"));
  CHECK(result["ordering"].size() == 6);
  CHECK(result["config"]["d_max"] == 1);
  CHECK(hmrs::read_edge_list(t.path / "fit" / "estimated.txt") == learned.dag);

  const auto rep = hmrs::cmd_eval(t.path / "fit" / "estimated.txt", t.path / "syn" / "truth.txt", t.path / "ev");
  const auto ev = nlohmann::json::parse(slurp(t.path / "ev" / "eval.json"));
  CHECK(ev["metrics"].contains("f1"));
  CHECK(ev["metrics"]["f1"].get<double>() == doctest::Approx(rep.f1));
  CHECK(ev["metrics"]["shd"].get<std::size_t>() == rep.shd);
  CHECK(slurp(t.path / "ev" / "eval.txt").find("F1") != std::string::npos);
}

TEST_CASE("eval edge cases") {
  TempDir t("eval");
  hmrs::Dag truth(6);
  for (hmrs::NodeId k = 0; k < 5; ++k) truth.add_edge(k, k + 1);
  hmrs::write_edge_list(t.path / "truth.txt", truth);
  hmrs::write_edge_list(t.path / "empty.txt", hmrs::Dag(6));
  hmrs::write_edge_list(t.path / "small.txt", hmrs::Dag(4));

  const auto same = hmrs::cmd_eval(t.path / "truth.txt", t.path / "truth.txt", t.path / "a");
  CHECK(same.shd == 0);
  CHECK(same.f1 == 1.0);
  const auto none = hmrs::cmd_eval(t.path / "empty.txt", t.path / "truth.txt", t.path / "b");
  CHECK(none.shd == 5);
  CHECK(none.recall == 0.0);
  CHECK_THROWS_AS(hmrs::cmd_eval(t.path / "small.txt", t.path / "truth.txt", t.path / "c"), hmrs::DataError);
}

TEST_CASE("quantile") {
  CHECK(hmrs::quantile({3, 1, 2}, 0.5) == 2.0);
  CHECK(hmrs::quantile({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(hmrs::quantile({1, 2, 3, 4}, 0.25) == 1.75);
  CHECK(hmrs::quantile({5}, 0.75) == 5.0);
}

TEST_CASE("bench bookkeeping and determinism") {
  TempDir a("bench_a"), b("bench_b");
  auto cfg = parse("p = 10\nn = 200\nd_in_max = 1\nseed_base = 1\nseed_count = 10\n");
  const auto r1 = hmrs::cmd_bench(cfg, a.path, 1);
  const auto r3 = hmrs::cmd_bench(cfg, b.path, 3);
  REQUIRE(r1.size() == 10);
  CHECK(slurp(a.path / "records.csv") == slurp(b.path / "records.csv"));
  CHECK(slurp(a.path / "summary.csv") == slurp(b.path / "summary.csv"));
  for (std::size_t i = 0; i < r1.size(); ++i) {
    CHECK(r1[i].seed == i + 1);
    CHECK(r1[i].ok == r3[i].ok);
    CHECK(r1[i].report.shd == r3[i].report.shd);
  }

  std::istringstream records(slurp(a.path / "records.csv"));
  std::string line;
  std::size_t rows = 0;
  std::getline(records, line);
  while (std::getline(records, line)) ++rows;
  CHECK(rows == 10);

  const auto summary = nlohmann::json::parse(slurp(a.path / "summary.json"));
  REQUIRE(summary["aggregate"].size() == 1);
  const auto groups = hmrs::aggregate(r1);
  REQUIRE(groups.size() == 1);
  std::vector<double> f1;
  for (const auto& r : r1) {
    if (r.ok) f1.push_back(r.report.f1);
  }
  CHECK(groups[0].f1.median == hmrs::quantile(f1, 0.5));
  CHECK(summary["aggregate"][0]["f1"]["median"].get<double>() == groups[0].f1.median);
  CHECK(groups[0].seeds == 10);
}

TEST_CASE("oracle command") {
  TempDir t("oracle");
  for (const auto& name : hmrs::oracle::preset_names()) {
    std::ostringstream report;
    CHECK(hmrs::cmd_oracle(hmrs::oracle::preset(name), name, t.path / name, report));
    CHECK(fs::exists(t.path / name / "oracle_result.json"));
  }
  std::ostringstream report;
  hmrs::cmd_oracle(hmrs::oracle::preset("collider4"), "collider4", {}, report);
  CHECK(report.str().find("{0,1,3}") != std::string::npos);
}
