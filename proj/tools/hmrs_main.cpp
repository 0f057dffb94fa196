// hmrs: command-line front end.
//
//   hmrs synth  --config exp.cfg --out dir [--seed s]
//   hmrs learn  --data data.csv [--config learner.cfg] --out dir
//   hmrs eval   --est estimated.txt --truth truth.txt --out dir
//   hmrs bench  --config grid.cfg --out dir [--workers k]
//   hmrs oracle (--preset chain3|collider4|diamond4 | --scm file) [--out dir]
//
// Exit codes: 0 success, 1 usage/config error, 2 data validation error,
// 3 oracle property violation.

#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "hmrs/commands.hpp"
#include "hmrs/config.hpp"
#include "hmrs/error.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitViolation = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"H-MRS causal discovery for strictly positive data"};
  app.set_version_flag("--version", hmrs::tool_version());
  app.require_subcommand(1);

  std::string config_path, out_dir, data_path, est_path, truth_path, preset, scm_path;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;

  auto* synth = app.add_subcommand("synth", "generate a synthetic log-linear dataset");
  synth->add_option("--config", config_path, "experiment config file")->check(CLI::ExistingFile);
  synth->add_option("--out", out_dir, "output directory")->required();
  synth->add_option("--seed", seed, "seed (default: first configured seed)");

  auto* learn = app.add_subcommand("learn", "learn a DAG from a CSV of positive values");
  learn->add_option("--data", data_path, "input CSV")->required()->check(CLI::ExistingFile);
  learn->add_option("--config", config_path, "learner config file")->check(CLI::ExistingFile);
  learn->add_option("--out", out_dir, "output directory")->required();

  auto* eval = app.add_subcommand("eval", "compare an estimated DAG with the truth");
  eval->add_option("--est", est_path, "estimated edge list")->required()->check(CLI::ExistingFile);
  eval->add_option("--truth", truth_path, "true edge list")->required()->check(CLI::ExistingFile);
  eval->add_option("--out", out_dir, "output directory")->required();

  auto* bench = app.add_subcommand("bench", "synth -> learn -> eval over a grid of seeds");
  bench->add_option("--config", config_path, "grid config file")->required()->check(CLI::ExistingFile);
  bench->add_option("--out", out_dir, "output directory");
  bench->add_option("--workers", workers, "parallel seed workers (0 = hardware threads)");

  auto* orc = app.add_subcommand("oracle", "exact plateau checks on an enumerable SCM");
  auto* preset_opt = orc->add_option("--preset", preset, "chain3 | collider4 | diamond4");
  auto* scm_opt = orc->add_option("--scm", scm_path, "SCM description file")->check(CLI::ExistingFile);
  preset_opt->excludes(scm_opt);
  orc->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth->parsed()) {
      hmrs::ExperimentConfig cfg;
      if (!config_path.empty()) cfg = hmrs::load_experiment_config(config_path);
      hmrs::cmd_synth(cfg, seed.value_or(cfg.seeds.front()), out_dir);
      std::cout << "wrote " << out_dir << "/data.csv, truth.txt, manifest.txt\n";
    } else if (learn->parsed()) {
      hmrs::ExperimentConfig cfg;
      if (!config_path.empty()) cfg = hmrs::load_experiment_config(config_path);
      const auto res = hmrs::cmd_learn(data_path, cfg.learner, out_dir);
      std::cout << "learned " << res.dag.edge_count() << " edges; wrote " << out_dir << "/result.json\n";
    } else if (eval->parsed()) {
      const auto r = hmrs::cmd_eval(est_path, truth_path, out_dir);
      std::ifstream txt(std::filesystem::path(out_dir) / "eval.txt");
      std::cout << txt.rdbuf();
      (void)r;
    } else if (bench->parsed()) {
      hmrs::ExperimentConfig cfg = hmrs::load_experiment_config(config_path);
      if (out_dir.empty()) out_dir = cfg.out_dir.empty() ? "bench_out" : cfg.out_dir.string();
      if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
      const auto records = hmrs::cmd_bench(cfg, out_dir, workers);
      std::ifstream summary(std::filesystem::path(out_dir) / "summary.csv");
      std::cout << summary.rdbuf();
      std::size_t failed = 0;
      for (const auto& r : records) {
        if (!r.ok) {
          ++failed;
          std::cerr << "seed " << r.seed << " (p=" << r.p << ", d=" << r.d << ") failed: " << r.error << '\n';
        }
      }
      if (failed > 0) return kExitData;
    } else if (orc->parsed()) {
      if (preset.empty() && scm_path.empty()) {
        std::cerr << "oracle: one of --preset or --scm is required\n";
        return kExitUsage;
      }
      hmrs::oracle::DiscreteScm scm;
      std::string label = preset;
      if (!preset.empty()) {
        scm = hmrs::oracle::preset(preset);
      } else {
        std::ifstream in(scm_path);
        scm = hmrs::oracle::read_discrete_scm(in);
        label = scm_path;
      }
      const bool ok = hmrs::cmd_oracle(scm, label, out_dir, std::cout);
      return ok ? kExitOk : kExitViolation;
    }
  } catch (const hmrs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const hmrs::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const hmrs::CycleError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const hmrs::BudgetError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}
