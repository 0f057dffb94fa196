#include "hmrs/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "hmrs/dataset.hpp"
#include "hmrs/error.hpp"
#include "hmrs/graph_io.hpp"
#include "hmrs/synth.hpp"
#include "json.hpp"

namespace hmrs {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error("cannot create output directory " + dir.string());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

ordered_json learner_json(const HmrsConfig& c) {
  return ordered_json{{"lambda_ridge", c.lambda_ridge}, {"lambda_en", c.lambda_en},
                      {"rho", c.rho},                   {"tau", c.tau.to_string()},
                      {"d_max", c.d_max},               {"en_tol", c.en_tol},
                      {"en_max_iter", c.en_max_iter},   {"seed", c.seed}};
}

ordered_json report_json(const EvalReport& r) {
  return ordered_json{{"shd", r.shd},
                      {"precision", r.precision},
                      {"recall", r.recall},
                      {"f1", r.f1},
                      {"true_edge_count", r.true_edge_count},
                      {"est_edge_count", r.est_edge_count},
                      {"true_positive_count", r.true_positive_count}};
}

ordered_json quantiles_json(const Quantiles& q) {
  return ordered_json{{"median", q.median}, {"q1", q.q1}, {"q3", q.q3}};
}

std::string fixed3(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(3) << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::string tool_version() { return std::string("hmrs ") + HMRS_VERSION; }

void cmd_synth(const ExperimentConfig& cfg, std::uint64_t seed, const fs::path& out) {
  cfg.validate();
  if (cfg.p_values.size() != 1 || cfg.d_values.size() != 1) {
    throw ConfigError("synth: p and d_in_max must be single values");
  }
  const std::size_t p = cfg.p_values.front();
  const std::size_t d = cfg.d_values.front();
  const Dag dag = sample_dag(p, d, cfg.edge_prob, seed);
  ScmPriors priors;
  priors.noise_half_width = cfg.noise_b;
  const ScmParams scm = sample_scm(dag, seed, priors);
  const Dataset data = sample_dataset(scm, cfg.n, seed);

  ensure_dir(out);
  write_csv(out / "data.csv", data);
  Dag weighted(p);
  for (const auto& [e, w] : scm.beta) weighted.add_edge(e.src, e.dst, w);
  write_edge_list(out / "truth.txt", weighted);

  auto manifest = open_out(out / "manifest.txt");
  manifest << "# " << tool_version() << " synth\n"
           << "seed = " << seed << '\n';
  ExperimentConfig echo = cfg;
  echo.seeds = {seed};
  manifest << to_config_text(echo);
  manifest << "# theta\n";
  for (std::size_t j = 0; j < p; ++j) manifest << "# theta " << j << ' ' << format_double(scm.theta[j]) << '\n';
}

HmrsResult cmd_learn(const fs::path& data_csv, const HmrsConfig& cfg, const fs::path& out) {
  cfg.validate();
  Dataset data = read_csv(data_csv);
  data.ensure_names();
  if (data.n() < 2) throw DataError("learn: need at least 2 data rows, got " + std::to_string(data.n()));
  data.validate_positive();

  const auto t0 = std::chrono::steady_clock::now();
  HmrsResult result = run(data, cfg);
  const double elapsed = seconds_since(t0);

  ensure_dir(out);
  write_edge_list(out / "estimated.txt", result.dag);
  {
    auto f = open_out(out / "ordering.txt");
    for (NodeId v : result.ordering) f << v << ' ' << data.names[v] << '\n';
  }
  {
    auto f = open_out(out / "score_trace.csv");
    f << "step,node,name,score,selected\n";
    for (const StepTrace& st : result.score_trace) {
      for (const auto& [j, s] : st.scores) {
        f << st.step << ',' << j << ',' << data.names[j] << ',' << format_double(s) << ','
          << (j == st.selected ? 1 : 0) << '\n';
      }
    }
  }
  {
    auto f = open_out(out / "graph.dot");
    f << to_dot(result.dag, data.names);
  }

  ordered_json doc;
  doc["tool_version"] = tool_version();
  doc["command"] = "learn";
  doc["input"] = data_csv.string();
  doc["n"] = data.n();
  doc["p"] = data.p();
  doc["names"] = data.names;
  doc["config"] = learner_json(cfg);
  doc["ordering"] = result.ordering;
  ordered_json parents = ordered_json::object();
  for (NodeId v = 0; v < data.p(); ++v) parents[data.names[v]] = result.parent_sets[v];
  doc["parent_sets"] = parents;
  ordered_json edges = ordered_json::array();
  for (const Edge& e : result.dag.edges()) edges.push_back({e.src, e.dst});
  doc["edges"] = edges;
  ordered_json trace = ordered_json::array();
  for (const StepTrace& st : result.score_trace) {
    ordered_json scores = ordered_json::array();
    for (const auto& [j, s] : st.scores) scores.push_back({j, s});
    trace.push_back({{"step", st.step}, {"selected", st.selected}, {"scores", scores}});
  }
  doc["score_trace"] = trace;
  doc["timing_seconds"] = elapsed;
  open_out(out / "result.json") << doc.dump(2) << '\n';
  return result;
}

EvalReport cmd_eval(const fs::path& est, const fs::path& truth, const fs::path& out) {
  const Dag e = read_edge_list(est);
  const Dag t = read_edge_list(truth);
  if (e.size() != t.size()) {
    throw DataError("eval: estimate has p=" + std::to_string(e.size()) + " but truth has p=" +
                    std::to_string(t.size()));
  }
  const EvalReport r = precision_recall_f1(e, t);
  ensure_dir(out);
  ordered_json doc;
  doc["tool_version"] = tool_version();
  doc["command"] = "eval";
  doc["estimate"] = est.string();
  doc["truth"] = truth.string();
  doc["metrics"] = report_json(r);
  open_out(out / "eval.json") << doc.dump(2) << '\n';

  auto txt = open_out(out / "eval.txt");
  txt << std::left << std::setw(12) << "metric" << std::right << std::setw(10) << "value" << '\n'
      << std::left << std::setw(12) << "SHD" << std::right << std::setw(10) << r.shd << '\n'
      << std::left << std::setw(12) << "Precision" << std::right << std::setw(10) << fixed3(r.precision) << '\n'
      << std::left << std::setw(12) << "Recall" << std::right << std::setw(10) << fixed3(r.recall) << '\n'
      << std::left << std::setw(12) << "F1" << std::right << std::setw(10) << fixed3(r.f1) << '\n'
      << std::left << std::setw(12) << "true_edges" << std::right << std::setw(10) << r.true_edge_count << '\n'
      << std::left << std::setw(12) << "est_edges" << std::right << std::setw(10) << r.est_edge_count << '\n';
  return r;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<BenchGroup> aggregate(const std::vector<SeedRecord>& records) {
  std::map<std::pair<std::size_t, std::size_t>, std::vector<const SeedRecord*>> groups;
  for (const SeedRecord& r : records) groups[{r.p, r.d}].push_back(&r);
  std::vector<BenchGroup> out;
  for (const auto& [key, recs] : groups) {
    BenchGroup g;
    g.p = key.first;
    g.d = key.second;
    g.seeds = recs.size();
    std::vector<double> shd, prec, rec, f1;
    for (const SeedRecord* r : recs) {
      if (!r->ok) {
        ++g.failed;
        continue;
      }
      shd.push_back(static_cast<double>(r->report.shd));
      prec.push_back(r->report.precision);
      rec.push_back(r->report.recall);
      f1.push_back(r->report.f1);
    }
    auto qs = [](const std::vector<double>& v) {
      return Quantiles{quantile(v, 0.5), quantile(v, 0.25), quantile(v, 0.75)};
    };
    g.shd = qs(shd);
    g.precision = qs(prec);
    g.recall = qs(rec);
    g.f1 = qs(f1);
    out.push_back(g);
  }
  return out;
}

SeedRecord run_seed(const ExperimentConfig& cfg, std::size_t p, std::size_t d, std::uint64_t seed) {
  SeedRecord rec;
  rec.p = p;
  rec.d = d;
  rec.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const Dag truth = sample_dag(p, d, cfg.edge_prob, seed);
    ScmPriors priors;
    priors.noise_half_width = cfg.noise_b;
    const ScmParams scm = sample_scm(truth, seed, priors);
    const Dataset data = sample_dataset(scm, cfg.n, seed);
    const HmrsResult res = run(data, cfg.learner_for(d, seed));
    rec.report = precision_recall_f1(res.dag, truth);
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  rec.seconds = seconds_since(t0);
  return rec;
}

std::vector<SeedRecord> run_grid(const ExperimentConfig& cfg, std::size_t workers) {
  cfg.validate();
  struct Task {
    std::size_t p, d;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t p : cfg.p_values) {
    for (std::size_t d : cfg.d_values) {
      for (std::uint64_t s : cfg.seeds) tasks.push_back({p, d, s});
    }
  }
  std::vector<SeedRecord> records(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      records[i] = run_seed(cfg, tasks[i].p, tasks[i].d, tasks[i].seed);
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(tasks.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return records;
}

std::vector<SeedRecord> cmd_bench(const ExperimentConfig& cfg, const fs::path& out,
                                  std::size_t workers) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<SeedRecord> records = run_grid(cfg, workers);
  const double total = seconds_since(t0);
  const auto groups = aggregate(records);

  ensure_dir(out);
  {
    auto f = open_out(out / "records.csv");
    f << "p,d,seed,status,shd,precision,recall,f1,true_edges,est_edges,error\n";
    for (const SeedRecord& r : records) {
      std::string err = r.error;
      std::replace(err.begin(), err.end(), ',', ';');
      std::replace(err.begin(), err.end(), '\n', ' ');
      f << r.p << ',' << r.d << ',' << r.seed << ',' << (r.ok ? "ok" : "error") << ','
        << r.report.shd << ',' << format_double(r.report.precision) << ','
        << format_double(r.report.recall) << ',' << format_double(r.report.f1) << ','
        << r.report.true_edge_count << ',' << r.report.est_edge_count << ',' << err << '\n';
    }
  }
  {
    auto f = open_out(out / "timings.csv");
    f << "p,d,seed,seconds\n";
    for (const SeedRecord& r : records) f << r.p << ',' << r.d << ',' << r.seed << ',' << r.seconds << '\n';
  }
  {
    auto f = open_out(out / "summary.csv");
    f << "configuration,method,seeds,failed,SHD,Precision,Recall,F1,SHD_IQR,Precision_IQR,Recall_IQR,F1_IQR\n";
    for (const BenchGroup& g : groups) {
      f << "p=" << g.p << " d=" << g.d << ",H-MRS," << g.seeds << ',' << g.failed << ','
        << format_double(g.shd.median) << ',' << fixed3(g.precision.median) << ','
        << fixed3(g.recall.median) << ',' << fixed3(g.f1.median) << ','
        << format_double(g.shd.q3 - g.shd.q1) << ',' << fixed3(g.precision.q3 - g.precision.q1) << ','
        << fixed3(g.recall.q3 - g.recall.q1) << ',' << fixed3(g.f1.q3 - g.f1.q1) << '\n';
    }
  }

  ordered_json doc;
  doc["tool_version"] = tool_version();
  doc["command"] = "bench";
  ordered_json config;
  config["p"] = cfg.p_values;
  config["n"] = cfg.n;
  config["d_in_max"] = cfg.d_values;
  config["edge_prob"] = cfg.edge_prob;
  config["noise_b"] = cfg.noise_b;
  config["seeds"] = cfg.seeds;
  config["learner"] = learner_json(cfg.learner);
  config["d_max_follows_d_in_max"] = !cfg.d_max_explicit;
  doc["config"] = config;
  ordered_json recs = ordered_json::array();
  for (const SeedRecord& r : records) {
    ordered_json j{{"p", r.p}, {"d", r.d}, {"seed", r.seed}, {"status", r.ok ? "ok" : "error"}};
    if (r.ok) j["metrics"] = report_json(r.report);
    else j["error"] = r.error;
    j["seconds"] = r.seconds;
    recs.push_back(j);
  }
  doc["records"] = recs;
  ordered_json aggs = ordered_json::array();
  for (const BenchGroup& g : groups) {
    aggs.push_back({{"p", g.p},
                    {"d", g.d},
                    {"seeds", g.seeds},
                    {"failed", g.failed},
                    {"shd", quantiles_json(g.shd)},
                    {"precision", quantiles_json(g.precision)},
                    {"recall", quantiles_json(g.recall)},
                    {"f1", quantiles_json(g.f1)}});
  }
  doc["aggregate"] = aggs;
  doc["timing_seconds"] = total;
  open_out(out / "summary.json") << doc.dump(2) << '\n';
  return records;
}

namespace {

std::string set_text(const std::vector<NodeId>& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

}  // namespace

bool cmd_oracle(const oracle::DiscreteScm& scm, const std::string& label, const fs::path& out,
                std::ostream& report) {
  bool all_ok = true;
  std::ostringstream txt;
  ordered_json doc;
  doc["tool_version"] = tool_version();
  doc["command"] = "oracle";
  doc["scm"] = label;
  ordered_json nodes = ordered_json::array();
  txt << "oracle " << label << " (p=" << scm.dag.size() << ")\n";
  for (NodeId j = 0; j < scm.dag.size(); ++j) {
    const oracle::PlateauReport rep = oracle::verify_plateau(scm, j);
    all_ok = all_ok && rep.passed();
    txt << "node " << j << ": " << (rep.passed() ? "PASS" : "FAIL")
        << "  Pa=" << set_text(rep.parents) << " NonDesc=" << set_text(rep.nondescendants)
        << " plateau=" << std::setprecision(12) << rep.plateau_value << "\n  plateau sets:";
    for (const auto& s : rep.plateau_sets) txt << ' ' << set_text(s);
    txt << '\n';
    if (rep.gap_checked && std::isfinite(rep.min_gap)) txt << "  min gap: " << rep.min_gap << '\n';
    for (const auto& v : rep.violations) txt << "  violation: " << v << '\n';

    ordered_json scores = ordered_json::array();
    for (const auto& s : rep.scores) scores.push_back({{"node", j}, {"set", s.set}, {"value", s.value}});
    ordered_json node{{"node", j},
                      {"passed", rep.passed()},
                      {"parents", rep.parents},
                      {"nondescendants", rep.nondescendants},
                      {"plateau_value", rep.plateau_value},
                      {"plateau_sets", rep.plateau_sets},
                      {"checks",
                       {{"lower_bound", rep.lower_bound_ok},
                        {"monotone", rep.monotone_ok},
                        {"plateau", rep.plateau_ok},
                        {"gap", rep.gap_ok},
                        {"gap_checked", rep.gap_checked}}},
                      {"violations", rep.violations},
                      {"scores", scores}};
    if (rep.gap_checked && std::isfinite(rep.min_gap)) node["min_gap"] = rep.min_gap;
    nodes.push_back(node);
  }
  txt << (all_ok ? "RESULT: PASS\n" : "RESULT: FAIL\n");
  doc["nodes"] = nodes;
  doc["passed"] = all_ok;
  report << txt.str();
  if (!out.empty()) {
    ensure_dir(out);
    open_out(out / "oracle_report.txt") << txt.str();
    open_out(out / "oracle_result.json") << doc.dump(2) << '\n';
  }
  return all_ok;
}

}  // namespace hmrs
