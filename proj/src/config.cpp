#include "hmrs/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "hmrs/error.hpp"
#include "hmrs/graph_io.hpp"

namespace hmrs {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a number, got '" + v + "'");
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  if (!v.empty() && v.find_first_not_of("0123456789") == std::string::npos) {
    try {
      return std::stoull(v);
    } catch (const std::exception&) {
    }
  }
  throw ConfigError(key + ": expected a nonnegative integer, got '" + v + "'");
}

template <typename T>
std::vector<T> to_uint_list(const std::string& key, const std::string& v) {
  std::vector<T> out;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(static_cast<T>(to_uint(key, trim(item))));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (p_values.empty()) fail("p: at least one value required");
  for (auto p : p_values) {
    if (p < 1) fail("p: must be at least 1");
  }
  if (n < 2) fail("n: must be at least 2");
  if (d_values.empty()) fail("d_in_max: at least one value required");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) fail("edge_prob: must lie in [0, 1]");
  if (!(noise_b > 0.0)) fail("noise_b: must be positive");
  if (seeds.empty()) fail("seeds: at least one seed required");
  learner.validate();
}

HmrsConfig ExperimentConfig::learner_for(std::size_t d, std::uint64_t seed) const {
  HmrsConfig h = learner;
  if (!d_max_explicit) h.d_max = std::max<std::size_t>(d, 1);
  h.seed = seed;
  return h;
}

std::vector<std::pair<std::string, std::string>> parse_key_values(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    if (!seen.insert(key).second) {
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

void apply_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "p") {
    cfg.p_values = to_uint_list<std::size_t>(key, value);
  } else if (key == "n") {
    cfg.n = static_cast<std::size_t>(to_uint(key, value));
  } else if (key == "d_in_max" || key == "d") {
    cfg.d_values = to_uint_list<std::size_t>(key, value);
  } else if (key == "edge_prob") {
    cfg.edge_prob = to_double(key, value);
  } else if (key == "noise_b") {
    cfg.noise_b = to_double(key, value);
  } else if (key == "seeds") {
    cfg.seeds = to_uint_list<std::uint64_t>(key, value);
  } else if (key == "lambda_ridge") {
    cfg.learner.lambda_ridge = to_double(key, value);
  } else if (key == "lambda_en") {
    cfg.learner.lambda_en = to_double(key, value);
  } else if (key == "rho") {
    cfg.learner.rho = to_double(key, value);
  } else if (key == "tau") {
    cfg.learner.tau = Tau::parse(value);
  } else if (key == "d_max") {
    cfg.learner.d_max = static_cast<std::size_t>(to_uint(key, value));
    cfg.d_max_explicit = true;
  } else if (key == "en_tol") {
    cfg.learner.en_tol = to_double(key, value);
  } else if (key == "en_max_iter") {
    cfg.learner.en_max_iter = static_cast<int>(to_uint(key, value));
  } else if (key == "out") {
    cfg.out_dir = value;
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig cfg;
  std::optional<std::uint64_t> seed_base, seed_count;
  bool explicit_seeds = false;
  for (const auto& [key, value] : parse_key_values(in)) {
    if (key == "seed_base") {
      seed_base = to_uint(key, value);
    } else if (key == "seed_count") {
      seed_count = to_uint(key, value);
    } else {
      if (key == "seeds") explicit_seeds = true;
      apply_config_key(cfg, key, value);
    }
  }
  if (seed_base || seed_count) {
    if (explicit_seeds) throw ConfigError("seeds: give either 'seeds' or 'seed_base'/'seed_count'");
    const std::uint64_t base = seed_base.value_or(0);
    const std::uint64_t count = seed_count.value_or(1);
    if (count == 0) throw ConfigError("seed_count: must be at least 1");
    cfg.seeds.clear();
    for (std::uint64_t s = 0; s < count; ++s) cfg.seeds.push_back(base + s);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_experiment_config(in);
}

std::string to_config_text(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "p = " << join(cfg.p_values) << '\n'
      << "n = " << cfg.n << '\n'
      << "d_in_max = " << join(cfg.d_values) << '\n'
      << "edge_prob = " << format_double(cfg.edge_prob) << '\n'
      << "noise_b = " << format_double(cfg.noise_b) << '\n'
      << "seeds = " << join(cfg.seeds) << '\n'
      << "lambda_ridge = " << format_double(cfg.learner.lambda_ridge) << '\n'
      << "lambda_en = " << format_double(cfg.learner.lambda_en) << '\n'
      << "rho = " << format_double(cfg.learner.rho) << '\n'
      << "tau = " << cfg.learner.tau.to_string() << '\n';
  if (cfg.d_max_explicit) out << "d_max = " << cfg.learner.d_max << '\n';
  out << "en_tol = " << format_double(cfg.learner.en_tol) << '\n'
      << "en_max_iter = " << cfg.learner.en_max_iter << '\n';
  if (!cfg.out_dir.empty()) out << "out = " << cfg.out_dir.string() << '\n';
  return out.str();
}

}  // namespace hmrs
