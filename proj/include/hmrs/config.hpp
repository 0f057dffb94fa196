#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hmrs/algorithm.hpp"

namespace hmrs {

/// Parameters of a synth / learn / bench run.
///
/// Config files are flat UTF-8 text with one `key = value` per line and
/// `#` comments. Recognized keys:
///
///   p             node count, or comma list for bench grids      (10)
///   n             samples per dataset                            (500)
///   d_in_max      max in-degree of generated DAGs, or a list     (1)
///   edge_prob     edge inclusion probability                     (0.5)
///   noise_b       noise half-width B                             (0.5)
///   seeds         comma list of seeds                            (0)
///   seed_base, seed_count   alternative to `seeds`: base .. base+count-1
///   lambda_ridge, lambda_en, rho, tau, d_max, en_tol, en_max_iter
///                 learner settings (see HmrsConfig); d_max defaults to
///                 d_in_max for synthetic runs
///   out           output directory
struct ExperimentConfig {
  std::vector<std::size_t> p_values{10};
  std::size_t n = 500;
  std::vector<std::size_t> d_values{1};
  double edge_prob = 0.5;
  double noise_b = 0.5;
  std::vector<std::uint64_t> seeds{0};
  HmrsConfig learner;
  bool d_max_explicit = false;
  std::filesystem::path out_dir;

  /// Throws ConfigError naming the field.
  void validate() const;

  /// Learner settings for a synthetic dataset with in-degree cap d.
  HmrsConfig learner_for(std::size_t d, std::uint64_t seed) const;
};

// Raw key/value pairs in file order; duplicate keys are an error.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::istream& in);

ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Applies one key. Throws ConfigError for unknown keys or bad values.
void apply_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Canonical `key = value` rendering; parses back to an equal config.
std::string to_config_text(const ExperimentConfig& cfg);

}  // namespace hmrs
