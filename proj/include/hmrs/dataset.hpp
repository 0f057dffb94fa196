#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace hmrs {

/// n x p matrix of strictly positive, finite observations (rows = samples).
struct Dataset {
  Eigen::MatrixXd values;
  std::vector<std::string> names;

  std::size_t n() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t p() const { return static_cast<std::size_t>(values.cols()); }

  // Fills names with X0..X{p-1} when absent.
  void ensure_names();

  /// Throws DataError naming the first offending cell (1-based row, column name).
  void validate_positive() const;
};

std::vector<std::string> default_names(std::size_t p);

// CSV: header row of names, comma-separated values, one row per sample.
Dataset read_csv(std::istream& in);
Dataset read_csv(const std::filesystem::path& path);
void write_csv(std::ostream& out, const Dataset& data);
void write_csv(const std::filesystem::path& path, const Dataset& data);

}  // namespace hmrs
