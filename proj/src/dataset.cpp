#include "hmrs/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hmrs/error.hpp"
#include "hmrs/graph_io.hpp"

namespace hmrs {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  for (auto& f : fields) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string{} : f.substr(b, e - b + 1);
  }
  return fields;
}

}  // namespace

std::vector<std::string> default_names(std::size_t p) {
  std::vector<std::string> names;
  names.reserve(p);
  for (std::size_t j = 0; j < p; ++j) names.push_back("X" + std::to_string(j));
  return names;
}

void Dataset::ensure_names() {
  if (names.size() != p()) names = default_names(p());
}

void Dataset::validate_positive() const {
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      const double v = values(i, j);
      if (!std::isfinite(v) || v <= 0.0) {
        const std::string col = static_cast<std::size_t>(j) < names.size()
                                    ? names[j]
                                    : "X" + std::to_string(j);
        throw DataError("non-positive or non-finite value " + format_double(v) + " at row " +
                        std::to_string(i + 1) + ", column " + col);
      }
    }
  }
}

Dataset read_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  Dataset data;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  if (line_no == 0 || line.find_first_not_of(" \t\r") == std::string::npos) {
    throw DataError("CSV is empty");
  }
  data.names = split_csv_line(line);
  const std::size_t p = data.names.size();
  std::vector<double> flat;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != p) {
      throw DataError("CSV line " + std::to_string(line_no) + ": expected " + std::to_string(p) +
                      " fields, got " + std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < p; ++j) {
      const std::string& f = fields[j];
      double v = 0.0;
      auto [end, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc{} || end != f.data() + f.size() || f.empty()) {
        throw DataError("CSV line " + std::to_string(line_no) + ", column " + data.names[j] +
                        ": cannot parse '" + f + "'");
      }
      flat.push_back(v);
    }
    ++rows;
  }
  data.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < p; ++j) data.values(i, j) = flat[i * p + j];
  }
  return data;
}

Dataset read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_csv(in);
}

void write_csv(std::ostream& out, const Dataset& data) {
  const auto names = data.names.size() == data.p() ? data.names : default_names(data.p());
  for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
  out << '\n';
  for (Eigen::Index i = 0; i < data.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.values.cols(); ++j) {
      out << (j ? "," : "") << format_double(data.values(i, j));
    }
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_csv(out, data);
}

}  // namespace hmrs
