#include "hmrs/graph_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hmrs/error.hpp"

namespace hmrs {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw DataError("edge list line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return std::to_string(v);
  return std::string(buf, end);
}

Dag read_edge_list(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<Dag> g;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!g) {
      if (t.rfind("p=", 0) != 0) parse_fail(line_no, "expected header 'p=<int>', got '" + t + "'");
      long long p = 0;
      std::istringstream ps(t.substr(2));
      if (!(ps >> p) || p <= 0 || !(ps >> std::ws).eof()) {
        parse_fail(line_no, "invalid node count in '" + t + "'");
      }
      g.emplace(static_cast<std::size_t>(p));
      continue;
    }
    std::istringstream fields(t);
    long long src = -1, dst = -1;
    if (!(fields >> src >> dst)) parse_fail(line_no, "expected '<src> <dst>[ <weight>]'");
    std::optional<double> w;
    double wv = 0.0;
    if (fields >> wv) w = wv;
    if (!(fields >> std::ws).eof()) parse_fail(line_no, "trailing fields");
    if (src < 0 || dst < 0 || static_cast<std::size_t>(src) >= g->size() ||
        static_cast<std::size_t>(dst) >= g->size()) {
      parse_fail(line_no, "node index out of range");
    }
    try {
      g->add_edge(static_cast<NodeId>(src), static_cast<NodeId>(dst), w);
    } catch (const CycleError& e) {
      throw CycleError("edge list line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!g) throw DataError("edge list: missing 'p=<int>' header");
  return std::move(*g);
}

Dag read_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open edge list " + path.string());
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Dag& g) {
  out << "p=" << g.size() << '\n';
  for (const Edge& e : g.edges()) {
    out << e.src << ' ' << e.dst;
    if (auto w = g.weight(e.src, e.dst)) out << ' ' << format_double(*w);
    out << '\n';
  }
}

void write_edge_list(const std::filesystem::path& path, const Dag& g) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_edge_list(out, g);
}

std::string to_dot(const Dag& g, const std::vector<std::string>& names) {
  std::ostringstream out;
  out << "digraph G {\n";
  for (NodeId v = 0; v < g.size(); ++v) {
    std::string label = v < names.size() ? names[v] : "X" + std::to_string(v);
    std::string escaped;
    for (char c : label) {
      if (c == '"' || c == '\\') escaped += '\\';
      escaped += c;
    }
    out << "  n" << v << " [label=\"" << escaped << "\"];\n";
  }
  for (const Edge& e : g.edges()) {
    out << "  n" << e.src << " -> n" << e.dst;
    if (auto w = g.weight(e.src, e.dst)) out << " [label=\"" << format_double(*w) << "\"]";
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace hmrs
