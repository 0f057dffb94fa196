#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hmrs/graph.hpp"

namespace hmrs {

// Edge-list text format:
//
//   p=<int>
//   <src> <dst>[ <weight>]
//   ...
//
// Indices are 0-based, fields whitespace-separated, lines starting with '#'
// and blank lines are ignored. Parse errors throw DataError with the line
// number; cycles throw CycleError.
Dag read_edge_list(std::istream& in);
Dag read_edge_list(const std::filesystem::path& path);

void write_edge_list(std::ostream& out, const Dag& g);
void write_edge_list(const std::filesystem::path& path, const Dag& g);

/// Graphviz digraph. `names` may be empty, in which case nodes are labelled X<i>.
std::string to_dot(const Dag& g, const std::vector<std::string>& names = {});

// Shortest round-trippable decimal form of a double.
std::string format_double(double v);

}  // namespace hmrs
