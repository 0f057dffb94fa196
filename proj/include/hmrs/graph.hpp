#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace hmrs {

using NodeId = std::size_t;

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;

  auto operator<=>(const Edge&) const = default;
};

/// Directed acyclic graph over nodes [0, p).
///
/// Every mutation keeps the graph acyclic: add_edge rejects self-loops,
/// out-of-range endpoints and edges that would close a cycle.
class Dag {
 public:
  explicit Dag(std::size_t p);

  std::size_t size() const { return parents_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::set<Edge>& edges() const { return edges_; }

  /// Throws CycleError naming the cycle if dst already reaches src.
  void add_edge(NodeId src, NodeId dst, std::optional<double> weight = std::nullopt);
  bool has_edge(NodeId src, NodeId dst) const;
  std::optional<double> weight(NodeId src, NodeId dst) const;
  const std::map<Edge, double>& weights() const { return weights_; }

  // Sorted ascending.
  const std::vector<NodeId>& parents(NodeId j) const;
  const std::vector<NodeId>& children(NodeId j) const;
  std::vector<NodeId> descendants(NodeId j) const;
  std::vector<NodeId> nondescendants(NodeId j) const;

  /// Kahn's algorithm; among ready nodes the smallest index goes first.
  std::vector<NodeId> topological_order() const;

  // Structural equality: same p and edge set (weights ignored).
  bool operator==(const Dag& other) const {
    return size() == other.size() && edges_ == other.edges_;
  }

 private:
  void check_node(NodeId j) const;
  // Path from `from` to `to` following edges, empty if unreachable.
  std::vector<NodeId> find_path(NodeId from, NodeId to) const;

  std::set<Edge> edges_;
  std::map<Edge, double> weights_;
  std::vector<std::vector<NodeId>> parents_;
  std::vector<std::vector<NodeId>> children_;
};

struct EvalReport {
  std::size_t shd = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t true_edge_count = 0;
  std::size_t est_edge_count = 0;
  std::size_t true_positive_count = 0;
};

/// Structural Hamming distance. Each node pair whose adjacency differs
/// counts once; a reversed edge also counts once.
std::size_t shd(const Dag& est, const Dag& truth);

/// Directed-edge precision/recall/F1 plus SHD. An empty estimate has
/// precision 0.
EvalReport precision_recall_f1(const Dag& est, const Dag& truth);

}  // namespace hmrs
