#include "hmrs/graph.hpp"

#include <algorithm>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>

#include "hmrs/error.hpp"

namespace hmrs {

Dag::Dag(std::size_t p) : parents_(p), children_(p) {
  if (p == 0) throw std::invalid_argument("Dag: node count must be positive");
}

void Dag::check_node(NodeId j) const {
  if (j >= size()) {
    throw std::out_of_range("Dag: node " + std::to_string(j) + " out of range [0, " +
                            std::to_string(size()) + ")");
  }
}

std::vector<NodeId> Dag::find_path(NodeId from, NodeId to) const {
  std::vector<NodeId> prev(size(), size());
  std::vector<bool> seen(size(), false);
  std::queue<NodeId> frontier;
  frontier.push(from);
  seen[from] = true;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop();
    if (u == to) {
      std::vector<NodeId> path{to};
      for (NodeId v = to; v != from; v = prev[v]) path.push_back(prev[v]);
      std::reverse(path.begin(), path.end());
      return path;
    }
    for (NodeId c : children_[u]) {
      if (!seen[c]) {
        seen[c] = true;
        prev[c] = u;
        frontier.push(c);
      }
    }
  }
  return {};
}

void Dag::add_edge(NodeId src, NodeId dst, std::optional<double> weight) {
  check_node(src);
  check_node(dst);
  if (src == dst) {
    throw CycleError("self-loop " + std::to_string(src) + " -> " + std::to_string(dst));
  }
  const Edge e{src, dst};
  if (edges_.count(e) == 0) {
    if (auto path = find_path(dst, src); !path.empty()) {
      std::ostringstream msg;
      msg << "edge " << src << " -> " << dst << " closes cycle ";
      for (NodeId v : path) msg << v << " -> ";
      msg << dst;
      throw CycleError(msg.str());
    }
    edges_.insert(e);
    auto& pa = parents_[dst];
    pa.insert(std::upper_bound(pa.begin(), pa.end(), src), src);
    auto& ch = children_[src];
    ch.insert(std::upper_bound(ch.begin(), ch.end(), dst), dst);
  }
  if (weight) {
    weights_[e] = *weight;
  }
}

bool Dag::has_edge(NodeId src, NodeId dst) const { return edges_.count(Edge{src, dst}) > 0; }

std::optional<double> Dag::weight(NodeId src, NodeId dst) const {
  auto it = weights_.find(Edge{src, dst});
  if (it == weights_.end()) return std::nullopt;
  return it->second;
}

const std::vector<NodeId>& Dag::parents(NodeId j) const {
  check_node(j);
  return parents_[j];
}

const std::vector<NodeId>& Dag::children(NodeId j) const {
  check_node(j);
  return children_[j];
}

std::vector<NodeId> Dag::descendants(NodeId j) const {
  check_node(j);
  std::vector<bool> seen(size(), false);
  std::vector<NodeId> stack(children_[j].begin(), children_[j].end());
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    if (seen[u]) continue;
    seen[u] = true;
    for (NodeId c : children_[u]) stack.push_back(c);
  }
  std::vector<NodeId> out;
  for (NodeId v = 0; v < size(); ++v) {
    if (seen[v]) out.push_back(v);
  }
  return out;
}

std::vector<NodeId> Dag::nondescendants(NodeId j) const {
  const auto desc = descendants(j);
  std::vector<NodeId> out;
  for (NodeId v = 0; v < size(); ++v) {
    if (v != j && !std::binary_search(desc.begin(), desc.end(), v)) out.push_back(v);
  }
  return out;
}

std::vector<NodeId> Dag::topological_order() const {
  std::vector<std::size_t> indeg(size());
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (NodeId v = 0; v < size(); ++v) {
    indeg[v] = parents_[v].size();
    if (indeg[v] == 0) ready.push(v);
  }
  std::vector<NodeId> order;
  order.reserve(size());
  while (!ready.empty()) {
    const NodeId u = ready.top();
    ready.pop();
    order.push_back(u);
    for (NodeId c : children_[u]) {
      if (--indeg[c] == 0) ready.push(c);
    }
  }
  return order;
}

namespace {

void check_same_size(const Dag& est, const Dag& truth) {
  if (est.size() != truth.size()) {
    throw std::invalid_argument("graph size mismatch: estimate has p=" + std::to_string(est.size()) +
                                ", truth has p=" + std::to_string(truth.size()));
  }
}

}  // namespace

std::size_t shd(const Dag& est, const Dag& truth) {
  check_same_size(est, truth);
  std::size_t distance = 0;
  const std::size_t p = est.size();
  // Per unordered pair the state is one of: none, u->v, v->u.
  for (NodeId u = 0; u < p; ++u) {
    for (NodeId v = u + 1; v < p; ++v) {
      const int a = est.has_edge(u, v) ? 1 : est.has_edge(v, u) ? 2 : 0;
      const int b = truth.has_edge(u, v) ? 1 : truth.has_edge(v, u) ? 2 : 0;
      if (a != b) ++distance;
    }
  }
  return distance;
}

EvalReport precision_recall_f1(const Dag& est, const Dag& truth) {
  check_same_size(est, truth);
  EvalReport r;
  r.shd = shd(est, truth);
  r.est_edge_count = est.edge_count();
  r.true_edge_count = truth.edge_count();
  for (const Edge& e : est.edges()) {
    if (truth.has_edge(e.src, e.dst)) ++r.true_positive_count;
  }
  const double tp = static_cast<double>(r.true_positive_count);
  r.precision = r.est_edge_count > 0 ? tp / static_cast<double>(r.est_edge_count) : 0.0;
  r.recall = r.true_edge_count > 0 ? tp / static_cast<double>(r.true_edge_count) : 0.0;
  const double denom = r.precision + r.recall;
  r.f1 = denom > 0.0 ? 2.0 * r.precision * r.recall / denom : 0.0;
  return r;
}

}  // namespace hmrs
