#include "hmrs/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hmrs/error.hpp"
#include "hmrs/rng.hpp"

namespace hmrs::oracle {

namespace {

std::string set_string(const std::vector<NodeId>& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

// Shared by enumeration and sampling so both produce bitwise-equal values.
void fill_node(const DiscreteScm& scm, NodeId j, double eps, std::vector<double>& x) {
  double eta = scm.theta[j];
  for (NodeId k : scm.dag.parents(j)) eta += scm.beta.at(Edge{k, j}) * x[k];
  x[j] = std::exp(eta + eps);
}

bool is_subset(unsigned a, unsigned b) { return (a & ~b) == 0u; }

}  // namespace

void DiscreteScm::validate() const {
  const std::size_t p = dag.size();
  if (theta.size() != p || noise.size() != p) {
    throw std::invalid_argument("DiscreteScm: theta/noise sizes must equal p");
  }
  if (beta.size() != dag.edge_count()) {
    throw std::invalid_argument("DiscreteScm: beta keys do not match dag edges");
  }
  for (const auto& [e, w] : beta) {
    if (!dag.has_edge(e.src, e.dst)) throw std::invalid_argument("DiscreteScm: beta on a non-edge");
  }
  for (std::size_t j = 0; j < p; ++j) {
    if (noise[j].empty()) throw std::invalid_argument("DiscreteScm: empty noise support");
    double total = 0.0;
    for (const NoiseAtom& a : noise[j]) {
      if (!(a.prob > 0.0)) throw std::invalid_argument("DiscreteScm: noise probabilities must be positive");
      if (std::abs(a.value) > noise_half_width) {
        throw std::invalid_argument("DiscreteScm: noise value outside [-B, B] at node " +
                                    std::to_string(j));
      }
      total += a.prob;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw std::invalid_argument("DiscreteScm: noise probabilities of node " + std::to_string(j) +
                                  " do not sum to 1");
    }
  }
}

NoiseSupport three_point_noise(double half_width) {
  return {{-half_width, 0.25}, {0.0, 0.5}, {half_width, 0.25}};
}

double noise_mean_exp(const NoiseSupport& support) {
  double s = 0.0;
  for (const NoiseAtom& a : support) s += a.prob * std::exp(a.value);
  return s;
}

ExactJoint enumerate_joint(const DiscreteScm& scm, std::size_t max_atoms) {
  scm.validate();
  const std::size_t p = scm.dag.size();
  std::size_t total = 1;
  for (const auto& sup : scm.noise) {
    if (total > max_atoms / sup.size()) {
      throw BudgetError("enumerate_joint: atom count exceeds budget of " + std::to_string(max_atoms));
    }
    total *= sup.size();
  }
  if (total > max_atoms) {
    throw BudgetError("enumerate_joint: atom count exceeds budget of " + std::to_string(max_atoms));
  }

  const auto order = scm.dag.topological_order();
  ExactJoint joint;
  joint.p = p;
  joint.atoms.reserve(total);
  std::vector<std::size_t> digit(p, 0);
  std::vector<double> x(p);
  for (std::size_t a = 0; a < total; ++a) {
    double prob = 1.0;
    for (NodeId j : order) {
      const NoiseAtom& na = scm.noise[j][digit[j]];
      fill_node(scm, j, na.value, x);
      prob *= na.prob;
    }
    joint.atoms.push_back(JointAtom{x, prob});
    for (std::size_t j = 0; j < p; ++j) {
      if (++digit[j] < scm.noise[j].size()) break;
      digit[j] = 0;
    }
  }
  return joint;
}

ConditionalMean::ConditionalMean(const ExactJoint& joint, NodeId j, std::span<const NodeId> s)
    : set_(s.begin(), s.end()) {
  if (j >= joint.p) throw std::out_of_range("ConditionalMean: node out of range");
  std::map<std::vector<double>, std::pair<double, double>> cells;  // key -> (mass, E[X_j 1{cell}])
  std::vector<double> key(set_.size());
  for (const JointAtom& a : joint.atoms) {
    for (std::size_t t = 0; t < set_.size(); ++t) key[t] = a.x[set_[t]];
    auto& cell = cells[key];
    cell.first += a.prob;
    cell.second += a.prob * a.x[j];
  }
  for (const auto& [k, c] : cells) table_.emplace(k, c.second / c.first);
}

double ConditionalMean::operator()(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  std::vector<double> key(set_.size());
  for (std::size_t t = 0; t < set_.size(); ++t) key[t] = row(static_cast<Eigen::Index>(set_[t]));
  auto it = table_.find(key);
  if (it == table_.end()) throw std::out_of_range("ConditionalMean: X_S value not in support");
  return it->second;
}

double exact_moment_ratio(const ExactJoint& joint, NodeId j, std::span<const NodeId> s) {
  if (j >= joint.p) throw std::out_of_range("exact_moment_ratio: node out of range");
  if (std::find(s.begin(), s.end(), j) != s.end()) {
    throw std::invalid_argument("exact_moment_ratio: S must not contain j");
  }
  double second = 0.0;
  for (const JointAtom& a : joint.atoms) second += a.prob * a.x[j] * a.x[j];

  std::map<std::vector<double>, std::pair<double, double>> cells;
  std::vector<double> key(s.size());
  for (const JointAtom& a : joint.atoms) {
    for (std::size_t t = 0; t < s.size(); ++t) key[t] = a.x[s[t]];
    auto& cell = cells[key];
    cell.first += a.prob;
    cell.second += a.prob * a.x[j];
  }
  // E[(E[X|S])^2] = sum_cells mass * (partial / mass)^2
  double cond_second = 0.0;
  for (const auto& [k, c] : cells) cond_second += c.second * c.second / c.first;
  return second / cond_second;
}

PlateauReport verify_plateau(const DiscreteScm& scm, NodeId j, double tol_eq, double tol_gap) {
  const std::size_t p = scm.dag.size();
  if (p > 6) throw std::invalid_argument("verify_plateau: p must be at most 6");
  if (j >= p) throw std::out_of_range("verify_plateau: node out of range");
  const ExactJoint joint = enumerate_joint(scm);

  PlateauReport rep;
  rep.node = j;
  rep.parents = scm.dag.parents(j);
  rep.nondescendants = scm.dag.nondescendants(j);

  std::vector<NodeId> others;
  for (NodeId v = 0; v < p; ++v) {
    if (v != j) others.push_back(v);
  }
  auto mask_of = [&](const std::vector<NodeId>& nodes) {
    unsigned m = 0;
    for (NodeId v : nodes) {
      const auto pos = std::find(others.begin(), others.end(), v) - others.begin();
      m |= 1u << pos;
    }
    return m;
  };
  const unsigned pa_mask = mask_of(rep.parents);
  const unsigned nd_mask = mask_of(rep.nondescendants);
  const unsigned count = 1u << others.size();

  std::vector<double> value(count);
  for (unsigned m = 0; m < count; ++m) {
    std::vector<NodeId> s;
    for (std::size_t t = 0; t < others.size(); ++t) {
      if (m & (1u << t)) s.push_back(others[t]);
    }
    value[m] = exact_moment_ratio(joint, j, s);
    rep.scores.push_back(SubsetScore{s, value[m]});
  }
  rep.plateau_value = value[pa_mask];

  for (unsigned m = 0; m < count; ++m) {
    const auto& sname = rep.scores[m].set;
    if (value[m] < 1.0 - 1e-12) {
      rep.lower_bound_ok = false;
      rep.violations.push_back("lower bound: M(" + std::to_string(j) + "," + set_string(sname) +
                               ") = " + std::to_string(value[m]) + " < 1");
    }
    for (unsigned sup = 0; sup < count; ++sup) {
      if (sup != m && is_subset(m, sup) && value[sup] > value[m] + 1e-12) {
        rep.monotone_ok = false;
        rep.violations.push_back("monotonicity: M(" + std::to_string(j) + "," +
                                 set_string(rep.scores[sup].set) + ") > M(" + std::to_string(j) +
                                 "," + set_string(sname) + ")");
      }
    }
    if (is_subset(pa_mask, m) && is_subset(m, nd_mask)) {
      rep.plateau_sets.push_back(sname);
      const double rel = std::abs(value[m] - rep.plateau_value) / std::abs(rep.plateau_value);
      if (rel > tol_eq) {
        rep.plateau_ok = false;
        rep.violations.push_back("plateau: M(" + std::to_string(j) + "," + set_string(sname) +
                                 ") differs from plateau by relative " + std::to_string(rel));
      }
    }
  }

  rep.gap_checked = std::all_of(rep.parents.begin(), rep.parents.end(),
                                [&](NodeId k) { return scm.beta.at(Edge{k, j}) != 0.0; });
  rep.min_gap = std::numeric_limits<double>::infinity();
  if (rep.gap_checked) {
    for (unsigned m = 0; m < count; ++m) {
      if (is_subset(pa_mask, m) || !is_subset(m, nd_mask)) continue;
      const double gap = value[m] - rep.plateau_value;
      rep.min_gap = std::min(rep.min_gap, gap);
      if (!(gap > tol_gap)) {
        rep.gap_ok = false;
        rep.violations.push_back("gap: M(" + std::to_string(j) + "," +
                                 set_string(rep.scores[m].set) + ") exceeds plateau by only " +
                                 std::to_string(gap));
      }
    }
  }
  return rep;
}

Eigen::MatrixXd sample_discrete(const DiscreteScm& scm, std::size_t n, std::uint64_t seed) {
  scm.validate();
  const std::size_t p = scm.dag.size();
  Rng rng = Rng::stream("discrete-noise", seed);
  const auto order = scm.dag.topological_order();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  std::vector<double> x(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (NodeId j : order) {
      const NoiseSupport& sup = scm.noise[j];
      double u = rng.uniform01();
      std::size_t pick = sup.size() - 1;
      for (std::size_t t = 0; t + 1 < sup.size(); ++t) {
        if (u < sup[t].prob) {
          pick = t;
          break;
        }
        u -= sup[t].prob;
      }
      fill_node(scm, j, sup[pick].value, x);
    }
    for (std::size_t j = 0; j < p; ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x[j];
  }
  return out;
}

namespace {

DiscreteScm make_scm(std::size_t p, std::vector<double> theta,
                     const std::vector<std::tuple<NodeId, NodeId, double>>& edges, double b) {
  DiscreteScm scm;
  scm.dag = Dag(p);
  scm.theta = std::move(theta);
  for (const auto& [s, d, w] : edges) {
    scm.dag.add_edge(s, d, w);
    scm.beta[Edge{s, d}] = w;
  }
  scm.noise.assign(p, three_point_noise(b));
  scm.noise_half_width = b;
  return scm;
}

}  // namespace

std::vector<std::string> preset_names() { return {"chain3", "collider4", "diamond4"}; }

DiscreteScm preset(std::string_view name, double half_width) {
  if (name == "chain3") {
    return make_scm(3, {1.0, 0.8, 1.2}, {{0, 1, 0.3}, {1, 2, -0.25}}, half_width);
  }
  if (name == "collider4") {
    // 0 -> 2 <- 1, node 3 isolated
    return make_scm(4, {1.0, 0.8, 1.2, 0.6}, {{0, 2, 0.3}, {1, 2, 0.2}}, half_width);
  }
  if (name == "diamond4") {
    DiscreteScm scm = make_scm(4, {1.0, 0.8, 0.6, 1.2},
                               {{0, 1, 0.3}, {0, 2, -0.2}, {1, 3, 0.25}, {2, 3, 0.15}}, half_width);
    // With identical finite supports, X1 and X2 each identify X0 exactly and
    // conditioning on the sibling alone would already reach the plateau.
    // Nodes 1 and 2 get half-widths at which x0 = exp(theta0 - B) with noise
    // +/-delta lands bitwise on x0 = exp(theta0) with zero noise, so a
    // sibling only partially reveals the shared parent.
    const double a = std::exp(scm.theta[0] - half_width);
    const double b = std::exp(scm.theta[0] + 0.0);
    for (NodeId j : {NodeId{1}, NodeId{2}}) {
      const double w = scm.beta.at(Edge{0, j});
      const double eta_a = scm.theta[j] + w * a;
      const double eta_b = scm.theta[j] + w * b;
      scm.noise[j] = three_point_noise(std::abs(eta_b - eta_a));
    }
    return scm;
  }
  throw ConfigError("unknown oracle preset '" + std::string(name) + "'");
}

DiscreteScm read_discrete_scm(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t p = 0;
  double b = 0.5;
  std::map<NodeId, double> theta;
  std::vector<std::tuple<NodeId, NodeId, double>> edges;
  std::map<NodeId, NoiseSupport> noise;
  auto fail = [&](const std::string& what) -> void {
    throw DataError("SCM file line " + std::to_string(line_no) + ": " + what);
  };
  auto node_arg = [&](long long v) {
    if (p == 0) fail("'p=<int>' must come first");
    if (v < 0 || static_cast<std::size_t>(v) >= p) fail("node index out of range");
    return static_cast<NodeId>(v);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto b0 = line.find_first_not_of(" \t\r");
    if (b0 == std::string::npos || line[b0] == '#') continue;
    std::string t = line.substr(b0);
    while (!t.empty() && (t.back() == '\r' || t.back() == ' ' || t.back() == '\t')) t.pop_back();
    if (t.rfind("p=", 0) == 0) {
      std::istringstream ps(t.substr(2));
      long long v = 0;
      if (!(ps >> v) || v <= 0) fail("invalid node count");
      p = static_cast<std::size_t>(v);
      continue;
    }
    if (t.rfind("noise_half_width=", 0) == 0) {
      std::istringstream ps(t.substr(17));
      if (!(ps >> b) || !(b > 0.0)) fail("invalid noise_half_width");
      continue;
    }
    std::istringstream fs(t);
    std::string kind;
    fs >> kind;
    if (kind == "theta") {
      long long j;
      double v;
      if (!(fs >> j >> v)) fail("expected 'theta <j> <value>'");
      theta[node_arg(j)] = v;
    } else if (kind == "edge") {
      long long s, d;
      double w;
      if (!(fs >> s >> d >> w)) fail("expected 'edge <src> <dst> <weight>'");
      edges.emplace_back(node_arg(s), node_arg(d), w);
    } else if (kind == "noise") {
      long long j;
      if (!(fs >> j)) fail("expected 'noise <j> <v>:<prob> ...'");
      NoiseSupport sup;
      std::string tok;
      while (fs >> tok) {
        const auto colon = tok.find(':');
        if (colon == std::string::npos) fail("noise atom must be '<value>:<prob>'");
        try {
          sup.push_back(NoiseAtom{std::stod(tok.substr(0, colon)), std::stod(tok.substr(colon + 1))});
        } catch (const std::exception&) {
          fail("cannot parse noise atom '" + tok + "'");
        }
      }
      if (sup.empty()) fail("empty noise support");
      noise[node_arg(j)] = std::move(sup);
    } else {
      fail("unknown directive '" + kind + "'");
    }
  }
  if (p == 0) throw DataError("SCM file: missing 'p=<int>'");

  DiscreteScm scm;
  scm.dag = Dag(p);
  scm.noise_half_width = b;
  scm.theta.assign(p, 1.0);
  for (const auto& [j, v] : theta) scm.theta[j] = v;
  for (const auto& [s, d, w] : edges) {
    scm.dag.add_edge(s, d, w);
    scm.beta[Edge{s, d}] = w;
  }
  scm.noise.assign(p, three_point_noise(b));
  for (auto& [j, sup] : noise) scm.noise[j] = std::move(sup);
  try {
    scm.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("SCM file: ") + e.what());
  }
  return scm;
}

}  // namespace hmrs::oracle
