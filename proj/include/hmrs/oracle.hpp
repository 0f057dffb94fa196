#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hmrs/graph.hpp"

namespace hmrs::oracle {

struct NoiseAtom {
  double value = 0.0;
  double prob = 0.0;
};
using NoiseSupport = std::vector<NoiseAtom>;

/// Log-linear SCM whose noise terms have finite support, so that the joint
/// law of X is a finite list of atoms and every expectation is a finite sum.
struct DiscreteScm {
  Dag dag{1};
  std::vector<double> theta;
  std::map<Edge, double> beta;
  std::vector<NoiseSupport> noise;  // one support per node
  double noise_half_width = 0.5;    // every support value lies in [-B, B]

  /// Throws std::invalid_argument on shape mismatches, non-positive
  /// probabilities, probabilities not summing to 1 (1e-12) or |value| > B.
  void validate() const;
};

struct JointAtom {
  std::vector<double> x;
  double prob = 0.0;
};

struct ExactJoint {
  std::size_t p = 0;
  std::vector<JointAtom> atoms;
};

inline constexpr std::size_t kDefaultAtomBudget = 1'000'000;

// {-B, 0, +B} with probabilities {1/4, 1/2, 1/4}.
NoiseSupport three_point_noise(double half_width);

/// sum_i p_i exp(v_i), i.e. E[exp(eps)].
double noise_mean_exp(const NoiseSupport& support);

/// One atom per noise-outcome combination. Throws BudgetError when the
/// product of support sizes exceeds `max_atoms`.
ExactJoint enumerate_joint(const DiscreteScm& scm, std::size_t max_atoms = kDefaultAtomBudget);

/// E[X_j | X_S] as a lookup table keyed by the exact X_S value vector.
class ConditionalMean {
 public:
  ConditionalMean(const ExactJoint& joint, NodeId j, std::span<const NodeId> s);

  const std::vector<NodeId>& conditioning_set() const { return set_; }
  std::size_t cells() const { return table_.size(); }
  /// Throws std::out_of_range if the row's X_S vector never occurs.
  double operator()(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;

 private:
  std::vector<NodeId> set_;
  std::map<std::vector<double>, double> table_;
};

/// Exact E[X_j^2] / E[(E[X_j | X_S])^2], conditioning by grouping atoms on
/// bitwise-identical X_S vectors.
double exact_moment_ratio(const ExactJoint& joint, NodeId j, std::span<const NodeId> s);

struct SubsetScore {
  std::vector<NodeId> set;
  double value = 0.0;
};

struct PlateauReport {
  NodeId node = 0;
  std::vector<NodeId> parents;
  std::vector<NodeId> nondescendants;
  std::vector<SubsetScore> scores;                // every S subset of nodes \ {j}
  double plateau_value = 0.0;                     // M(j, Pa(j))
  std::vector<std::vector<NodeId>> plateau_sets;  // Pa(j) <= S <= NonDesc(j)
  bool lower_bound_ok = true;
  bool monotone_ok = true;
  bool plateau_ok = true;
  bool gap_ok = true;
  bool gap_checked = false;  // false when some parent weight is zero
  double min_gap = 0.0;      // smallest M(j,S) - plateau over gap-checked S
  std::vector<std::string> violations;

  bool passed() const { return lower_bound_ok && monotone_ok && plateau_ok && gap_ok; }
};

/// Checks, over every S subset of nodes \ {j}:
///   (a) M(j,S) >= 1 - 1e-12
///   (b) M(j,S2) <= M(j,S1) + 1e-12 whenever S1 <= S2
///   (c) all S with Pa(j) <= S <= NonDesc(j) agree with M(j,Pa(j)) within
///       tol_eq relative
///   (d) every S <= NonDesc(j) missing a parent exceeds the plateau by more
///       than tol_gap (only when all parent weights are nonzero)
/// Requires p <= 6.
PlateauReport verify_plateau(const DiscreteScm& scm, NodeId j, double tol_eq = 1e-10,
                             double tol_gap = 1e-6);

/// n rows drawn from the discrete SCM, computed with the same arithmetic as
/// enumerate_joint so rows match atoms bitwise.
Eigen::MatrixXd sample_discrete(const DiscreteScm& scm, std::size_t n, std::uint64_t seed);

/// "chain3", "collider4" or "diamond4" with three-point noise of half-width B.
DiscreteScm preset(std::string_view name, double half_width = 0.5);
std::vector<std::string> preset_names();

// Text format:
//   p=<int>
//   noise_half_width=<B>              (optional, default 0.5)
//   theta <j> <value>                 (default 1.0)
//   edge <src> <dst> <weight>
//   noise <j> <v>:<prob> <v>:<prob>   (default three-point support)
// '#' starts a comment line. Cycles raise CycleError while parsing.
DiscreteScm read_discrete_scm(std::istream& in);

}  // namespace hmrs::oracle
