#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "hmrs/error.hpp"
#include "hmrs/oracle.hpp"
#include "hmrs/rng.hpp"
#include "hmrs/scoring.hpp"
#include "hmrs/synth.hpp"

namespace orc = hmrs::oracle;
using hmrs::NodeId;

namespace {

orc::DiscreteScm two_point_scm(const hmrs::Dag& dag, double b) {
  orc::DiscreteScm scm;
  scm.dag = dag;
  scm.theta.assign(dag.size(), 0.0);
  for (const auto& e : dag.edges()) scm.beta[e] = 0.3;
  scm.noise.assign(dag.size(), {{-b, 0.5}, {b, 0.5}});
  scm.noise_half_width = b;
  return scm;
}

orc::DiscreteScm random_scm(std::uint64_t seed) {
  hmrs::Rng rng(seed);
  orc::DiscreteScm scm;
  scm.dag = hmrs::sample_dag(4, 3, 0.5, seed);
  scm.noise_half_width = 0.5;
  for (std::size_t j = 0; j < 4; ++j) {
    scm.theta.push_back(rng.uniform(0.5, 2.0));
    orc::NoiseSupport sup;
    const std::size_t k = 2 + rng.index(3);
    double total = 0.0;
    for (std::size_t t = 0; t < k; ++t) {
      sup.push_back({rng.uniform(-0.5, 0.5), 0.1 + rng.uniform01()});
      total += sup.back().prob;
    }
    for (auto& a : sup) a.prob /= total;
    scm.noise.push_back(sup);
  }
  for (const auto& e : scm.dag.edges()) scm.beta[e] = rng.uniform(-0.3, 0.3);
  return scm;
}

const orc::SubsetScore& score_of(const orc::PlateauReport& r, std::vector<NodeId> s) {
  for (const auto& sc : r.scores) {
    if (sc.set == s) return sc;
  }
  throw std::logic_error("subset missing from report");
}

}  // namespace

TEST_CASE("enumerate_joint on a single node") {
  const auto joint = orc::enumerate_joint(two_point_scm(hmrs::Dag(1), 0.5));
  REQUIRE(joint.atoms.size() == 2);
  CHECK(joint.atoms[0].x[0] == doctest::Approx(std::exp(-0.5)));
  CHECK(joint.atoms[1].x[0] == doctest::Approx(std::exp(0.5)));
  CHECK(joint.atoms[0].prob == 0.5);
  CHECK(joint.atoms[1].prob == 0.5);
}

TEST_CASE("enumerate_joint on a two-node chain") {
  hmrs::Dag dag(2);
  dag.add_edge(0, 1);
  const auto joint = orc::enumerate_joint(two_point_scm(dag, 0.5));
  REQUIRE(joint.atoms.size() == 4);
  for (const auto& a : joint.atoms) {
    CHECK(a.prob == 0.25);
    const double eps = std::log(a.x[1]) - 0.3 * a.x[0];
    CHECK(std::abs(std::abs(eps) - 0.5) < 1e-12);
  }
}

TEST_CASE("enumerated probabilities sum to one") {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto scm = random_scm(seed);
    const auto joint = orc::enumerate_joint(scm);
    std::size_t expected = 1;
    for (const auto& s : scm.noise) expected *= s.size();
    CHECK(joint.atoms.size() == expected);
    double total = 0.0;
    for (const auto& a : joint.atoms) total += a.prob;
    REQUIRE(std::abs(total - 1.0) <= 1e-12);
  }
}

TEST_CASE("atom budget") {
  const auto scm = orc::preset("diamond4");
  CHECK_THROWS_AS(orc::enumerate_joint(scm, 10), hmrs::BudgetError);
  CHECK_NOTHROW(orc::enumerate_joint(scm, 81));
}

TEST_CASE("noise_mean_exp") {
  CHECK(orc::noise_mean_exp({{0.0, 1.0}}) == 1.0);
  CHECK(orc::noise_mean_exp({{-0.5, 0.5}, {0.5, 0.5}}) == doctest::Approx(1.1276259652063807));
  // Equal-mass midpoint grids approach the continuous uniform value sinh(B)/B.
  const double target = 1.0421906109874948;
  double prev_err = 1.0;
  for (int k : {2, 8, 32, 128}) {
    orc::NoiseSupport sup;
    for (int t = 0; t < k; ++t) sup.push_back({-0.5 + (t + 0.5) / k, 1.0 / k});
    const double err = std::abs(orc::noise_mean_exp(sup) - target);
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 1e-5);
}

TEST_CASE("empty conditioning set reduces to the second moment ratio") {
  const auto joint = orc::enumerate_joint(orc::preset("chain3"));
  for (NodeId j = 0; j < 3; ++j) {
    double m1 = 0.0, m2 = 0.0;
    for (const auto& a : joint.atoms) {
      m1 += a.prob * a.x[j];
      m2 += a.prob * a.x[j] * a.x[j];
    }
    CHECK(orc::exact_moment_ratio(joint, j, {}) == doctest::Approx(m2 / (m1 * m1)).epsilon(1e-13));
  }
}

TEST_CASE("empty graph puts every subset on one plateau") {
  const auto scm = two_point_scm(hmrs::Dag(4), 0.5);
  for (NodeId j = 0; j < 4; ++j) {
    const auto r = orc::verify_plateau(scm, j);
    CHECK(r.passed());
    CHECK(r.plateau_sets.size() == 8);
    const double empty = score_of(r, {}).value;
    CHECK(r.plateau_value == empty);
    for (const auto& s : r.scores) CHECK(std::abs(s.value - empty) <= 1e-10 * empty);
  }
}

TEST_CASE("chain3 plateau at the middle node") {
  const auto r = orc::verify_plateau(orc::preset("chain3"), 1);
  CHECK(r.passed());
  CHECK(r.gap_checked);
  CHECK(r.plateau_sets == std::vector<std::vector<NodeId>>{{0}});
  CHECK(score_of(r, {}).value > r.plateau_value + 1e-6);
  // A descendant carries extra information and drops below the plateau.
  CHECK(score_of(r, {2}).value < r.plateau_value);
}

TEST_CASE("collider4 plateau at the collider") {
  const auto scm = orc::preset("collider4");
  const auto r = orc::verify_plateau(scm, 2);
  CHECK(r.passed());
  CHECK(r.plateau_sets == std::vector<std::vector<NodeId>>{{0, 1}, {0, 1, 3}});
  CHECK(std::abs(score_of(r, {0, 1, 3}).value - r.plateau_value) <= 1e-10 * r.plateau_value);
  for (std::vector<NodeId> s : {std::vector<NodeId>{}, {0}, {1}}) {
    CHECK(score_of(r, s).value > r.plateau_value + 1e-6);
  }
  const auto joint = orc::enumerate_joint(scm);
  const std::vector<NodeId> s0{0}, s01{0, 1};
  CHECK(orc::exact_moment_ratio(joint, 2, s0) > orc::exact_moment_ratio(joint, 2, s01));
  // A root is already on its plateau with no conditioning.
  const auto root = orc::verify_plateau(scm, 0);
  CHECK(root.passed());
  CHECK(score_of(root, {1, 3}).value == doctest::Approx(score_of(root, {}).value).epsilon(1e-12));
}

TEST_CASE("all presets pass") {
  for (const auto& name : orc::preset_names()) {
    const auto scm = orc::preset(name);
    for (NodeId j = 0; j < scm.dag.size(); ++j) {
      const auto r = orc::verify_plateau(scm, j);
      INFO(name << " node " << j);
      CHECK(r.passed());
      CHECK(r.violations.empty());
    }
  }
}

TEST_CASE("diamond with identical sibling noise collapses the gap") {
  // With the same three-point noise on both middle nodes, a sibling pins down
  // the shared parent exactly, so M(1,{2}) equals the plateau value.
  auto scm = orc::preset("diamond4");
  for (auto& s : scm.noise) s = orc::three_point_noise(0.5);
  const auto r = orc::verify_plateau(scm, 1);
  CHECK(std::abs(score_of(r, {2}).value - r.plateau_value) <= 1e-10 * r.plateau_value);
  CHECK_FALSE(r.gap_ok);
  CHECK(r.lower_bound_ok);
  CHECK(r.monotone_ok);
}

TEST_CASE("lower bound and monotonicity hold on random SCMs") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto scm = random_scm(seed);
    for (NodeId j = 0; j < 4; ++j) {
      const auto r = orc::verify_plateau(scm, j);
      REQUIRE(r.lower_bound_ok);
      REQUIRE(r.monotone_ok);
      REQUIRE(r.plateau_ok);
    }
  }
}

TEST_CASE("zero parent weight skips the gap check") {
  auto scm = orc::preset("chain3");
  scm.beta[{0, 1}] = 0.0;
  const auto r = orc::verify_plateau(scm, 1);
  CHECK_FALSE(r.gap_checked);
  CHECK(r.passed());
}

TEST_CASE("sampled rows are atoms of the enumerated joint") {
  const auto scm = orc::preset("collider4");
  const auto joint = orc::enumerate_joint(scm);
  const std::vector<NodeId> s{0, 1};
  const orc::ConditionalMean cm(joint, 2, s);
  CHECK(cm.cells() == 9);
  const auto x = orc::sample_discrete(scm, 2000, 5);
  Eigen::VectorXd mu(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) mu(i) = cm(x.row(i));
  const double m = hmrs::moment_ratio(x.col(2), mu).value;
  CHECK(m == doctest::Approx(orc::exact_moment_ratio(joint, 2, s)).epsilon(0.02));

  Eigen::RowVectorXd bogus = x.row(0);
  bogus(0) += 1e-9;
  CHECK_THROWS_AS(cm(bogus), std::out_of_range);
}

TEST_CASE("discrete SCM file parsing") {
  std::istringstream ok(
      "# chain\np=3\nnoise_half_width=0.5\ntheta 0 1.0\nedge 0 1 0.3\nedge 1 2 -0.25\n"
      "noise 2 -0.5:0.5 0.5:0.5\n");
  const auto scm = orc::read_discrete_scm(ok);
  CHECK(scm.dag.size() == 3);
  CHECK(scm.dag.edge_count() == 2);
  CHECK(scm.beta.at({1, 2}) == -0.25);
  CHECK(scm.noise[2].size() == 2);
  CHECK(scm.noise[0].size() == 3);

  std::istringstream cyc("p=2\nedge 0 1 0.3\nedge 1 0 0.3\n");
  CHECK_THROWS_AS(orc::read_discrete_scm(cyc), hmrs::CycleError);
  std::istringstream bad_prob("p=1\nnoise 0 -0.5:0.4 0.5:0.4\n");
  CHECK_THROWS_AS(orc::read_discrete_scm(bad_prob), hmrs::DataError);
  std::istringstream wide("p=1\nnoise 0 -0.9:0.5 0.9:0.5\n");
  CHECK_THROWS_AS(orc::read_discrete_scm(wide), hmrs::DataError);
  std::istringstream junk("p=2\nfoo 1\n");
  CHECK_THROWS_AS(orc::read_discrete_scm(junk), hmrs::DataError);
}
