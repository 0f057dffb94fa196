#include <cmath>
#include <sstream>

#include "doctest.h"
#include "hmrs/dataset.hpp"
#include "hmrs/error.hpp"
#include "hmrs/rng.hpp"
#include "hmrs/synth.hpp"

using hmrs::Dag;
using hmrs::Edge;
using hmrs::ScmParams;

TEST_CASE("rng streams are reproducible and distinct") {
  auto a = hmrs::Rng::stream("noise", 7);
  auto b = hmrs::Rng::stream("noise", 7);
  auto c = hmrs::Rng::stream("params", 7);
  bool differs = false;
  for (int i = 0; i < 16; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
    differs = differs || x != c.next();
  }
  CHECK(differs);
  hmrs::Rng r(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.index(7) < 7);
  }
}

TEST_CASE("sample_dag") {
  CHECK(hmrs::sample_dag(5, 0, 0.5, 3).edge_count() == 0);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CHECK(hmrs::sample_dag(2, 1, 1.0, seed).edge_count() == 1);
  }

  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const Dag g = hmrs::sample_dag(30, 2, 0.5, seed);
    for (hmrs::NodeId j = 0; j < 30; ++j) REQUIRE(g.parents(j).size() <= 2);
  }

  CHECK(hmrs::sample_dag(10, 2, 0.5, 9) == hmrs::sample_dag(10, 2, 0.5, 9));
  CHECK_THROWS_AS(hmrs::sample_dag(3, 1, 1.5, 0), std::invalid_argument);
}

TEST_CASE("sample_scm draws from the stated uniforms") {
  const Dag g = hmrs::sample_dag(30, 2, 0.5, 11);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const ScmParams scm = hmrs::sample_scm(g, seed);
    CHECK(scm.noise_half_width == 0.5);
    for (double t : scm.theta) {
      CHECK(t >= 0.5);
      CHECK(t <= 2.0);
    }
    CHECK(scm.beta.size() == g.edge_count());
    for (const auto& [e, w] : scm.beta) {
      CHECK(g.has_edge(e.src, e.dst));
      CHECK(w >= -0.3);
      CHECK(w <= 0.3);
    }
  }
  CHECK(hmrs::sample_scm(Dag(4), 1).beta.empty());
}

namespace {

ScmParams single_node(double theta, double b) {
  ScmParams scm;
  scm.dag = Dag(1);
  scm.theta = {theta};
  scm.noise_half_width = b;
  return scm;
}

}  // namespace

TEST_CASE("sample_dataset support bounds") {
  const auto tight = hmrs::sample_dataset(single_node(1.0, 1e-12), 100, 1);
  for (Eigen::Index i = 0; i < tight.values.rows(); ++i) {
    CHECK(std::abs(tight.values(i, 0) - std::exp(1.0)) < 1e-6);
  }

  const auto wide = hmrs::sample_dataset(single_node(0.0, 0.5), 2000, 2);
  CHECK(wide.values.minCoeff() >= std::exp(-0.5));
  CHECK(wide.values.maxCoeff() <= std::exp(0.5));

  ScmParams chain;
  chain.dag = Dag(2);
  chain.dag.add_edge(0, 1);
  chain.theta = {1.0, 1.0};
  chain.beta[Edge{0, 1}] = 0.3;
  chain.noise_half_width = 0.5;
  const auto d = hmrs::sample_dataset(chain, 2000, 3);
  for (Eigen::Index i = 0; i < d.values.rows(); ++i) {
    const double x0 = d.values(i, 0);
    CHECK(d.values(i, 1) >= std::exp(1.0 + 0.3 * x0 - 0.5) * (1 - 1e-15));
    CHECK(d.values(i, 1) <= std::exp(1.0 + 0.3 * x0 + 0.5) * (1 + 1e-15));
  }
}

TEST_CASE("sample_dataset is deterministic and strictly positive") {
  const Dag g = hmrs::sample_dag(8, 2, 0.5, 5);
  const ScmParams scm = hmrs::sample_scm(g, 5);
  const auto a = hmrs::sample_dataset(scm, 300, 5);
  const auto b = hmrs::sample_dataset(scm, 300, 5);
  CHECK(a.values == b.values);
  CHECK((a.values.array() > 0).all());
  CHECK(a.values.allFinite());
  CHECK_NOTHROW(a.validate_positive());
  CHECK(a.names == std::vector<std::string>{"X0", "X1", "X2", "X3", "X4", "X5", "X6", "X7"});
}

TEST_CASE("root log-mean concentrates around theta") {
  const double b = 0.5;
  const std::size_t n = 10000;
  const double bound = 4.0 * (b / std::sqrt(3.0)) / std::sqrt(static_cast<double>(n));
  int within = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    const auto d = hmrs::sample_dataset(single_node(1.3, b), n, static_cast<std::uint64_t>(r));
    const double m = d.values.col(0).array().log().mean();
    if (std::abs(m - 1.3) <= bound) ++within;
  }
  CHECK(within >= 0.99 * reps);
}

TEST_CASE("pathological parameters abort generation") {
  ScmParams scm;
  scm.dag = Dag(3);
  scm.dag.add_edge(0, 1);
  scm.dag.add_edge(1, 2);
  scm.theta = {2.0, 2.0, 2.0};
  scm.beta[Edge{0, 1}] = 5.0;
  scm.beta[Edge{1, 2}] = 5.0;
  CHECK_THROWS_AS(hmrs::sample_dataset(scm, 10, 0), hmrs::Error);

  scm.beta[Edge{0, 1}] = -500.0;  // exp underflows to 0
  scm.beta[Edge{1, 2}] = 0.0;
  CHECK_THROWS_AS(hmrs::sample_dataset(scm, 10, 0), hmrs::Error);

  ScmParams bad = single_node(0.0, 0.0);
  CHECK_THROWS_AS(hmrs::sample_dataset(bad, 10, 0), std::invalid_argument);
}

TEST_CASE("dataset csv") {
  const ScmParams scm = hmrs::sample_scm(hmrs::sample_dag(4, 1, 0.5, 1), 1);
  const auto d = hmrs::sample_dataset(scm, 25, 1);
  std::stringstream buf;
  hmrs::write_csv(buf, d);
  const auto back = hmrs::read_csv(buf);
  CHECK(back.values == d.values);
  CHECK(back.names == d.names);

  std::istringstream zero("a,b\n1,2\n3,0\n");
  const auto z = hmrs::read_csv(zero);
  try {
    z.validate_positive();
    FAIL("expected validation error");
  } catch (const hmrs::DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find("column b") != std::string::npos);
  }

  std::istringstream ragged("a,b\n1,2\n3\n");
  CHECK_THROWS_AS(hmrs::read_csv(ragged), hmrs::DataError);
  std::istringstream text("a\nfoo\n");
  CHECK_THROWS_AS(hmrs::read_csv(text), hmrs::DataError);
}
