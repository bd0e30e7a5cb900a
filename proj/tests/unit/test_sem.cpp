#include <cmath>

#include "doctest.h"
#include "lhcd/fixtures.hpp"
#include "lhcd/sem.hpp"

using namespace lhcd;

TEST_CASE("weight sampling is deterministic and in range") {
  HierGraph g = fixtures::tree24();
  WeightedSem a = sample_weights(g, 42);
  WeightedSem b = sample_weights(g, 42);
  CHECK(a.weights == b.weights);
  WeightedSem c = sample_weights(g, 43);
  CHECK(a.weights != c.weights);

  int negatives = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    WeightedSem w = sample_weights(g, seed);
    for (const auto& [e, coef] : w.weights) {
      CHECK(std::abs(coef) >= 0.5);
      CHECK(std::abs(coef) <= 5.0);
      if (coef < 0) ++negatives;
      ++total;
    }
    for (NodeId v : g.nodes()) {
      CHECK(w.noise[v].parameter >= 1.0);
      CHECK(w.noise[v].parameter <= 5.0);
    }
  }
  // Sign symmetry of the two-sided magnitude range.
  double frac = static_cast<double>(negatives) / total;
  CHECK(frac > 0.47);
  CHECK(frac < 0.53);
}

TEST_CASE("analytic covariance of an empty edge set is the noise diagonal") {
  HierGraph g;
  for (int i = 0; i < 4; ++i) g.add_node(NodeKind::Measured);
  WeightedSem m;
  m.graph = g;
  m.noise.assign(4, NoiseSpec{NoiseKind::Gaussian, 1.0});
  Eigen::MatrixXd s = analytic_covariance(m);
  CHECK(s.isApprox(Eigen::MatrixXd::Identity(4, 4), 1e-12));
}

TEST_CASE("analytic covariance of a single weighted edge") {
  HierGraph g;
  NodeId x = g.add_node(NodeKind::Measured);
  NodeId l = g.add_node(NodeKind::Latent);
  g.add_edge(l, x);
  WeightedSem m;
  m.graph = g;
  m.weights[{l, x}] = 2.5;
  m.noise.assign(2, NoiseSpec{NoiseKind::Gaussian, 1.0});
  Eigen::MatrixXd s = analytic_covariance(m);
  CHECK(s(x, x) == doctest::Approx(2.5 * 2.5 + 1.0));
  CHECK(s(l, x) == doctest::Approx(2.5));
  CHECK(s(l, l) == doctest::Approx(1.0));
}

TEST_CASE("rank structure of the analytic covariance") {
  HierGraph g = fixtures::two_layer_shared16();
  WeightedSem m = sample_weights(g, 7);
  Eigen::MatrixXd s = analytic_measured_covariance(m);
  Eigen::MatrixXd block(2, 2);
  // X1, X2 against X3, X4 occupy ids 0..3.
  block << s(0, 2), s(0, 3), s(1, 2), s(1, 3);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(block);
  CHECK(svd.singularValues()(0) > 1e-3);
  CHECK(svd.singularValues()(1) < 1e-9);
}

TEST_CASE("simulation matches the analytic covariance") {
  HierGraph g = fixtures::measurement12();
  WeightedSem m = sample_weights(g, 21);
  const long n = 100000;
  DataMatrix d = simulate(m, n, 77);
  CHECK(d.rows.rows() == n);
  CHECK(d.columns == g.measured_nodes());

  // Columns are centered.
  for (int j = 0; j < d.rows.cols(); ++j) {
    double mean = d.rows.col(j).mean();
    double sd = std::sqrt((d.rows.col(j).array() - mean).square().mean());
    CHECK(std::abs(mean) <= 3 * sd / std::sqrt(double(n)) + 1e-9);
  }

  Eigen::MatrixXd emp = sample_covariance(d.rows);
  Eigen::MatrixXd ana = analytic_measured_covariance(m);
  double rel = (emp - ana).norm() / ana.norm();
  CHECK(rel < 0.05);
}

TEST_CASE("simulation under uniform noise converges too") {
  HierGraph g = fixtures::measurement12();
  SemConfig cfg;
  cfg.noise = NoiseKind::Uniform;
  WeightedSem m = sample_weights(g, 5, cfg);
  DataMatrix d = simulate(m, 100000, 13);
  Eigen::MatrixXd emp = sample_covariance(d.rows);
  Eigen::MatrixXd ana = analytic_measured_covariance(m);
  CHECK((emp - ana).norm() / ana.norm() < 0.05);
}

TEST_CASE("zero-weight graph leaves pure noise") {
  HierGraph g;
  for (int i = 0; i < 3; ++i) g.add_node(NodeKind::Measured);
  WeightedSem m;
  m.graph = g;
  m.noise.assign(3, NoiseSpec{NoiseKind::Gaussian, 2.0});
  DataMatrix d = simulate(m, 50000, 3);
  for (int j = 0; j < 3; ++j) {
    double var = (d.rows.col(j).array() - d.rows.col(j).mean()).square().sum() /
                 (d.rows.rows() - 1);
    CHECK(var == doctest::Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("determinism of simulate") {
  HierGraph g = fixtures::measurement12();
  WeightedSem m = sample_weights(g, 1);
  DataMatrix a = simulate(m, 100, 5);
  DataMatrix b = simulate(m, 100, 5);
  CHECK(a.rows.isApprox(b.rows));
  CHECK_THROWS_AS(simulate(m, 0, 5), InputError);
}

TEST_CASE("csv round trip") {
  HierGraph g = fixtures::measurement12();
  WeightedSem m = sample_weights(g, 9);
  DataMatrix d = simulate(m, 50, 2);
  std::string csv = to_csv(d, g);
  auto [rows, names] = csv_to_matrix(csv);
  CHECK(rows.rows() == 50);
  CHECK(names.size() == 12);
  CHECK(rows.isApprox(d.rows, 1e-12));

  CHECK_THROWS_AS(csv_to_matrix("a,b\n1,2\n3\n"), InputError);
  CHECK_THROWS_AS(csv_to_matrix("a,b\n1,zzz\n"), InputError);
}
