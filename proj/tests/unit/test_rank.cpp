#include <cmath>
#include <random>

#include "doctest.h"
#include "lhcd/dsep.hpp"
#include "lhcd/fixtures.hpp"
#include "lhcd/provider.hpp"
#include "lhcd/rank_test.hpp"
#include "lhcd/sem.hpp"

using namespace lhcd;

namespace {

std::vector<int> iota_vec(int lo, int hi) {
  std::vector<int> v;
  for (int i = lo; i <= hi; ++i) v.push_back(i);
  return v;
}

}  // namespace

TEST_CASE("chi-square survival basics") {
  CHECK(chi_square_sf(0.0, 3) == doctest::Approx(1.0));
  // Frozen reference values computed with 50-digit series evaluation.
  CHECK(chi_square_sf(3.841, 1) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(std::abs(chi_square_sf(3.84145882069412, 1) - 0.05) < 1e-10);
  CHECK(std::abs(chi_square_sf(7.81472790325118, 3) - 0.05) < 1e-10);
  CHECK(std::abs(chi_square_sf(23.2092511589544, 10) - 0.01) < 1e-10);
  for (double x : {0.5, 1.0, 2.0, 5.0, 9.0})
    CHECK(chi_square_sf(x, 2) == doctest::Approx(std::exp(-x / 2)).epsilon(1e-12));
  CHECK_THROWS_AS(chi_square_sf(1.0, 0), InputError);
  CHECK_THROWS_AS(chi_square_sf(-1.0, 2), InputError);
}

TEST_CASE("canonical correlations of independent groups vanish") {
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(6, 6);
  CovarianceEstimate c{s, 1000};
  auto cc = canonical_correlations(c, iota_vec(0, 2), iota_vec(3, 5));
  for (double v : cc) CHECK(v == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("perfectly correlated copies reach the clamp") {
  int d = 3;
  Eigen::MatrixXd s(2 * d, 2 * d);
  // Block structure [[A, A], [A, A]] from duplicated variables.
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(d, d) * 2.0;
  a(0, 1) = a(1, 0) = 0.5;
  s << a, a, a, a;
  CovarianceEstimate c{s, 1000};
  auto cc = canonical_correlations(c, iota_vec(0, d - 1), iota_vec(d, 2 * d - 1));
  for (double v : cc) CHECK(v > 0.999);
}

TEST_CASE("analytic block of the two-layer fixture has one nonzero correlation") {
  HierGraph g = fixtures::two_layer_shared16();
  WeightedSem sem = sample_weights(g, 11);
  Eigen::MatrixXd cov = analytic_measured_covariance(sem);
  CovarianceEstimate c{cov, 1000000};
  // X1, X2 against X3, X4 (ids 0..3).
  auto cc = canonical_correlations(c, {0, 1}, {2, 3});
  REQUIRE(cc.size() == 2);
  CHECK(cc[0] > 0.05);
  CHECK(cc[1] < 1e-7);
}

TEST_CASE("rank test on the analytic two-layer covariance") {
  HierGraph g = fixtures::two_layer_shared16();
  WeightedSem sem = sample_weights(g, 3);
  Eigen::MatrixXd cov = analytic_measured_covariance(sem);
  CovarianceEstimate c{cov, 1000000};
  auto [rej0, p0] = rank_deficiency_test(c, {0, 1}, {2, 3}, 0, 0.05);
  CHECK(rej0);
  auto [rej1, p1] = rank_deficiency_test(c, {0, 1}, {2, 3}, 1, 0.05);
  CHECK(!rej1);
  CHECK(p1 > 0.05);
  (void)p0;
}

TEST_CASE("collinear pair rejects rank zero outright") {
  Eigen::MatrixXd s(2, 2);
  s << 1.0, 1.0, 1.0, 1.0;
  CovarianceEstimate c{s, 10000};
  auto [rej, p] = rank_deficiency_test(c, {0}, {1}, 0, 0.05);
  CHECK(rej);
  CHECK(p < 1e-12);
}

TEST_CASE("estimated rank matches structure on the analytic covariance") {
  HierGraph g = fixtures::two_layer_shared16();
  WeightedSem sem = sample_weights(g, 5);
  Eigen::MatrixXd cov = analytic_measured_covariance(sem);
  CovarianceEstimate c{cov, 1000000};
  auto d = estimate_rank(c, {0, 1}, iota_vec(2, 15), 0.05);
  CHECK(d.estimated_rank == 1);

  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(6, 6);
  CovarianceEstimate ci{id, 10000};
  CHECK(estimate_rank(ci, iota_vec(0, 2), iota_vec(3, 5), 0.05).estimated_rank == 0);
}

TEST_CASE("Monte Carlo size at true rank zero") {
  // Independent two-variable groups; rejection of r=0 should stay near the
  // nominal level.
  std::mt19937_64 rng(99);
  std::normal_distribution<double> N(0, 1);
  int rejects = 0;
  const int reps = 500;
  const int n = 400;
  for (int rep = 0; rep < reps; ++rep) {
    Eigen::MatrixXd rows(n, 4);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < 4; ++j) rows(i, j) = N(rng);
    CovarianceEstimate c{sample_covariance(rows), n};
    auto [rej, p] = rank_deficiency_test(c, {0, 1}, {2, 3}, 0, 0.05);
    if (rej) ++rejects;
    (void)p;
  }
  double rate = static_cast<double>(rejects) / reps;
  CHECK(rate < 0.06 + 2 * std::sqrt(0.05 * 0.95 / reps));
}

TEST_CASE("whitening invariance under in-group recombination") {
  HierGraph g = fixtures::measurement12();
  WeightedSem sem = sample_weights(g, 17);
  Eigen::MatrixXd cov = analytic_measured_covariance(sem);
  // Recombine the first three variables with an invertible map.
  Eigen::MatrixXd t = Eigen::MatrixXd::Identity(12, 12);
  t(0, 1) = 0.7;
  t(1, 2) = -0.4;
  t(2, 0) = 0.3;
  Eigen::MatrixXd cov2 = t * cov * t.transpose();
  CovarianceEstimate c1{cov, 100000}, c2{cov2, 100000};
  auto cc1 = canonical_correlations(c1, {0, 1, 2}, {3, 4, 5});
  auto cc2 = canonical_correlations(c2, {0, 1, 2}, {3, 4, 5});
  for (size_t i = 0; i < cc1.size(); ++i)
    CHECK(cc1[i] == doctest::Approx(cc2[i]).epsilon(1e-8));
}

TEST_CASE("analytic ranks equal graphical ranks on random fixtures") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    HierGraph g = fixtures::random_il2h(seed);
    WeightedSem sem = sample_weights(g, seed + 100);
    Eigen::MatrixXd cov = analytic_measured_covariance(sem);
    NodeSet meas = g.measured_nodes();
    CovarianceEstimate c{cov, 1000000};
    SampleRankProvider sample(c, meas, 0.05);
    OracleRankProvider oracle(g);
    // Every split of the measured set into a small A and the rest.
    for (size_t i = 0; i < meas.size(); ++i)
      for (size_t j = i + 1; j < meas.size(); ++j) {
        NodeSet a{meas[i], meas[j]};
        NodeSet b = set_difference(meas, a);
        if (b.size() < 2) continue;
        CHECK(sample.rank(a, b) == oracle.rank(a, b));
      }
  }
}

TEST_CASE("input validation") {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4);
  CovarianceEstimate c{id, 1000};
  CHECK_THROWS_AS(canonical_correlations(c, {0, 1}, {1, 2}), InputError);
  CHECK_THROWS_AS(rank_deficiency_test(c, {0, 1}, {2, 3}, 2, 0.05), InputError);
  CovarianceEstimate tiny{id, 5};
  CHECK_THROWS_AS(rank_deficiency_test(tiny, {0, 1}, {2, 3}, 0, 0.05),
                  CapacityError);
}
