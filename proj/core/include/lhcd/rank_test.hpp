#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lhcd/errors.hpp"

namespace lhcd {

// Covariance over measured variables plus the sample count behind it.
struct CovarianceEstimate {
  Eigen::MatrixXd matrix;
  long n = 0;
};

struct RankDecision {
  int estimated_rank = 0;
  std::vector<double> p_values;  // p-value per tested rank r = 0,1,...
  double alpha = 0.05;
  // Set when a later r was rejected after an earlier acceptance; the first
  // non-rejection still wins.
  bool non_monotone = false;
};

struct RankTestOptions {
  double ridge_scale = 1e-8;   // lambda = scale * trace/dim on diagonal blocks
  double eig_floor = 1e-12;    // eigenvalue clamp for the inverse square root
};

// Upper-tail probability of the chi-square distribution, via the
// regularized incomplete gamma function. Absolute error below 1e-10.
double chi_square_sf(double x, int df);

// Singular values of Saa^{-1/2} Sab Sbb^{-1/2}, descending, clamped to
// [0, 1 - 1e-12]. Length min(|a|, |b|).
std::vector<double> canonical_correlations(const CovarianceEstimate& c,
                                           const std::vector<int>& a,
                                           const std::vector<int>& b,
                                           const RankTestOptions& opt = {});

// Bartlett-style test of H0: rank <= r. Rejecting means rank > r.
std::pair<bool, double> rank_deficiency_test(const CovarianceEstimate& c,
                                             const std::vector<int>& a,
                                             const std::vector<int>& b, int r,
                                             double alpha,
                                             const RankTestOptions& opt = {});

// Sequential r = 0, 1, ...: first non-rejected r wins; all rejected means
// full rank min(|a|, |b|).
RankDecision estimate_rank(const CovarianceEstimate& c,
                           const std::vector<int>& a, const std::vector<int>& b,
                           double alpha, const RankTestOptions& opt = {});

}  // namespace lhcd
