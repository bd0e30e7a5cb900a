#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lhcd/graph.hpp"

namespace lhcd {

enum class NoiseKind { Gaussian, Uniform };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::Gaussian;
  // Variance for Gaussian, half-width for Uniform.
  double parameter = 1.0;

  double variance() const {
    return kind == NoiseKind::Gaussian ? parameter
                                       : parameter * parameter / 3.0;
  }
};

struct SemConfig {
  double weight_low = 0.5;   // |w| range
  double weight_high = 5.0;
  double gauss_var_low = 1.0;
  double gauss_var_high = 5.0;
  double uniform_half_width = 2.0;
  NoiseKind noise = NoiseKind::Gaussian;
};

// A linear model over a hierarchical graph: one coefficient per directed
// edge and one noise term per node.
struct WeightedSem {
  HierGraph graph;
  std::map<std::pair<NodeId, NodeId>, double> weights;
  std::vector<NoiseSpec> noise;
};

struct DataMatrix {
  NodeSet columns;  // measured node ids, ascending
  Eigen::MatrixXd rows;
};

// Deterministic in seed. Coefficients drawn uniformly from
// [-high,-low] ∪ [low,high]; Gaussian variances from [var_low,var_high];
// uniform noise keeps the configured half-width. Each node consumes an
// independent RNG stream derived from (seed, node id).
WeightedSem sample_weights(const HierGraph& g, std::uint64_t seed,
                           const SemConfig& cfg = {});

// Sigma = (I - W)^-1 D (I - W)^-T over all nodes, in node-id order.
Eigen::MatrixXd analytic_covariance(const WeightedSem& m);

// Covariance restricted to measured nodes, in measured_nodes() order.
Eigen::MatrixXd analytic_measured_covariance(const WeightedSem& m);

// Forward sampling in topological order; returns measured columns only.
DataMatrix simulate(const WeightedSem& m, long n, std::uint64_t seed);

// CSV with a header row of variable names, one sample per row.
std::string to_csv(const DataMatrix& d, const HierGraph& g);
// Parses a CSV and returns the data plus column names.
std::pair<Eigen::MatrixXd, std::vector<std::string>> csv_to_matrix(
    const std::string& text);

// Sample covariance (zero-mean model: mean subtracted, 1/(n-1) scaling).
Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& rows);

std::string weights_to_json(const WeightedSem& m);

}  // namespace lhcd
