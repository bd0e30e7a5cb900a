#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lhcd/graph.hpp"
#include "lhcd/sem.hpp"

namespace lhcd {

enum class ClusterScope { MeasuredOnly, All };

struct MetricReport {
  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  std::map<NodeId, NodeId> permutation_used;  // estimated -> true latent ids
  double m1_sd = 0.0, m2_sd = 0.0, m3_sd = 0.0;
  int runs = 1;
};

struct EvalOptions {
  // Exhaustive latent permutation search up to this count; greedy
  // largest-overlap assignment beyond (a capacity error without the
  // fallback enabled).
  int exhaustive_latent_cap = 8;
  bool greedy_fallback = true;
};

// Fraction of true clusters (cover -> children set) exactly reproduced.
double metric_cluster_recovery(const HierGraph& g_true, const HierGraph& g_est,
                               ClusterScope scope);

// Normalized adjacency mismatch after aligning latent labels; pads missing
// latents with isolated ones, picks the best-aligned subset of extras.
double metric_adjacency_difference(const HierGraph& g_true,
                                   const HierGraph& g_est,
                                   const EvalOptions& opt = {},
                                   std::map<NodeId, NodeId>* used = nullptr);

struct ExperimentSpec {
  std::string family = "measurement";
  long n = 10000;
  NoiseKind noise = NoiseKind::Gaussian;
  int runs = 10;
  std::uint64_t seed = 1;
  double alpha = 0.05;
  int threads = 1;
};

// Full synthetic replication: per run, sample weights, simulate, discover
// from the sample covariance, and score against the generating graph.
MetricReport replicate(const ExperimentSpec& spec);

std::string report_to_json(const MetricReport& r);

}  // namespace lhcd
