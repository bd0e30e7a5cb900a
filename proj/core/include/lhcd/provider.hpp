#pragma once

#include <map>
#include <memory>

#include "lhcd/dsep.hpp"
#include "lhcd/graph.hpp"
#include "lhcd/rank_test.hpp"

namespace lhcd {

// Source of rank answers for pairs of measured-variable sets. Queries are
// symmetric and cached; implementations must be safe for repeated calls
// with identical arguments (same answer every time).
class RankProvider {
 public:
  virtual ~RankProvider() = default;

  int rank(const NodeSet& xa, const NodeSet& xb);
  long query_count() const { return queries_; }

 protected:
  virtual int compute(const NodeSet& xa, const NodeSet& xb) = 0;

 private:
  std::map<std::pair<NodeSet, NodeSet>, int> memo_;
  long queries_ = 0;
};

// Graphical ground truth: minimal latent d-separator in a reference graph,
// capped at the full block rank.
class OracleRankProvider : public RankProvider {
 public:
  explicit OracleRankProvider(HierGraph truth, DsepOptions opt = {})
      : truth_(std::move(truth)), opt_(opt) {}

  const HierGraph& truth() const { return truth_; }

 protected:
  int compute(const NodeSet& xa, const NodeSet& xb) override;

 private:
  HierGraph truth_;
  DsepOptions opt_;
};

// Sample-backed provider: sequential chi-square rank deficiency tests on a
// covariance estimate. Node ids are mapped to covariance columns through
// the id list given at construction.
class SampleRankProvider : public RankProvider {
 public:
  SampleRankProvider(CovarianceEstimate cov, NodeSet measured_ids,
                     double alpha = 0.05, RankTestOptions opt = {});

 protected:
  int compute(const NodeSet& xa, const NodeSet& xb) override;

 private:
  CovarianceEstimate cov_;
  std::map<NodeId, int> col_;
  double alpha_;
  RankTestOptions opt_;
};

}  // namespace lhcd
