#include "lhcd/provider.hpp"

#include <algorithm>

namespace lhcd {

int RankProvider::rank(const NodeSet& xa, const NodeSet& xb) {
  if (xa.empty() || xb.empty())
    throw InputError("rank query with an empty side");
  if (!set_intersection(xa, xb).empty())
    throw InputError("rank query sides overlap");
  auto key = xa <= xb ? std::make_pair(xa, xb) : std::make_pair(xb, xa);
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  ++queries_;
  int r = compute(key.first, key.second);
  memo_.emplace(std::move(key), r);
  return r;
}

int OracleRankProvider::compute(const NodeSet& xa, const NodeSet& xb) {
  int full = static_cast<int>(std::min(xa.size(), xb.size()));
  auto r = min_dsep(truth_, xa, xb, opt_);
  if (!r) return full;
  return std::min(r->cardinality, full);
}

SampleRankProvider::SampleRankProvider(CovarianceEstimate cov,
                                       NodeSet measured_ids, double alpha,
                                       RankTestOptions opt)
    : cov_(std::move(cov)), alpha_(alpha), opt_(opt) {
  if (static_cast<int>(measured_ids.size()) != cov_.matrix.rows())
    throw InputError("SampleRankProvider: id list does not match matrix size");
  for (size_t i = 0; i < measured_ids.size(); ++i)
    col_[measured_ids[i]] = static_cast<int>(i);
}

int SampleRankProvider::compute(const NodeSet& xa, const NodeSet& xb) {
  auto to_cols = [&](const NodeSet& s) {
    std::vector<int> out;
    out.reserve(s.size());
    for (NodeId v : s) {
      auto it = col_.find(v);
      if (it == col_.end())
        throw InputError("SampleRankProvider: unknown measured id " +
                         std::to_string(v));
      out.push_back(it->second);
    }
    return out;
  };
  return estimate_rank(cov_, to_cols(xa), to_cols(xb), alpha_, opt_)
      .estimated_rank;
}

}  // namespace lhcd
