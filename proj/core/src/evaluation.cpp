#include "lhcd/evaluation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "lhcd/discovery.hpp"
#include "lhcd/fixtures.hpp"
#include "lhcd/provider.hpp"

namespace lhcd {

namespace {

// Cluster of a cover: its pure children, optionally restricted to
// measured nodes. Latent children are folded to their measured footprint
// so labels never enter the comparison.
std::set<NodeSet> clusters_of(const HierGraph& g, ClusterScope scope) {
  std::set<NodeSet> out;
  for (const auto& c : g.covers()) {
    NodeSet pch = pure_children(g, c.members);
    if (pch.empty()) continue;
    if (scope == ClusterScope::MeasuredOnly) {
      NodeSet meas;
      for (NodeId v : pch)
        if (g.is_measured(v)) set_insert(meas, v);
      if (!meas.empty()) out.insert(meas);
    } else {
      // Children signature: measured ids stay; a latent child appears as
      // its measured pure-descendant footprint.
      std::vector<NodeSet> sig;
      for (NodeId v : pch) {
        if (g.is_measured(v))
          sig.push_back({v});
        else
          sig.push_back(measured_pure_descendants(g, NodeSet{v}));
      }
      std::sort(sig.begin(), sig.end());
      NodeSet flat;
      for (const auto& s : sig) {
        flat.push_back(-1);  // separator keeps multiset structure
        for (NodeId v : s) flat.push_back(v);
      }
      out.insert(flat);
    }
  }
  return out;
}

}  // namespace

double metric_cluster_recovery(const HierGraph& g_true, const HierGraph& g_est,
                               ClusterScope scope) {
  auto truth = clusters_of(g_true, scope);
  auto est = clusters_of(g_est, scope);
  if (truth.empty()) return 1.0;
  int hit = 0;
  for (const auto& c : truth)
    if (est.count(c)) ++hit;
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

namespace {

using Adj = std::vector<std::vector<int>>;

// Symmetric adjacency over measured ids followed by latent slots.
Adj adjacency_matrix(const HierGraph& g, const NodeSet& measured,
                     const NodeSet& latents, int n_lat_slots) {
  int n = static_cast<int>(measured.size()) + n_lat_slots;
  Adj a(n, std::vector<int>(n, 0));
  std::map<NodeId, int> pos;
  for (size_t i = 0; i < measured.size(); ++i)
    pos[measured[i]] = static_cast<int>(i);
  for (size_t i = 0; i < latents.size(); ++i)
    pos[latents[i]] = static_cast<int>(measured.size() + i);
  auto mark = [&](NodeId u, NodeId v) {
    auto iu = pos.find(u);
    auto iv = pos.find(v);
    if (iu == pos.end() || iv == pos.end()) return;
    a[iu->second][iv->second] = 1;
    a[iv->second][iu->second] = 1;
  };
  for (const auto& [u, v] : g.directed_edges()) mark(u, v);
  for (const auto& [u, v] : g.undirected_edges()) mark(u, v);
  return a;
}

int mismatch_count(const Adj& t, const Adj& e, int n_meas,
                   const std::vector<int>& perm) {
  // perm maps estimated latent slot -> true latent slot (both offset by
  // n_meas); entries compared over all ordered pairs touching a latent.
  int n = static_cast<int>(t.size());
  auto map_idx = [&](int i) {
    if (i < n_meas) return i;
    return n_meas + perm[i - n_meas];
  };
  int bad = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i < n_meas && j < n_meas) continue;
      if (t[map_idx(i)][map_idx(j)] != e[i][j]) ++bad;
    }
  return bad;
}

}  // namespace

double metric_adjacency_difference(const HierGraph& g_true,
                                   const HierGraph& g_est,
                                   const EvalOptions& opt,
                                   std::map<NodeId, NodeId>* used) {
  NodeSet meas = g_true.measured_nodes();
  if (meas != g_est.measured_nodes())
    throw InputError("metric_adjacency_difference: measured sets differ");
  NodeSet lat_true = g_true.latent_nodes();
  NodeSet lat_est = g_est.latent_nodes();
  int n_l = static_cast<int>(lat_true.size());
  int n_meas = static_cast<int>(meas.size());

  // Under-estimation pads with isolated latents; over-estimation searches
  // over subsets, greedily beyond the cap.
  int slots = std::max<int>(n_l, static_cast<int>(lat_est.size()));
  Adj t = adjacency_matrix(g_true, meas, lat_true, slots);
  Adj e = adjacency_matrix(g_est, meas, lat_est, slots);

  double denom = static_cast<double>(n_meas + n_l) * (n_meas + n_l) -
                 static_cast<double>(n_meas) * n_meas;

  std::vector<int> best_perm;
  int best = std::numeric_limits<int>::max();
  if (slots <= opt.exhaustive_latent_cap) {
    std::vector<int> perm(slots);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      int bad = mismatch_count(t, e, n_meas, perm);
      if (bad < best) {
        best = bad;
        best_perm = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else if (opt.greedy_fallback) {
    // Largest-overlap greedy assignment on measured neighborhoods.
    std::vector<int> perm(slots, -1);
    std::vector<bool> taken(slots, false);
    for (int i = 0; i < slots; ++i) {
      int best_j = -1, best_score = -1;
      for (int j = 0; j < slots; ++j) {
        if (taken[j]) continue;
        int score = 0;
        for (int m = 0; m < n_meas; ++m)
          if (e[n_meas + i][m] && t[n_meas + j][m]) ++score;
        if (score > best_score) {
          best_score = score;
          best_j = j;
        }
      }
      perm[i] = best_j;
      taken[best_j] = true;
    }
    best = mismatch_count(t, e, n_meas, perm);
    best_perm = perm;
  } else {
    throw CapacityError("latent permutation search beyond cap");
  }

  if (used) {
    used->clear();
    for (size_t i = 0; i < lat_est.size() && i < best_perm.size(); ++i) {
      int j = best_perm[i];
      if (j < static_cast<int>(lat_true.size()))
        (*used)[lat_est[i]] = lat_true[j];
    }
  }
  // Extra slots beyond the true latent count contribute their mismatches
  // through the padded rows, matching the crop-or-pad reading.
  if (slots > n_l) {
    double denom_ext = static_cast<double>(n_meas + slots) * (n_meas + slots) -
                       static_cast<double>(n_meas) * n_meas;
    return static_cast<double>(best) / denom_ext;
  }
  return static_cast<double>(best) / denom;
}

MetricReport replicate(const ExperimentSpec& spec) {
  auto run_one = [&](int run) {
    HierGraph truth = fixtures::family_graph(spec.family, run);
    SemConfig sc;
    sc.noise = spec.noise;
    WeightedSem sem = sample_weights(truth, spec.seed + 1000ull * run, sc);
    DataMatrix data = simulate(sem, spec.n, spec.seed + 1000ull * run + 1);
    CovarianceEstimate cov{sample_covariance(data.rows), spec.n};
    SampleRankProvider provider(cov, data.columns, spec.alpha);
    SearchConfig cfg;
    HierGraph est = discover(data.columns, provider, cfg);
    double m1 = metric_cluster_recovery(truth, est, ClusterScope::MeasuredOnly);
    double m2 = metric_cluster_recovery(truth, est, ClusterScope::All);
    double m3 = metric_adjacency_difference(truth, est);
    return std::array<double, 3>{m1, m2, m3};
  };

  std::vector<std::array<double, 3>> results(spec.runs);
  if (spec.threads > 1) {
    std::vector<std::future<std::array<double, 3>>> futs;
    futs.reserve(spec.runs);
    for (int r = 0; r < spec.runs; ++r)
      futs.push_back(std::async(std::launch::async, run_one, r));
    for (int r = 0; r < spec.runs; ++r) results[r] = futs[r].get();
  } else {
    for (int r = 0; r < spec.runs; ++r) results[r] = run_one(r);
  }

  MetricReport rep;
  rep.runs = spec.runs;
  auto agg = [&](int idx, double& mean, double& sd) {
    double s = 0;
    for (const auto& r : results) s += r[idx];
    mean = s / spec.runs;
    double v = 0;
    for (const auto& r : results) v += (r[idx] - mean) * (r[idx] - mean);
    sd = spec.runs > 1 ? std::sqrt(v / (spec.runs - 1)) : 0.0;
  };
  agg(0, rep.m1, rep.m1_sd);
  agg(1, rep.m2, rep.m2_sd);
  agg(2, rep.m3, rep.m3_sd);
  return rep;
}

std::string report_to_json(const MetricReport& r) {
  nlohmann::ordered_json j;
  j["m1"] = r.m1;
  j["m2"] = r.m2;
  j["m3"] = r.m3;
  j["m1_sd"] = r.m1_sd;
  j["m2_sd"] = r.m2_sd;
  j["m3_sd"] = r.m3_sd;
  j["runs"] = r.runs;
  if (!r.permutation_used.empty()) {
    nlohmann::ordered_json p = nlohmann::ordered_json::object();
    for (const auto& [est, tru] : r.permutation_used)
      p[std::to_string(est)] = tru;
    j["permutation_used"] = p;
  }
  return j.dump(2) + "\n";
}

}  // namespace lhcd
