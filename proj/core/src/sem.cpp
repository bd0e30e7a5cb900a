#include "lhcd/sem.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "json.hpp"

namespace lhcd {

namespace {

// Distinct stream per (seed, node): seeds are mixed through splitmix64 so
// neighboring ids do not correlate.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::mt19937_64 node_stream(std::uint64_t seed, std::uint64_t tag) {
  return std::mt19937_64(mix(mix(seed) ^ mix(tag + 1)));
}

}  // namespace

WeightedSem sample_weights(const HierGraph& g, std::uint64_t seed,
                           const SemConfig& cfg) {
  if (!g.is_acyclic()) throw InputError("sample_weights: graph has a cycle");
  WeightedSem m;
  m.graph = g;
  m.noise.resize(g.node_count());
  for (NodeId v : g.nodes()) {
    auto rng = node_stream(seed, static_cast<std::uint64_t>(v));
    std::uniform_real_distribution<double> mag(cfg.weight_low, cfg.weight_high);
    std::uniform_int_distribution<int> sign(0, 1);
    for (NodeId c : g.children(v)) {
      double w = mag(rng) * (sign(rng) ? 1.0 : -1.0);
      m.weights[{v, c}] = w;
    }
    NoiseSpec ns;
    ns.kind = cfg.noise;
    if (cfg.noise == NoiseKind::Gaussian) {
      std::uniform_real_distribution<double> var(cfg.gauss_var_low,
                                                 cfg.gauss_var_high);
      ns.parameter = var(rng);
    } else {
      ns.parameter = cfg.uniform_half_width;
    }
    m.noise[v] = ns;
  }
  return m;
}

Eigen::MatrixXd analytic_covariance(const WeightedSem& m) {
  int n = m.graph.node_count();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [edge, coef] : m.weights) w(edge.second, edge.first) = coef;
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (NodeId v : m.graph.nodes()) d(v, v) = m.noise[v].variance();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - w;
  // (I - W) is unit lower-triangular in topological order, always invertible.
  Eigen::MatrixXd inv = a.partialPivLu().solve(Eigen::MatrixXd::Identity(n, n));
  return inv * d * inv.transpose();
}

Eigen::MatrixXd analytic_measured_covariance(const WeightedSem& m) {
  Eigen::MatrixXd full = analytic_covariance(m);
  NodeSet meas = m.graph.measured_nodes();
  Eigen::MatrixXd out(meas.size(), meas.size());
  for (size_t i = 0; i < meas.size(); ++i)
    for (size_t j = 0; j < meas.size(); ++j) out(i, j) = full(meas[i], meas[j]);
  return out;
}

DataMatrix simulate(const WeightedSem& m, long n, std::uint64_t seed) {
  if (n < 1) throw InputError("simulate: n must be at least 1");
  const HierGraph& g = m.graph;
  NodeSet order = g.topological_order();
  NodeSet meas = g.measured_nodes();

  Eigen::MatrixXd values(n, g.node_count());
  for (NodeId v : order) {
    auto rng = node_stream(seed, 0x5eed0000ull + static_cast<std::uint64_t>(v));
    Eigen::VectorXd eps(n);
    const NoiseSpec& ns = m.noise[v];
    if (ns.kind == NoiseKind::Gaussian) {
      std::normal_distribution<double> dist(0.0, std::sqrt(ns.parameter));
      for (long i = 0; i < n; ++i) eps(i) = dist(rng);
    } else {
      std::uniform_real_distribution<double> dist(-ns.parameter, ns.parameter);
      for (long i = 0; i < n; ++i) eps(i) = dist(rng);
    }
    Eigen::VectorXd col = eps;
    for (NodeId p : g.parents(v))
      col += m.weights.at({p, v}) * values.col(p);
    values.col(v) = col;
  }

  DataMatrix out;
  out.columns = meas;
  out.rows.resize(n, meas.size());
  for (size_t j = 0; j < meas.size(); ++j) out.rows.col(j) = values.col(meas[j]);
  return out;
}

std::string to_csv(const DataMatrix& d, const HierGraph& g) {
  std::ostringstream os;
  os.precision(17);
  for (size_t j = 0; j < d.columns.size(); ++j)
    os << (j ? "," : "") << g.name(d.columns[j]);
  os << "\n";
  for (long i = 0; i < d.rows.rows(); ++i) {
    for (long j = 0; j < d.rows.cols(); ++j)
      os << (j ? "," : "") << d.rows(i, j);
    os << "\n";
  }
  return os.str();
}

std::pair<Eigen::MatrixXd, std::vector<std::string>> csv_to_matrix(
    const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw InputError("csv: empty input");
  std::vector<std::string> header;
  {
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) header.push_back(cell);
  }
  if (header.empty()) throw InputError("csv: empty header");
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> row;
    int col = 0;
    while (std::getline(ls, cell, ',')) {
      ++col;
      try {
        size_t pos = 0;
        double v = std::stod(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        std::ostringstream os;
        os << "csv: non-numeric value '" << cell << "' at row " << lineno
           << ", column " << col;
        throw InputError(os.str());
      }
    }
    if (row.size() != header.size()) {
      std::ostringstream os;
      os << "csv: row " << lineno << " has " << row.size()
         << " fields, expected " << header.size();
      throw InputError(os.str());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("csv: no data rows");
  Eigen::MatrixXd m(rows.size(), header.size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < header.size(); ++j) m(i, j) = rows[i][j];
  return {m, header};
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& rows) {
  if (rows.rows() < 2) throw InputError("sample_covariance: need n >= 2");
  Eigen::RowVectorXd mean = rows.colwise().mean();
  Eigen::MatrixXd centered = rows.rowwise() - mean;
  return centered.transpose() * centered / double(rows.rows() - 1);
}

std::string weights_to_json(const WeightedSem& m) {
  nlohmann::ordered_json j;
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& [edge, w] : m.weights)
    j["edges"].push_back({{"from", edge.first}, {"to", edge.second}, {"weight", w}});
  j["noise"] = nlohmann::ordered_json::array();
  for (NodeId v : m.graph.nodes()) {
    const NoiseSpec& ns = m.noise[v];
    j["noise"].push_back(
        {{"node", v},
         {"kind", ns.kind == NoiseKind::Gaussian ? "gaussian" : "uniform"},
         {"parameter", ns.parameter}});
  }
  return j.dump(2) + "\n";
}

}  // namespace lhcd
