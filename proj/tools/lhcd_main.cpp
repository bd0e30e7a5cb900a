// Command-line front end: discover, simulate, oracle, evaluate, replicate.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lhcd/discovery.hpp"
#include "lhcd/dsep.hpp"
#include "lhcd/evaluation.hpp"
#include "lhcd/fixtures.hpp"
#include "lhcd/graph_ops.hpp"
#include "lhcd/provider.hpp"
#include "lhcd/sem.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw lhcd::InputError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw lhcd::InputError("cannot write file: " + path);
  out << text;
}

// key=value config file; command-line flags win over file entries.
void load_config(const std::string& path, CLI::App& app) {
  std::ifstream in(path);
  if (!in) throw lhcd::InputError("cannot open config: " + path);
  std::string line;
  std::vector<std::string> args;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    args.push_back("--" + line.substr(0, eq));
    args.push_back(line.substr(eq + 1));
  }
  std::reverse(args.begin(), args.end());
  app.parse(args);  // parsed before the real argv so flags take precedence
}

lhcd::NoiseKind parse_noise(const std::string& s) {
  if (s == "gaussian") return lhcd::NoiseKind::Gaussian;
  if (s == "uniform") return lhcd::NoiseKind::Uniform;
  throw lhcd::InputError("noise must be gaussian|uniform");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"latent hierarchical structure discovery from rank constraints"};
  app.require_subcommand(1);

  // discover
  auto* discover_cmd = app.add_subcommand(
      "discover", "estimate a latent hierarchical graph from data");
  std::string in_csv, out_json, out_dot, oracle_json, config_path;
  double alpha = 0.05;
  int max_cover = 4;
  std::uint64_t seed = 1;
  int threads = 1;
  discover_cmd->add_option("--input", in_csv, "input CSV (header + rows)");
  discover_cmd->add_option("--alpha", alpha, "test level");
  discover_cmd->add_option("--out", out_json, "output graph JSON")->required();
  discover_cmd->add_option("--dot", out_dot, "optional DOT export");
  discover_cmd->add_option("--max-cover-size", max_cover,
                           "largest cover size attempted");
  discover_cmd->add_option("--oracle", oracle_json,
                           "graph JSON for ground-truth rank answers");
  discover_cmd->add_option("--config", config_path, "key=value config file");
  discover_cmd->add_option("--seed", seed, "seed (recorded; discovery itself is deterministic)");
  discover_cmd->add_option("--threads", threads, "worker cap");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "sample data from a graph");
  std::string sim_graph, sim_out, sim_weights_out, sim_noise = "gaussian";
  long sim_n = 10000;
  std::uint64_t sim_seed = 1;
  sim_cmd->add_option("--graph", sim_graph, "graph JSON")->required();
  sim_cmd->add_option("--n", sim_n, "sample count");
  sim_cmd->add_option("--noise", sim_noise, "gaussian|uniform");
  sim_cmd->add_option("--seed", sim_seed, "seed");
  sim_cmd->add_option("--out", sim_out, "output CSV")->required();
  sim_cmd->add_option("--weights-out", sim_weights_out,
                      "optional weight/noise JSON");

  // oracle
  auto* oracle_cmd = app.add_subcommand(
      "oracle", "graphical ranks for (A,B) query pairs");
  std::string or_graph, or_queries, or_out;
  oracle_cmd->add_option("--graph", or_graph, "graph JSON")->required();
  oracle_cmd->add_option("--queries", or_queries,
                         "query file: per line A-ids | B-ids")->required();
  oracle_cmd->add_option("--out", or_out, "output path (default stdout)");

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "score an estimate");
  std::string ev_truth, ev_est;
  eval_cmd->add_option("--truth", ev_truth, "true graph JSON")->required();
  eval_cmd->add_option("--est", ev_est, "estimated graph JSON")->required();

  // replicate
  auto* rep_cmd = app.add_subcommand("replicate", "synthetic benchmark row");
  lhcd::ExperimentSpec spec;
  std::string rep_noise = "gaussian";
  rep_cmd->add_option("--family", spec.family, "measurement|tree|il2h");
  rep_cmd->add_option("--n", spec.n, "sample count per run");
  rep_cmd->add_option("--noise", rep_noise, "gaussian|uniform");
  rep_cmd->add_option("--runs", spec.runs, "replication count");
  rep_cmd->add_option("--seed", spec.seed, "base seed");
  rep_cmd->add_option("--alpha", spec.alpha, "test level");
  rep_cmd->add_option("--threads", spec.threads, "worker cap");

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      return app.exit(e) == 0 ? 0 : 2;
    }

    if (discover_cmd->parsed()) {
      if (!config_path.empty()) load_config(config_path, *discover_cmd);
      lhcd::SearchConfig cfg;
      cfg.max_cover_size = max_cover;
      lhcd::HierGraph est;
      if (!oracle_json.empty()) {
        lhcd::HierGraph truth = lhcd::graph_from_json(slurp(oracle_json));
        lhcd::OracleRankProvider provider(truth);
        est = lhcd::discover(truth.measured_nodes(), provider, cfg);
        // Carry over display names for the measured nodes.
        for (lhcd::NodeId v : truth.measured_nodes())
          est.set_name(v, truth.name(v));
      } else {
        if (in_csv.empty())
          throw lhcd::InputError("discover: need --input or --oracle");
        auto [rows, names] = lhcd::csv_to_matrix(slurp(in_csv));
        lhcd::CovarianceEstimate cov{lhcd::sample_covariance(rows),
                                     rows.rows()};
        lhcd::NodeSet ids(names.size());
        for (size_t i = 0; i < names.size(); ++i)
          ids[i] = static_cast<int>(i);
        lhcd::SampleRankProvider provider(cov, ids, alpha);
        est = lhcd::discover(ids, provider, cfg);
        for (size_t i = 0; i < names.size(); ++i)
          est.set_name(static_cast<int>(i), names[i]);
      }
      spit(out_json, lhcd::to_json(est));
      if (!out_dot.empty()) spit(out_dot, lhcd::to_dot(est));
      return 0;
    }

    if (sim_cmd->parsed()) {
      lhcd::HierGraph g = lhcd::graph_from_json(slurp(sim_graph));
      lhcd::SemConfig sc;
      sc.noise = parse_noise(sim_noise);
      lhcd::WeightedSem sem = lhcd::sample_weights(g, sim_seed, sc);
      lhcd::DataMatrix data = lhcd::simulate(sem, sim_n, sim_seed + 1);
      spit(sim_out, lhcd::to_csv(data, g));
      if (!sim_weights_out.empty())
        spit(sim_weights_out, lhcd::weights_to_json(sem));
      return 0;
    }

    if (oracle_cmd->parsed()) {
      lhcd::HierGraph g = lhcd::graph_from_json(slurp(or_graph));
      std::istringstream qs(slurp(or_queries));
      std::ostringstream out;
      std::string line;
      int lineno = 0;
      while (std::getline(qs, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto bar = line.find('|');
        if (bar == std::string::npos)
          throw lhcd::InputError("oracle: line " + std::to_string(lineno) +
                                 " missing '|'");
        auto parse_ids = [&](const std::string& part) {
          lhcd::NodeSet ids;
          std::istringstream ps(part);
          int v;
          while (ps >> v) lhcd::set_insert(ids, v);
          return ids;
        };
        lhcd::NodeSet a = parse_ids(line.substr(0, bar));
        lhcd::NodeSet b = parse_ids(line.substr(bar + 1));
        auto r = lhcd::min_dsep(g, a, b);
        if (!r) {
          out << "rank=" << std::min(a.size(), b.size())
              << " separator=none\n";
          continue;
        }
        out << "rank=" << r->cardinality << " separator={";
        for (size_t i = 0; i < r->witness.size(); ++i)
          out << (i ? "," : "") << g.name(r->witness[i]);
        out << "}";
        if (r->outside_rank_regime) out << " outside-rank-regime";
        out << "\n";
      }
      if (or_out.empty())
        std::cout << out.str();
      else
        spit(or_out, out.str());
      return 0;
    }

    if (eval_cmd->parsed()) {
      lhcd::HierGraph truth = lhcd::graph_from_json(slurp(ev_truth));
      lhcd::HierGraph est = lhcd::graph_from_json(slurp(ev_est));
      lhcd::MetricReport rep;
      rep.m1 = lhcd::metric_cluster_recovery(truth, est,
                                             lhcd::ClusterScope::MeasuredOnly);
      rep.m2 =
          lhcd::metric_cluster_recovery(truth, est, lhcd::ClusterScope::All);
      rep.m3 = lhcd::metric_adjacency_difference(truth, est, {},
                                                 &rep.permutation_used);
      std::cout << lhcd::report_to_json(rep);
      return 0;
    }

    if (rep_cmd->parsed()) {
      spec.noise = parse_noise(rep_noise);
      lhcd::MetricReport rep = lhcd::replicate(spec);
      std::cout << lhcd::report_to_json(rep);
      return 0;
    }
  } catch (const lhcd::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 3;
  } catch (const lhcd::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
