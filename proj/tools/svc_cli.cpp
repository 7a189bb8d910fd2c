// Command-line harness: solve, marginals, experiment, lowerbound, validate.
//
// Exit codes: 0 success, 1 validation failure (bad input or arguments),
// 2 runtime error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "svc/commit_query.hpp"
#include "svc/error.hpp"
#include "svc/experiment.hpp"
#include "svc/instance_io.hpp"
#include "svc/lowerbound.hpp"
#include "svc/marginals.hpp"
#include "svc/mvc.hpp"

namespace {

struct Globals {
  std::uint64_t seed = 1;
  double eps = 0.05;
  double delta = 0.1;
  std::string oracle = "exact";
  std::size_t trials = 100;
  std::string format = "csv";
  std::string out = "-";
};

svc::OracleKind oracle_kind(const std::string& name) {
  if (name == "greedy2") return svc::OracleKind::greedy2;
  if (name == "bruteforce") return svc::OracleKind::bruteforce;
  return svc::OracleKind::exact;
}

svc::ReportFormat report_format(const std::string& name) {
  return name == "jsonl" ? svc::ReportFormat::jsonl : svc::ReportFormat::csv;
}

/// Writes to stdout for "-", else to the named file.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) svc::fail(svc::ErrorKind::ValidationError, "cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string members(const svc::VertexSet& s) {
  std::ostringstream ss;
  bool first = true;
  for (auto v : s.members()) {
    ss << (first ? "" : " ") << v;
    first = false;
  }
  return ss.str();
}

svc::MarginalProfile profile_for(const svc::StochasticModel& model, const svc::CoverOracle& oracle,
                                 const std::string& mode, const Globals& g) {
  if (mode == "estimate") return svc::estimate_marginals(model, oracle, g.eps, g.delta, g.seed);
  return svc::exact_marginals(model, oracle);
}

int cmd_solve(const Globals& g, const std::string& algorithm, const std::string& marginals, const std::string& path) {
  const auto alg = svc::parse_algorithm(algorithm);
  if (!alg) svc::fail(svc::ErrorKind::ValidationError, "unknown algorithm '" + algorithm + "'");
  const auto inst = svc::parse_instance(path);
  const svc::CoverOracle oracle(oracle_kind(g.oracle));
  const auto profile = profile_for(inst.model, oracle, marginals, g);
  const auto r = svc::run_algorithm(*alg, inst.model, profile, g.eps, oracle, g.seed);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  Output out(g.out);
  auto& os = out.stream();
  os << "algorithm: " << svc::to_string(r.algorithm) << '\n';
  if (r.tau) os << "tau: " << *r.tau << '\n';
  os << "committed: " << members(r.committed) << '\n';
  os << "cover: " << members(r.cover) << '\n';
  os << "size: " << r.cover.size() << '\n';
  os << "queried: " << r.queried_edges << '\n';
  return 0;
}

int cmd_marginals(const Globals& g, const std::string& mode, std::size_t samples, const std::string& path) {
  const auto inst = svc::parse_instance(path);
  const svc::CoverOracle oracle(oracle_kind(g.oracle));
  svc::MarginalProfile p;
  Output out(g.out);
  auto& os = out.stream();
  if (mode == "estimate") {
    const auto t = samples > 0 ? samples : svc::estimator_sample_count(inst.model.vertex_count(), g.eps, g.delta);
    os << "t=" << t << " eps=" << g.eps << " delta=" << g.delta << " seed=" << g.seed << '\n';
    p = svc::estimate_marginals_t(inst.model, oracle, t, g.seed, g.eps, g.delta);
  } else {
    os << "exact\n";
    p = svc::exact_marginals(inst.model, oracle);
  }
  const auto& graph = inst.model.graph();
  for (std::size_t v = 0; v < p.vertex.size(); ++v) os << "c_v " << v << ' ' << p.vertex[v] << '\n';
  for (std::size_t e = 0; e < p.edge.size(); ++e) {
    os << "c_e " << graph.edge(e).u << ' ' << graph.edge(e).v << ' ' << p.edge[e] << '\n';
  }
  os << "opt=" << p.opt << '\n';
  return 0;
}

int cmd_experiment(const Globals& g, const std::string& config_path, bool out_given, bool format_given,
                   bool trials_given) {
  auto config = svc::load_config(config_path);
  if (trials_given) config.trials = g.trials;
  if (out_given || config.output.empty()) config.output = g.out;
  if (format_given) config.format = report_format(g.format);
  const auto rows = svc::run_experiment(config, svc::config_instances(config));
  Output out(config.output);
  svc::write_rows(out.stream(), rows, config.format);
  return 0;
}

std::vector<std::size_t> budgets_for(const svc::LowerBoundInstance& inst, const std::vector<double>& fractions) {
  const double edges = static_cast<double>(inst.rs.edges.size() * inst.copies);
  std::vector<std::size_t> out;
  for (double f : fractions) out.push_back(static_cast<std::size_t>(std::floor(f * edges + 1e-9)));
  return out;
}

int cmd_validate(const std::string& path) {
  const auto inst = svc::parse_instance(path);
  const auto& m = inst.model;
  std::cout << "ok: n=" << m.vertex_count() << " m=" << m.edge_count() << " correlated=" << m.correlated_edges().count()
            << " scenarios=" << m.scenarios().size() << (inst.rs ? " rs=yes" : "") << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Query-efficient stochastic vertex cover harness"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--eps", g.eps, "Accuracy parameter eps");
  app.add_option("--delta", g.delta, "Estimator failure probability");
  app.add_option("--oracle", g.oracle, "Cover oracle")->check(CLI::IsMember({"exact", "greedy2", "bruteforce"}));
  auto* trials_opt = app.add_option("--trials", g.trials, "Trials per cell");
  auto* format_opt = app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"csv", "jsonl"}));
  auto* out_opt = app.add_option("--out", g.out, "Output path, '-' for stdout");

  std::string instance, algorithm = "main", marginals = "exact", mode = "exact", config, rs_path;
  std::size_t samples = 0, copies = 1, side = 0, r = 0, t = 0;
  double eps2 = svc::kDefaultEps2;
  std::vector<double> fractions{0.0, 0.01, 0.05, 0.1};

  auto* solve = app.add_subcommand("solve", "Run one algorithm on one instance");
  solve->add_option("--algorithm", algorithm)->check(
      CLI::IsMember({"hallucinate", "threshold", "best_of_two", "main", "analysis"}));
  solve->add_option("--marginals", marginals)->check(CLI::IsMember({"exact", "estimate"}));
  solve->add_option("instance", instance)->required();

  auto* marg = app.add_subcommand("marginals", "Exact or sampled marginal profile");
  marg->add_option("--mode", mode)->check(CLI::IsMember({"exact", "estimate"}));
  marg->add_option("--samples", samples, "Override the sample count t");
  marg->add_option("instance", instance)->required();

  auto* exp = app.add_subcommand("experiment", "Config-driven sweep");
  exp->add_option("--config", config)->required();

  auto* lb = app.add_subcommand("lowerbound", "RS lower-bound instances");
  lb->require_subcommand(1);
  auto* lb_build = lb->add_subcommand("build", "Write the instance built from an RS file");
  auto* lb_validate = lb->add_subcommand("validate", "Check the RS properties of an RS file");
  auto* lb_eval = lb->add_subcommand("evaluate", "Forced-cover accounting per query budget");
  auto* lb_search = lb->add_subcommand("search", "Random search for a small RS graph");
  for (auto* sub : {lb_build, lb_eval}) {
    sub->add_option("--eps2", eps2);
    sub->add_option("--copies", copies);
  }
  lb_eval->add_option("--budgets", fractions, "Query budgets as fractions of the RS edges")->delimiter(',');
  for (auto* sub : {lb_build, lb_validate, lb_eval}) sub->add_option("rs", rs_path)->required();
  lb_search->add_option("--side", side)->required();
  lb_search->add_option("--r", r)->required();
  lb_search->add_option("--t", t)->required();

  auto* validate = app.add_subcommand("validate", "Lint an instance file");
  validate->add_option("instance", instance)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*solve) return cmd_solve(g, algorithm, marginals, instance);
    if (*marg) return cmd_marginals(g, mode, samples, instance);
    if (*exp) return cmd_experiment(g, config, out_opt->count() > 0, format_opt->count() > 0, trials_opt->count() > 0);
    if (*validate) return cmd_validate(instance);
    if (*lb_validate) {
      const auto report = svc::validate_rs_graph(svc::parse_rs(rs_path));
      if (!report) {
        std::cout << "violation: " << report.violation;
        for (auto e : report.witness) std::cout << " edge " << e;
        std::cout << '\n';
        return 1;
      }
      std::cout << "ok\n";
      return 0;
    }
    if (*lb_search) {
      const auto rs = svc::search_rs_graph(side, r, t, g.seed);
      if (!rs) {
        std::cerr << "no RS graph found\n";
        return 2;
      }
      Output out(g.out);
      svc::write_rs(out.stream(), *rs);
      return 0;
    }
    const auto inst = svc::replicate_rs_instance(svc::parse_rs(rs_path), eps2, copies);
    Output out(g.out);
    if (*lb_build) {
      svc::write_instance(out.stream(), svc::to_parsed(inst));
    } else {
      svc::write_rows(out.stream(), svc::lowerbound_rows(inst, rs_path, budgets_for(inst, fractions)),
                      report_format(g.format));
    }
    return 0;
  } catch (const svc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case svc::ErrorKind::ParseError:
      case svc::ErrorKind::ValidationError:
      case svc::ErrorKind::InvalidRSGraph:
      case svc::ErrorKind::DuplicateEdge:
      case svc::ErrorKind::SelfLoop:
      case svc::ErrorKind::ProbabilityOutOfRange:
      case svc::ErrorKind::EndpointOutOfRange:
        return 1;
      default:
        return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
