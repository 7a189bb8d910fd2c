#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "svc/commit_query.hpp"
#include "svc/error.hpp"
#include "svc/exact.hpp"
#include "svc/graph.hpp"
#include "svc/instance_io.hpp"
#include "svc/lowerbound.hpp"
#include "svc/marginals.hpp"
#include "svc/model.hpp"
#include "svc/mvc.hpp"
#include "svc/parallel.hpp"
#include "svc/random.hpp"

namespace svc {

enum class MarginalMode { exact, estimated };
enum class RunMode { sampled, exact };
enum class ReportFormat { csv, jsonl };

/// Base graph with every pair (u < v) present iff unit_uniform(seed, pair index) < density,
/// each with existence probability p.
inline BaseGraph erdos_renyi(std::size_t n, double density, double p, std::uint64_t seed) {
  std::vector<WeightedEdge> edges;
  std::uint64_t pair = 0;
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = u + 1; v < n; ++v, ++pair) {
      if (unit_uniform(seed, pair) < density) edges.push_back({u, v, p, std::nullopt});
    }
  }
  return build_graph(n, edges);
}

struct GeneratorSpec {
  std::string id;
  std::size_t n = 0;
  double density = 0.2;
  double p = 0.5;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  std::vector<Algorithm> algorithms{Algorithm::main};
  double eps = 0.05;
  double delta = 0.1;
  OracleKind oracle = OracleKind::exact;
  TieBreak tie_break = TieBreak::canonical;
  MarginalMode marginals = MarginalMode::exact;
  std::optional<std::size_t> estimate_samples{};  // replaces the formula's t when set
  RunMode mode = RunMode::sampled;
  std::size_t trials = 100;
  std::size_t opt_trials = 1000;  // Monte-Carlo opt for estimated marginals
  std::uint64_t seed = 1;
  unsigned workers = 1;
  bool timing = true;
  std::string output;
  ReportFormat format = ReportFormat::csv;
  std::vector<std::string> instances;
  std::vector<GeneratorSpec> generate;
};

namespace detail {

template <class T>
void read_opt(const nlohmann::json& j, const char* key, T& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("algorithms")) {
      c.algorithms.clear();
      for (const auto& a : j.at("algorithms")) {
        auto alg = parse_algorithm(a.get<std::string>());
        if (!alg) fail(ErrorKind::ValidationError, "unknown algorithm '" + a.get<std::string>() + "'");
        c.algorithms.push_back(*alg);
      }
    }
    detail::read_opt(j, "eps", c.eps);
    detail::read_opt(j, "delta", c.delta);
    if (j.contains("oracle")) {
      const auto name = j.at("oracle").get<std::string>();
      if (name == "exact") c.oracle = OracleKind::exact;
      else if (name == "greedy2") c.oracle = OracleKind::greedy2;
      else if (name == "bruteforce") c.oracle = OracleKind::bruteforce;
      else fail(ErrorKind::ValidationError, "unknown oracle '" + name + "'");
    }
    if (j.contains("tie_break")) {
      c.tie_break = j.at("tie_break").get<std::string>() == "seeded_random" ? TieBreak::seeded_random
                                                                            : TieBreak::canonical;
    }
    if (j.contains("marginals")) {
      c.marginals = j.at("marginals").get<std::string>() == "estimated" ? MarginalMode::estimated : MarginalMode::exact;
    }
    if (j.contains("estimate_samples")) c.estimate_samples = j.at("estimate_samples").get<std::size_t>();
    if (j.contains("mode")) c.mode = j.at("mode").get<std::string>() == "exact" ? RunMode::exact : RunMode::sampled;
    detail::read_opt(j, "trials", c.trials);
    detail::read_opt(j, "opt_trials", c.opt_trials);
    detail::read_opt(j, "seed", c.seed);
    detail::read_opt(j, "workers", c.workers);
    detail::read_opt(j, "timing", c.timing);
    detail::read_opt(j, "output", c.output);
    if (j.contains("format")) c.format = j.at("format").get<std::string>() == "jsonl" ? ReportFormat::jsonl : ReportFormat::csv;
    detail::read_opt(j, "instances", c.instances);
    if (j.contains("generate")) {
      for (const auto& g : j.at("generate")) {
        GeneratorSpec s;
        s.n = g.at("n").get<std::size_t>();
        detail::read_opt(g, "density", s.density);
        detail::read_opt(g, "p", s.p);
        detail::read_opt(g, "seed", s.seed);
        s.id = g.value("id", "er-n" + std::to_string(s.n) + "-seed" + std::to_string(s.seed));
        c.generate.push_back(std::move(s));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ValidationError, std::string("config: ") + e.what());
  }
  if (!(c.eps > 0)) fail(ErrorKind::ValidationError, "config: eps must be positive");
  if (c.trials < 1) fail(ErrorKind::ValidationError, "config: trials must be at least 1");
  if (c.algorithms.empty()) fail(ErrorKind::ValidationError, "config: no algorithms");
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::ParseError, path + ": " + e.what());
  }
  return parse_config(j);
}

struct NamedInstance {
  std::string id;
  StochasticModel model;
};

inline std::vector<NamedInstance> config_instances(const ExperimentConfig& c) {
  std::vector<NamedInstance> out;
  for (const auto& path : c.instances) out.push_back({path, parse_instance(path).model});
  for (const auto& g : c.generate) {
    out.push_back({g.id, StochasticModel::independent(erdos_renyi(g.n, g.density, g.p, g.seed))});
  }
  return out;
}

/// Column order of version 1 of the report schema.
inline const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols{
      "instance", "algorithm", "mode",  "n",        "m",            "p",                  "eps",
      "trials",   "mean_size", "size_se", "opt",    "opt_se",       "ratio",              "ratio_se",
      "mean_queries", "normalized_queries", "wall_time_ms"};
  return cols;
}

struct ReportRow {
  std::string instance;
  std::string algorithm;
  std::string mode;
  std::size_t n = 0;
  std::size_t m = 0;
  double p = 1;
  double eps = 0;
  std::size_t trials = 0;  // 0 in exact mode
  double mean_size = 0;
  double size_se = 0;
  double opt = 0;
  double opt_se = 0;
  double ratio = 1;
  double ratio_se = 0;
  double mean_queries = 0;
  double normalized_queries = 0;
  double wall_time_ms = 0;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["instance"] = instance;
    j["algorithm"] = algorithm;
    j["mode"] = mode;
    j["n"] = n;
    j["m"] = m;
    j["p"] = p;
    j["eps"] = eps;
    j["trials"] = trials;
    j["mean_size"] = mean_size;
    j["size_se"] = size_se;
    j["opt"] = opt;
    j["opt_se"] = opt_se;
    j["ratio"] = ratio;
    j["ratio_se"] = ratio_se;
    j["mean_queries"] = mean_queries;
    j["normalized_queries"] = normalized_queries;
    j["wall_time_ms"] = wall_time_ms;
    return j;
  }
};

namespace detail {

inline void finish_row(ReportRow& r) {
  if (r.opt > 0) {
    r.ratio = r.mean_size / r.opt;
    const double a = r.mean_size > 0 ? r.size_se / r.mean_size : 0.0;
    const double b = r.opt_se / r.opt;
    r.ratio_se = r.ratio * std::sqrt(a * a + b * b);
  } else {
    r.ratio = r.mean_size == 0 ? 1.0 : std::numeric_limits<double>::infinity();
    r.ratio_se = 0;
  }
  r.normalized_queries = r.n > 0 ? r.mean_queries * r.eps * r.p / static_cast<double>(r.n) : 0.0;
}

struct TrialOutcome {
  double size = 0;
  double queries = 0;
};

}  // namespace detail

/// Runs every configured algorithm on one instance. Trial i of instance k
/// uses seed derive_seed(config.seed, 1, k, i), shared by all algorithms.
inline std::vector<ReportRow> run_instance(const ExperimentConfig& config, const NamedInstance& inst,
                                           std::size_t index) {
  const auto& model = inst.model;
  const auto& g = model.graph();
  const CoverOracle oracle(config.oracle, config.tie_break);
  const MemoOracle memo(oracle, g);
  const bool exact_mode = config.mode == RunMode::exact;

  MarginalProfile profile;
  OptValue opt;
  if (config.marginals == MarginalMode::exact || exact_mode) {
    const auto exact = exact_marginals(model, memo);
    opt = {exact.opt, 0.0, 0};
    profile = exact;
  }
  if (config.marginals == MarginalMode::estimated) {
    const auto seed = derive_seed(config.seed, 2, index);
    EstimateOptions options{config.workers};
    profile = config.estimate_samples
                  ? estimate_marginals_t(model, oracle, *config.estimate_samples, seed, config.eps, config.delta, options)
                  : estimate_marginals(model, oracle, config.eps, config.delta, seed, options);
    if (!exact_mode) {
      opt = expected_opt(model, oracle, OptMode::monte_carlo, config.opt_trials, derive_seed(config.seed, 3, index),
                         options);
    }
  }

  std::vector<ReportRow> rows;
  for (auto alg : config.algorithms) {
    ReportRow row;
    row.instance = inst.id;
    row.algorithm = to_string(alg);
    row.mode = exact_mode ? "exact" : "sampled";
    row.n = g.vertex_count();
    row.m = g.edge_count();
    row.p = min_probability(g);
    row.eps = config.eps;
    row.opt = opt.value;
    row.opt_se = opt.std_error;
    const auto start = std::chrono::steady_clock::now();
    if (exact_mode) {
      const auto st = exact_algorithm(alg, model, profile, config.eps, memo);
      if (st.uncovered_leaves > 0) {
        fail(ErrorKind::ValidationError, std::string(to_string(alg)) + " produced a non-cover");
      }
      row.mean_size = static_cast<double>(st.expected_size);
      row.mean_queries = static_cast<double>(st.expected_queries);
    } else {
      row.trials = config.trials;
      auto chunks = parallel_chunks(config.trials, 16, config.workers, [&](std::size_t begin, std::size_t end) {
        std::vector<detail::TrialOutcome> out;
        for (std::size_t i = begin; i < end; ++i) {
          const auto seeds = seeds_for(model, derive_seed(config.seed, 1, index, i));
          const auto r = run_algorithm(alg, model, profile, config.eps, oracle, seeds.served, seeds.internal);
          if (!is_vertex_cover(g, seeds.served.present, r.cover)) {
            fail(ErrorKind::ValidationError, std::string(to_string(alg)) + " trial " + std::to_string(i) +
                                                 " produced a non-cover");
          }
          out.push_back({static_cast<double>(r.cover.size()), static_cast<double>(r.queried_edges)});
        }
        return out;
      });
      double sum = 0, sq = 0, queries = 0;
      for (const auto& chunk : chunks) {
        for (const auto& t : chunk) {
          sum += t.size;
          sq += t.size * t.size;
          queries += t.queries;
        }
      }
      const double n = static_cast<double>(config.trials);
      row.mean_size = sum / n;
      row.mean_queries = queries / n;
      const double var = config.trials > 1 ? std::max(0.0, (sq - n * row.mean_size * row.mean_size) / (n - 1)) : 0.0;
      row.size_se = std::sqrt(var / n);
    }
    if (config.timing) {
      row.wall_time_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    detail::finish_row(row);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::vector<ReportRow> run_experiment(const ExperimentConfig& config, const std::vector<NamedInstance>& instances) {
  std::vector<ReportRow> rows;
  for (std::size_t k = 0; k < instances.size(); ++k) {
    try {
      auto r = run_instance(config, instances[k], k);
      rows.insert(rows.end(), r.begin(), r.end());
    } catch (const Error& e) {
      throw Error(e.kind(), "instance " + instances[k].id + ": " + e.what());
    }
  }
  return rows;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::string csv_value(const nlohmann::ordered_json& v) {
  if (v.is_string()) return csv_field(v.get<std::string>());
  if (v.is_number_float()) return io::format_double(v.get<double>());
  return v.dump();
}

}  // namespace detail

/// CSV with a header row, or one JSON object per line; both in column order.
template <class Row>
void write_rows(std::ostream& out, const std::vector<Row>& rows, ReportFormat format) {
  if (format == ReportFormat::csv) {
    bool header = true;
    for (const auto& row : rows) {
      const auto j = row.to_json();
      if (header) {
        bool first = true;
        for (const auto& [key, _] : j.items()) {
          out << (first ? "" : ",") << key;
          first = false;
        }
        out << '\n';
        header = false;
      }
      bool first = true;
      for (const auto& [_, value] : j.items()) {
        out << (first ? "" : ",") << detail::csv_value(value);
        first = false;
      }
      out << '\n';
    }
  } else {
    for (const auto& row : rows) out << row.to_json().dump() << '\n';
  }
}

/// One row per query budget of the non-adaptive forced-cover accounting.
struct ForcedRow {
  std::string instance;
  std::size_t copies = 1;
  double eps2 = 0;
  std::size_t budget = 0;
  double forced = 0;
  double expected_opt = 0;
  double ratio = 0;
  double target = 0;  // 1.5 / (1 + 2 eps2)

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["instance"] = instance;
    j["copies"] = copies;
    j["eps2"] = eps2;
    j["budget"] = budget;
    j["forced"] = forced;
    j["expected_opt"] = expected_opt;
    j["ratio"] = ratio;
    j["target"] = target;
    return j;
  }
};

inline std::vector<ForcedRow> lowerbound_rows(const LowerBoundInstance& inst, const std::string& id,
                                              const std::vector<std::size_t>& budgets) {
  std::vector<ForcedRow> rows;
  for (auto b : budgets) {
    const auto fc = nonadaptive_forced_cover(inst, matching_query_set(inst, b));
    rows.push_back({id, inst.copies, inst.eps2, b, fc.forced, fc.expected_opt, fc.ratio(), 1.5 / (1 + 2 * inst.eps2)});
  }
  return rows;
}

}  // namespace svc
