#pragma once

// Experiment configuration files (JSON). Kept apart from bench.hpp so the rest of
// the library does not depend on a JSON parser.

#include <bnis/bench.hpp>

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace bnis {

struct ExperimentConfig {
  std::string network_path;
  /// Case file; when absent, cases are generated from case_count/evidence_sizes/case_seed.
  std::optional<std::string> cases_path;
  std::size_t case_count = 15;
  std::vector<std::size_t> evidence_sizes;
  std::uint64_t case_seed = 1;
  ExperimentSpec spec;
  std::string output_path;
};

inline std::optional<Heuristic> parse_heuristic(std::string_view name) {
  if (name == "cptsize") return Heuristic::ByCptSize;
  if (name == "parentcount") return Heuristic::ByParentCount;
  return std::nullopt;
}

/// Parses a JSON experiment description. Relative paths resolve against `base_dir`.
///
///   { "network": "net.bn", "cases": "net.cases",            // or case_count / evidence_sizes / case_seed
///     "strategies": ["lw", "icpt", "evparents", "full"],
///     "n_samples": 10000, "repetitions": 5, "seed": 1,
///     "heuristic": "cptsize", "threads": 1, "timing": false,
///     "lbp": { "max_iterations": 20, "damping": 0.1, "tolerance": 1e-8 },
///     "cell_budget": 1048576, "epsilon": 1e-6, "output": "results.csv" }
inline ExperimentConfig parse_experiment_config(const std::string& text, const std::filesystem::path& base_dir = {}) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ArgumentError("config: top level must be an object");
  static const std::set<std::string> known = {"network", "cases",   "case_count", "evidence_sizes", "case_seed",
                                              "strategies", "n_samples", "repetitions", "seed", "heuristic",
                                              "threads", "timing", "lbp", "cell_budget", "epsilon", "output"};
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw ArgumentError("config: unknown key '" + key + "'");

  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return (path.is_relative() && !base_dir.empty() ? base_dir / path : path).string();
  };

  ExperimentConfig c;
  try {
    if (!j.contains("network")) throw ArgumentError("config: 'network' is required");
    c.network_path = resolve(j.at("network").get<std::string>());
    if (j.contains("cases")) c.cases_path = resolve(j.at("cases").get<std::string>());
    c.case_count = j.value("case_count", c.case_count);
    c.evidence_sizes = j.value("evidence_sizes", c.evidence_sizes);
    c.case_seed = j.value("case_seed", c.case_seed);
    if (!c.cases_path && c.evidence_sizes.empty())
      throw ArgumentError("config: give either 'cases' or 'evidence_sizes'");
    for (const auto& name : j.value("strategies", std::vector<std::string>{})) {
      auto s = parse_strategy(name);
      if (!s) throw ArgumentError("config: unknown strategy '" + name + "'");
      c.spec.strategies.push_back(*s);
    }
    c.spec.n_samples = j.value("n_samples", c.spec.n_samples);
    if (c.spec.n_samples < 1) throw ArgumentError("config: n_samples must be at least 1");
    c.spec.repetitions = j.value("repetitions", c.spec.repetitions);
    c.spec.seed = j.value("seed", c.spec.seed);
    c.spec.threads = j.value("threads", c.spec.threads);
    c.spec.timing = j.value("timing", c.spec.timing);
    if (j.contains("heuristic")) {
      auto h = parse_heuristic(j.at("heuristic").get<std::string>());
      if (!h) throw ArgumentError("config: heuristic must be 'cptsize' or 'parentcount'");
      c.spec.sampler.heuristic = *h;
    }
    if (j.contains("lbp")) {
      const auto& l = j.at("lbp");
      if (l.contains("max_iterations")) c.spec.sampler.lbp.max_iterations = l.at("max_iterations").get<std::size_t>();
      c.spec.sampler.lbp.damping = l.value("damping", c.spec.sampler.lbp.damping);
      c.spec.sampler.lbp.tolerance = l.value("tolerance", c.spec.sampler.lbp.tolerance);
    }
    c.spec.sampler.exact.cell_budget = j.value("cell_budget", c.spec.sampler.exact.cell_budget);
    c.spec.sampler.epsilon = j.value("epsilon", c.spec.sampler.epsilon);
    if (j.contains("output")) c.output_path = resolve(j.at("output").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("config: ") + e.what());
  }
  return c;
}

/// Loads the network, loads or generates the cases, and runs the experiment.
inline std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
  const auto net = parse_network(read_file(config.network_path));
  CaseFile cases;
  if (config.cases_path) {
    cases = parse_cases(read_file(*config.cases_path), net);
  } else {
    for (auto s : config.evidence_sizes)
      if (s >= net.size()) throw ArgumentError("config: evidence size " + std::to_string(s) + " is not below the variable count");
    cases = gen_cases(net, config.case_count, config.evidence_sizes, config.case_seed);
  }
  return run_experiment(net, cases, config.spec);
}

}  // namespace bnis
