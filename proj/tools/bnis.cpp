#include <bnis/bnis.hpp>
#include <bnis/config.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

namespace {

using namespace bnis;

struct Options {
  std::string net_path;
  std::string cases_path;
  std::string case_id;
  std::string mode = "full";
  std::string heuristic = "cptsize";
  std::string strategy = "lw";
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string config_path;
  std::string out_path;
  double delta = 1e-4;
  std::size_t nodes = 20;
  std::size_t max_parents = 3;
  std::size_t max_states = 3;
};

BayesianNetwork load_network(const Options& o) { return parse_network(read_file(o.net_path)); }

std::vector<EvidenceCase> load_cases(const Options& o, const BayesianNetwork& net) {
  auto cases = parse_cases(read_file(o.cases_path), net).cases;
  if (o.case_id.empty()) return cases;
  for (auto& c : cases)
    if (c.id == o.case_id) return {c};
  throw ArgumentError("no case with id " + o.case_id);
}

void emit(const Options& o, const std::string& text) {
  if (o.out_path.empty()) std::cout << text;
  else write_file(o.out_path, text);
}

int run_exact(const Options& o) {
  const auto net = load_network(o);
  std::vector<EvidenceCase> cases = o.cases_path.empty() ? std::vector<EvidenceCase>{{"prior", {}}} : load_cases(o, net);
  std::ostringstream out;
  out << "case_id,p_evidence,variable,state,probability\n";
  for (const auto& c : cases) {
    const auto pm = posterior_marginals(net, c.evidence);
    for (const auto& [v, dist] : pm.marginals)
      for (std::size_t s = 0; s < dist.size(); ++s)
        out << c.id << ',' << format_double(pm.evidence_probability) << ',' << net.variable(v).name << ','
            << net.variable(v).states[s] << ',' << format_double(dist[s]) << '\n';
  }
  emit(o, out.str());
  return 0;
}

int run_factorize(const Options& o) {
  const auto net = load_network(o);
  const auto heuristic = parse_heuristic(o.heuristic);
  if (!heuristic) throw ArgumentError("--heuristic must be cptsize or parentcount");
  const auto mode = o.mode == "full" ? FactorizeMode::Full : FactorizeMode::EvParents;
  std::ostringstream out;
  for (const auto& c : load_cases(o, net)) {
    const auto aug = factorize(net, c.evidence, *heuristic, mode);
    out << "# case " << c.id << ": " << aug.added_arcs.size() << " added arcs, largest sampling table "
        << aug.max_sampling_table_cells() << " cells\n";
    for (const auto& [from, to] : aug.added_arcs)
      out << "# arc " << net.variable(from).name << " -> " << net.variable(to).name << '\n';
    for (auto v : aug.sampling_order())
      out << "# table " << net.variable(v).name << ' ' << aug.sampling_table_cells(v) << '\n';
    out << serialize_network(aug.to_network()) << '\n';
  }
  emit(o, out.str());
  return 0;
}

int run_sample(const Options& o) {
  const auto net = load_network(o);
  const auto strategy = parse_strategy(o.strategy);
  if (!strategy) throw ArgumentError("--strategy must be one of lw, icpt, evparents, full");
  std::ostringstream out;
  out << "case_id,variable,state,probability\n";
  for (const auto& c : load_cases(o, net)) {
    const auto f = build_importance_function(net, c.evidence, *strategy);
    const auto est = estimate(sample(net, c.evidence, f, o.samples, o.seed, o.threads), net);
    for (const auto& [v, dist] : est.marginals)
      for (std::size_t s = 0; s < dist.size(); ++s)
        out << c.id << ',' << net.variable(v).name << ',' << net.variable(v).states[s] << ','
            << format_double(dist[s]) << '\n';
    std::cerr << "case " << c.id << ": P(E) ~ " << format_double(est.evidence_prob_estimate)
              << ", weight variance " << format_double(est.weight_variance) << ", ESS "
              << format_double(est.effective_sample_size) << '\n';
  }
  emit(o, out.str());
  return 0;
}

int run_bench(const Options& o) {
  const auto base = std::filesystem::path(o.config_path).parent_path();
  auto config = parse_experiment_config(read_file(o.config_path), base);
  const auto csv = results_csv(run_experiment(config));
  const auto& path = o.out_path.empty() ? config.output_path : o.out_path;
  if (path.empty()) std::cout << csv;
  else write_file(path, csv);
  return 0;
}

int run_diagnose(const Options& o) {
  const auto net = load_network(o);
  std::ostringstream out;
  out << "case_id,evidence_variable,variable,distance,sensitivity\n";
  for (const auto& c : load_cases(o, net))
    for (const auto& r : evidence_decay(net, c.evidence, o.delta))
      out << c.id << ',' << net.variable(r.evidence_variable).name << ',' << net.variable(r.variable).name << ','
          << (r.reachable ? std::to_string(r.distance) : "inf") << ',' << format_double(r.sensitivity) << '\n';
  emit(o, out.str());
  return 0;
}

int run_gen(const Options& o) {
  emit(o, serialize_network(gen_random_network(o.nodes, o.max_parents, o.max_states, o.seed)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Importance sampling for discrete Bayesian networks"};
  app.require_subcommand(1);
  Options o;

  auto* exact = app.add_subcommand("exact", "Exact posterior marginals by variable elimination");
  exact->add_option("--net", o.net_path, "Network file")->required();
  exact->add_option("--cases", o.cases_path, "Evidence cases (prior marginals when omitted)");
  exact->add_option("--out", o.out_path, "Output file (stdout by default)");

  auto* fact = app.add_subcommand("factorize", "Augmented network for each evidence case");
  fact->add_option("--net", o.net_path, "Network file")->required();
  fact->add_option("--cases", o.cases_path, "Evidence cases")->required();
  fact->add_option("--case", o.case_id, "Only this case id");
  fact->add_option("--mode", o.mode, "full or evparents")->check(CLI::IsMember({"full", "evparents"}));
  fact->add_option("--heuristic", o.heuristic, "cptsize or parentcount")->check(CLI::IsMember({"cptsize", "parentcount"}));
  fact->add_option("--out", o.out_path, "Output file (stdout by default)");

  auto* samp = app.add_subcommand("sample", "Importance-sampled posterior marginals");
  samp->add_option("--net", o.net_path, "Network file")->required();
  samp->add_option("--cases", o.cases_path, "Evidence cases")->required();
  samp->add_option("--case", o.case_id, "Only this case id");
  samp->add_option("--strategy", o.strategy, "lw, icpt, evparents or full")
      ->check(CLI::IsMember({"lw", "icpt", "evparents", "full"}));
  samp->add_option("--samples", o.samples, "Sample count")->check(CLI::PositiveNumber);
  samp->add_option("--seed", o.seed, "Random seed");
  samp->add_option("--threads", o.threads, "Worker threads (results do not depend on it)");
  samp->add_option("--out", o.out_path, "Output file (stdout by default)");

  auto* bench = app.add_subcommand("bench", "Run an experiment described by a JSON config");
  bench->add_option("--config", o.config_path, "Experiment config")->required();
  bench->add_option("--out", o.out_path, "Results CSV (overrides the config's output)");

  auto* diag = app.add_subcommand("diagnose", "Evidence influence by skeleton distance");
  diag->add_option("--net", o.net_path, "Network file")->required();
  diag->add_option("--cases", o.cases_path, "Evidence cases")->required();
  diag->add_option("--case", o.case_id, "Only this case id");
  diag->add_option("--delta", o.delta, "Soft-evidence perturbation")->check(CLI::PositiveNumber);
  diag->add_option("--out", o.out_path, "Output file (stdout by default)");

  auto* gen = app.add_subcommand("gen", "Random network");
  gen->add_option("--nodes", o.nodes, "Node count")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", o.seed, "Random seed")->required();
  gen->add_option("--max-parents", o.max_parents, "Parents per node at most");
  gen->add_option("--max-states", o.max_states, "States per node at most")->check(CLI::Range(2, 64));
  gen->add_option("--out", o.out_path, "Output file (stdout by default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*exact) return run_exact(o);
    if (*fact) return run_factorize(o);
    if (*samp) return run_sample(o);
    if (*bench) return run_bench(o);
    if (*diag) return run_diagnose(o);
    if (*gen) return run_gen(o);
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
