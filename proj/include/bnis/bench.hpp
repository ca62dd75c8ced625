#pragma once

#include <bnis/exact.hpp>
#include <bnis/io.hpp>
#include <bnis/rng.hpp>
#include <bnis/sampler.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace bnis {

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

/// Hellinger distance (1/sqrt 2) * ||sqrt p - sqrt q||_2, in [0, 1].
inline double hellinger(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw ArgumentError("hellinger: distributions differ in length");
  auto check = [](const std::vector<double>& d) {
    double s = 0.0;
    for (double x : d) {
      if (!(x >= 0.0)) throw ArgumentError("hellinger: negative probability");
      s += x;
    }
    if (std::abs(s - 1.0) > 1e-6) throw ArgumentError("hellinger: distribution is not normalized");
  };
  check(p);
  check(q);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
    acc += d * d;
  }
  return std::clamp(std::sqrt(acc / 2.0), 0.0, 1.0);
}

/// Mean Hellinger distance over the unobserved variables.
inline double avg_hellinger(const PosteriorMarginals& exact, const EstimateSummary& estimated) {
  if (exact.marginals.size() != estimated.marginals.size())
    throw ArgumentError("avg_hellinger: scopes differ");
  if (exact.marginals.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [v, p] : exact.marginals) {
    auto it = estimated.marginals.find(v);
    if (it == estimated.marginals.end()) throw ArgumentError("avg_hellinger: scopes differ");
    sum += hellinger(p, it->second);
  }
  return sum / static_cast<double>(exact.marginals.size());
}

inline double median(std::vector<double> xs) {
  if (xs.empty()) throw ArgumentError("median of an empty sample");
  std::sort(xs.begin(), xs.end());
  const auto n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

/// One-tailed sign test: P(X >= wins) for X ~ Binomial(trials, 1/2).
inline double sign_test_p_value(std::size_t wins, std::size_t trials) {
  double p = 0.0;
  for (std::size_t k = wins; k <= trials; ++k)
    p += std::exp(std::lgamma(trials + 1.0) - std::lgamma(k + 1.0) - std::lgamma(trials - k + 1.0) -
                  static_cast<double>(trials) * std::log(2.0));
  return std::min(p, 1.0);
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Random DAG over nodes X0..X{n-1}: node i draws up to max_parents parents among
/// nodes 0..i-1, between 2 and max_states states, and Dirichlet(1, ..., 1) CPT rows.
inline BayesianNetwork gen_random_network(std::size_t node_count, std::size_t max_parents, std::size_t max_states,
                                          std::uint64_t seed) {
  if (node_count < 1) throw ArgumentError("gen_random_network: node_count must be at least 1");
  if (max_states < 2) throw ArgumentError("gen_random_network: max_states must be at least 2");
  CounterRng rng(seed, 0x6e6574);
  std::vector<Variable> vars;
  std::vector<std::vector<VarId>> parents(node_count);
  for (std::size_t i = 0; i < node_count; ++i) {
    const std::size_t card = 2 + rng.below(max_states - 1);
    Variable v{i, "X" + std::to_string(i), {}};
    for (std::size_t s = 0; s < card; ++s) v.states.push_back("s" + std::to_string(s));
    vars.push_back(std::move(v));
    const std::size_t k = rng.below(std::min(max_parents, i) + 1);
    std::vector<VarId> pool(i);
    for (std::size_t j = 0; j < i; ++j) pool[j] = j;
    for (std::size_t j = 0; j < k; ++j) std::swap(pool[j], pool[j + rng.below(i - j)]);
    parents[i].assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(parents[i].begin(), parents[i].end());
  }
  std::vector<Cpt> cpts;
  for (std::size_t i = 0; i < node_count; ++i) {
    std::vector<std::size_t> cards;
    for (auto p : parents[i]) cards.push_back(vars[p].cardinality());
    const auto card = vars[i].cardinality();
    std::vector<double> table(card * configuration_count(cards));
    for (std::size_t r = 0; r < table.size() / card; ++r) {
      double z = 0.0;
      for (std::size_t s = 0; s < card; ++s) {
        const double e = -std::log1p(-rng.uniform());
        table[r * card + s] = e;
        z += e;
      }
      for (std::size_t s = 0; s < card; ++s) table[r * card + s] /= z;
    }
    cpts.emplace_back(i, card, parents[i], std::move(cards), std::move(table));
  }
  return BayesianNetwork("random" + std::to_string(seed), std::move(vars), std::move(cpts));
}

/// One complete assignment drawn from the prior.
inline Assignment forward_sample(const BayesianNetwork& net, CounterRng& rng) {
  Assignment x(net.size());
  for (auto v : topological_order(net)) {
    const auto& cpt = net.cpt(v);
    const auto row = cpt.row(cpt.config_index_from(x.states));
    const double u = rng.uniform();
    double acc = 0.0;
    StateIndex chosen = row.size() - 1;
    for (StateIndex s = 0; s < row.size(); ++s) {
      acc += row[s];
      if (row[s] > 0.0 && u < acc) {
        chosen = s;
        break;
      }
    }
    while (row[chosen] == 0.0 && chosen > 0) --chosen;
    x[v] = chosen;
  }
  return x;
}

/// case_count cases per evidence size; evidence variables are drawn uniformly without
/// replacement and their states read off one prior sample, so P(E) > 0.
inline CaseFile gen_cases(const BayesianNetwork& net, std::size_t case_count, const std::vector<std::size_t>& sizes,
                          std::uint64_t seed) {
  for (auto s : sizes)
    if (s >= net.size()) throw ArgumentError("gen_cases: evidence size must be below the variable count");
  CaseFile file;
  std::size_t index = 0;
  for (auto size : sizes)
    for (std::size_t c = 0; c < case_count; ++c, ++index) {
      CounterRng rng(seed, index);
      std::vector<VarId> pool(net.size());
      for (VarId v = 0; v < net.size(); ++v) pool[v] = v;
      for (std::size_t j = 0; j < size; ++j) std::swap(pool[j], pool[j + rng.below(net.size() - j)]);
      const auto world = forward_sample(net, rng);
      EvidenceCase ec{std::to_string(index + 1), {}};
      for (std::size_t j = 0; j < size; ++j) ec.evidence[pool[j]] = world[pool[j]];
      file.cases.push_back(std::move(ec));
    }
  return file;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

struct ExperimentSpec {
  std::vector<Strategy> strategies;
  std::size_t n_samples = 10000;
  std::size_t repetitions = 1;
  /// Repetition r uses seed + r.
  std::uint64_t seed = 1;
  SamplerConfig sampler;
  unsigned threads = 1;
  /// Record wall-clock time; off keeps the CSV byte-reproducible.
  bool timing = false;
};

struct ResultRow {
  std::string case_id;
  Strategy strategy = Strategy::Lw;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  std::optional<double> avg_hellinger;  // empty when the row was skipped
  double weight_variance = 0.0;
  double ess = 0.0;
  double wall_ms = 0.0;
  std::string skip_reason;
};

/// Runs every (case, strategy, repetition) and scores it against exact posteriors.
/// Cases with impossible evidence yield skipped rows; an oracle over the exact-inference
/// budget throws BudgetExceeded.
inline std::vector<ResultRow> run_experiment(const BayesianNetwork& net, const CaseFile& cases,
                                             const ExperimentSpec& spec) {
  if (spec.n_samples < 1) throw ArgumentError("run_experiment: n_samples must be at least 1");
  auto strategies = spec.strategies;
  std::sort(strategies.begin(), strategies.end());
  strategies.erase(std::unique(strategies.begin(), strategies.end()), strategies.end());

  std::vector<ResultRow> rows;
  for (const auto& c : cases.cases) {
    std::optional<PosteriorMarginals> exact;
    std::string case_skip;
    try {
      exact = posterior_marginals(net, c.evidence, spec.sampler.exact);
    } catch (const InconsistentEvidence&) {
      case_skip = "inconsistent evidence";
    }
    for (auto strategy : strategies)
      for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
        ResultRow row;
        row.case_id = c.id;
        row.strategy = strategy;
        row.n_samples = spec.n_samples;
        row.seed = spec.seed + rep;
        if (!exact) {
          row.skip_reason = case_skip;
          rows.push_back(std::move(row));
          continue;
        }
        const auto start = std::chrono::steady_clock::now();
        try {
          auto f = build_importance_function(net, c.evidence, strategy, spec.sampler);
          auto batch = sample(net, c.evidence, f, spec.n_samples, row.seed, spec.threads);
          auto est = estimate(batch, net);
          row.avg_hellinger = avg_hellinger(*exact, est);
          row.weight_variance = est.weight_variance;
          row.ess = est.effective_sample_size;
        } catch (const BudgetExceeded&) {
          row.skip_reason = "budget exceeded";
        } catch (const DegenerateBatch&) {
          row.skip_reason = "all weights zero";
        }
        if (spec.timing)
          row.wall_ms =
              std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        rows.push_back(std::move(row));
      }
  }
  return rows;
}

inline constexpr const char* kResultCsvHeader = "case_id,strategy,n_samples,seed,avg_hellinger,weight_variance,ess,wall_ms";

inline std::string results_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << kResultCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.case_id << ',' << to_string(r.strategy) << ',' << r.n_samples << ',' << r.seed << ',';
    if (r.avg_hellinger)
      out << format_double(*r.avg_hellinger) << ',' << format_double(r.weight_variance) << ','
          << format_double(r.ess) << ',';
    else
      out << "skipped,,,";
    out << format_double(r.wall_ms) << '\n';
  }
  return out.str();
}

}  // namespace bnis
