#pragma once

#include <bnis/exact.hpp>
#include <bnis/lbp.hpp>
#include <bnis/rng.hpp>
#include <bnis/transform.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

namespace bnis {

/// How the importance function's tables are built.
///   Lw        - original CPTs, evidence parents clamped (likelihood weighting).
///   Icpt      - importance CPTs from loopy belief propagation on the original structure.
///   EvParents - arcs added among parents of evidence, tables from loopy BP messages.
///   Full      - fully factorizable structure, tables from exact inference.
enum class Strategy { Lw, Icpt, EvParents, Full };

inline constexpr Strategy kAllStrategies[] = {Strategy::Lw, Strategy::Icpt, Strategy::EvParents, Strategy::Full};

inline std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Lw: return "lw";
    case Strategy::Icpt: return "icpt";
    case Strategy::EvParents: return "evparents";
    case Strategy::Full: return "full";
  }
  return "?";
}

inline std::optional<Strategy> parse_strategy(std::string_view name) {
  for (auto s : kAllStrategies)
    if (to_string(s) == name) return s;
  return std::nullopt;
}

struct SamplerConfig {
  LbpConfig lbp;
  Heuristic heuristic = Heuristic::ByCptSize;
  ExactConfig exact;
  /// Floor applied to message-derived tables before renormalizing.
  double epsilon = 1e-6;
  /// Fill EvParents tables by exact inference instead of loopy BP.
  bool exact_evparents = false;
};

struct ImportanceFunction {
  Strategy strategy = Strategy::Lw;
  std::size_t variable_count = 0;
  Ordering sampling_order;
  /// One table per entry of sampling_order; parents are unobserved and precede the child.
  std::vector<Cpt> tables;
  std::vector<Arc> added_arcs;
  /// Rows filled uniformly because their conditioning configuration had no support.
  std::size_t uniform_rows = 0;
  std::optional<MessageState> messages;
};

struct SampleBatch {
  std::vector<VarId> scope;         // sampled variables, in sampling order
  std::vector<StateIndex> states;   // n rows of scope.size() states
  std::vector<double> weights;
  std::uint64_t seed = 0;
  std::size_t n = 0;

  Assignment assignment(std::size_t i, std::size_t variable_count) const {
    Assignment a(variable_count);
    for (std::size_t k = 0; k < scope.size(); ++k) a[scope[k]] = states[i * scope.size() + k];
    return a;
  }
};

struct EstimateSummary {
  std::map<VarId, std::vector<double>> marginals;
  double evidence_prob_estimate = 0.0;
  double weight_variance = 0.0;
  double effective_sample_size = 0.0;
};

namespace detail {

/// Raises every entry to at least `epsilon` and renormalizes each row.
inline void floor_rows(Cpt& table, double epsilon) {
  if (epsilon <= 0.0) return;
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    auto row = table.row(r);
    bool touched = false;
    for (double& x : row)
      if (x < epsilon) {
        x = epsilon;
        touched = true;
      }
    if (!touched) continue;
    double z = 0.0;
    for (double x : row) z += x;
    for (double& x : row) x /= z;
  }
}

/// Original CPT of v with observed parents fixed to their evidence states.
inline Cpt clamped_cpt(const BayesianNetwork& net, const Evidence& evidence, VarId v) {
  auto f = Factor::from_cpt(net.cpt(v)).reduce(evidence);
  std::vector<VarId> parents(f.scope().begin(), f.scope().end() - 1);
  std::vector<std::size_t> cards(f.cardinalities().begin(), f.cardinalities().end() - 1);
  return Cpt(v, net.cardinality(v), std::move(parents), std::move(cards), f.values());
}

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
    else comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace detail

/// Builds the importance function for one strategy.
inline ImportanceFunction build_importance_function(const BayesianNetwork& net, const Evidence& evidence,
                                                    Strategy strategy, const SamplerConfig& config = {}) {
  check_evidence(net, evidence);
  ImportanceFunction f;
  f.strategy = strategy;
  f.variable_count = net.size();

  auto add_table = [&](Cpt table, std::size_t uniform_rows, bool floor) {
    if (floor) detail::floor_rows(table, config.epsilon);
    f.uniform_rows += uniform_rows;
    f.tables.push_back(std::move(table));
  };

  switch (strategy) {
    case Strategy::Lw:
      f.sampling_order = restrict_ordering(topological_order(net), evidence);
      for (auto v : f.sampling_order) add_table(detail::clamped_cpt(net, evidence, v), 0, false);
      break;
    case Strategy::Icpt: {
      f.sampling_order = restrict_ordering(topological_order(net), evidence);
      f.messages = run_lbp(net, evidence, config.lbp);
      for (auto v : f.sampling_order) {
        auto t = icpt(*f.messages, net, evidence, v);
        add_table(std::move(t.cpt), t.uniform_rows.size(), true);
      }
      break;
    }
    case Strategy::EvParents: {
      auto aug = factorize(net, evidence, config.heuristic, FactorizeMode::EvParents);
      f.sampling_order = aug.sampling_order();
      f.added_arcs = aug.added_arcs;
      if (config.exact_evparents) {
        for (auto v : f.sampling_order) {
          auto t = exact_conditional_cpt(net, v, aug.sampling_parents(v), evidence, config.exact);
          add_table(std::move(t.cpt), t.uniform_rows.size(), false);
        }
      } else {
        f.messages = run_lbp(net, evidence, config.lbp);
        for (auto v : f.sampling_order) {
          auto t = conditional_table(*f.messages, net, evidence, v, aug.sampling_parents(v));
          add_table(std::move(t.cpt), t.uniform_rows.size(), true);
        }
      }
      break;
    }
    case Strategy::Full: {
      auto aug = factorize(net, evidence, config.heuristic, FactorizeMode::Full);
      f.sampling_order = aug.sampling_order();
      f.added_arcs = aug.added_arcs;
      for (auto v : f.sampling_order) {
        auto t = exact_conditional_cpt(net, v, aug.sampling_parents(v), evidence, config.exact);
        add_table(std::move(t.cpt), t.uniform_rows.size(), false);
      }
      break;
    }
  }
  return f;
}

/// Forward-samples the unobserved variables; returns the assignment and g(x).
inline std::pair<Assignment, double> draw_sample(const ImportanceFunction& f, CounterRng& rng) {
  Assignment x(f.variable_count);
  double g = 1.0;
  for (std::size_t i = 0; i < f.sampling_order.size(); ++i) {
    const auto& table = f.tables[i];
    const auto row = table.row(table.config_index_from(x.states));
    double total = 0.0;
    for (double p : row) total += p;
    const double u = rng.uniform() * total;
    double acc = 0.0;
    StateIndex chosen = kUnset;
    for (StateIndex s = 0; s < row.size(); ++s) {
      acc += row[s];
      if (row[s] > 0.0 && u < acc) {
        chosen = s;
        break;
      }
    }
    if (chosen == kUnset)  // rounding at the top end; take the last supported state
      for (StateIndex s = row.size(); s-- > 0;)
        if (row[s] > 0.0) {
          chosen = s;
          break;
        }
    if (chosen == kUnset) throw ArgumentError("draw_sample: table row with no positive entry");
    x[f.sampling_order[i]] = chosen;
    g *= row[chosen];
  }
  return {std::move(x), g};
}

/// Importance weight P(x, e) / g(x).
inline double weigh(const BayesianNetwork& net, const Evidence& evidence, const Assignment& x, double g_prob) {
  if (!(g_prob > 0.0)) throw ArgumentError("weigh: g_prob must be positive");
  return joint_probability(net, with_evidence(x, evidence)) / g_prob;
}

/// Draws n weighted samples. Sample i always uses stream (seed, i), so the batch is
/// identical for every thread count.
inline SampleBatch sample(const BayesianNetwork& net, const Evidence& evidence, const ImportanceFunction& f,
                          std::size_t n, std::uint64_t seed, unsigned threads = 1) {
  SampleBatch batch;
  batch.scope = f.sampling_order;
  batch.seed = seed;
  batch.n = n;
  batch.states.resize(n * batch.scope.size());
  batch.weights.resize(n);

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      CounterRng rng(seed, i);
      auto [x, g] = draw_sample(f, rng);
      batch.weights[i] = weigh(net, evidence, x, g);
      for (std::size_t k = 0; k < batch.scope.size(); ++k) batch.states[i * batch.scope.size() + k] = x[batch.scope[k]];
    }
  };

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n / 1024, 1))));
  if (threads == 1) {
    work(0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const auto begin = std::min(n, t * chunk);
      const auto end = std::min(n, begin + chunk);
      pool.emplace_back(work, begin, end);
    }
  }
  return batch;
}

/// Self-normalized marginals, mean weight, unbiased weight variance and ESS.
inline EstimateSummary estimate(const SampleBatch& batch, const BayesianNetwork& net) {
  if (batch.n == 0 || batch.weights.size() != batch.n) throw ArgumentError("estimate: empty or malformed batch");
  detail::CompensatedSum total, squares;
  for (double w : batch.weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ArgumentError("estimate: weights must be finite and nonnegative");
    total.add(w);
    squares.add(w * w);
  }
  const double sum = total.value();
  if (!(sum > 0.0)) throw DegenerateBatch("estimate: every weight is zero");

  EstimateSummary out;
  const auto n = static_cast<double>(batch.n);
  out.evidence_prob_estimate = sum / n;
  detail::CompensatedSum dev;
  for (double w : batch.weights) dev.add((w - out.evidence_prob_estimate) * (w - out.evidence_prob_estimate));
  out.weight_variance = batch.n > 1 ? dev.value() / (n - 1.0) : 0.0;
  out.effective_sample_size = sum * sum / squares.value();

  const std::size_t width = batch.scope.size();
  for (std::size_t k = 0; k < width; ++k) {
    const auto v = batch.scope[k];
    std::vector<detail::CompensatedSum> acc(net.cardinality(v));
    for (std::size_t i = 0; i < batch.n; ++i) acc[batch.states[i * width + k]].add(batch.weights[i]);
    std::vector<double> m(acc.size());
    for (std::size_t s = 0; s < m.size(); ++s) m[s] = acc[s].value() / sum;
    out.marginals.emplace(v, std::move(m));
  }
  return out;
}

/// The distribution g over the sampled variables, enumerated as a factor whose scope is
/// `scope` (default: the sampling order).
inline Factor induced_distribution(const ImportanceFunction& f, const BayesianNetwork& net,
                                   std::vector<VarId> scope = {}, const ExactConfig& config = {}) {
  if (scope.empty()) scope = f.sampling_order;
  const auto cards = net.cardinalities(scope);
  detail::check_budget(configuration_count(cards), config);
  Factor g(f.sampling_order, net.cardinalities(f.sampling_order),
           std::vector<double>(configuration_count(net.cardinalities(f.sampling_order)), 0.0));
  Assignment x(net.size());
  std::vector<StateIndex> states(f.sampling_order.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::size_t rem = i;
    for (std::size_t k = states.size(); k-- > 0;) {
      states[k] = rem % g.cardinalities()[k];
      rem /= g.cardinalities()[k];
    }
    for (std::size_t k = 0; k < states.size(); ++k) x[f.sampling_order[k]] = states[k];
    double p = 1.0;
    for (std::size_t k = 0; k < f.tables.size() && p != 0.0; ++k)
      p *= f.tables[k].at(f.tables[k].config_index_from(x.states), states[k]);
    g.values()[i] = p;
  }
  return g.reordered(scope);
}

}  // namespace bnis
