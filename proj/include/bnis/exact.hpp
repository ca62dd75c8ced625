#pragma once

#include <bnis/factor.hpp>
#include <bnis/graph.hpp>

#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace bnis {

struct ExactConfig {
  /// Largest factor (in cells) any exact computation may materialize.
  std::size_t cell_budget = std::size_t{1} << 20;
};

struct PosteriorMarginals {
  std::map<VarId, std::vector<double>> marginals;
  double evidence_probability = 1.0;
};

/// Exact P(child | given, evidence) as a CPT; rows whose conditioning
/// configuration has zero probability are filled uniformly and listed.
struct ExactConditional {
  Cpt cpt;
  std::vector<std::size_t> uniform_rows;
};

namespace detail {

inline void check_budget(std::size_t cells, const ExactConfig& config) {
  if (cells > config.cell_budget)
    throw BudgetExceeded("exact inference: factor of " + std::to_string(cells) + " cells exceeds budget of " +
                         std::to_string(config.cell_budget));
}

inline Factor multiply_all(const std::vector<Factor>& factors, const ExactConfig& config) {
  Factor out;
  for (const auto& f : factors) {
    check_budget(product_size(out, f), config);
    out = multiply(out, f);
  }
  return out;
}

/// Fill-in edges created by eliminating `v` from the interaction graph of `factors`.
inline std::size_t fill_count(const std::vector<Factor>& factors, VarId v) {
  std::set<VarId> neighbours;
  for (const auto& f : factors)
    if (f.contains(v))
      for (auto u : f.scope())
        if (u != v) neighbours.insert(u);
  std::vector<VarId> nb(neighbours.begin(), neighbours.end());
  std::size_t fill = 0;
  for (std::size_t i = 0; i < nb.size(); ++i)
    for (std::size_t j = i + 1; j < nb.size(); ++j) {
      bool linked = false;
      for (const auto& f : factors)
        if (f.contains(nb[i]) && f.contains(nb[j])) {
          linked = true;
          break;
        }
      if (!linked) ++fill;
    }
  return fill;
}

inline Factor eliminate_one(std::vector<Factor>& factors, VarId v, const ExactConfig& config) {
  std::vector<Factor> touching;
  std::vector<Factor> rest;
  for (auto& f : factors) (f.contains(v) ? touching : rest).push_back(std::move(f));
  if (touching.empty()) throw ArgumentError("eliminate: variable " + std::to_string(v) + " appears in no factor");
  auto product = multiply_all(touching, config);
  auto summed = product.sum_out(v);
  rest.push_back(summed);
  factors = std::move(rest);
  return summed;
}

}  // namespace detail

/// Multiplies the factors mentioning `var`, sums it out and replaces them with the result.
inline std::vector<Factor> eliminate(std::vector<Factor> factors, VarId var, const ExactConfig& config = {}) {
  detail::eliminate_one(factors, var, config);
  return factors;
}

/// Greedy min-fill order for eliminating `vars` from `factors` (ties by ascending id).
inline std::vector<VarId> min_fill_order(std::vector<Factor> factors, std::vector<VarId> vars) {
  std::vector<VarId> order;
  std::sort(vars.begin(), vars.end());
  while (!vars.empty()) {
    std::size_t best = 0;
    std::size_t best_fill = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < vars.size(); ++i) {
      auto fill = detail::fill_count(factors, vars[i]);
      if (fill < best_fill) {
        best_fill = fill;
        best = i;
      }
    }
    const VarId v = vars[best];
    vars.erase(vars.begin() + static_cast<std::ptrdiff_t>(best));
    order.push_back(v);
    // Track the interaction graph only; values are irrelevant here.
    std::set<VarId> merged;
    std::vector<Factor> rest;
    for (auto& f : factors) {
      if (f.contains(v)) merged.insert(f.scope().begin(), f.scope().end());
      else rest.push_back(std::move(f));
    }
    merged.erase(v);
    std::vector<VarId> scope(merged.begin(), merged.end());
    rest.emplace_back(scope, std::vector<std::size_t>(scope.size(), 1), std::vector<double>{1.0});
    factors = std::move(rest);
  }
  return order;
}

/// Unnormalized P(query, evidence) as a factor whose scope is `query` in the given order.
///
/// Only ancestors of the query and the evidence take part; everything else is barren.
/// `elimination_order`, when non-empty, overrides min-fill (it must list exactly the
/// variables that need eliminating, in any order).
inline Factor joint_with_evidence(const BayesianNetwork& net, const Evidence& evidence,
                                  const std::vector<VarId>& query, const ExactConfig& config = {},
                                  const std::vector<VarId>& elimination_order = {}) {
  check_evidence(net, evidence);
  std::vector<bool> in_query(net.size(), false);
  for (auto q : query) {
    if (q >= net.size()) throw ArgumentError("exact inference: unknown variable id " + std::to_string(q));
    if (evidence.contains(q)) throw ArgumentError("exact inference: query variable " + net.variable(q).name + " is observed");
    if (in_query[q]) throw ArgumentError("exact inference: duplicate query variable");
    in_query[q] = true;
  }
  detail::check_budget(configuration_count(net.cardinalities(query)), config);

  std::vector<VarId> seeds(query.begin(), query.end());
  for (const auto& [v, s] : evidence) seeds.push_back(v);
  auto relevant = ancestor_mask(net, seeds);
  for (auto v : seeds) relevant[v] = true;

  std::vector<Factor> factors;
  std::vector<VarId> to_eliminate;
  for (VarId v = 0; v < net.size(); ++v) {
    if (!relevant[v]) continue;
    factors.push_back(Factor::from_cpt(net.cpt(v)).reduce(evidence));
    if (!in_query[v] && !evidence.contains(v)) to_eliminate.push_back(v);
  }

  std::vector<VarId> order = elimination_order;
  if (order.empty()) order = min_fill_order(factors, to_eliminate);
  else {
    auto a = order, b = to_eliminate;
    std::sort(a.begin(), a.end());
    if (a != b) throw ArgumentError("exact inference: elimination order does not match the variables to eliminate");
  }
  for (auto v : order) detail::eliminate_one(factors, v, config);

  auto product = detail::multiply_all(factors, config);
  return product.reordered(query);
}

/// Exact P(E).
inline double evidence_probability(const BayesianNetwork& net, const Evidence& evidence, const ExactConfig& config = {}) {
  return joint_with_evidence(net, evidence, {}, config).values()[0];
}

/// Exact P(X | E) for every unobserved X, plus P(E).
inline PosteriorMarginals posterior_marginals(const BayesianNetwork& net, const Evidence& evidence,
                                              const ExactConfig& config = {}) {
  PosteriorMarginals out;
  out.evidence_probability = evidence_probability(net, evidence, config);
  if (!(out.evidence_probability > 0.0)) throw InconsistentEvidence("posterior_marginals: evidence has probability zero");
  for (auto v : unobserved_variables(net, evidence)) {
    auto f = joint_with_evidence(net, evidence, {v}, config).normalized();
    out.marginals.emplace(v, f.values());
  }
  return out;
}

/// Exact normalized P(scope | E).
inline Factor posterior_joint(const BayesianNetwork& net, const Evidence& evidence, const std::vector<VarId>& scope,
                              const ExactConfig& config = {}) {
  auto f = joint_with_evidence(net, evidence, scope, config);
  if (!(f.total() > 0.0)) throw InconsistentEvidence("posterior_joint: evidence has probability zero");
  return f.normalized();
}

/// Exact P(xi | given, E) laid out as a CPT with `given` as its parents.
inline ExactConditional exact_conditional_cpt(const BayesianNetwork& net, VarId xi, const std::vector<VarId>& given,
                                              const Evidence& evidence, const ExactConfig& config = {}) {
  if (xi >= net.size()) throw ArgumentError("exact_conditional_cpt: unknown variable id");
  if (evidence.contains(xi)) throw ArgumentError("exact_conditional_cpt: variable " + net.variable(xi).name + " is observed");
  if (std::find(given.begin(), given.end(), xi) != given.end())
    throw ArgumentError("exact_conditional_cpt: variable conditions on itself");
  auto scope = given;
  scope.push_back(xi);
  auto joint = joint_with_evidence(net, evidence, scope, config);
  if (!(joint.total() > 0.0)) throw InconsistentEvidence("exact_conditional_cpt: evidence has probability zero");

  ExactConditional out{Cpt(xi, net.cardinality(xi), given, net.cardinalities(given), joint.values()), {}};
  for (std::size_t r = 0; r < out.cpt.row_count(); ++r) {
    auto row = out.cpt.row(r);
    double z = 0.0;
    for (double x : row) z += x;
    if (z > 0.0) {
      for (double& x : row) x /= z;
    } else {
      for (double& x : row) x = 1.0 / static_cast<double>(row.size());
      out.uniform_rows.push_back(r);
    }
  }
  return out;
}

}  // namespace bnis
