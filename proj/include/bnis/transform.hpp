#pragma once

#include <bnis/graph.hpp>

#include <algorithm>
#include <utility>
#include <vector>

namespace bnis {

/// Parent-ordering heuristic used when orienting added arcs.
enum class Heuristic { ByParentCount, ByCptSize };

/// Which nodes get their parents married.
///   Full      - evidence nodes and every unobserved ancestor of evidence.
///   EvParents - evidence nodes only.
enum class FactorizeMode { Full, EvParents };

using Arc = std::pair<VarId, VarId>;

/// A network whose unobserved posterior factorizes over augmented parent sets.
struct AugmentedNetwork {
  BayesianNetwork base;
  Evidence evidence;
  FactorizeMode mode = FactorizeMode::Full;
  /// Total order of all variables; every added arc points from earlier to later.
  Ordering sigma;
  std::vector<Arc> added_arcs;
  /// Original parents followed by added parents, per variable.
  std::vector<std::vector<VarId>> parents;
  /// Original CPTs expanded over the added parents by duplication.
  std::vector<Cpt> cpts;

  std::vector<VarId> sampling_parents(VarId v) const {
    std::vector<VarId> out;
    for (auto p : parents[v])
      if (!evidence.contains(p)) out.push_back(p);
    return out;
  }

  /// sigma restricted to the unobserved variables; topological for the augmented arcs.
  Ordering sampling_order() const { return restrict_ordering(sigma, evidence); }

  /// Cells in the sampling table of `v` (child states times unobserved parent configurations).
  std::size_t sampling_table_cells(VarId v) const {
    std::size_t n = base.cardinality(v);
    for (auto p : sampling_parents(v)) n *= base.cardinality(p);
    return n;
  }

  std::size_t max_sampling_table_cells() const {
    std::size_t best = 0;
    for (auto v : sampling_order()) best = std::max(best, sampling_table_cells(v));
    return best;
  }

  /// The augmented structure as a plain network (same joint distribution as `base`).
  BayesianNetwork to_network() const { return BayesianNetwork(base.name(), base.variables(), cpts); }
};

inline std::size_t heuristic_key(const BayesianNetwork& net, VarId v, Heuristic h) {
  return h == Heuristic::ByCptSize ? net.cpt(v).size() : net.parents(v).size();
}

/// Unobserved ancestors of the evidence nodes.
inline std::vector<VarId> mark_evidence_ancestors(const BayesianNetwork& net, const Evidence& evidence) {
  std::vector<VarId> seeds;
  for (const auto& [v, s] : evidence) seeds.push_back(v);
  auto mask = ancestor_mask(net, seeds);
  std::vector<VarId> out;
  for (VarId v = 0; v < net.size(); ++v)
    if (mask[v] && !evidence.contains(v)) out.push_back(v);
  return out;
}

/// Parents of `node` sorted by descending heuristic key (ties by id), subject to
/// the ancestor relations that already hold among them.
inline Ordering order_parents(const BayesianNetwork& net, VarId node, Heuristic heuristic) {
  const auto& pa = net.parents(node);
  const std::size_t k = pa.size();
  // Local DAG over parent positions: i -> j when pa[i] is an ancestor of pa[j].
  std::vector<std::vector<VarId>> local(k);
  for (std::size_t j = 0; j < k; ++j) {
    auto anc = ancestor_mask(net, {pa[j]});
    for (std::size_t i = 0; i < k; ++i)
      if (i != j && anc[pa[i]]) local[j].push_back(i);
  }
  auto before = [&](VarId a, VarId b) {
    auto ka = heuristic_key(net, pa[a], heuristic), kb = heuristic_key(net, pa[b], heuristic);
    return ka != kb ? ka > kb : pa[a] < pa[b];
  };
  auto positions = detail::kahn(local, before);
  Ordering out;
  for (auto i : positions) out.push_back(pa[i]);
  return out;
}

/// Topological order of the whole network preferring larger heuristic keys (ties by id).
inline Ordering heuristic_topological_order(const BayesianNetwork& net, Heuristic heuristic) {
  auto before = [&](VarId a, VarId b) {
    auto ka = heuristic_key(net, a, heuristic), kb = heuristic_key(net, b, heuristic);
    return ka != kb ? ka > kb : a < b;
  };
  auto order = detail::kahn(detail::parent_lists(net), before);
  if (order.size() != net.size()) throw StructuralError("factorize: network contains a cycle");
  return order;
}

/// Appends `new_parent` (with `cardinality` states) to the CPT, duplicating every row across its states.
inline Cpt expand_cpt(const Cpt& cpt, VarId new_parent, std::size_t cardinality) {
  const auto& pa = cpt.parents();
  if (std::find(pa.begin(), pa.end(), new_parent) != pa.end())
    throw ArgumentError("expand_cpt: variable is already a parent");
  auto parents = pa;
  parents.push_back(new_parent);
  auto cards = cpt.parent_cardinalities();
  cards.push_back(cardinality);
  std::vector<double> table;
  table.reserve(cpt.size() * cardinality);
  for (std::size_t r = 0; r < cpt.row_count(); ++r)
    for (std::size_t s = 0; s < cardinality; ++s) table.insert(table.end(), cpt.row(r).begin(), cpt.row(r).end());
  return Cpt(cpt.child(), cpt.child_cardinality(), std::move(parents), std::move(cards), std::move(table));
}

/// Marries parent sets in reverse `sigma` order, orienting every added arc along `sigma`.
inline AugmentedNetwork factorize_with_order(const BayesianNetwork& net, const Evidence& evidence, Ordering sigma,
                                             FactorizeMode mode) {
  check_evidence(net, evidence);
  AugmentedNetwork aug;
  aug.base = net;
  aug.evidence = evidence;
  aug.mode = mode;
  aug.parents = detail::parent_lists(net);
  if (sigma.size() != net.size() || !is_topological(aug.parents, sigma))
    throw ArgumentError("factorize: sigma must be a topological order of the whole network");

  std::vector<std::size_t> pos(net.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) pos[sigma[i]] = i;

  std::vector<bool> marry(net.size(), false);
  for (const auto& [v, s] : evidence) marry[v] = true;
  if (mode == FactorizeMode::Full)
    for (auto v : mark_evidence_ancestors(net, evidence)) marry[v] = true;

  auto linked = [&](VarId a, VarId b) {
    const auto& pa = aug.parents[a];
    const auto& pb = aug.parents[b];
    return std::find(pa.begin(), pa.end(), b) != pa.end() || std::find(pb.begin(), pb.end(), a) != pb.end();
  };

  for (auto it = sigma.rbegin(); it != sigma.rend(); ++it) {
    if (!marry[*it]) continue;
    std::vector<VarId> spouses;
    for (auto p : aug.parents[*it])
      if (!evidence.contains(p)) spouses.push_back(p);
    std::sort(spouses.begin(), spouses.end(), [&](VarId a, VarId b) { return pos[a] < pos[b]; });
    for (std::size_t j = 1; j < spouses.size(); ++j)
      for (std::size_t i = 0; i < j; ++i)
        if (!linked(spouses[i], spouses[j])) {
          aug.parents[spouses[j]].push_back(spouses[i]);
          aug.added_arcs.emplace_back(spouses[i], spouses[j]);
        }
  }

  // Acyclicity follows from orienting along sigma.
  if (!is_topological(aug.parents, sigma)) throw StructuralError("factorize: augmented structure is cyclic");

  aug.cpts.reserve(net.size());
  for (VarId v = 0; v < net.size(); ++v) {
    Cpt cpt = net.cpt(v);
    for (std::size_t k = net.parents(v).size(); k < aug.parents[v].size(); ++k) {
      auto p = aug.parents[v][k];
      cpt = expand_cpt(cpt, p, net.cardinality(p));
    }
    aug.cpts.push_back(std::move(cpt));
  }
  aug.sigma = std::move(sigma);
  return aug;
}

/// Builds a factorizable structure (Full) or its evidence-parent approximation (EvParents).
inline AugmentedNetwork factorize(const BayesianNetwork& net, const Evidence& evidence, Heuristic heuristic,
                                  FactorizeMode mode) {
  return factorize_with_order(net, evidence, heuristic_topological_order(net, heuristic), mode);
}

/// True iff, along `ordering`, every unobserved variable is d-separated in the original
/// graph from its non-parent predecessors given its augmented parents and the evidence.
inline bool is_factorizable(const AugmentedNetwork& aug, const Evidence& evidence, const Ordering& ordering) {
  const auto& net = aug.base;
  std::vector<std::vector<VarId>> unobserved_parents(net.size());
  for (VarId v = 0; v < net.size(); ++v)
    for (auto p : aug.parents[v])
      if (!evidence.contains(p)) unobserved_parents[v].push_back(p);
  if (!is_topological(unobserved_parents, ordering)) return false;

  for (std::size_t i = 0; i < ordering.size(); ++i) {
    const auto xi = ordering[i];
    if (evidence.contains(xi)) continue;
    std::vector<bool> given(net.size(), false);
    for (auto p : aug.parents[xi]) given[p] = true;
    for (const auto& [v, s] : evidence) given[v] = true;
    auto reach = active_reachable(net, xi, given);
    for (std::size_t j = 0; j < i; ++j) {
      const auto y = ordering[j];
      if (!given[y] && reach[y]) return false;
    }
  }
  return true;
}

}  // namespace bnis
