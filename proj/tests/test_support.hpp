#pragma once

// Shared fixtures and brute-force oracles. The oracles here enumerate complete
// assignments or simple paths directly and never call the inference code they check.

#include <bnis/bnis.hpp>

#include <cstdint>
#include <functional>
#include <set>
#include <vector>

namespace bnis::testing {

// Three-node collider A -> C <- B, all binary, state 0 is the positive literal.
inline constexpr VarId kA = 0, kB = 1, kC = 2;

inline BayesianNetwork figure1() {
  std::vector<Variable> vars = {{kA, "A", {"a", "nota"}}, {kB, "B", {"b", "notb"}}, {kC, "C", {"c", "notc"}}};
  std::vector<Cpt> cpts;
  cpts.emplace_back(kA, 2, std::vector<VarId>{}, std::vector<std::size_t>{}, std::vector<double>{0.2, 0.8});
  cpts.emplace_back(kB, 2, std::vector<VarId>{}, std::vector<std::size_t>{}, std::vector<double>{0.7, 0.3});
  cpts.emplace_back(kC, 2, std::vector<VarId>{kA, kB}, std::vector<std::size_t>{2, 2},
                    std::vector<double>{0.99, 0.01, 0.01, 0.99, 0.1, 0.9, 0.9, 0.1});
  return BayesianNetwork("figure1", std::move(vars), std::move(cpts));
}

inline Evidence figure1_evidence() { return {{kC, 1}}; }

/// Binary network from explicit parent lists; P(state 0) per row drawn from [0.05, 0.95].
inline BayesianNetwork from_parents(const std::vector<std::vector<VarId>>& parents, std::uint64_t seed = 7) {
  CounterRng rng(seed, 99);
  std::vector<Variable> vars;
  for (VarId v = 0; v < parents.size(); ++v) vars.push_back({v, "N" + std::to_string(v), {"t", "f"}});
  std::vector<Cpt> cpts;
  for (VarId v = 0; v < parents.size(); ++v) {
    std::vector<std::size_t> cards(parents[v].size(), 2);
    std::vector<double> table;
    for (std::size_t r = 0; r < configuration_count(cards); ++r) {
      const double p = 0.05 + 0.9 * rng.uniform();
      table.push_back(p);
      table.push_back(1.0 - p);
    }
    cpts.emplace_back(v, 2, parents[v], cards, table);
  }
  return BayesianNetwork("custom", std::move(vars), std::move(cpts));
}

inline BayesianNetwork chain(std::size_t n, std::uint64_t seed = 7) {
  std::vector<std::vector<VarId>> parents(n);
  for (VarId v = 1; v < n; ++v) parents[v] = {v - 1};
  return from_parents(parents, seed);
}

/// Random polytree: node i links to one uniformly chosen earlier node with a random direction.
inline BayesianNetwork random_polytree(std::size_t n, std::size_t max_states, std::uint64_t seed) {
  CounterRng rng(seed, 1234);
  std::vector<std::vector<VarId>> parents(n);
  for (VarId i = 1; i < n; ++i) {
    VarId j = rng.below(i);
    if (rng.uniform() < 0.5) parents[i].push_back(j);
    else parents[j].push_back(i);
  }
  std::vector<Variable> vars;
  for (VarId v = 0; v < n; ++v) {
    Variable var{v, "P" + std::to_string(v), {}};
    const auto card = 2 + rng.below(max_states - 1);
    for (std::size_t s = 0; s < card; ++s) var.states.push_back("s" + std::to_string(s));
    vars.push_back(std::move(var));
  }
  std::vector<Cpt> cpts;
  for (VarId v = 0; v < n; ++v) {
    std::sort(parents[v].begin(), parents[v].end());
    std::vector<std::size_t> cards;
    for (auto p : parents[v]) cards.push_back(vars[p].cardinality());
    const auto card = vars[v].cardinality();
    std::vector<double> table;
    for (std::size_t r = 0; r < configuration_count(cards); ++r) {
      std::vector<double> row(card);
      double z = 0.0;
      for (auto& x : row) z += (x = -std::log1p(-rng.uniform()));
      for (auto x : row) table.push_back(x / z);
    }
    cpts.emplace_back(v, card, parents[v], cards, table);
  }
  return BayesianNetwork("polytree", std::move(vars), std::move(cpts));
}

/// `count` evidence variables with states taken from one prior sample (so P(E) > 0).
inline Evidence random_evidence(const BayesianNetwork& net, std::size_t count, std::uint64_t seed) {
  CounterRng rng(seed, 4321);
  auto world = forward_sample(net, rng);
  std::vector<VarId> pool(net.size());
  for (VarId v = 0; v < net.size(); ++v) pool[v] = v;
  for (std::size_t j = 0; j < count; ++j) std::swap(pool[j], pool[j + rng.below(net.size() - j)]);
  Evidence e;
  for (std::size_t j = 0; j < count; ++j) e[pool[j]] = world[pool[j]];
  return e;
}

/// Calls fn(assignment) for every complete assignment of the network that agrees with `evidence`.
inline void for_each_world(const BayesianNetwork& net, const Evidence& evidence,
                           const std::function<void(const std::vector<StateIndex>&)>& fn) {
  std::vector<StateIndex> x(net.size(), 0);
  for (auto [v, s] : evidence) x[v] = s;
  while (true) {
    fn(x);
    std::size_t k = net.size();
    while (k-- > 0) {
      if (evidence.contains(k)) continue;
      if (++x[k] < net.cardinality(k)) break;
      x[k] = 0;
    }
    if (k == static_cast<std::size_t>(-1)) return;
  }
}

/// Joint probability by direct CPT lookups.
inline double world_probability(const BayesianNetwork& net, const std::vector<StateIndex>& x) {
  double p = 1.0;
  for (VarId v = 0; v < net.size(); ++v) {
    const auto& cpt = net.cpt(v);
    std::size_t row = 0;
    for (std::size_t k = 0; k < cpt.parents().size(); ++k) row = row * cpt.parent_cardinalities()[k] + x[cpt.parents()[k]];
    p *= cpt.table()[row * cpt.child_cardinality() + x[v]];
  }
  return p;
}

/// Enumerated P(v | E) for every unobserved v, plus P(E).
inline std::pair<std::map<VarId, std::vector<double>>, double> brute_force_marginals(const BayesianNetwork& net,
                                                                                     const Evidence& evidence) {
  std::map<VarId, std::vector<double>> m;
  for (VarId v = 0; v < net.size(); ++v)
    if (!evidence.contains(v)) m[v].assign(net.cardinality(v), 0.0);
  double total = 0.0;
  for_each_world(net, evidence, [&](const std::vector<StateIndex>& x) {
    const double p = world_probability(net, x);
    total += p;
    for (auto& [v, dist] : m) dist[x[v]] += p;
  });
  for (auto& [v, dist] : m)
    for (auto& p : dist) p /= total;
  return {m, total};
}

/// Enumerated normalized P(scope | E), row-major over scope.
inline std::vector<double> brute_force_joint(const BayesianNetwork& net, const Evidence& evidence,
                                             const std::vector<VarId>& scope) {
  std::size_t size = 1;
  for (auto v : scope) size *= net.cardinality(v);
  std::vector<double> out(size, 0.0);
  double total = 0.0;
  for_each_world(net, evidence, [&](const std::vector<StateIndex>& x) {
    const double p = world_probability(net, x);
    std::size_t idx = 0;
    for (auto v : scope) idx = idx * net.cardinality(v) + x[v];
    out[idx] += p;
    total += p;
  });
  for (auto& p : out) p /= total;
  return out;
}

/// d-connection by enumerating every simple path of the skeleton and checking each triple.
inline bool path_d_connected(const BayesianNetwork& net, VarId x, VarId y, const std::set<VarId>& given) {
  const std::size_t n = net.size();
  auto has_arc = [&](VarId from, VarId to) {
    const auto& pa = net.parents(to);
    return std::find(pa.begin(), pa.end(), from) != pa.end();
  };
  // Descendant closure (reflexive).
  std::vector<std::vector<bool>> desc(n, std::vector<bool>(n, false));
  for (VarId v = 0; v < n; ++v) {
    std::vector<VarId> stack{v};
    while (!stack.empty()) {
      auto u = stack.back();
      stack.pop_back();
      if (desc[v][u]) continue;
      desc[v][u] = true;
      for (auto c : net.children(u)) stack.push_back(c);
    }
  }
  auto collider_open = [&](VarId m) {
    for (auto g : given)
      if (desc[m][g]) return true;
    return false;
  };
  std::vector<VarId> path{x};
  std::vector<bool> on_path(n, false);
  on_path[x] = true;
  std::function<bool()> extend = [&]() -> bool {
    const auto last = path.back();
    if (last == y) {
      for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        const bool collider = has_arc(path[i - 1], path[i]) && has_arc(path[i + 1], path[i]);
        if (collider ? !collider_open(path[i]) : given.contains(path[i])) return false;
      }
      return true;
    }
    for (VarId w = 0; w < n; ++w) {
      if (on_path[w] || !(has_arc(last, w) || has_arc(w, last))) continue;
      on_path[w] = true;
      path.push_back(w);
      if (extend()) return true;
      path.pop_back();
      on_path[w] = false;
    }
    return false;
  };
  return extend();
}

}  // namespace bnis::testing
