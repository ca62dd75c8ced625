#pragma once

#include <bnis/model.hpp>

#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <queue>
#include <set>
#include <string>
#include <vector>

namespace bnis {

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

enum class IssueKind { Cycle, RowSum, Arity, MissingCpt, DuplicateCpt, UnknownParent, BadVariable };

struct ValidationIssue {
  IssueKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const noexcept { return issues.empty(); }
  bool has(IssueKind kind) const {
    for (const auto& i : issues)
      if (i.kind == kind) return true;
    return false;
  }
};

namespace detail {

/// Kahn's algorithm over the parent lists; `before(a, b)` picks which ready node goes first.
/// Returns the nodes it could order; fewer than net.size() means a cycle.
template <class Before>
std::vector<VarId> kahn(const std::vector<std::vector<VarId>>& parents, Before before) {
  const std::size_t n = parents.size();
  std::vector<std::size_t> indegree(n, 0);
  std::vector<std::vector<VarId>> children(n);
  for (VarId v = 0; v < n; ++v)
    for (auto p : parents[v]) {
      if (p >= n) continue;
      ++indegree[v];
      children[p].push_back(v);
    }
  auto cmp = [&](VarId a, VarId b) { return before(b, a); };
  std::priority_queue<VarId, std::vector<VarId>, decltype(cmp)> ready(cmp);
  for (VarId v = 0; v < n; ++v)
    if (indegree[v] == 0) ready.push(v);
  std::vector<VarId> order;
  order.reserve(n);
  while (!ready.empty()) {
    auto v = ready.top();
    ready.pop();
    order.push_back(v);
    for (auto c : children[v])
      if (--indegree[c] == 0) ready.push(c);
  }
  return order;
}

inline std::vector<std::vector<VarId>> parent_lists(const BayesianNetwork& net) {
  std::vector<std::vector<VarId>> out(net.size());
  for (VarId v = 0; v < net.size(); ++v)
    if (net.has_cpt(v)) out[v] = net.parents(v);
  return out;
}

}  // namespace detail

/// Reports every violated structural or numeric invariant; an empty report means the network is valid.
inline ValidationReport validate_network(const BayesianNetwork& net) {
  ValidationReport report;
  auto add = [&](IssueKind k, std::string msg) { report.issues.push_back({k, std::move(msg)}); };

  std::set<std::string> names;
  for (const auto& var : net.variables()) {
    if (!names.insert(var.name).second) add(IssueKind::BadVariable, "duplicate variable name " + var.name);
    if (var.cardinality() < 2) add(IssueKind::BadVariable, var.name + ": fewer than two states");
    std::set<std::string> labels(var.states.begin(), var.states.end());
    if (labels.size() != var.states.size()) add(IssueKind::BadVariable, var.name + ": duplicate state label");
  }
  if (net.duplicate_cpt_count() > 0) add(IssueKind::DuplicateCpt, "more than one cpt for a variable");

  for (VarId v = 0; v < net.size(); ++v) {
    const auto& name = net.variable(v).name;
    if (!net.has_cpt(v)) {
      add(IssueKind::MissingCpt, "missing CPT for " + name);
      continue;
    }
    const auto& cpt = net.cpt(v);
    bool arity_ok = cpt.child_cardinality() == net.cardinality(v);
    std::set<VarId> seen;
    for (std::size_t k = 0; k < cpt.parents().size(); ++k) {
      auto p = cpt.parents()[k];
      if (p >= net.size()) {
        add(IssueKind::UnknownParent, name + ": unknown parent id " + std::to_string(p));
        arity_ok = false;
        continue;
      }
      if (!seen.insert(p).second) add(IssueKind::Arity, name + ": parent listed twice");
      if (cpt.parent_cardinalities()[k] != net.cardinality(p)) arity_ok = false;
    }
    if (!arity_ok) {
      add(IssueKind::Arity, name + ": cpt shape does not match variable cardinalities");
      continue;
    }
    for (std::size_t r = 0; r < cpt.row_count(); ++r) {
      double sum = 0.0;
      bool negative = false;
      for (double p : cpt.row(r)) {
        sum += p;
        negative = negative || p < 0.0 || p > 1.0 || !std::isfinite(p);
      }
      if (negative || std::abs(sum - 1.0) > kProbabilityTolerance) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", sum);
        add(IssueKind::RowSum, name + ": row " + std::to_string(r) + " sums to " + buf);
      }
    }
  }

  auto order = detail::kahn(detail::parent_lists(net), std::less<VarId>{});
  if (order.size() != net.size()) {
    std::vector<bool> placed(net.size(), false);
    for (auto v : order) placed[v] = true;
    std::string members;
    for (VarId v = 0; v < net.size(); ++v)
      if (!placed[v]) members += (members.empty() ? "" : " ") + net.variable(v).name;
    add(IssueKind::Cycle, "cycle through {" + members + "}");
  }
  return report;
}

// ---------------------------------------------------------------------------
// Orderings
// ---------------------------------------------------------------------------

/// Topological order with ties broken by ascending id.
inline Ordering topological_order(const BayesianNetwork& net) {
  auto order = detail::kahn(detail::parent_lists(net), std::less<VarId>{});
  if (order.size() != net.size()) throw StructuralError("topological_order: network contains a cycle");
  return order;
}

/// True when every parent (per `parents`) of a member precedes it in `order`.
inline bool is_topological(const std::vector<std::vector<VarId>>& parents, const Ordering& order) {
  std::vector<std::size_t> pos(parents.size(), parents.size());
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  for (auto v : order)
    for (auto p : parents[v])
      if (pos[p] != parents.size() && pos[p] >= pos[v]) return false;
  return true;
}

inline std::vector<VarId> restrict_ordering(const Ordering& order, const Evidence& evidence) {
  Ordering out;
  for (auto v : order)
    if (!evidence.contains(v)) out.push_back(v);
  return out;
}

/// Ancestors of `seeds` (transitive parents), excluding the seeds unless reachable from another seed.
inline std::vector<bool> ancestor_mask(const BayesianNetwork& net, const std::vector<VarId>& seeds) {
  std::vector<bool> mask(net.size(), false);
  std::deque<VarId> queue(seeds.begin(), seeds.end());
  while (!queue.empty()) {
    auto v = queue.front();
    queue.pop_front();
    for (auto p : net.parents(v))
      if (!mask[p]) {
        mask[p] = true;
        queue.push_back(p);
      }
  }
  return mask;
}

// ---------------------------------------------------------------------------
// d-separation
// ---------------------------------------------------------------------------

/// Nodes reachable from `source` along active trails given `given` (Bayes-ball).
/// The result excludes members of `given`; the source itself is included.
inline std::vector<bool> active_reachable(const BayesianNetwork& net, VarId source, const std::vector<bool>& given) {
  const std::size_t n = net.size();
  // Observed nodes and their ancestors activate v-structures.
  std::vector<bool> activates(n, false);
  {
    std::deque<VarId> queue;
    for (VarId v = 0; v < n; ++v)
      if (given[v]) {
        activates[v] = true;
        queue.push_back(v);
      }
    while (!queue.empty()) {
      auto v = queue.front();
      queue.pop_front();
      for (auto p : net.parents(v))
        if (!activates[p]) {
          activates[p] = true;
          queue.push_back(p);
        }
    }
  }

  enum Dir : int { kUp = 0, kDown = 1 };  // up: arrived from a child; down: arrived from a parent
  std::vector<bool> visited(2 * n, false);
  std::vector<bool> reached(n, false);
  std::deque<std::pair<VarId, Dir>> queue{{source, kUp}};
  while (!queue.empty()) {
    auto [v, dir] = queue.front();
    queue.pop_front();
    if (visited[2 * v + dir]) continue;
    visited[2 * v + dir] = true;
    if (!given[v]) reached[v] = true;
    if (dir == kUp && !given[v]) {
      for (auto p : net.parents(v)) queue.emplace_back(p, kUp);
      for (auto c : net.children(v)) queue.emplace_back(c, kDown);
    } else if (dir == kDown) {
      if (!given[v])
        for (auto c : net.children(v)) queue.emplace_back(c, kDown);
      if (activates[v])
        for (auto p : net.parents(v)) queue.emplace_back(p, kUp);
    }
  }
  return reached;
}

inline std::vector<bool> to_mask(std::size_t n, const std::set<VarId>& ids) {
  std::vector<bool> mask(n, false);
  for (auto v : ids) {
    if (v >= n) throw ArgumentError("unknown variable id " + std::to_string(v));
    mask[v] = true;
  }
  return mask;
}

/// True iff an active trail joins x and y given the conditioning set.
inline bool d_connected(const BayesianNetwork& net, VarId x, VarId y, const std::set<VarId>& given) {
  if (x >= net.size() || y >= net.size()) throw ArgumentError("d_connected: unknown variable id");
  if (x == y) throw ArgumentError("d_connected: x and y must differ");
  if (given.contains(x) || given.contains(y)) throw ArgumentError("d_connected: x and y must not be conditioned on");
  return active_reachable(net, x, to_mask(net.size(), given))[y];
}

// ---------------------------------------------------------------------------
// Relevant factor
// ---------------------------------------------------------------------------

/// Predecessors of `xi` in `ordering` that stay d-connected to it given its parents,
/// the evidence and each other.
///
/// Computed as a fixed point: start from every non-parent predecessor and repeatedly
/// drop, in ordering position, any candidate that is d-separated from `xi` given
/// PA(xi), the evidence and the remaining candidates.
inline std::vector<VarId> relevant_factor(const BayesianNetwork& net, const Ordering& ordering, VarId xi,
                                          const Evidence& evidence) {
  if (xi >= net.size()) throw ArgumentError("relevant_factor: unknown variable id");
  if (evidence.contains(xi)) throw ArgumentError("relevant_factor: variable " + net.variable(xi).name + " is observed");
  auto at = std::find(ordering.begin(), ordering.end(), xi);
  if (at == ordering.end()) throw ArgumentError("relevant_factor: variable not in ordering");

  const auto& pa = net.parents(xi);
  std::vector<bool> base(net.size(), false);
  for (auto p : pa) base[p] = true;
  for (const auto& [v, s] : evidence) base[v] = true;

  std::vector<VarId> candidates;
  for (auto it = ordering.begin(); it != at; ++it)
    if (!base[*it]) candidates.push_back(*it);

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < candidates.size();) {
      auto given = base;
      for (std::size_t j = 0; j < candidates.size(); ++j)
        if (j != i) given[candidates[j]] = true;
      if (!active_reachable(net, xi, given)[candidates[i]]) {
        candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
      } else {
        ++i;
      }
    }
  }
  return candidates;
}

}  // namespace bnis
