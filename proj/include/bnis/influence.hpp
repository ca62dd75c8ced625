#pragma once

#include <bnis/exact.hpp>

#include <cmath>
#include <deque>
#include <string_view>
#include <vector>

namespace bnis {

enum class LinkKind { Causal, Diagnostic, Intercausal };

inline std::string_view to_string(LinkKind k) {
  switch (k) {
    case LinkKind::Causal: return "causal";
    case LinkKind::Diagnostic: return "diagnostic";
    case LinkKind::Intercausal: return "intercausal";
  }
  return "?";
}

struct SensitivityReport {
  double sr_value = 0.0;
  LinkKind link_kind = LinkKind::Causal;
  double p_y_given_x = 0.0;
  double p_y_given_notx = 0.0;
};

/// dP(y|e) / dP(x|e) for binary x and y: P(y|x) - P(y|~x). The same closed form holds
/// for causal, diagnostic and intercausal links, so |SR| <= 1 always.
inline SensitivityReport sensitivity_range(double p_y_given_x, double p_y_given_notx, LinkKind kind) {
  auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in_unit(p_y_given_x) || !in_unit(p_y_given_notx))
    throw ArgumentError("sensitivity_range: probabilities must lie in [0, 1]");
  return {p_y_given_x - p_y_given_notx, kind, p_y_given_x, p_y_given_notx};
}

struct DecayRow {
  VarId evidence_variable = 0;
  VarId variable = 0;
  std::size_t distance = 0;  // edges on the shortest skeleton path; 0 if unreachable
  bool reachable = false;
  double sensitivity = 0.0;
};

/// Undirected shortest-path distances from `source`; unreachable nodes get net.size() + 1.
inline std::vector<std::size_t> skeleton_distances(const BayesianNetwork& net, VarId source) {
  std::vector<std::size_t> dist(net.size(), net.size() + 1);
  std::deque<VarId> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    auto v = queue.front();
    queue.pop_front();
    auto visit = [&](VarId w) {
      if (dist[w] > net.size()) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    };
    for (auto p : net.parents(v)) visit(p);
    for (auto c : net.children(v)) visit(c);
  }
  return dist;
}

/// Finite-difference sensitivity of each unobserved posterior to softening one
/// evidence finding: the observed state keeps likelihood 1 and every other state of
/// that evidence variable gets likelihood `delta`. Reported as
/// max_s |P_delta(x_s) - P(x_s | e)| / delta, one row per (evidence variable, unobserved variable).
inline std::vector<DecayRow> evidence_decay(const BayesianNetwork& net, const Evidence& evidence, double delta = 1e-4,
                                            const ExactConfig& config = {}) {
  if (!(delta > 0.0)) throw ArgumentError("evidence_decay: delta must be positive");
  std::vector<DecayRow> rows;
  const auto unobserved = unobserved_variables(net, evidence);
  for (const auto& [ev, observed] : evidence) {
    const auto dist = skeleton_distances(net, ev);
    // Unnormalized P(x, E_ev = s, rest) for every state s of the evidence variable.
    std::vector<std::vector<std::vector<double>>> joint(net.cardinality(ev));
    std::vector<double> mass(net.cardinality(ev), 0.0);
    for (StateIndex s = 0; s < net.cardinality(ev); ++s) {
      auto e = evidence;
      e[ev] = s;
      for (auto v : unobserved) {
        auto f = joint_with_evidence(net, e, {v}, config);
        mass[s] = f.total();
        joint[s].push_back(f.values());
      }
    }
    if (!(mass[observed] > 0.0)) throw InconsistentEvidence("evidence_decay: evidence has probability zero");
    for (std::size_t i = 0; i < unobserved.size(); ++i) {
      const auto v = unobserved[i];
      const auto card = net.cardinality(v);
      double z = mass[observed];
      std::vector<double> soft = joint[observed][i];
      for (StateIndex s = 0; s < mass.size(); ++s) {
        if (s == observed) continue;
        z += delta * mass[s];
        for (std::size_t x = 0; x < card; ++x) soft[x] += delta * joint[s][i][x];
      }
      double worst = 0.0;
      for (std::size_t x = 0; x < card; ++x)
        worst = std::max(worst, std::abs(soft[x] / z - joint[observed][i][x] / mass[observed]) / delta);
      const bool reachable = dist[v] <= net.size();
      rows.push_back({ev, v, reachable ? dist[v] : 0, reachable, worst});
    }
  }
  return rows;
}

}  // namespace bnis
