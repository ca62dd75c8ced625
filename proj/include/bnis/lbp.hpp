#pragma once

#include <bnis/graph.hpp>
#include <bnis/transform.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <vector>

namespace bnis {

struct LbpConfig {
  /// Unset means 2 * (skeleton diameter) + 5.
  std::optional<std::size_t> max_iterations;
  double damping = 0.1;
  double tolerance = 1e-8;
};

/// Pearl-style pi/lambda messages, one pair per arc of the original network.
struct MessageState {
  std::vector<Arc> arcs;                      // (parent, child)
  std::vector<std::vector<double>> pi;        // parent -> child, over the parent's states
  std::vector<std::vector<double>> lambda;    // child -> parent, over the parent's states
  std::vector<std::vector<std::size_t>> in;   // per node, arc ids aligned with its parent list
  std::vector<std::vector<std::size_t>> out;  // per node, arc ids to its children
  std::size_t iterations = 0;
  double max_residual = 0.0;
  bool converged = false;
};

/// Importance CPT: P(child | unobserved parents, E) estimated from messages.
struct Icpt {
  Cpt cpt;
  std::vector<std::size_t> uniform_rows;
};

namespace detail {

inline void normalize_or_uniform(std::vector<double>& m) {
  double z = 0.0;
  for (double x : m) z += x;
  if (z > 0.0 && std::isfinite(z)) {
    for (double& x : m) x /= z;
  } else {
    for (double& x : m) x = 1.0 / static_cast<double>(m.size());
  }
}

inline std::vector<double> indicator(std::size_t card, StateIndex s) {
  std::vector<double> v(card, 0.0);
  v[s] = 1.0;
  return v;
}

/// Calls fn(row, parent_states) for every parent configuration of `cpt`.
template <class Fn>
void for_each_config(const Cpt& cpt, Fn&& fn) {
  const auto& cards = cpt.parent_cardinalities();
  std::vector<StateIndex> states(cards.size(), 0);
  const std::size_t rows = cpt.row_count();
  for (std::size_t r = 0; r < rows; ++r) {
    fn(r, static_cast<const std::vector<StateIndex>&>(states));
    for (std::size_t k = cards.size(); k-- > 0;) {
      if (++states[k] < cards[k]) break;
      states[k] = 0;
    }
  }
}

/// Causal support pi(x) = sum_u P(x|u) prod_k pi_k(u_k).
inline std::vector<double> node_pi(const BayesianNetwork& net, const MessageState& st, VarId v) {
  const auto& cpt = net.cpt(v);
  std::vector<double> out(cpt.child_cardinality(), 0.0);
  const auto& in = st.in[v];
  for_each_config(cpt, [&](std::size_t r, const std::vector<StateIndex>& u) {
    double w = 1.0;
    for (std::size_t k = 0; k < u.size() && w != 0.0; ++k) w *= st.pi[in[k]][u[k]];
    if (w == 0.0) return;
    for (std::size_t x = 0; x < out.size(); ++x) out[x] += w * cpt.at(r, x);
  });
  return out;
}

/// Diagnostic support lambda(x) = evidence indicator times every incoming child message.
inline std::vector<double> node_lambda(const BayesianNetwork& net, const Evidence& evidence, const MessageState& st,
                                       VarId v, std::optional<std::size_t> skip_arc = std::nullopt) {
  std::vector<double> out(net.cardinality(v), 1.0);
  if (auto it = evidence.find(v); it != evidence.end()) out = indicator(out.size(), it->second);
  for (auto a : st.out[v]) {
    if (skip_arc && *skip_arc == a) continue;
    for (std::size_t x = 0; x < out.size(); ++x) out[x] *= st.lambda[a][x];
  }
  return out;
}

inline std::size_t skeleton_diameter(const BayesianNetwork& net) {
  const std::size_t n = net.size();
  std::size_t diameter = 0;
  for (VarId s = 0; s < n; ++s) {
    std::vector<std::size_t> dist(n, n + 1);
    std::deque<VarId> queue{s};
    dist[s] = 0;
    while (!queue.empty()) {
      auto v = queue.front();
      queue.pop_front();
      auto visit = [&](VarId w) {
        if (dist[w] > n) {
          dist[w] = dist[v] + 1;
          diameter = std::max(diameter, dist[w]);
          queue.push_back(w);
        }
      };
      for (auto p : net.parents(v)) visit(p);
      for (auto c : net.children(v)) visit(c);
    }
  }
  return diameter;
}

}  // namespace detail

inline std::size_t default_lbp_iterations(const BayesianNetwork& net) {
  return 2 * detail::skeleton_diameter(net) + 5;
}

/// Synchronous damped flooding of pi/lambda messages. Non-convergence is reported in
/// the returned state rather than thrown.
inline MessageState run_lbp(const BayesianNetwork& net, const Evidence& evidence, std::size_t max_iterations,
                            double damping, double tolerance) {
  if (max_iterations < 1) throw ArgumentError("run_lbp: max_iterations must be at least 1");
  if (!(damping >= 0.0 && damping < 1.0)) throw ArgumentError("run_lbp: damping must lie in [0, 1)");
  check_evidence(net, evidence);

  MessageState st;
  st.in.assign(net.size(), {});
  st.out.assign(net.size(), {});
  for (VarId v = 0; v < net.size(); ++v)
    for (auto p : net.parents(v)) {
      const auto a = st.arcs.size();
      st.arcs.emplace_back(p, v);
      st.in[v].push_back(a);
      st.out[p].push_back(a);
      const auto card = net.cardinality(p);
      st.pi.emplace_back(card, 1.0 / static_cast<double>(card));
      st.lambda.emplace_back(card, 1.0 / static_cast<double>(card));
    }

  for (st.iterations = 0; st.iterations < max_iterations;) {
    auto pi = st.pi;
    auto lambda = st.lambda;

    for (VarId v = 0; v < net.size(); ++v) {
      // pi messages to children
      if (!st.out[v].empty()) {
        auto ev = evidence.find(v);
        const auto support = ev == evidence.end() ? detail::node_pi(net, st, v) : std::vector<double>{};
        for (auto a : st.out[v]) {
          if (ev != evidence.end()) {
            pi[a] = detail::indicator(net.cardinality(v), ev->second);
            continue;
          }
          auto m = detail::node_lambda(net, evidence, st, v, a);
          for (std::size_t x = 0; x < m.size(); ++x) m[x] *= support[x];
          detail::normalize_or_uniform(m);
          pi[a] = std::move(m);
        }
      }
      // lambda messages to parents
      const auto& in = st.in[v];
      if (in.empty()) continue;
      const auto& cpt = net.cpt(v);
      const auto lam = detail::node_lambda(net, evidence, st, v);
      std::vector<std::vector<double>> msgs;
      for (auto a : in) msgs.emplace_back(st.pi[a].size(), 0.0);
      detail::for_each_config(cpt, [&](std::size_t r, const std::vector<StateIndex>& u) {
        double s = 0.0;
        for (std::size_t x = 0; x < lam.size(); ++x) s += lam[x] * cpt.at(r, x);
        if (s == 0.0) return;
        for (std::size_t j = 0; j < u.size(); ++j) {
          double w = s;
          for (std::size_t k = 0; k < u.size() && w != 0.0; ++k)
            if (k != j) w *= st.pi[in[k]][u[k]];
          msgs[j][u[j]] += w;
        }
      });
      for (std::size_t j = 0; j < in.size(); ++j) {
        detail::normalize_or_uniform(msgs[j]);
        lambda[in[j]] = std::move(msgs[j]);
      }
    }

    double residual = 0.0;
    auto blend = [&](std::vector<double>& fresh, const std::vector<double>& old) {
      for (std::size_t i = 0; i < fresh.size(); ++i) fresh[i] = (1.0 - damping) * fresh[i] + damping * old[i];
      detail::normalize_or_uniform(fresh);
      for (std::size_t i = 0; i < fresh.size(); ++i) residual = std::max(residual, std::abs(fresh[i] - old[i]));
    };
    for (std::size_t a = 0; a < st.arcs.size(); ++a) {
      blend(pi[a], st.pi[a]);
      blend(lambda[a], st.lambda[a]);
    }
    st.pi = std::move(pi);
    st.lambda = std::move(lambda);
    st.max_residual = residual;
    ++st.iterations;
    if (residual < tolerance) {
      st.converged = true;
      break;
    }
  }
  return st;
}

inline MessageState run_lbp(const BayesianNetwork& net, const Evidence& evidence, const LbpConfig& config = {}) {
  return run_lbp(net, evidence, config.max_iterations.value_or(default_lbp_iterations(net)), config.damping,
                 config.tolerance);
}

/// Normalized belief pi(x) * lambda(x) of every variable.
inline std::vector<double> belief(const BayesianNetwork& net, const Evidence& evidence, const MessageState& st, VarId v) {
  auto b = detail::node_pi(net, st, v);
  auto l = detail::node_lambda(net, evidence, st, v);
  for (std::size_t x = 0; x < b.size(); ++x) b[x] *= l[x];
  detail::normalize_or_uniform(b);
  return b;
}

/// Sampling table for `xi` conditioned on the unobserved variables `given`, which must
/// contain xi's unobserved parents and may add extra variables (augmented parents).
///
/// Row (x | g) is proportional to P(x | parents from g, evidence parents clamped) times,
/// for every child c of xi, the child's diagnostic support with xi = x, c's parents that
/// appear in g or the evidence held fixed, and c's remaining parents weighted by their
/// pi messages. With `given` equal to the unobserved parents this is the usual
/// P(x | u) * lambda(x) importance CPT.
inline Icpt conditional_table(const MessageState& st, const BayesianNetwork& net, const Evidence& evidence, VarId xi,
                              const std::vector<VarId>& given) {
  if (evidence.contains(xi)) throw ArgumentError("icpt: variable " + net.variable(xi).name + " is observed");
  std::vector<std::size_t> slot(net.size(), given.size());
  for (std::size_t g = 0; g < given.size(); ++g) {
    if (evidence.contains(given[g]) || given[g] == xi) throw ArgumentError("icpt: invalid conditioning variable");
    slot[given[g]] = g;
  }
  for (auto p : net.parents(xi))
    if (!evidence.contains(p) && slot[p] == given.size())
      throw ArgumentError("icpt: conditioning set must contain every unobserved parent");

  const auto& cpt = net.cpt(xi);
  const std::size_t card = net.cardinality(xi);
  Icpt out{Cpt(xi, card, given, net.cardinalities(given), std::vector<double>(card * configuration_count(net.cardinalities(given)), 0.0)), {}};

  // Per child: s_r = sum_y lambda_c(y) P(y | row r).
  struct ChildSupport {
    const Cpt* cpt;
    std::vector<double> row_support;
    std::vector<std::size_t> in_arcs;
  };
  std::vector<ChildSupport> children;
  for (auto c : net.children(xi)) {
    ChildSupport cs{&net.cpt(c), {}, st.in[c]};
    const auto lam = detail::node_lambda(net, evidence, st, c);
    cs.row_support.assign(cs.cpt->row_count(), 0.0);
    for (std::size_t r = 0; r < cs.cpt->row_count(); ++r)
      for (std::size_t y = 0; y < lam.size(); ++y) cs.row_support[r] += lam[y] * cs.cpt->at(r, y);
    children.push_back(std::move(cs));
  }

  std::vector<StateIndex> fixed(net.size(), kUnset);
  for (const auto& [v, s] : evidence) fixed[v] = s;
  std::vector<StateIndex> parent_states;
  for (std::size_t r = 0; r < out.cpt.row_count(); ++r) {
    const auto g_states = out.cpt.decode_config(r);
    for (std::size_t g = 0; g < given.size(); ++g) fixed[given[g]] = g_states[g];
    for (std::size_t x = 0; x < card; ++x) {
      fixed[xi] = x;
      double val = cpt.at(cpt.config_index_from(fixed), x);
      for (const auto& cs : children) {
        if (val == 0.0) break;
        double support = 0.0;
        const auto& pa = cs.cpt->parents();
        detail::for_each_config(*cs.cpt, [&](std::size_t row, const std::vector<StateIndex>& u) {
          double w = cs.row_support[row];
          for (std::size_t k = 0; k < pa.size() && w != 0.0; ++k) {
            if (fixed[pa[k]] != kUnset) {
              if (fixed[pa[k]] != u[k]) w = 0.0;
            } else {
              w *= st.pi[cs.in_arcs[k]][u[k]];
            }
          }
          support += w;
        });
        val *= support;
      }
      out.cpt.row(r)[x] = val;
    }
    fixed[xi] = kUnset;
    auto row = out.cpt.row(r);
    double z = 0.0;
    for (double v : row) z += v;
    if (z > 0.0 && std::isfinite(z)) {
      for (double& v : row) v /= z;
    } else {
      for (double& v : row) v = 1.0 / static_cast<double>(card);
      out.uniform_rows.push_back(r);
    }
  }
  return out;
}

/// Importance CPT P(xi | PA(xi) \ E, E).
inline Icpt icpt(const MessageState& st, const BayesianNetwork& net, const Evidence& evidence, VarId xi) {
  std::vector<VarId> given;
  for (auto p : net.parents(xi))
    if (!evidence.contains(p)) given.push_back(p);
  return conditional_table(st, net, evidence, xi, given);
}

}  // namespace bnis
