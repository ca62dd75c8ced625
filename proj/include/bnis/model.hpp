#pragma once

#include <bnis/error.hpp>

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bnis {

using VarId = std::size_t;
using StateIndex = std::size_t;

inline constexpr StateIndex kUnset = std::numeric_limits<StateIndex>::max();

/// Row-sum tolerance for every probability table in the library.
inline constexpr double kProbabilityTolerance = 1e-9;

struct Variable {
  VarId id = 0;
  std::string name;
  std::vector<std::string> states;

  std::size_t cardinality() const noexcept { return states.size(); }

  std::optional<StateIndex> state_index(const std::string& label) const {
    auto it = std::find(states.begin(), states.end(), label);
    if (it == states.end()) return std::nullopt;
    return static_cast<StateIndex>(it - states.begin());
  }
};

/// Number of joint configurations of a list of cardinalities (1 for an empty list).
inline std::size_t configuration_count(std::span<const std::size_t> cards) {
  std::size_t n = 1;
  for (auto c : cards) n *= c;
  return n;
}

/// Conditional probability table P(child | parents).
///
/// Rows enumerate parent configurations row-major over `parents` as declared
/// (last parent fastest); each row lists the child's states in order.
class Cpt {
 public:
  Cpt() = default;

  Cpt(VarId child, std::size_t child_cardinality, std::vector<VarId> parents,
      std::vector<std::size_t> parent_cardinalities, std::vector<double> table)
      : child_(child),
        child_card_(child_cardinality),
        parents_(std::move(parents)),
        parent_cards_(std::move(parent_cardinalities)),
        table_(std::move(table)) {
    if (parents_.size() != parent_cards_.size())
      throw ArgumentError("cpt: parent list and cardinality list differ in length");
    if (child_card_ == 0) throw ArgumentError("cpt: child cardinality must be positive");
    if (table_.size() != child_card_ * configuration_count(parent_cards_))
      throw ArgumentError("cpt: expected " +
                          std::to_string(child_card_ * configuration_count(parent_cards_)) +
                          " entries, got " + std::to_string(table_.size()));
  }

  VarId child() const noexcept { return child_; }
  std::size_t child_cardinality() const noexcept { return child_card_; }
  const std::vector<VarId>& parents() const noexcept { return parents_; }
  const std::vector<std::size_t>& parent_cardinalities() const noexcept { return parent_cards_; }
  const std::vector<double>& table() const noexcept { return table_; }
  std::vector<double>& table() noexcept { return table_; }

  std::size_t row_count() const noexcept { return configuration_count(parent_cards_); }
  std::size_t size() const noexcept { return table_.size(); }

  std::span<const double> row(std::size_t config) const {
    return {table_.data() + config * child_card_, child_card_};
  }
  std::span<double> row(std::size_t config) {
    return {table_.data() + config * child_card_, child_card_};
  }

  double at(std::size_t config, StateIndex state) const { return table_[config * child_card_ + state]; }

  /// Row index of a parent configuration given one state per parent.
  std::size_t config_index(std::span<const StateIndex> parent_states) const {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < parents_.size(); ++k) idx = idx * parent_cards_[k] + parent_states[k];
    return idx;
  }

  /// Row index of the parent configuration read from a dense per-variable state vector.
  std::size_t config_index_from(std::span<const StateIndex> states_by_var) const {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < parents_.size(); ++k)
      idx = idx * parent_cards_[k] + states_by_var[parents_[k]];
    return idx;
  }

  /// Inverse of config_index.
  std::vector<StateIndex> decode_config(std::size_t config) const {
    std::vector<StateIndex> out(parents_.size());
    for (std::size_t k = parents_.size(); k-- > 0;) {
      out[k] = config % parent_cards_[k];
      config /= parent_cards_[k];
    }
    return out;
  }

  friend bool operator==(const Cpt&, const Cpt&) = default;

 private:
  VarId child_ = 0;
  std::size_t child_card_ = 0;
  std::vector<VarId> parents_;
  std::vector<std::size_t> parent_cards_;
  std::vector<double> table_;
};

/// Observed states keyed by variable id.
using Evidence = std::map<VarId, StateIndex>;

/// Sequence of variable ids; a permutation of some stated scope.
using Ordering = std::vector<VarId>;

/// Dense state vector indexed by VarId; kUnset marks variables outside the scope.
struct Assignment {
  std::vector<StateIndex> states;

  Assignment() = default;
  explicit Assignment(std::size_t variable_count) : states(variable_count, kUnset) {}

  bool has(VarId v) const { return v < states.size() && states[v] != kUnset; }
  StateIndex operator[](VarId v) const { return states[v]; }
  StateIndex& operator[](VarId v) { return states[v]; }

  std::vector<VarId> scope() const {
    std::vector<VarId> out;
    for (VarId v = 0; v < states.size(); ++v)
      if (states[v] != kUnset) out.push_back(v);
    return out;
  }

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// Discrete Bayesian network: variables plus one CPT per variable.
///
/// Construction only checks that ids are consistent; acyclicity, row sums and
/// arities are reported by validate_network(). All other operations assume a
/// valid network.
class BayesianNetwork {
 public:
  BayesianNetwork() = default;

  BayesianNetwork(std::string name, std::vector<Variable> variables, std::vector<Cpt> cpts)
      : name_(std::move(name)), variables_(std::move(variables)), cpts_(std::move(cpts)) {
    for (std::size_t i = 0; i < variables_.size(); ++i)
      if (variables_[i].id != i) throw ArgumentError("network: variable ids must equal their position");
    cpt_of_.assign(variables_.size(), kNoCpt);
    children_.assign(variables_.size(), {});
    for (std::size_t i = 0; i < cpts_.size(); ++i) {
      const auto child = cpts_[i].child();
      if (child >= variables_.size()) throw ArgumentError("network: cpt for unknown variable id");
      if (cpt_of_[child] == kNoCpt) cpt_of_[child] = i;
      else ++duplicate_cpts_;
      for (auto p : cpts_[i].parents())
        if (p < variables_.size() && cpt_of_[child] == i) children_[p].push_back(child);
    }
    for (auto& c : children_) std::sort(c.begin(), c.end());
  }

  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return variables_.size(); }
  const std::vector<Variable>& variables() const noexcept { return variables_; }
  const Variable& variable(VarId v) const { return variables_.at(v); }
  std::size_t cardinality(VarId v) const { return variables_.at(v).cardinality(); }

  bool has_cpt(VarId v) const { return v < cpt_of_.size() && cpt_of_[v] != kNoCpt; }
  const Cpt& cpt(VarId v) const {
    if (!has_cpt(v)) throw ArgumentError("network: no cpt for variable " + std::to_string(v));
    return cpts_[cpt_of_[v]];
  }
  const std::vector<Cpt>& cpts() const noexcept { return cpts_; }
  std::size_t duplicate_cpt_count() const noexcept { return duplicate_cpts_; }

  const std::vector<VarId>& parents(VarId v) const { return cpt(v).parents(); }
  const std::vector<VarId>& children(VarId v) const { return children_.at(v); }

  std::optional<VarId> find(const std::string& name) const {
    for (const auto& var : variables_)
      if (var.name == name) return var.id;
    return std::nullopt;
  }

  std::vector<std::size_t> cardinalities(std::span<const VarId> vars) const {
    std::vector<std::size_t> out;
    out.reserve(vars.size());
    for (auto v : vars) out.push_back(cardinality(v));
    return out;
  }

 private:
  static constexpr std::size_t kNoCpt = std::numeric_limits<std::size_t>::max();

  std::string name_;
  std::vector<Variable> variables_;
  std::vector<Cpt> cpts_;
  std::vector<std::size_t> cpt_of_;
  std::vector<std::vector<VarId>> children_;
  std::size_t duplicate_cpts_ = 0;
};

/// Unobserved variables in ascending id order.
inline std::vector<VarId> unobserved_variables(const BayesianNetwork& net, const Evidence& evidence) {
  std::vector<VarId> out;
  for (VarId v = 0; v < net.size(); ++v)
    if (!evidence.contains(v)) out.push_back(v);
  return out;
}

/// Copy of `x` with the evidence states written in.
inline Assignment with_evidence(Assignment x, const Evidence& evidence) {
  for (auto [v, s] : evidence) x[v] = s;
  return x;
}

/// Product of CPT entries selected by a complete assignment.
inline double joint_probability(const BayesianNetwork& net, const Assignment& full) {
  if (full.states.size() != net.size())
    throw ArgumentError("joint_probability: assignment size does not match network");
  for (VarId v = 0; v < net.size(); ++v)
    if (full[v] == kUnset) throw ArgumentError("joint_probability: variable " + net.variable(v).name + " unassigned");
  double p = 1.0;
  for (VarId v = 0; v < net.size(); ++v) {
    const auto& cpt = net.cpt(v);
    p *= cpt.at(cpt.config_index_from(full.states), full[v]);
    if (p == 0.0) return 0.0;
  }
  return p;
}

/// Throws ArgumentError unless every evidence entry names a variable and a valid state.
inline void check_evidence(const BayesianNetwork& net, const Evidence& evidence) {
  for (auto [v, s] : evidence) {
    if (v >= net.size()) throw ArgumentError("evidence: unknown variable id " + std::to_string(v));
    if (s >= net.cardinality(v))
      throw ArgumentError("evidence: state " + std::to_string(s) + " out of range for " + net.variable(v).name);
  }
}

}  // namespace bnis
