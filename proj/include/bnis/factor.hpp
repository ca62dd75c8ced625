#pragma once

#include <bnis/model.hpp>

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

namespace bnis {

/// Nonnegative table over an ordered variable scope, row-major (last variable fastest).
class Factor {
 public:
  /// Scalar factor with value 1.
  Factor() : values_{1.0} {}

  Factor(std::vector<VarId> scope, std::vector<std::size_t> cards, std::vector<double> values)
      : scope_(std::move(scope)), cards_(std::move(cards)), values_(std::move(values)) {
    if (scope_.size() != cards_.size()) throw ArgumentError("factor: scope and cardinalities differ in length");
    if (values_.size() != configuration_count(cards_))
      throw ArgumentError("factor: expected " + std::to_string(configuration_count(cards_)) + " values");
  }

  /// CPT viewed as a factor over (parents..., child).
  static Factor from_cpt(const Cpt& cpt) {
    auto scope = cpt.parents();
    scope.push_back(cpt.child());
    auto cards = cpt.parent_cardinalities();
    cards.push_back(cpt.child_cardinality());
    return Factor(std::move(scope), std::move(cards), cpt.table());
  }

  const std::vector<VarId>& scope() const noexcept { return scope_; }
  const std::vector<std::size_t>& cardinalities() const noexcept { return cards_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool is_scalar() const noexcept { return scope_.empty(); }

  bool contains(VarId v) const { return std::find(scope_.begin(), scope_.end(), v) != scope_.end(); }

  std::size_t position(VarId v) const {
    auto it = std::find(scope_.begin(), scope_.end(), v);
    if (it == scope_.end()) throw ArgumentError("factor: variable " + std::to_string(v) + " not in scope");
    return static_cast<std::size_t>(it - scope_.begin());
  }

  double total() const {
    double s = 0.0;
    for (double x : values_) s += x;
    return s;
  }

  /// Value at one state per scope variable.
  double at(std::span<const StateIndex> states) const {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < scope_.size(); ++k) idx = idx * cards_[k] + states[k];
    return values_[idx];
  }

  /// Drops observed variables from the scope, keeping the slice consistent with `evidence`.
  Factor reduce(const Evidence& evidence) const {
    std::vector<VarId> scope;
    std::vector<std::size_t> cards;
    for (std::size_t k = 0; k < scope_.size(); ++k)
      if (!evidence.contains(scope_[k])) {
        scope.push_back(scope_[k]);
        cards.push_back(cards_[k]);
      }
    if (scope.size() == scope_.size()) return *this;
    std::vector<double> values(configuration_count(cards));
    std::vector<StateIndex> full(scope_.size(), 0);
    std::vector<StateIndex> sub(scope.size(), 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::size_t rem = i;
      for (std::size_t k = scope.size(); k-- > 0;) {
        sub[k] = rem % cards[k];
        rem /= cards[k];
      }
      for (std::size_t k = 0, j = 0; k < scope_.size(); ++k) {
        auto it = evidence.find(scope_[k]);
        full[k] = it != evidence.end() ? it->second : sub[j++];
      }
      values[i] = at(full);
    }
    return Factor(std::move(scope), std::move(cards), std::move(values));
  }

  /// Sums a variable out of the scope.
  Factor sum_out(VarId v) const {
    const auto pos = position(v);
    std::vector<VarId> scope = scope_;
    std::vector<std::size_t> cards = cards_;
    scope.erase(scope.begin() + static_cast<std::ptrdiff_t>(pos));
    cards.erase(cards.begin() + static_cast<std::ptrdiff_t>(pos));
    std::size_t inner = 1;
    for (std::size_t k = pos + 1; k < cards_.size(); ++k) inner *= cards_[k];
    const std::size_t card = cards_[pos];
    const std::size_t outer = values_.size() / (inner * card);
    std::vector<double> values(outer * inner, 0.0);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t s = 0; s < card; ++s)
        for (std::size_t i = 0; i < inner; ++i) values[o * inner + i] += values_[(o * card + s) * inner + i];
    return Factor(std::move(scope), std::move(cards), std::move(values));
  }

  /// Same table with the scope permuted to `order` (which must be a permutation of scope()).
  Factor reordered(const std::vector<VarId>& order) const {
    if (order.size() != scope_.size()) throw ArgumentError("factor: reorder scope mismatch");
    std::vector<std::size_t> perm(order.size());
    std::vector<std::size_t> cards(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
      perm[k] = position(order[k]);
      cards[k] = cards_[perm[k]];
    }
    std::vector<double> values(values_.size());
    std::vector<StateIndex> src(scope_.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::size_t rem = i;
      for (std::size_t k = order.size(); k-- > 0;) {
        src[perm[k]] = rem % cards[k];
        rem /= cards[k];
      }
      values[i] = at(src);
    }
    return Factor(order, std::move(cards), std::move(values));
  }

  Factor normalized() const {
    Factor out = *this;
    const double z = total();
    if (z > 0.0)
      for (double& x : out.values_) x /= z;
    return out;
  }

 private:
  std::vector<VarId> scope_;
  std::vector<std::size_t> cards_;
  std::vector<double> values_;
};

/// Cell count of the product of two factors.
inline std::size_t product_size(const Factor& a, const Factor& b) {
  std::size_t n = a.size();
  for (std::size_t k = 0; k < b.scope().size(); ++k)
    if (!a.contains(b.scope()[k])) n *= b.cardinalities()[k];
  return n;
}

/// Pointwise product; the result scope is a's scope followed by b's new variables.
inline Factor multiply(const Factor& a, const Factor& b) {
  std::vector<VarId> scope = a.scope();
  std::vector<std::size_t> cards = a.cardinalities();
  for (std::size_t k = 0; k < b.scope().size(); ++k)
    if (!a.contains(b.scope()[k])) {
      scope.push_back(b.scope()[k]);
      cards.push_back(b.cardinalities()[k]);
    }
  const std::size_t r = scope.size();
  // Stride of every result variable inside each operand (0 when absent).
  std::vector<std::size_t> stride_a(r, 0), stride_b(r, 0);
  auto strides = [&](const Factor& f, std::vector<std::size_t>& out) {
    std::size_t s = 1;
    for (std::size_t k = f.scope().size(); k-- > 0;) {
      auto pos = static_cast<std::size_t>(std::find(scope.begin(), scope.end(), f.scope()[k]) - scope.begin());
      out[pos] = s;
      s *= f.cardinalities()[k];
    }
  };
  strides(a, stride_a);
  strides(b, stride_b);

  std::vector<double> values(configuration_count(cards));
  std::vector<StateIndex> counter(r, 0);
  std::size_t ia = 0, ib = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = a.values()[ia] * b.values()[ib];
    for (std::size_t k = r; k-- > 0;) {
      if (++counter[k] < cards[k]) {
        ia += stride_a[k];
        ib += stride_b[k];
        break;
      }
      ia -= stride_a[k] * (cards[k] - 1);
      ib -= stride_b[k] * (cards[k] - 1);
      counter[k] = 0;
    }
  }
  return Factor(std::move(scope), std::move(cards), std::move(values));
}

}  // namespace bnis
