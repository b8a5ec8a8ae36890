#pragma once

// Structural predicates on tree functions and the "special form" builder
// g(γ) = Σ_{β' ⊇ β} m(γ × β')^{q-1}.

#include <optional>

#include "cxlab/hardy.hpp"
#include "cxlab/sparse_fn.hpp"

namespace cxlab {

/// Hölder pair: q = p/(p-1).
struct ExponentPair {
  double p;
  double q;

  /// Throws ArgumentError unless p > 1.
  static ExponentPair from_p(double p);
};

struct PredicateResult {
  bool holds = true;
  std::optional<NodeAddress> witness;

  explicit operator bool() const noexcept { return holds; }
};

namespace detail {

template <Scalar S>
void require_same_domain(const TreeFn<S>& g, const TreeDomain& d) {
  if (!(g.domain() == d)) throw DomainError("function and tree domain disagree on the number of levels");
}

}  // namespace detail

/// g(β) >= Σ_{children} g for every inner β. Only support nodes and their
/// parents can fail. Witness: the first failing β in breadth-first order.
template <Scalar S>
PredicateResult is_superadditive(const TreeFn<S>& g, const TreeDomain& d) {
  detail::require_same_domain(g, d);
  std::map<NodeAddress, bool> candidates;
  for (const auto& [a, v] : g) {
    if (!d.is_leaf(a)) candidates.emplace(a, true);
    if (!a.is_root()) candidates.emplace(a.parent(), true);
  }
  for (const auto& [beta, unused] : candidates) {
    const S kids = g(beta.child(false)) + g(beta.child(true));
    if (!leq_tol(kids, g(beta))) return {false, beta};
  }
  return {};
}

template <Scalar S>
PredicateResult is_superadditive(const TreeFn<S>& g) {
  return is_superadditive(g, g.domain());
}

/// Non-decreasing toward the root: g(child) <= g(parent) everywhere.
/// Witness: the parent of the first offending child.
template <Scalar S>
PredicateResult is_increasing(const TreeFn<S>& g, const TreeDomain& d) {
  detail::require_same_domain(g, d);
  for (const auto& [a, v] : g) {
    if (a.is_root()) continue;
    const NodeAddress up = a.parent();
    if (!leq_tol(v, g(up))) return {false, up};
  }
  return {};
}

template <Scalar S>
PredicateResult is_increasing(const TreeFn<S>& g) {
  return is_increasing(g, g.domain());
}

/// g(γ) = Σ over β' containing `beta` of m(γ × β')^{q-1}, as a function on
/// the x-tree. Exact mode needs q-1 integral (p = 2).
template <Scalar S>
TreeFn<S> special_form_g(const BiTreeFn<S>& m, const NodeAddress& beta, const ExponentPair& pq) {
  TreeFn<S> g(TreeDomain{m.domain().x_levels});
  const double exponent = pq.q - 1.0;
  for (const auto& [node, value] : m) {
    if (node.y.is_prefix_of(beta)) g.add(node.x, power<S>(value, exponent));
  }
  return g;
}

/// Pointwise g^{p-1}.
template <Scalar S>
TreeFn<S> pointwise_power(const TreeFn<S>& g, double exponent) {
  TreeFn<S> out(g.domain());
  for (const auto& [a, v] : g) out.set(a, power<S>(v, exponent));
  return out;
}

/// is_superadditive applied to g^{p-1}.
template <Scalar S>
PredicateResult check_power_superadditive(const TreeFn<S>& g, const TreeDomain& d, double p) {
  if (!(p > 1)) throw ArgumentError("check_power_superadditive needs p > 1");
  return is_superadditive(pointwise_power(g, p - 1.0), d);
}

}  // namespace cxlab
