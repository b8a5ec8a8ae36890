#pragma once

// Hardy operator I (sum over ancestors, inclusive), its adjoint I* (sum over
// descendants, inclusive) and the potential V = I I* of atomic measures.

#include <map>
#include <stdexcept>
#include <vector>

#include "cxlab/dyadic.hpp"
#include "cxlab/errors.hpp"
#include "cxlab/sparse_fn.hpp"

namespace cxlab {

namespace detail {

template <class Node, class Domain>
void require_in_domain(const Domain& d, const Node& a) {
  if (!d.contains(a)) throw DomainError("node " + to_string(a) + " is outside the function's domain");
}

inline std::uint64_t ancestor_count(const NodeAddress& a) { return a.depth() + 1; }
inline std::uint64_t ancestor_count(const BiNode& a) {
  return static_cast<std::uint64_t>(a.x.depth() + 1) * (a.y.depth() + 1);
}

}  // namespace detail

/// If(a): sum of f over every node containing a.
template <class Node, Scalar S>
S eval_hardy_up(const SparseFn<Node, S>& f, const Node& a) {
  detail::require_in_domain(f.domain(), a);
  S sum(0);
  if (f.size() <= detail::ancestor_count(a)) {
    for (const auto& [b, v] : f) {
      if (contained_in(a, b)) sum += v;
    }
  } else {
    for (const auto& b : ancestors(a)) sum += f(b);
  }
  return sum;
}

/// I*g(a): sum of g over every node contained in a. Scans the support.
template <class Node, Scalar S>
S eval_hardy_down(const SparseFn<Node, S>& g, const Node& a) {
  detail::require_in_domain(g.domain(), a);
  S sum(0);
  for (const auto& [b, v] : g) {
    if (contained_in(b, a)) sum += v;
  }
  return sum;
}

/// Values of a function on an ancestor-closed node set, keyed by node.
template <Scalar S>
using TreeField = std::map<NodeAddress, S>;

/// Every ancestor (inclusive) of every node in `seeds`, breadth-first.
template <class Range>
std::vector<NodeAddress> up_closure(const Range& seeds) {
  std::map<NodeAddress, bool> seen;
  for (const NodeAddress& a : seeds) {
    NodeAddress cur = a;
    while (seen.emplace(cur, true).second && !cur.is_root()) cur = cur.parent();
  }
  std::vector<NodeAddress> out;
  out.reserve(seen.size());
  for (const auto& [a, unused] : seen) out.push_back(a);
  return out;
}

/// If on every node of `closure` (which must be ancestor-closed and sorted
/// breadth-first, e.g. the output of up_closure).
template <Scalar S>
TreeField<S> hardy_up_field(const TreeFn<S>& f, const std::vector<NodeAddress>& closure) {
  TreeField<S> out;
  for (const auto& a : closure) {
    S v = f(a);
    if (!a.is_root()) {
      auto it = out.find(a.parent());
      if (it == out.end()) throw std::logic_error("hardy_up_field: node set is not ancestor-closed");
      v += it->second;
    }
    out.emplace_hint(out.end(), a, std::move(v));
  }
  return out;
}

/// I*g on the up-closure of supp g. I*g vanishes off that set.
template <Scalar S>
TreeField<S> hardy_down_field(const TreeFn<S>& g) {
  const auto closure = up_closure(g.support());
  TreeField<S> out;
  for (const auto& a : closure) out.emplace_hint(out.end(), a, g(a));
  for (auto it = closure.rbegin(); it != closure.rend(); ++it) {
    if (it->is_root()) continue;
    out[it->parent()] += out[*it];
  }
  return out;
}

/// I I* g on the up-closure of supp g. Off that set the value equals the
/// value at the deepest ancestor inside it.
template <Scalar S>
TreeField<S> potential_field(const TreeFn<S>& g) {
  const auto down = hardy_down_field(g);
  TreeField<S> out;
  for (const auto& [a, v] : down) {
    S value = v;
    if (!a.is_root()) value += out.at(a.parent());
    out.emplace_hint(out.end(), a, std::move(value));
  }
  return out;
}

/// Finite atomic measure on a bi-tree.
template <Scalar S>
class PointMeasure {
 public:
  struct Atom {
    BiNode node;
    S mass;
  };

  PointMeasure() = default;

  void add(BiNode node, S mass) {
    if (!(mass > 0)) throw std::invalid_argument("atom masses must be positive");
    atoms_.push_back({std::move(node), std::move(mass)});
  }

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }

  S total() const {
    S sum(0);
    for (const auto& atom : atoms_) sum += atom.mass;
    return sum;
  }

 private:
  std::vector<Atom> atoms_;
};

/// V^m(a) = sum over atoms of mass * (number of rectangles containing both a
/// and the atom).
template <Scalar S>
S potential(const PointMeasure<S>& m, const BiNode& a) {
  S sum(0);
  for (const auto& atom : m.atoms()) {
    sum += atom.mass * S(static_cast<unsigned long>(common_ancestor_count(a, atom.node)));
  }
  return sum;
}

/// E(m) = sum_a mass_a * V^m(atom_a).
template <Scalar S>
S energy(const PointMeasure<S>& m) {
  S sum(0);
  for (const auto& atom : m.atoms()) sum += atom.mass * potential(m, atom.node);
  return sum;
}

}  // namespace cxlab
