#pragma once

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cxlab/dyadic.hpp"
#include "cxlab/errors.hpp"
#include "cxlab/scalar.hpp"

namespace cxlab {

/// Finitely supported non-negative function on the nodes of a tree or bi-tree.
/// Absent nodes read as zero; storing zero erases the entry. Entries iterate
/// in the node order (breadth-first for trees), so every sum over the support
/// is evaluated in one fixed order.
template <class Node, Scalar S>
class SparseFn {
 public:
  using node_type = Node;
  using scalar_type = S;
  using Domain = domain_for_t<Node>;
  using const_iterator = typename std::map<Node, S>::const_iterator;

  explicit SparseFn(Domain domain) : domain_(domain) {}

  const Domain& domain() const noexcept { return domain_; }

  S operator()(const Node& a) const {
    auto it = entries_.find(a);
    return it == entries_.end() ? S(0) : it->second;
  }

  void set(const Node& a, S value) {
    if (!domain_.contains(a)) throw DomainError("node " + to_string(a) + " is outside the function's domain");
    if (is_negative(value)) throw std::invalid_argument("negative value at " + to_string(a));
    if (is_zero(value)) {
      entries_.erase(a);
    } else {
      entries_.insert_or_assign(a, std::move(value));
    }
  }

  void add(const Node& a, const S& value) { set(a, (*this)(a) + value); }

  bool in_support(const Node& a) const { return entries_.contains(a); }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const_iterator begin() const noexcept { return entries_.begin(); }
  const_iterator end() const noexcept { return entries_.end(); }

  std::vector<Node> support() const {
    std::vector<Node> out;
    out.reserve(entries_.size());
    for (const auto& [a, v] : entries_) out.push_back(a);
    return out;
  }

  S total() const {
    S sum(0);
    for (const auto& [a, v] : entries_) sum += v;
    return sum;
  }

  SparseFn scaled(const S& t) const {
    SparseFn out(domain_);
    for (const auto& [a, v] : entries_) out.set(a, v * t);
    return out;
  }

  friend bool operator==(const SparseFn&, const SparseFn&) = default;

 private:
  Domain domain_;
  std::map<Node, S> entries_;
};

template <Scalar S>
using TreeFn = SparseFn<NodeAddress, S>;
template <Scalar S>
using BiTreeFn = SparseFn<BiNode, S>;

}  // namespace cxlab
