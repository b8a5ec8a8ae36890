#pragma once

// Node addressing for dyadic trees and bi-trees.
//
// A tree node is the bit path from the root (bit 0 = left/minus child,
// bit 1 = right/plus child). Paths have arbitrary length. A bi-tree node is a
// pair of paths; a <= b means the rectangle a is contained in b, i.e. both of
// b's paths are prefixes of a's.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace cxlab {

class NodeAddress {
 public:
  NodeAddress() = default;  // the root

  /// From a bit string such as "0110"; "" is the root.
  static NodeAddress parse(std::string_view bits);
  /// `width` bits holding `value`, most significant bit first.
  static NodeAddress from_integer(std::uint64_t value, std::size_t width);
  static NodeAddress repeat(bool bit, std::size_t count);

  std::size_t depth() const noexcept { return depth_; }
  bool is_root() const noexcept { return depth_ == 0; }
  bool bit(std::size_t i) const noexcept { return (words_[i / 64] >> (i % 64)) & 1u; }

  NodeAddress child(bool bit) const;
  /// Precondition: not the root.
  NodeAddress parent() const;
  NodeAddress prefix(std::size_t length) const;
  NodeAddress append(const NodeAddress& tail) const;

  /// True when this path is a prefix of `other` (ancestor-or-self in the tree).
  bool is_prefix_of(const NodeAddress& other) const noexcept;

  std::size_t count_zeros() const noexcept;
  /// Length of the initial run of 0 bits.
  std::size_t leading_zeros() const noexcept;

  std::string to_string() const;
  std::size_t hash() const noexcept;

  friend bool operator==(const NodeAddress&, const NodeAddress&) = default;
  /// Breadth-first order: shallower first, then lexicographic by path.
  friend std::strong_ordering operator<=>(const NodeAddress& a, const NodeAddress& b) noexcept;

 private:
  void push_back(bool bit);

  std::vector<std::uint64_t> words_;  // bit i at words_[i/64], position i%64; unused bits zero
  std::size_t depth_ = 0;

  friend std::size_t lcp_depth(const NodeAddress&, const NodeAddress&) noexcept;
};

/// Length of the longest common prefix = depth of the deepest common ancestor.
std::size_t lcp_depth(const NodeAddress& a, const NodeAddress& b) noexcept;

/// All prefixes of `a`, root first; size depth+1.
std::vector<NodeAddress> ancestors(const NodeAddress& a);

/// Full binary tree with nodes at depths 0..levels-1.
struct TreeDomain {
  std::size_t levels = 1;

  bool contains(const NodeAddress& a) const noexcept { return a.depth() < levels; }
  bool is_leaf(const NodeAddress& a) const noexcept { return a.depth() + 1 == levels; }
  /// 2^levels - 1; throws DomainError when that overflows 64 bits.
  std::uint64_t node_count() const;
  /// Every node in breadth-first order. Intended for small domains.
  std::vector<NodeAddress> all_nodes() const;

  friend bool operator==(const TreeDomain&, const TreeDomain&) = default;
};

/// {a0, a1} for an inner node, {} for a leaf. Throws DomainError when `a`
/// is deeper than the domain.
std::vector<NodeAddress> children(const NodeAddress& a, const TreeDomain& d);

struct BiNode {
  NodeAddress x;
  NodeAddress y;

  /// Literal syntax "x=0110/y=01".
  static BiNode parse(std::string_view literal);
  std::string to_string() const;

  friend bool operator==(const BiNode&, const BiNode&) = default;
  friend std::strong_ordering operator<=>(const BiNode&, const BiNode&) = default;
};

/// Bi-tree order: a <= b iff rectangle a is contained in rectangle b.
inline bool contained_in(const BiNode& a, const BiNode& b) noexcept {
  return b.x.is_prefix_of(a.x) && b.y.is_prefix_of(a.y);
}

/// Tree order: a <= b iff b is an ancestor-or-self of a.
inline bool contained_in(const NodeAddress& a, const NodeAddress& b) noexcept {
  return b.is_prefix_of(a);
}

/// Number of common ancestors in the product order: (lcp_x+1)(lcp_y+1).
inline std::uint64_t common_ancestor_count(const BiNode& a, const BiNode& b) noexcept {
  return static_cast<std::uint64_t>(lcp_depth(a.x, b.x) + 1) * (lcp_depth(a.y, b.y) + 1);
}

/// All rectangles containing `a`, ordered by (x-depth, y-depth).
std::vector<BiNode> ancestors(const BiNode& a);

struct BiTreeDomain {
  std::size_t x_levels = 1;
  std::size_t y_levels = 1;

  bool contains(const BiNode& a) const noexcept {
    return a.x.depth() < x_levels && a.y.depth() < y_levels;
  }
  std::vector<BiNode> all_nodes() const;

  friend bool operator==(const BiTreeDomain&, const BiTreeDomain&) = default;
};

template <class Node>
struct domain_for;
template <>
struct domain_for<NodeAddress> {
  using type = TreeDomain;
};
template <>
struct domain_for<BiNode> {
  using type = BiTreeDomain;
};
template <class Node>
using domain_for_t = typename domain_for<Node>::type;

inline std::string to_string(const NodeAddress& a) { return a.to_string(); }
inline std::string to_string(const BiNode& a) { return a.to_string(); }

}  // namespace cxlab

template <>
struct std::hash<cxlab::NodeAddress> {
  std::size_t operator()(const cxlab::NodeAddress& a) const noexcept { return a.hash(); }
};

template <>
struct std::hash<cxlab::BiNode> {
  std::size_t operator()(const cxlab::BiNode& a) const noexcept {
    return a.x.hash() * 0x9e3779b97f4a7c15ull ^ a.y.hash();
  }
};
