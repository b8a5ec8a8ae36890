#include "cxlab/dyadic.hpp"

#include <algorithm>
#include <bit>

#include "cxlab/errors.hpp"

namespace cxlab {

NodeAddress NodeAddress::parse(std::string_view bits) {
  NodeAddress a;
  for (char c : bits) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("node path must be a bit string, got '" + std::string(bits) + "'");
    }
    a.push_back(c == '1');
  }
  return a;
}

NodeAddress NodeAddress::from_integer(std::uint64_t value, std::size_t width) {
  NodeAddress a;
  for (std::size_t i = width; i-- > 0;) a.push_back(i < 64 && ((value >> i) & 1u));
  return a;
}

NodeAddress NodeAddress::repeat(bool bit, std::size_t count) {
  NodeAddress a;
  a.words_.assign((count + 63) / 64, bit ? ~std::uint64_t{0} : 0);
  a.depth_ = count;
  if (bit && count % 64 != 0) a.words_.back() &= (std::uint64_t{1} << (count % 64)) - 1;
  return a;
}

void NodeAddress::push_back(bool bit) {
  if (depth_ % 64 == 0) words_.push_back(0);
  if (bit) words_.back() |= std::uint64_t{1} << (depth_ % 64);
  ++depth_;
}

NodeAddress NodeAddress::child(bool bit) const {
  NodeAddress c = *this;
  c.push_back(bit);
  return c;
}

NodeAddress NodeAddress::parent() const {
  if (is_root()) throw DomainError("the root has no parent");
  return prefix(depth_ - 1);
}

NodeAddress NodeAddress::prefix(std::size_t length) const {
  if (length > depth_) throw DomainError("prefix longer than path");
  NodeAddress p;
  p.depth_ = length;
  p.words_.assign(words_.begin(), words_.begin() + static_cast<std::ptrdiff_t>((length + 63) / 64));
  if (length % 64 != 0) p.words_.back() &= (std::uint64_t{1} << (length % 64)) - 1;
  return p;
}

NodeAddress NodeAddress::append(const NodeAddress& tail) const {
  NodeAddress a = *this;
  a.words_.reserve((depth_ + tail.depth_ + 63) / 64);
  for (std::size_t i = 0; i < tail.depth_; ++i) a.push_back(tail.bit(i));
  return a;
}

bool NodeAddress::is_prefix_of(const NodeAddress& other) const noexcept {
  return depth_ <= other.depth_ && lcp_depth(*this, other) == depth_;
}

std::size_t NodeAddress::count_zeros() const noexcept {
  std::size_t ones = 0;
  for (auto w : words_) ones += static_cast<std::size_t>(std::popcount(w));
  return depth_ - ones;
}

std::size_t NodeAddress::leading_zeros() const noexcept {
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if (words_[w] != 0) {
      return std::min(depth_, w * 64 + static_cast<std::size_t>(std::countr_zero(words_[w])));
    }
  }
  return depth_;
}

std::string NodeAddress::to_string() const {
  std::string s(depth_, '0');
  for (std::size_t i = 0; i < depth_; ++i) {
    if (bit(i)) s[i] = '1';
  }
  return s;
}

std::size_t NodeAddress::hash() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull ^ depth_;
  for (auto w : words_) {
    h ^= w;
    h *= 0x100000001b3ull;
    h ^= h >> 29;
  }
  return static_cast<std::size_t>(h);
}

std::strong_ordering operator<=>(const NodeAddress& a, const NodeAddress& b) noexcept {
  if (auto c = a.depth_ <=> b.depth_; c != 0) return c;
  for (std::size_t w = 0; w < a.words_.size(); ++w) {
    const std::uint64_t diff = a.words_[w] ^ b.words_[w];
    if (diff != 0) {
      const int i = std::countr_zero(diff);
      return ((a.words_[w] >> i) & 1u) ? std::strong_ordering::greater : std::strong_ordering::less;
    }
  }
  return std::strong_ordering::equal;
}

std::size_t lcp_depth(const NodeAddress& a, const NodeAddress& b) noexcept {
  const std::size_t limit = std::min(a.depth_, b.depth_);
  const std::size_t words = (limit + 63) / 64;
  for (std::size_t w = 0; w < words; ++w) {
    const std::uint64_t diff = a.words_[w] ^ b.words_[w];
    if (diff != 0) {
      return std::min(limit, w * 64 + static_cast<std::size_t>(std::countr_zero(diff)));
    }
  }
  return limit;
}

std::vector<NodeAddress> ancestors(const NodeAddress& a) {
  std::vector<NodeAddress> out;
  out.reserve(a.depth() + 1);
  for (std::size_t len = 0; len <= a.depth(); ++len) out.push_back(a.prefix(len));
  return out;
}

std::uint64_t TreeDomain::node_count() const {
  if (levels >= 64) throw DomainError("tree with " + std::to_string(levels) + " levels is too large to count");
  return (std::uint64_t{1} << levels) - 1;
}

std::vector<NodeAddress> TreeDomain::all_nodes() const {
  std::vector<NodeAddress> out;
  out.reserve(static_cast<std::size_t>(node_count()));
  out.emplace_back();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].depth() + 1 < levels) {
      out.push_back(out[i].child(false));
      out.push_back(out[i].child(true));
    }
  }
  return out;
}

std::vector<NodeAddress> children(const NodeAddress& a, const TreeDomain& d) {
  if (!d.contains(a)) {
    throw DomainError("node '" + a.to_string() + "' is deeper than a " + std::to_string(d.levels) +
                      "-level tree");
  }
  if (d.is_leaf(a)) return {};
  return {a.child(false), a.child(true)};
}

BiNode BiNode::parse(std::string_view literal) {
  const auto slash = literal.find('/');
  if (slash == std::string_view::npos || literal.substr(0, 2) != "x=" ||
      literal.substr(slash + 1, 2) != "y=") {
    throw std::invalid_argument("bi-node literal must look like x=0110/y=01, got '" +
                                std::string(literal) + "'");
  }
  return {NodeAddress::parse(literal.substr(2, slash - 2)), NodeAddress::parse(literal.substr(slash + 3))};
}

std::string BiNode::to_string() const { return "x=" + x.to_string() + "/y=" + y.to_string(); }

std::vector<BiNode> ancestors(const BiNode& a) {
  std::vector<BiNode> out;
  const auto xs = ancestors(a.x);
  const auto ys = ancestors(a.y);
  out.reserve(xs.size() * ys.size());
  for (const auto& x : xs) {
    for (const auto& y : ys) out.push_back({x, y});
  }
  return out;
}

std::vector<BiNode> BiTreeDomain::all_nodes() const {
  const auto xs = TreeDomain{x_levels}.all_nodes();
  const auto ys = TreeDomain{y_levels}.all_nodes();
  std::vector<BiNode> out;
  out.reserve(xs.size() * ys.size());
  for (const auto& x : xs) {
    for (const auto& y : ys) out.push_back({x, y});
  }
  return out;
}

}  // namespace cxlab
