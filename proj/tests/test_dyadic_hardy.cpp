#include <doctest.h>

#include <algorithm>

#include "cxlab/hardy.hpp"
#include "cxlab/random.hpp"

using namespace cxlab;

namespace {

// Oracle: I f(a) by testing every node of the domain for containment.
template <class Node, class Domain>
Rational brute_up(const SparseFn<Node, Rational>& f, const Node& a, const Domain& d) {
  Rational sum(0);
  for (const auto& b : d.all_nodes())
    if (contained_in(a, b)) sum += f(b);
  return sum;
}

template <class Node, class Domain>
Rational brute_down(const SparseFn<Node, Rational>& g, const Node& a, const Domain& d) {
  Rational sum(0);
  for (const auto& b : d.all_nodes())
    if (contained_in(b, a)) sum += g(b);
  return sum;
}

}  // namespace

TEST_CASE("node addresses: parse, prefixes, lcp") {
  const auto a = NodeAddress::parse("0110");
  CHECK(a.depth() == 4);
  CHECK(a.to_string() == "0110");
  CHECK(NodeAddress::parse("").is_root());
  CHECK(a.parent() == NodeAddress::parse("011"));
  CHECK(a.prefix(2) == NodeAddress::parse("01"));
  CHECK(NodeAddress::parse("01").is_prefix_of(a));
  CHECK_FALSE(NodeAddress::parse("00").is_prefix_of(a));
  CHECK(lcp_depth(a, NodeAddress::parse("0111")) == 3);
  CHECK(lcp_depth(a, NodeAddress::parse("1")) == 0);
  CHECK(NodeAddress::from_integer(6, 4) == a);
  CHECK(a.count_zeros() == 2);
  CHECK(NodeAddress::parse("0001").leading_zeros() == 3);
  CHECK(ancestors(a).size() == 5);
  CHECK_THROWS(NodeAddress::parse("012"));
}

TEST_CASE("long paths cross word boundaries") {
  const auto z = NodeAddress::repeat(false, 150);
  const auto w = z.child(true);
  CHECK(w.depth() == 151);
  CHECK(lcp_depth(z, w) == 150);
  CHECK(z.is_prefix_of(w));
  CHECK(w.parent() == z);
  CHECK(z.leading_zeros() == 150);
  CHECK(NodeAddress::parse(w.to_string()) == w);
}

TEST_CASE("breadth-first order: shallower first, then lexicographic") {
  const auto nodes = TreeDomain{3}.all_nodes();
  REQUIRE(nodes.size() == 7);
  std::vector<std::string> names;
  for (const auto& a : nodes) names.push_back(a.to_string());
  CHECK(names == std::vector<std::string>{"", "0", "1", "00", "01", "10", "11"});
  CHECK(std::is_sorted(nodes.begin(), nodes.end()));
}

TEST_CASE("bi-nodes: literal syntax and containment") {
  const auto a = BiNode::parse("x=01/y=1");
  CHECK(a.x == NodeAddress::parse("01"));
  CHECK(a.y == NodeAddress::parse("1"));
  CHECK(BiNode::parse(a.to_string()) == a);
  CHECK(contained_in(a, BiNode::parse("x=0/y=")));
  CHECK_FALSE(contained_in(BiNode::parse("x=0/y="), a));
  CHECK(ancestors(a).size() == 6);
  CHECK(common_ancestor_count(a, BiNode::parse("x=00/y=1")) == 4);
}

TEST_CASE("domain checks") {
  TreeFn<Rational> f(TreeDomain{3});
  CHECK_THROWS_AS(f.set(NodeAddress::parse("000"), Rational(1)), DomainError);
  CHECK_THROWS_AS(eval_hardy_up(f, NodeAddress::parse("0000")), DomainError);
  CHECK_THROWS_AS(children(NodeAddress::parse("0000"), TreeDomain{3}), DomainError);
  CHECK(children(NodeAddress::parse("00"), TreeDomain{3}).empty());
}

TEST_CASE("hardy examples") {
  const TreeDomain d{5};
  TreeFn<Rational> one(d);
  for (const auto& a : d.all_nodes()) one.set(a, Rational(1));
  CHECK(eval_hardy_down(one, NodeAddress{}) == 31);
  CHECK(eval_hardy_up(one, NodeAddress::parse("0101")) == 5);

  TreeFn<Rational> leaf(d);
  leaf.set(NodeAddress::parse("1111"), Rational(1));
  CHECK(eval_hardy_down(leaf, NodeAddress::parse("1111")) == 1);

  PointMeasure<Rational> root_atom;
  root_atom.add(BiNode{}, Rational(1));
  CHECK(potential(root_atom, BiNode::parse("x=0101/y=11")) == 1);

  PointMeasure<Rational> single;
  single.add(BiNode::parse("x=01/y=110"), Rational(3, 2));
  CHECK(energy(single) == Rational(9, 4) * 3 * 4);
}

TEST_CASE("tree operators agree with enumeration, and I* is the adjoint of I") {
  const TreeDomain d{8};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto f = random_sparse(d, rng, 1, 6);
    const auto g = random_sparse(d, rng, 1, 6);
    Rational lhs(0), rhs(0);
    for (const auto& a : d.all_nodes()) {
      const Rational up = eval_hardy_up(f, a);
      const Rational down = eval_hardy_down(g, a);
      REQUIRE(up == brute_up(f, a, d));
      REQUIRE(down == brute_down(g, a, d));
      lhs += up * g(a);
      rhs += f(a) * down;
    }
    CHECK(lhs == rhs);
  }
}

TEST_CASE("bi-tree operators agree with enumeration, and I* is the adjoint of I") {
  const BiTreeDomain d{3, 3};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto f = random_sparse(d, rng, 1, 3);
    const auto g = random_sparse(d, rng, 1, 3);
    Rational lhs(0), rhs(0);
    for (const auto& a : d.all_nodes()) {
      const Rational up = eval_hardy_up(f, a);
      const Rational down = eval_hardy_down(g, a);
      REQUIRE(up == brute_up(f, a, d));
      REQUIRE(down == brute_down(g, a, d));
      lhs += up * g(a);
      rhs += f(a) * down;
    }
    CHECK(lhs == rhs);
  }
}

TEST_CASE("monotonicity and linearity of I") {
  const TreeDomain d{7};
  Rng rng(3);
  const auto f = random_sparse(d, rng, 1, 3);
  const auto h = random_sparse(d, rng, 1, 3);
  TreeFn<Rational> sum(d);
  for (const auto& a : d.all_nodes()) sum.set(a, 2 * f(a) + h(a));
  for (const auto& a : d.all_nodes()) {
    if (!a.is_root()) CHECK(eval_hardy_up(f, a) >= eval_hardy_up(f, a.parent()));
    CHECK(eval_hardy_up(sum, a) == 2 * eval_hardy_up(f, a) + eval_hardy_up(h, a));
    CHECK(eval_hardy_down(sum, a) == 2 * eval_hardy_down(f, a) + eval_hardy_down(h, a));
  }
}

TEST_CASE("tree fields match pointwise evaluation") {
  const TreeDomain d{8};
  Rng rng(11);
  const auto g = random_sparse(d, rng, 1, 10);
  const auto closure = up_closure(g.support());
  const auto up = hardy_up_field(g, closure);
  const auto down = hardy_down_field(g);
  const auto pot = potential_field(g);
  for (const auto& a : closure) {
    CHECK(up.at(a) == eval_hardy_up(g, a));
    CHECK(down.at(a) == eval_hardy_down(g, a));
    Rational v(0);
    for (const auto& b : ancestors(a)) v += eval_hardy_down(g, b);
    CHECK(pot.at(a) == v);
  }
}

TEST_CASE("potential: lcp kernel equals rectangle enumeration") {
  const BiTreeDomain d{3, 3};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    PointMeasure<Rational> m;
    BiTreeFn<Rational> mass(d);
    const auto nodes = d.all_nodes();
    for (int i = 0; i < 4; ++i) {
      const auto& node = nodes[rng.below(nodes.size())];
      const Rational t = from_ratio<Rational>(rng.between(1, 5), 4);
      m.add(node, t);
      mass.add(node, t);
    }
    Rational e(0);
    for (const auto& atom : m.atoms()) e += atom.mass * potential(m, atom.node);
    CHECK(energy(m) == e);
    for (const auto& a : nodes) {
      Rational v(0);
      for (const auto& r : ancestors(a)) v += brute_down(mass, r, d);
      CHECK(potential(m, a) == v);
    }
  }
}

TEST_CASE("two atoms sharing only the root") {
  PointMeasure<Rational> m;
  m.add(BiNode::parse("x=0/y=0"), Rational(1));
  m.add(BiNode::parse("x=1/y=1"), Rational(1));
  CHECK(energy(m) == 2 * 1 + 4 + 4);
}
