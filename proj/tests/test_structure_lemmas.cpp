#include <doctest.h>

#include <cmath>

#include "cxlab/cex.hpp"
#include "cxlab/lemmas.hpp"
#include "cxlab/random.hpp"

using namespace cxlab;

namespace {

TreeFn<Rational> unit_at_root(const TreeDomain& d) {
  TreeFn<Rational> f(d);
  f.set(NodeAddress{}, Rational(1));
  return f;
}

Rational halving_sum_squares(unsigned N) {
  // 4((5/4)^N - 1)
  return 4 * (pow_int(Rational(5, 4), N) - 1);
}

template <Scalar S>
TreeFn<S> scaled(const TreeFn<S>& f, const S& t) {
  return f.scaled(t);
}

}  // namespace

TEST_CASE("exponent pairs") {
  const auto pq = ExponentPair::from_p(4);
  CHECK(pq.q == doctest::Approx(4.0 / 3.0));
  CHECK((pq.p - 1) * (pq.q - 1) == doctest::Approx(1.0));
  CHECK_THROWS_AS(ExponentPair::from_p(1), ArgumentError);
}

TEST_CASE("superadditivity and monotonicity examples") {
  const TreeDomain d{6};
  CHECK(is_superadditive(unit_at_root(d)));

  const auto halving = materialize_halving_tree<Rational>(6);
  const auto sup = is_superadditive(halving);
  CHECK_FALSE(sup.holds);
  REQUIRE(sup.witness);
  CHECK(sup.witness->is_root());
  CHECK(is_increasing(halving));

  const auto diag = gen_cex_p_less_2(3, 1.5);
  CHECK(is_superadditive(diag.g));

  TreeFn<Rational> up(d);
  up.set(NodeAddress::parse("0"), Rational(1));
  CHECK_FALSE(is_increasing(up));

  TreeFn<Rational> one(d);
  for (const auto& a : d.all_nodes()) one.set(a, Rational(1));
  CHECK_FALSE(check_power_superadditive(convert<double>(one), d, 2.5));
  CHECK_FALSE(check_power_superadditive(halving, d, 2));
  CHECK_THROWS_AS(is_superadditive(one, TreeDomain{5}), DomainError);
}

TEST_CASE("superadditive g supported on a single path is increasing") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const TreeDomain d{8};
    TreeFn<Rational> g(d);
    NodeAddress a;
    Rational v(static_cast<long>(rng.between(1, 8)));
    while (true) {
      g.set(a, v);
      if (d.is_leaf(a)) break;
      a = a.child(rng.chance(1, 2));
      v = v * from_ratio<Rational>(rng.between(0, 8), 8);
      if (v == 0) break;
    }
    REQUIRE(is_superadditive(g));
    CHECK(is_increasing(g));
  }
}

TEST_CASE("special form examples") {
  const BiTreeDomain d{4, 4};
  const auto pq = ExponentPair::from_p(2);
  BiTreeFn<Rational> m(d);
  m.set(BiNode::parse("x=01/y=1"), Rational(3));
  auto g = special_form_g(m, NodeAddress::parse("10"), pq);
  CHECK(g.size() == 1);
  CHECK(g(NodeAddress::parse("01")) == 3);
  g = special_form_g(m, NodeAddress::parse("01"), pq);
  CHECK(g.empty());

  // p = 2: g(γ) is I_y of m(γ × ·) at beta.
  Rng rng(5);
  const auto mm = random_rectangle_measure(d, 4, rng);
  const NodeAddress beta = NodeAddress::parse("011");
  const auto gg = special_form_g(mm, beta, pq);
  for (const auto& x : TreeDomain{4}.all_nodes()) {
    Rational v(0);
    for (const auto& y : ancestors(beta)) v += mm(BiNode{x, y});
    CHECK(gg(x) == v);
  }
}

TEST_CASE("special form: g^{p-1} is superadditive") {
  const double ps[] = {2, 2.5, 3, 4};
  std::size_t checked = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    Rng rng(mix_seed(77, i));
    const BiTreeDomain d{static_cast<std::size_t>(rng.between(1, 5)), static_cast<std::size_t>(rng.between(1, 5))};
    const auto m = random_rectangle_measure(d, static_cast<std::size_t>(rng.between(1, 6)), rng);
    const auto beta = random_node(TreeDomain{d.y_levels}, rng);
    const TreeDomain dx{d.x_levels};
    for (double p : ps) {
      const auto pq = ExponentPair::from_p(p);
      if (p == 2) {
        const auto g = special_form_g(m, beta, pq);
        REQUIRE(check_power_superadditive(g, dx, p));
      } else {
        const auto g = special_form_g(convert<double>(m), beta, pq);
        REQUIRE(check_power_superadditive(g, dx, p));
      }
      ++checked;
    }
  }
  CHECK(checked == 4000);
}

TEST_CASE("l1linf examples") {
  const TreeDomain d{4};
  const auto r = verify_supadditive_l1linf(unit_at_root(d), unit_at_root(d), NodeAddress{}, d);
  CHECK(r.lhs == 1);
  CHECK(r.rhs == 1);
  CHECK(r.holds);

  // 4((5/4)^N - 1) > N from N = 2 on.
  for (unsigned N : {1u, 2u, 3u, 8u, 10u}) {
    const auto g = materialize_halving_tree<Rational>(N);
    const auto rep = verify_supadditive_l1linf(g, g, NodeAddress{}, g.domain());
    CHECK(rep.lhs == halving_sum_squares(N));
    CHECK(rep.rhs == N);
    CHECK(rep.holds == (N < 2));
  }
}

TEST_CASE("I2-positive: examples and the refined supremum") {
  const TreeDomain d{4};
  auto r = verify_I2_positive(unit_at_root(d), unit_at_root(d));
  CHECK(r.lhs == 1);
  CHECK(r.rhs == 1);
  CHECK(r.holds);

  // g at a leaf, f at the root: supp f ∩ supp g is empty, so the supremum
  // has to run over ancestors of supp g.
  TreeFn<Rational> g(d);
  g.set(NodeAddress::parse("010"), Rational(1));
  r = verify_I2_positive(unit_at_root(d), g);
  CHECK(r.lhs == 1);
  CHECK(r.rhs == 1);
  CHECK(r.holds);

  const BiTreeDomain bd{4, 4};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto f = random_sparse(bd, rng, 1, 4);
    const auto gg = random_sparse(bd, rng, 1, 4);
    CHECK(verify_I2_positive(f, gg).holds);
  }
}

TEST_CASE("phi: empty f and indicator") {
  const TreeDomain d{5};
  TreeFn<Rational> w(d);
  for (const auto& a : d.all_nodes()) w.set(a, Rational(1));
  Rng rng(9);
  const auto g = random_superadditive(d, rng);
  const TreeFn<Rational> f(d);
  const auto out = build_phi(w, g, f, Rational(4), Rational(1), d);
  CHECK(out.phi.empty());
  CHECK(out.report.holds);

  // φ vanishes wherever I(wg) <= δ.
  TreeFn<Rational> f2(d);
  f2.set(NodeAddress{}, Rational(1));
  const Rational delta = eval_hardy_up(g, NodeAddress{});
  if (delta > 0) {
    const auto o2 = build_phi(w, g, f2, Rational(4 * delta), delta, d);
    for (const auto& [a, v] : o2.phi) CHECK(eval_hardy_up(g, a) > delta);
    CHECK(o2.report.holds);
  }
  CHECK_THROWS_AS(build_phi(w, g, f, Rational(1), Rational(1), d), PreconditionError);
}

TEST_CASE("inter, linf, new23, gest at the root") {
  const TreeDomain d{4};
  const auto u = unit_at_root(d);
  for (double p : {1.0, 2.0, 3.0}) {
    const auto r = verify_inter(u, u, p, d);
    CHECK(r.lhs == 1);
    CHECK(r.rhs == 1);
    REQUIRE(r.ratio);
    CHECK(*r.ratio == 1);
    CHECK(verify_new23(u, u, p, d).holds);
    CHECK(verify_gest(u, NodeAddress{}, p + 1, d).holds);
  }
  const auto l = verify_linf(u, u, d);
  CHECK(l.lhs == 1);
  CHECK(l.rhs == 1);
  const TreeFn<Rational> zero(d);
  CHECK(verify_inter(zero, u, 2, d).degenerate);
}

TEST_CASE("linf on the halving tree with f on the rightmost path") {
  const auto g = materialize_halving_tree<Rational>(8);
  TreeFn<Rational> f(g.domain());
  for (const auto& a : ancestors(NodeAddress::repeat(true, 7))) f.set(a, Rational(1));
  const auto r = verify_linf(f, g, g.domain());
  CHECK(r.holds);
  CHECK(r.lhs < r.rhs);
}

TEST_CASE("gest on the halving tree") {
  const auto g = materialize_halving_tree<Rational>(20);
  const auto r = evaluate_gest(g, NodeAddress{}, 2, g.domain());
  CHECK(r.lhs == halving_sum_squares(20));
  CHECK(r.rhs == 20);
  CHECK_FALSE(r.holds);
  CHECK_THROWS_AS(verify_gest(g, NodeAddress{}, 2, g.domain()), PreconditionError);
}

TEST_CASE("gest holds for special-form g") {
  for (unsigned p : {2u, 3u, 4u}) {
    for (std::uint64_t i = 0; i < 200; ++i) {
      Rng rng(mix_seed(p, i));
      const BiTreeDomain d{5, 4};
      const auto m = random_rectangle_measure(d, 5, rng);
      const auto beta = random_node(TreeDomain{4}, rng);
      const auto pq = ExponentPair::from_p(p);
      const TreeDomain dx{5};
      if (p == 2) {
        const auto g = special_form_g(m, beta, pq);
        if (g.empty()) continue;
        const auto gamma = g.support()[rng.below(g.size())];
        REQUIRE(verify_gest(g, gamma, p, dx).holds);
      } else {
        const auto g = special_form_g(convert<double>(m), beta, pq);
        if (g.empty()) continue;
        const auto gamma = g.support()[rng.below(g.size())];
        REQUIRE(verify_gest(g, gamma, p, dx).holds);
      }
    }
  }
}

TEST_CASE("scaling f leaves holds unchanged") {
  const TreeDomain d{7};
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    const auto g = random_increasing(d, rng);
    const auto f = random_sparse(d, rng, 1, 4);
    if (f.empty()) continue;
    for (const Rational t : {Rational(1, 3), Rational(7)}) {
      const auto ft = scaled(f, t);
      const auto i1 = verify_inter(f, g, 2, d);
      const auto i2 = verify_inter(ft, g, 2, d);
      CHECK(i2.lhs == t * t * i1.lhs);
      CHECK(i2.rhs == t * t * i1.rhs);
      CHECK(i2.holds == i1.holds);

      const auto l1 = verify_linf(f, g, d);
      const auto l2 = verify_linf(ft, g, d);
      CHECK(l2.lhs == t * l1.lhs);
      CHECK(l2.rhs == t * l1.rhs);
      CHECK(l2.holds == l1.holds);

      const auto n1 = verify_new23(f, g, 3, d);
      const auto n2 = verify_new23(ft, g, 3, d);
      CHECK(n2.lhs == t * t * t * n1.lhs);
      CHECK(n2.rhs == t * t * t * n1.rhs);
      CHECK(n2.holds == n1.holds);
    }
  }
}

TEST_CASE("reports are reproducible and ratio * rhs = lhs") {
  const TreeDomain d{8};
  Rng a(42), b(42);
  const auto g1 = random_superadditive(d, a);
  const auto g2 = random_superadditive(d, b);
  CHECK(g1 == g2);
  const auto f = random_sparse(d, a, 1, 3);
  const auto r = verify_inter(f, g1, 2, d);
  CHECK(to_json(r).dump() == to_json(verify_inter(f, g2, 2, d)).dump());
  if (r.ratio) CHECK(*r.ratio * r.rhs == r.lhs);
}
