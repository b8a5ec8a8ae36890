#include "cxlab/random.hpp"

#include "cxlab/hardy.hpp"

namespace cxlab {

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection keeps the draw unbiased and independent of the standard
  // library's distribution implementation.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % n;
}

std::int64_t Rng::between(std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
}

namespace {

Rational eighths(std::int64_t k) { return from_ratio<Rational>(k, 8); }

template <class ShareFn>
TreeFn<Rational> grow_top_down(const TreeDomain& d, Rng& rng, ShareFn shares) {
  TreeFn<Rational> g(d);
  const std::int64_t num = rng.between(1, 8);
  const std::int64_t den = rng.between(1, 4);
  g.set(NodeAddress{}, from_ratio<Rational>(num, den));
  for (const auto& a : d.all_nodes()) {
    const Rational v = g(a);
    if (is_zero(v) || d.is_leaf(a)) continue;
    const auto [s0, s1] = shares(rng);
    g.set(a.child(false), v * eighths(s0));
    g.set(a.child(true), v * eighths(s1));
  }
  return g;
}

}  // namespace

TreeFn<Rational> random_superadditive(const TreeDomain& d, Rng& rng) {
  return grow_top_down(d, rng, [](Rng& r) {
    if (r.chance(1, 6)) return std::pair<std::int64_t, std::int64_t>{0, 0};
    const std::int64_t s0 = r.between(0, 8);
    const std::int64_t s1 = r.between(0, 8 - s0);
    return r.chance(1, 2) ? std::pair{s0, s1} : std::pair{s1, s0};
  });
}

TreeFn<Rational> random_power_superadditive(const TreeDomain& d, unsigned p, Rng& rng) {
  const unsigned e = p - 1;
  const std::int64_t cap = pow_int<Rational>(Rational(8), e).get_num().get_si();
  return grow_top_down(d, rng, [=](Rng& r) {
    if (r.chance(1, 6)) return std::pair<std::int64_t, std::int64_t>{0, 0};
    for (;;) {
      const std::int64_t s0 = r.between(0, 8);
      const std::int64_t s1 = r.between(0, 8);
      std::int64_t t0 = 1, t1 = 1;
      for (unsigned i = 0; i < e; ++i) {
        t0 *= s0;
        t1 *= s1;
      }
      if (t0 + t1 <= cap) return std::pair{s0, s1};
    }
  });
}

TreeFn<Rational> random_increasing(const TreeDomain& d, Rng& rng) {
  return grow_top_down(d, rng, [](Rng& r) {
    const auto share = [&r] { return r.chance(1, 5) ? std::int64_t{0} : r.between(1, 8); };
    const std::int64_t s0 = share();
    return std::pair{s0, share()};
  });
}

TreeFn<Rational> random_sparse(const TreeDomain& d, Rng& rng, std::uint64_t num, std::uint64_t den) {
  TreeFn<Rational> f(d);
  for (const auto& a : d.all_nodes()) {
    if (rng.chance(num, den)) f.set(a, from_ratio<Rational>(rng.between(1, 8), 4));
  }
  return f;
}

TreeFn<Rational> random_weight(const TreeDomain& d, Rng& rng) {
  TreeFn<Rational> w(d);
  for (const auto& a : d.all_nodes()) {
    w.set(a, from_ratio<Rational>(rng.between(1, 16), 4));
  }
  return w;
}

BiTreeFn<Rational> random_sparse(const BiTreeDomain& d, Rng& rng, std::uint64_t num, std::uint64_t den) {
  BiTreeFn<Rational> f(d);
  for (const auto& a : d.all_nodes()) {
    if (rng.chance(num, den)) f.set(a, from_ratio<Rational>(rng.between(1, 8), 4));
  }
  return f;
}

BiTreeFn<Rational> random_rectangle_measure(const BiTreeDomain& d, std::size_t atoms, Rng& rng) {
  const TreeDomain dx{d.x_levels};
  const TreeDomain dy{d.y_levels};
  PointMeasure<Rational> mu;
  for (std::size_t i = 0; i < atoms; ++i) {
    NodeAddress x = random_node(dx, rng);
    NodeAddress y = random_node(dy, rng);
    mu.add({std::move(x), std::move(y)}, from_ratio<Rational>(rng.between(1, 8), 4));
  }
  BiTreeFn<Rational> m(d);
  for (const auto& atom : mu.atoms()) {
    for (const auto& r : ancestors(atom.node)) m.add(r, atom.mass);
  }
  return m;
}

NodeAddress random_node(const TreeDomain& d, Rng& rng) {
  const auto depth = static_cast<std::size_t>(rng.below(d.levels));
  NodeAddress a;
  for (std::size_t i = 0; i < depth; ++i) a = a.child(rng.chance(1, 2));
  return a;
}

}  // namespace cxlab
