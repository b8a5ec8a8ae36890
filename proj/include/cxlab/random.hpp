#pragma once

// Seeded random instances for the property corpora and the witness search.
// All draws go through Rng so instances are identical across platforms and
// across scalar modes (values are generated as small rationals, then
// converted).

#include <cstdint>
#include <random>

#include "cxlab/sparse_fn.hpp"

namespace cxlab {

/// splitmix64 step; used to derive independent per-instance seeds.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed, 0)) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, n). n > 0.
  std::uint64_t below(std::uint64_t n);
  /// Uniform in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi);
  bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }
  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

template <Scalar S>
S convert_scalar(const Rational& x) {
  if constexpr (is_exact_v<S>) {
    return x;
  } else {
    return to_double(x);
  }
}

template <Scalar S>
TreeFn<S> convert(const TreeFn<Rational>& f) {
  if constexpr (is_exact_v<S>) {
    return f;
  } else {
    TreeFn<S> out(f.domain());
    for (const auto& [a, v] : f) out.set(a, to_double(v));
    return out;
  }
}

template <Scalar S>
BiTreeFn<S> convert(const BiTreeFn<Rational>& f) {
  if constexpr (is_exact_v<S>) {
    return f;
  } else {
    BiTreeFn<S> out(f.domain());
    for (const auto& [a, v] : f) out.set(a, to_double(v));
    return out;
  }
}

/// Superadditive: each child gets k/8 of its parent, the two shares summing
/// to at most 1. Subtrees die out at random.
TreeFn<Rational> random_superadditive(const TreeDomain& d, Rng& rng);

/// g^{p-1} superadditive for integral p >= 2: child shares r0, r1 in
/// {0, 1/8, ..., 1} with r0^{p-1} + r1^{p-1} <= 1.
TreeFn<Rational> random_power_superadditive(const TreeDomain& d, unsigned p, Rng& rng);

/// Non-decreasing toward the root, not necessarily superadditive: each child
/// independently gets k/8 of its parent.
TreeFn<Rational> random_increasing(const TreeDomain& d, Rng& rng);

/// Independent values k/4 (k in 1..8) on each node with probability
/// num/den, zero elsewhere.
TreeFn<Rational> random_sparse(const TreeDomain& d, Rng& rng, std::uint64_t num, std::uint64_t den);

/// Positive everywhere, values in [1/4, 4].
TreeFn<Rational> random_weight(const TreeDomain& d, Rng& rng);

BiTreeFn<Rational> random_sparse(const BiTreeDomain& d, Rng& rng, std::uint64_t num, std::uint64_t den);

/// Rectangle masses m(R) = μ(R) of a random atomic measure μ with `atoms`
/// atoms, materialized on the whole (small) bi-tree.
BiTreeFn<Rational> random_rectangle_measure(const BiTreeDomain& d, std::size_t atoms, Rng& rng);

/// Node at a uniformly random depth, with uniformly random path bits.
NodeAddress random_node(const TreeDomain& d, Rng& rng);

}  // namespace cxlab
