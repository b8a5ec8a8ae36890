#pragma once

// Generators for the single-tree counterexamples. Each returns the instance
// data together with the reports that quantify the violation.
//
// The halving-tree constructions live on full trees of 2^N - 1 nodes, so
// their sums are evaluated by aggregating nodes into classes with equal
// values (depth, number of 0 bits, length of the leading 0 run) rather than
// by materializing the tree. `materialize_*` builds the explicit functions
// for small N; the tests compare both routes.

#include <optional>
#include <string>
#include <vector>

#include "cxlab/lemmas.hpp"
#include "cxlab/random.hpp"

namespace cxlab {

// ---------------------------------------------------------------------------
// Diagonal-decay instance for 1 < p < 2.

struct PLess2Cex {
  unsigned k = 0;
  double p = 0;
  TreeDomain domain;
  TreeFn<double> f{TreeDomain{}};
  TreeFn<double> g{TreeDomain{}};
  /// Σ (If·g)^p vs δ^{p-1} λ Σ f^p with δ = λ = 3.
  LemmaReport<double> report;
  /// verify_inter with least admissible δ, λ.
  LemmaReport<double> inter;
  double lower_bound = 0;      // 2^{(2-p)k}
  double max_boundary_ig = 0;  // max of Ig over the deepest generation
  std::vector<std::size_t> support_per_generation;
};

/// Default cap on the support size, about 2^{2k}.
inline constexpr std::size_t kPLess2SupportLimit = std::size_t{1} << 19;

/// Tree with generations 0..k+2^k. Throws ArgumentError unless k >= 2 and
/// 1 < p < 2, ResourceError when the support exceeds `support_limit`.
PLess2Cex gen_cex_p_less_2(unsigned k, double p, std::size_t support_limit = kPLess2SupportLimit);

// ---------------------------------------------------------------------------
// Halving tree: g(root) = 1, g(left child) = g/2, g(right child) = g.

/// Explicit halving-tree g on `levels` levels. ResourceError above 20 levels.
template <Scalar S>
TreeFn<S> materialize_halving_tree(unsigned levels);

/// f ≡ 1 on the all-zeros root-to-leaf path.
template <Scalar S>
TreeFn<S> materialize_left_path(unsigned levels);

template <Scalar S>
struct IncreasingCex {
  unsigned N = 0;
  double p = 0;
  /// Σ_{α ≤ root} g^p vs λ g^{p-1}(root), λ = N.
  LemmaReport<S> report;
  /// 2^p (r^N - 1), r = (2^p + 1)/2^p: the sum over levels 0..N-1.
  S closed_form{0};
  bool increasing = false;
  bool superadditive = false;
};

template <Scalar S>
IncreasingCex<S> gen_cex_increasing(unsigned N, double p);

template <Scalar S>
struct DirectCex {
  unsigned N = 0;
  double p = 0;
  /// Σ (If·g)^p vs δ^{p-1} λ Σ f^p with δ = 2, λ = N, f ≡ 1 on the left path.
  LemmaReport<S> report;
  S sum_g_p{0};  // Σ g^p, a lower bound for the lhs since If >= 1
  S min_if{0};
};

/// Throws ArgumentError unless N >= 2.
template <Scalar S>
DirectCex<S> gen_cex_direct(unsigned N, double p);

// ---------------------------------------------------------------------------
// Path audit of the p > 2 construction.

enum class New23Variant { halving_path, constant_one };

std::string_view variant_name(New23Variant v);

template <Scalar S>
struct ChainStep {
  std::string id;
  std::string relation;  // "=", ">=", "<=", ">"
  S lhs{0};
  S rhs{0};
  bool holds = true;
  std::optional<unsigned> at_k;  // per-k identities: first failing k (or last k checked)
};

template <Scalar S>
struct New23Audit {
  New23Variant variant = New23Variant::halving_path;
  unsigned N = 0;
  double p = 0;
  /// L = Σ (If)^p g  vs  R = ‖II*g‖_∞ · Σ f^p.
  LemmaReport<S> report;
  S sup_potential{0};  // ‖II*g‖_∞
  std::string argmax;  // node literal of u_N
  bool argmax_on_boundary = false;
  bool g_nonzero_at_argmax = false;
  double argmax_ties = 1;  // leaves attaining the max (2^{N-1} for g ≡ 1)
  std::vector<ChainStep<S>> chain;
  std::optional<std::string> first_failure;
};

/// Both variants. f ≡ 1 on the left path u_1 = root, ..., u_N (a leaf).
/// Throws ArgumentError unless N >= 3 and p > 2 (p >= 1 with
/// `allow_any_p`), or when float mode overflows.
template <Scalar S>
std::vector<New23Audit<S>> gen_cex_new23(unsigned N, double p, bool allow_any_p = false);

// ---------------------------------------------------------------------------
// Randomized witness search.

struct New23Search {
  LemmaReport<double> best;
  std::size_t best_index = 0;
  std::uint64_t best_seed = 0;  // per-instance seed, reproduces f and g
  std::size_t evaluated = 0;
  TreeFn<double> f{TreeDomain{}};
  TreeFn<double> g{TreeDomain{}};
};

/// Random increasing g with f either sparse (two densities) or ≡ 1 on a
/// random root-to-leaf path.
std::pair<TreeFn<Rational>, TreeFn<Rational>> random_new23_instance(const TreeDomain& d, Rng& rng);

/// The instance with index `index` of a search run with base `seed`.
std::pair<TreeFn<double>, TreeFn<double>> new23_search_instance(unsigned levels, std::uint64_t seed,
                                                                std::size_t index);

/// Samples `budget` random increasing g and random f on a tree with
/// `levels` levels and keeps the largest lhs/rhs of verify_new23. Ties go to
/// the smaller instance index. Throws ArgumentError for budget 0 or levels
/// outside 1..14.
New23Search search_new23(double p, unsigned levels, std::size_t budget, std::uint64_t seed,
                         unsigned threads = 0);

#define CXLAB_DECLARE_CEX(S)                                                      \
  extern template TreeFn<S> materialize_halving_tree<S>(unsigned);                \
  extern template TreeFn<S> materialize_left_path<S>(unsigned);                   \
  extern template IncreasingCex<S> gen_cex_increasing<S>(unsigned, double);       \
  extern template DirectCex<S> gen_cex_direct<S>(unsigned, double);               \
  extern template std::vector<New23Audit<S>> gen_cex_new23<S>(unsigned, double, bool);

CXLAB_DECLARE_CEX(Rational)
CXLAB_DECLARE_CEX(double)
#undef CXLAB_DECLARE_CEX

}  // namespace cxlab
