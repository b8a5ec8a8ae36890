#pragma once

// Verifiers for the tree and bi-tree embedding inequalities. Each verifier
// evaluates both sides on a concrete instance and returns a LemmaReport, so
// the same code confirms true statements and measures violations.
//
// λ and δ are always the least admissible values for the instance unless a
// caller overrides them explicitly.

#include <optional>

#include "cxlab/report.hpp"
#include "cxlab/sparse_fn.hpp"
#include "cxlab/structure.hpp"

namespace cxlab {

/// Σ_{α ≤ γ} g h  vs  λ g(γ), with λ = max of Ih over supp g.
template <Scalar S>
LemmaReport<S> verify_supadditive_l1linf(const TreeFn<S>& g, const TreeFn<S>& h, const NodeAddress& gamma,
                                         const TreeDomain& d);

/// Σ (If)² g  vs  (sup of II*g) · Σ f².
///
/// On a tree the sup runs over supp f ∩ (ancestors of supp g), which is
/// where the refined duality argument places it; the coarse sup over supp g
/// is reported in params. On a bi-tree the coarse sup is used.
template <class Node, Scalar S>
LemmaReport<S> verify_I2_positive(const SparseFn<Node, S>& f, const SparseFn<Node, S>& g);

template <Scalar S>
struct PhiOutcome {
  TreeFn<S> phi;
  LemmaReport<S> report;        // both checks; lhs/rhs are the energy check's
  LemmaReport<S> majorization;  // (1/4) I(wf)(ω) <= I(wφ)(ω) at the worst band node ω
  LemmaReport<S> energy;        // Σ wφ² <= 2 (δ/λ) Σ wf²
};

/// Builds φ = (1/λ) 1{δ < I(wg) <= 2λ} I(wf) g and checks it against the
/// band {λ/2 < I(wg) <= 2λ}. Throws PreconditionError when g is not
/// superadditive, f leaves {I(wg) <= δ}, δ <= 0, or λ < 4δ.
template <Scalar S>
PhiOutcome<S> build_phi(const TreeFn<S>& w, const TreeFn<S>& g, const TreeFn<S>& f, const S& lambda,
                        const S& delta, const TreeDomain& d);

/// Optional explicit constants for verify_inter in place of the least
/// admissible ones.
template <Scalar S>
struct InterBounds {
  S delta;
  S lambda;
};

/// Σ (If·g)^p  vs  δ^{p-1} λ Σ f^p  (the p-th power of the norm form).
/// metrics["constant"] is the measured constant (lhs/rhs)^{1/p}.
template <Scalar S>
LemmaReport<S> verify_inter(const TreeFn<S>& f, const TreeFn<S>& g, double p, const TreeDomain& d,
                            const std::optional<InterBounds<S>>& bounds = std::nullopt);

/// max (If·g)  vs  (sup over supp g ∩ supp f of II*g) · max f.
/// Throws PreconditionError when g is not increasing.
template <Scalar S>
LemmaReport<S> verify_linf(const TreeFn<S>& f, const TreeFn<S>& g, const TreeDomain& d);

/// Σ (If)^p g  vs  (sup over supp g ∩ supp f of II*g) · Σ f^p.
/// Structural flags of g are recorded in params (increasing, superadditive).
template <Scalar S>
LemmaReport<S> verify_new23(const TreeFn<S>& f, const TreeFn<S>& g, double p, const TreeDomain& d);

/// Σ_{α ≤ γ} g^p  vs  λ g^{p-1}(γ), λ = max of Ig over supp g, with no
/// precondition check.
template <Scalar S>
LemmaReport<S> evaluate_gest(const TreeFn<S>& g, const NodeAddress& gamma, double p, const TreeDomain& d);

/// evaluate_gest after checking that g^{p-1} is superadditive.
template <Scalar S>
LemmaReport<S> verify_gest(const TreeFn<S>& g, const NodeAddress& gamma, double p, const TreeDomain& d);

// Shared tree helpers, exposed for the counterexample generators.

/// Σ over the support of f^p.
template <Scalar S>
S sum_power(const TreeFn<S>& f, double p);

/// Max of Ig over the whole tree (attained on supp g); 0 for g ≡ 0.
template <Scalar S>
S max_hardy_up(const TreeFn<S>& g);

#define CXLAB_DECLARE_LEMMAS(S)                                                                         \
  extern template LemmaReport<S> verify_supadditive_l1linf(const TreeFn<S>&, const TreeFn<S>&,          \
                                                           const NodeAddress&, const TreeDomain&);      \
  extern template LemmaReport<S> verify_I2_positive(const TreeFn<S>&, const TreeFn<S>&);                \
  extern template LemmaReport<S> verify_I2_positive(const BiTreeFn<S>&, const BiTreeFn<S>&);            \
  extern template PhiOutcome<S> build_phi(const TreeFn<S>&, const TreeFn<S>&, const TreeFn<S>&,         \
                                          const S&, const S&, const TreeDomain&);                       \
  extern template LemmaReport<S> verify_inter(const TreeFn<S>&, const TreeFn<S>&, double,               \
                                              const TreeDomain&, const std::optional<InterBounds<S>>&); \
  extern template LemmaReport<S> verify_linf(const TreeFn<S>&, const TreeFn<S>&, const TreeDomain&);    \
  extern template LemmaReport<S> verify_new23(const TreeFn<S>&, const TreeFn<S>&, double,               \
                                              const TreeDomain&);                                       \
  extern template LemmaReport<S> evaluate_gest(const TreeFn<S>&, const NodeAddress&, double,            \
                                               const TreeDomain&);                                      \
  extern template LemmaReport<S> verify_gest(const TreeFn<S>&, const NodeAddress&, double,              \
                                             const TreeDomain&);                                        \
  extern template S sum_power(const TreeFn<S>&, double);                                                \
  extern template S max_hardy_up(const TreeFn<S>&);

CXLAB_DECLARE_LEMMAS(Rational)
CXLAB_DECLARE_LEMMAS(double)
#undef CXLAB_DECLARE_LEMMAS

}  // namespace cxlab
