#include "cxlab/lemmas.hpp"

#include <cmath>

namespace cxlab {

namespace {

template <Scalar S>
S flag(bool b) {
  return S(b ? 1 : 0);
}

template <Scalar S>
std::vector<NodeAddress> closure_of(const TreeFn<S>& a, const TreeFn<S>& b) {
  std::vector<NodeAddress> seeds = a.support();
  for (const auto& [node, v] : b) seeds.push_back(node);
  return up_closure(seeds);
}

/// Largest field value over nodes for which `pick` holds; first in
/// breadth-first order wins ties.
template <Scalar S, class Pred>
std::pair<S, std::optional<NodeAddress>> field_max(const TreeField<S>& field, Pred pick) {
  S best(0);
  std::optional<NodeAddress> arg;
  for (const auto& [a, v] : field) {
    if (!pick(a)) continue;
    if (!arg || v > best) {
      best = v;
      arg = a;
    }
  }
  return {best, arg};
}

template <Scalar S>
TreeFn<S> pointwise_product(const TreeFn<S>& a, const TreeFn<S>& b) {
  TreeFn<S> out(a.domain());
  for (const auto& [node, v] : a) {
    S w = b(node);
    if (!is_zero(w)) out.set(node, v * w);
  }
  return out;
}

template <Scalar S>
void require_domain(const TreeFn<S>& f, const TreeDomain& d, const char* what) {
  if (!(f.domain() == d)) throw DomainError(std::string(what) + " does not live on the given tree domain");
}

}  // namespace

template <Scalar S>
S sum_power(const TreeFn<S>& f, double p) {
  S sum(0);
  for (const auto& [a, v] : f) sum += power<S>(v, p);
  return sum;
}

template <Scalar S>
S max_hardy_up(const TreeFn<S>& g) {
  const auto closure = up_closure(g.support());
  const auto ig = hardy_up_field(g, closure);
  return field_max(ig, [](const NodeAddress&) { return true; }).first;
}

template <Scalar S>
LemmaReport<S> verify_supadditive_l1linf(const TreeFn<S>& g, const TreeFn<S>& h, const NodeAddress& gamma,
                                         const TreeDomain& d) {
  require_domain(g, d, "g");
  require_domain(h, d, "h");
  detail::require_in_domain(d, gamma);

  const auto closure = up_closure(g.support());
  const auto ih = hardy_up_field(h, closure);
  const auto [lambda, lambda_at] = field_max(ih, [&](const NodeAddress& a) { return g.in_support(a); });

  S lhs(0);
  for (const auto& [a, v] : g) {
    if (gamma.is_prefix_of(a)) lhs += v * h(a);
  }
  auto r = make_report<S>("supadditive_l1linf", lhs, lambda * g(gamma));
  r.params["lambda"] = lambda;
  r.params["superadditive"] = flag<S>(is_superadditive(g, d).holds);
  r.params["levels"] = S(static_cast<unsigned long>(d.levels));
  r.witness = gamma.to_string();
  return r;
}

template <class Node, Scalar S>
LemmaReport<S> verify_I2_positive(const SparseFn<Node, S>& f, const SparseFn<Node, S>& g) {
  if (!(f.domain() == g.domain())) throw DomainError("f and g live on different domains");
  S lhs(0);
  S sum_f2(0);
  for (const auto& [a, v] : f) sum_f2 += v * v;

  S coarse(0);
  S refined(0);
  std::optional<Node> refined_at;

  if constexpr (std::is_same_v<Node, NodeAddress>) {
    const auto closure = up_closure(g.support());
    const auto if_field = hardy_up_field(f, closure);
    const auto pot = potential_field(g);
    for (const auto& [a, v] : g) {
      const S& ifa = if_field.at(a);
      lhs += ifa * ifa * v;
      coarse = std::max(coarse, pot.at(a));
    }
    for (const auto& [a, v] : pot) {
      if (f.in_support(a) && (!refined_at || v > refined)) {
        refined = v;
        refined_at = a;
      }
    }
  } else {
    // II*g(a) = Σ_c g(c) · #(rectangles containing both a and c).
    for (const auto& [a, v] : g) {
      const S ifa = eval_hardy_up(f, a);
      lhs += ifa * ifa * v;
      S pot(0);
      for (const auto& [c, gc] : g) pot += gc * S(static_cast<unsigned long>(common_ancestor_count(a, c)));
      if (!refined_at || pot > coarse) {
        coarse = pot;
        refined_at = a;
      }
    }
    refined = coarse;
  }

  auto r = make_report<S>("I2_positive", lhs, refined * sum_f2);
  r.params["sup_refined"] = refined;
  r.params["sup_coarse"] = coarse;
  r.params["rhs_coarse"] = coarse * sum_f2;
  if (refined_at) r.witness = to_string(*refined_at);
  return r;
}

template <Scalar S>
PhiOutcome<S> build_phi(const TreeFn<S>& w, const TreeFn<S>& g, const TreeFn<S>& f, const S& lambda,
                        const S& delta, const TreeDomain& d) {
  require_domain(w, d, "w");
  require_domain(g, d, "g");
  require_domain(f, d, "f");
  if (!(delta > 0)) throw PreconditionError("delta > 0");
  if (lambda < S(4) * delta) throw PreconditionError("lambda >= 4 delta");
  if (auto sup = is_superadditive(g, d); !sup) throw PreconditionError("g superadditive", sup.witness->to_string());

  const TreeFn<S> wg = pointwise_product(w, g);
  const TreeFn<S> wf = pointwise_product(w, f);
  const auto closure = closure_of(g, f);
  const auto iwg = hardy_up_field(wg, closure);
  const auto iwf = hardy_up_field(wf, closure);

  for (const auto& [a, v] : f) {
    if (iwg.at(a) > delta) throw PreconditionError("supp f inside {I(wg) <= delta}", a.to_string());
  }

  const S two_lambda = S(2) * lambda;
  TreeFn<S> phi(d);
  for (const auto& [a, gv] : g) {
    const S& level = iwg.at(a);
    if (level > delta && level <= two_lambda) phi.set(a, iwf.at(a) * gv / lambda);
  }

  const auto iwphi = hardy_up_field(pointwise_product(w, phi), closure);

  // Majorization on the band, tracked at the node with the smallest
  // I(wφ)/I(wf).
  const S half_lambda = lambda / S(2);
  std::optional<NodeAddress> worst_at;
  S worst_num(0), worst_den(1);
  std::size_t band = 0;
  for (const auto& [a, level] : iwg) {
    if (!(level > half_lambda && level <= two_lambda)) continue;
    ++band;
    const S& den = iwf.at(a);
    if (is_zero(den)) continue;
    const S& num = iwphi.at(a);
    if (!worst_at || num * worst_den < worst_num * den) {
      worst_num = num;
      worst_den = den;
      worst_at = a;
    }
  }

  LemmaReport<S> major = worst_at ? make_report<S>("phi_majorization", worst_den / S(4), worst_num)
                                  : make_report<S>("phi_majorization", S(0), S(0));
  if (worst_at) {
    major.witness = worst_at->to_string();
    major.params["worst_constant"] = worst_num / worst_den;
  } else {
    major.holds = true;
  }
  major.params["band_size"] = S(static_cast<unsigned long>(band));

  S energy_phi(0);
  for (const auto& [a, v] : phi) energy_phi += w(a) * v * v;
  S energy_f(0);
  for (const auto& [a, v] : f) energy_f += w(a) * v * v;
  LemmaReport<S> energy = make_report<S>("phi_energy", energy_phi, S(2) * delta / lambda * energy_f);
  if (!is_zero(energy_f)) energy.params["worst_constant"] = energy_phi / (delta / lambda * energy_f);

  LemmaReport<S> report = energy;
  report.name = "phi";
  report.holds = major.holds && energy.holds;
  report.witness = major.witness;
  for (auto* r : {&report, &major, &energy}) {
    r->params["lambda"] = lambda;
    r->params["delta"] = delta;
  }
  if (auto it = major.params.find("worst_constant"); it != major.params.end()) {
    report.params["geIf_constant"] = it->second;
  }
  if (auto it = energy.params.find("worst_constant"); it != energy.params.end()) {
    report.params["enest1_constant"] = it->second;
  }
  report.params.erase("worst_constant");
  report.params["band_size"] = S(static_cast<unsigned long>(band));
  return {std::move(phi), std::move(report), std::move(major), std::move(energy)};
}

template <Scalar S>
LemmaReport<S> verify_inter(const TreeFn<S>& f, const TreeFn<S>& g, double p, const TreeDomain& d,
                            const std::optional<InterBounds<S>>& bounds) {
  require_domain(f, d, "f");
  require_domain(g, d, "g");
  if (!(p >= 1)) throw ArgumentError("verify_inter needs p >= 1");

  const auto closure = closure_of(g, f);
  const auto ig = hardy_up_field(g, closure);
  const auto ifield = hardy_up_field(f, closure);
  const S lambda_least = field_max(ig, [](const NodeAddress&) { return true; }).first;
  const auto [delta_least, delta_at] = field_max(ig, [&](const NodeAddress& a) { return f.in_support(a); });

  S lhs(0);
  for (const auto& [a, v] : g) lhs += power<S>(ifield.at(a) * v, p);
  const S delta = bounds ? bounds->delta : delta_least;
  const S lambda = bounds ? bounds->lambda : lambda_least;
  const S fp = sum_power(f, p);

  auto r = make_report<S>("inter", lhs, power<S>(delta, p - 1) * lambda * fp);
  r.params["p"] = from_double<S>(p);
  r.params["delta"] = delta;
  r.params["lambda"] = lambda;
  r.params["delta_least"] = delta_least;
  r.params["lambda_least"] = lambda_least;
  r.params["superadditive"] = flag<S>(is_superadditive(g, d).holds);
  r.params["sum_f_p"] = fp;
  if (f.empty()) r.degenerate = true;
  if (r.ratio) r.metrics["constant"] = std::pow(to_double(*r.ratio), 1.0 / p);
  if (delta_at) r.witness = delta_at->to_string();
  return r;
}

template <Scalar S>
LemmaReport<S> verify_linf(const TreeFn<S>& f, const TreeFn<S>& g, const TreeDomain& d) {
  require_domain(f, d, "f");
  require_domain(g, d, "g");
  if (auto inc = is_increasing(g, d); !inc) throw PreconditionError("g increasing", inc.witness->to_string());

  const auto closure = up_closure(g.support());
  const auto ifield = hardy_up_field(f, closure);
  const auto pot = potential_field(g);
  S lhs(0);
  for (const auto& [a, v] : g) lhs = std::max(lhs, S(ifield.at(a) * v));
  S fmax(0);
  for (const auto& [a, v] : f) fmax = std::max(fmax, v);
  const auto [sup, sup_at] =
      field_max(pot, [&](const NodeAddress& a) { return f.in_support(a) && g.in_support(a); });

  auto r = make_report<S>("linf", lhs, sup * fmax);
  r.params["sup_potential"] = sup;
  r.params["f_max"] = fmax;
  if (sup_at) r.witness = sup_at->to_string();
  return r;
}

template <Scalar S>
LemmaReport<S> verify_new23(const TreeFn<S>& f, const TreeFn<S>& g, double p, const TreeDomain& d) {
  require_domain(f, d, "f");
  require_domain(g, d, "g");
  if (!(p >= 1)) throw ArgumentError("verify_new23 needs p >= 1");

  const auto closure = up_closure(g.support());
  const auto ifield = hardy_up_field(f, closure);
  const auto pot = potential_field(g);
  S lhs(0);
  for (const auto& [a, v] : g) lhs += power<S>(ifield.at(a), p) * v;
  const auto [sup, sup_at] =
      field_max(pot, [&](const NodeAddress& a) { return f.in_support(a) && g.in_support(a); });
  const S fp = sum_power(f, p);

  auto r = make_report<S>("new23", lhs, sup * fp);
  r.params["p"] = from_double<S>(p);
  r.params["sup_potential"] = sup;
  r.params["sum_f_p"] = fp;
  r.params["increasing"] = flag<S>(is_increasing(g, d).holds);
  r.params["superadditive"] = flag<S>(is_superadditive(g, d).holds);
  if (sup_at) r.witness = sup_at->to_string();
  return r;
}

template <Scalar S>
LemmaReport<S> evaluate_gest(const TreeFn<S>& g, const NodeAddress& gamma, double p, const TreeDomain& d) {
  require_domain(g, d, "g");
  detail::require_in_domain(d, gamma);
  const S lambda = max_hardy_up(g);
  S lhs(0);
  for (const auto& [a, v] : g) {
    if (gamma.is_prefix_of(a)) lhs += power<S>(v, p);
  }
  auto r = make_report<S>("gest", lhs, lambda * power<S>(g(gamma), p - 1));
  r.params["p"] = from_double<S>(p);
  r.params["lambda"] = lambda;
  r.witness = gamma.to_string();
  return r;
}

template <Scalar S>
LemmaReport<S> verify_gest(const TreeFn<S>& g, const NodeAddress& gamma, double p, const TreeDomain& d) {
  if (auto sup = check_power_superadditive(g, d, p); !sup) {
    throw PreconditionError("g^(p-1) superadditive", sup.witness->to_string());
  }
  return evaluate_gest(g, gamma, p, d);
}

#define CXLAB_INSTANTIATE_LEMMAS(S)                                                                      \
  template LemmaReport<S> verify_supadditive_l1linf(const TreeFn<S>&, const TreeFn<S>&, const NodeAddress&, \
                                                    const TreeDomain&);                                  \
  template LemmaReport<S> verify_I2_positive(const TreeFn<S>&, const TreeFn<S>&);                        \
  template LemmaReport<S> verify_I2_positive(const BiTreeFn<S>&, const BiTreeFn<S>&);                    \
  template PhiOutcome<S> build_phi(const TreeFn<S>&, const TreeFn<S>&, const TreeFn<S>&, const S&,        \
                                   const S&, const TreeDomain&);                                         \
  template LemmaReport<S> verify_inter(const TreeFn<S>&, const TreeFn<S>&, double, const TreeDomain&,     \
                                       const std::optional<InterBounds<S>>&);                            \
  template LemmaReport<S> verify_linf(const TreeFn<S>&, const TreeFn<S>&, const TreeDomain&);            \
  template LemmaReport<S> verify_new23(const TreeFn<S>&, const TreeFn<S>&, double, const TreeDomain&);   \
  template LemmaReport<S> evaluate_gest(const TreeFn<S>&, const NodeAddress&, double, const TreeDomain&); \
  template LemmaReport<S> verify_gest(const TreeFn<S>&, const NodeAddress&, double, const TreeDomain&);   \
  template S sum_power(const TreeFn<S>&, double);                                                        \
  template S max_hardy_up(const TreeFn<S>&);

CXLAB_INSTANTIATE_LEMMAS(Rational)
CXLAB_INSTANTIATE_LEMMAS(double)

}  // namespace cxlab
