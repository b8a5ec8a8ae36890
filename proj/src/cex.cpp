#include "cxlab/cex.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

namespace cxlab {

namespace {

template <Scalar S>
S from_uint(std::uint64_t v) {
  if constexpr (is_exact_v<S>) {
    return Rational(mpz_class(static_cast<unsigned long>(v)));
  } else {
    return static_cast<double>(v);
  }
}

/// Pascal triangle rows 0..n.
template <Scalar S>
std::vector<std::vector<S>> binomials(unsigned n) {
  std::vector<std::vector<S>> c(n + 1);
  for (unsigned m = 0; m <= n; ++m) {
    c[m].assign(m + 1, S(1));
    for (unsigned t = 1; t < m; ++t) c[m][t] = c[m - 1][t - 1] + c[m - 1][t];
  }
  return c;
}

template <Scalar S>
bool eq_tol(const S& a, const S& b) {
  if constexpr (is_exact_v<S>) {
    return a == b;
  } else {
    const double scale = std::max({1e-300, std::fabs(a), std::fabs(b)});
    return std::fabs(a - b) <= 1e-9 * scale;
  }
}

template <Scalar S>
bool compare(const S& lhs, const std::string& relation, const S& rhs) {
  if (relation == "=") return eq_tol(lhs, rhs);
  if (relation == ">=") return leq_tol(rhs, lhs);
  if (relation == "<=") return leq_tol(lhs, rhs);
  if (relation == ">") return lhs > rhs;
  throw std::logic_error("unknown relation " + relation);
}

template <Scalar S>
ChainStep<S> step(std::string id, S lhs, std::string relation, S rhs) {
  ChainStep<S> s{std::move(id), std::move(relation), std::move(lhs), std::move(rhs), true, std::nullopt};
  s.holds = compare(s.lhs, s.relation, s.rhs);
  return s;
}

void require_p_range(double p) {
  if (!(p > 1.0 && p < 2.0)) throw ArgumentError("this construction needs 1 < p < 2, got " + to_string(p));
}

}  // namespace

// ---------------------------------------------------------------------------

PLess2Cex gen_cex_p_less_2(unsigned k, double p, std::size_t support_limit) {
  if (k < 2) throw ArgumentError("k must be >= 2");
  require_p_range(p);
  // Support: all of generations 0..k plus 2^k chains of length 2^k.
  const long double needed = std::ldexp(1.0L, static_cast<int>(k) + 1) - 1 + std::ldexp(1.0L, 2 * static_cast<int>(k));
  if (k > 40 || needed > static_cast<long double>(support_limit)) {
    throw ResourceError("p<2 instance with k=" + std::to_string(k),
                        k > 40 ? static_cast<std::size_t>(-1) : static_cast<std::size_t>(needed), support_limit);
  }

  const std::size_t chain = std::size_t{1} << k;
  const std::size_t last_gen = k + chain;
  PLess2Cex cex;
  cex.k = k;
  cex.p = p;
  cex.domain = TreeDomain{last_gen + 1};
  cex.f = TreeFn<double>(cex.domain);
  cex.g = TreeFn<double>(cex.domain);
  cex.support_per_generation.assign(last_gen + 1, 0);

  std::vector<NodeAddress> generation{NodeAddress{}};
  for (unsigned i = 0; i <= k; ++i) {
    const double v = std::ldexp(1.0, -static_cast<int>(i));
    std::vector<NodeAddress> next;
    for (const auto& a : generation) {
      cex.g.set(a, v);
      cex.f.set(a, v);
      if (i < k) {
        next.push_back(a.child(false));
        next.push_back(a.child(true));
      }
    }
    cex.support_per_generation[i] = generation.size();
    if (i < k) generation = std::move(next);
  }
  const double tail = std::ldexp(1.0, -static_cast<int>(k));
  for (const auto& top : generation) {
    NodeAddress a = top;
    for (std::size_t i = k + 1; i <= last_gen; ++i) {
      a = a.child(false);
      cex.g.set(a, tail);
      cex.f.set(a, std::ldexp(1.0, -static_cast<int>(i)));
      ++cex.support_per_generation[i];
    }
  }

  cex.report = verify_inter(cex.f, cex.g, p, cex.domain, std::optional<InterBounds<double>>(InterBounds<double>{3.0, 3.0}));
  cex.report.name = "p_less_2";
  cex.inter = verify_inter(cex.f, cex.g, p, cex.domain);
  cex.lower_bound = std::pow(2.0, (2.0 - p) * k);

  const auto closure = up_closure(cex.g.support());
  const auto ig = hardy_up_field(cex.g, closure);
  const auto iff = hardy_up_field(cex.f, closure);
  double deep_sum = 0;
  for (const auto& [a, v] : ig) {
    if (a.depth() == last_gen) cex.max_boundary_ig = std::max(cex.max_boundary_ig, v);
    if (a.depth() > k) deep_sum += std::pow(iff.at(a) * cex.g(a), p);
  }
  for (auto* r : {&cex.report, &cex.inter}) {
    r->params["k"] = k;
    r->metrics["lower_bound"] = cex.lower_bound;
    r->metrics["deep_generation_sum"] = deep_sum;
    r->metrics["max_boundary_Ig"] = cex.max_boundary_ig;
  }
  return cex;
}

// ---------------------------------------------------------------------------

template <Scalar S>
TreeFn<S> materialize_halving_tree(unsigned levels) {
  if (levels > 20) throw ResourceError("halving tree", std::size_t{1} << levels, std::size_t{1} << 20);
  const TreeDomain d{levels};
  TreeFn<S> g(d);
  for (const auto& a : d.all_nodes()) g.set(a, pow2<S>(-static_cast<long>(a.count_zeros())));
  return g;
}

template <Scalar S>
TreeFn<S> materialize_left_path(unsigned levels) {
  const TreeDomain d{levels};
  TreeFn<S> f(d);
  for (unsigned i = 0; i < levels; ++i) f.set(NodeAddress::repeat(false, i), S(1));
  return f;
}

template <Scalar S>
IncreasingCex<S> gen_cex_increasing(unsigned N, double p) {
  if (N < 1) throw ArgumentError("N must be >= 1");
  if (!(p >= 1)) throw ArgumentError("p must be >= 1");
  IncreasingCex<S> cex;
  cex.N = N;
  cex.p = p;

  // Level i holds C(i, z) nodes with z zero bits, each with g = 2^{-z}.
  const auto c = binomials<S>(N);
  S lhs(0);
  for (unsigned i = 0; i < N; ++i) {
    for (unsigned z = 0; z <= i; ++z) lhs += c[i][z] * power<S>(pow2<S>(-static_cast<long>(z)), p);
  }
  const S two_p = power<S>(S(2), p);
  const S r = (two_p + S(1)) / two_p;
  cex.closed_form = two_p * (power<S>(r, N) - S(1));

  const S lambda = from_uint<S>(N);
  cex.report = make_report<S>("gamma", lhs, lambda);  // g(root) = 1
  cex.report.params["N"] = from_uint<S>(N);
  cex.report.params["p"] = from_double<S>(p);
  cex.report.params["lambda"] = lambda;
  cex.report.params["closed_form"] = cex.closed_form;
  cex.report.metrics["levels_from_one_form"] = to_double(S((two_p + S(1)) * (power<S>(r, N) - S(1))));
  cex.report.witness = "";

  // The construction rule is the same at every level, so a truncated copy
  // decides both flags.
  const auto g = materialize_halving_tree<S>(std::min(N, 10u));
  cex.increasing = is_increasing(g).holds;
  cex.superadditive = is_superadditive(g).holds;
  cex.report.params["increasing"] = S(cex.increasing ? 1 : 0);
  cex.report.params["superadditive"] = S(cex.superadditive ? 1 : 0);
  return cex;
}

template <Scalar S>
DirectCex<S> gen_cex_direct(unsigned N, double p) {
  if (N < 2) throw ArgumentError("N must be >= 2");
  if (!(p >= 1)) throw ArgumentError("p must be >= 1");
  DirectCex<S> cex;
  cex.N = N;
  cex.p = p;

  // A node at depth i whose path starts with r zeros (then a 1, unless it is
  // the left-path node itself) has If = r + 1; with z zero bits in total,
  // g = 2^{-z}.
  const auto c = binomials<S>(N);
  S lhs(0);
  S sum_g(0);
  for (unsigned i = 0; i < N; ++i) {
    const S gz = pow2<S>(-static_cast<long>(i));
    lhs += power<S>(from_uint<S>(i + 1) * gz, p);
    sum_g += power<S>(gz, p);
    for (unsigned r = 0; r < i; ++r) {
      const unsigned free_bits = i - r - 1;
      for (unsigned t = 0; t <= free_bits; ++t) {
        const S g = pow2<S>(-static_cast<long>(r + t));
        lhs += c[free_bits][t] * power<S>(from_uint<S>(r + 1) * g, p);
        sum_g += c[free_bits][t] * power<S>(g, p);
      }
    }
  }
  const S delta(2);
  const S lambda = from_uint<S>(N);
  const S sum_f = from_uint<S>(N);
  cex.sum_g_p = sum_g;
  cex.min_if = S(1);
  cex.report = make_report<S>("direct", lhs, power<S>(delta, p - 1) * lambda * sum_f);
  cex.report.params["N"] = from_uint<S>(N);
  cex.report.params["p"] = from_double<S>(p);
  cex.report.params["delta"] = delta;
  cex.report.params["delta_least"] = S(2) - pow2<S>(1 - static_cast<long>(N));
  cex.report.params["lambda"] = lambda;
  cex.report.params["sum_f_p"] = sum_f;
  cex.report.params["sum_g_p"] = sum_g;
  cex.report.witness = NodeAddress::repeat(false, N - 1).to_string();
  return cex;
}

// ---------------------------------------------------------------------------

std::string_view variant_name(New23Variant v) {
  return v == New23Variant::halving_path ? "halving_path" : "constant_one";
}

namespace {

template <Scalar S>
void require_finite(const S& x, const char* what) {
  if constexpr (!is_exact_v<S>) {
    if (!std::isfinite(x)) {
      throw ArgumentError(std::string(what) + " overflows float mode; use exact mode with an integral p");
    }
  }
}

template <Scalar S>
New23Audit<S> audit_variant(New23Variant variant, unsigned N, double p) {
  New23Audit<S> out;
  out.variant = variant;
  out.N = N;
  out.p = p;

  // Path quantities, 1-indexed by k: u_k sits at depth k-1.
  std::vector<S> g(N + 1, S(0)), down(N + 1, S(0)), pot(N + 1, S(0));
  for (unsigned k = 1; k <= N; ++k) {
    g[k] = variant == New23Variant::halving_path ? pow2<S>(-static_cast<long>(k)) : S(1);
  }
  if (variant == New23Variant::halving_path) {
    S acc(0);
    for (unsigned k = N; k >= 1; --k) {
      acc += g[k];
      down[k] = acc;
    }
  } else {
    for (unsigned k = 1; k <= N; ++k) down[k] = pow2<S>(static_cast<long>(N - k + 1)) - S(1);
  }
  for (unsigned k = 1; k <= N; ++k) pot[k] = pot[k - 1] + down[k];

  std::vector<S> kp(N + 1), kp1(N + 1), kp2(N + 1);
  for (unsigned k = 0; k <= N; ++k) {
    const S ks = from_uint<S>(k);
    kp[k] = power<S>(ks, p);
    kp1[k] = power<S>(ks, p - 1);
    kp2[k] = power<S>(ks, p - 2);
  }

  // L = Σ_T (If)^p g.
  S lhs(0);
  if (variant == New23Variant::halving_path) {
    for (unsigned k = 1; k <= N; ++k) lhs += kp[k] * g[k];
  } else {
    // Left-path node at depth i contributes (i+1)^p; an off-path node whose
    // path starts with r zeros contributes (r+1)^p, and there are
    // 2^{N-r-1} - 1 of them across depths r+1..N-1.
    for (unsigned i = 0; i < N; ++i) lhs += kp[i + 1];
    for (unsigned r = 0; r + 1 < N; ++r) lhs += kp[r + 1] * (pow2<S>(static_cast<long>(N - r - 1)) - S(1));
  }

  const S M = pot[N];
  out.sup_potential = M;
  out.argmax = NodeAddress::repeat(false, N - 1).to_string();
  out.argmax_on_boundary = true;
  out.g_nonzero_at_argmax = !is_zero(g[N]);
  out.argmax_ties = variant == New23Variant::halving_path ? 1.0 : std::ldexp(1.0, static_cast<int>(N) - 1);

  const S n_s = from_uint<S>(N);
  out.report = make_report<S>("new23_path", lhs, M * n_s);
  out.report.params["N"] = n_s;
  out.report.params["p"] = from_double<S>(p);
  out.report.params["sup_potential"] = M;
  out.report.params["sum_f_p"] = n_s;
  out.report.witness = out.argmax;

  const S c = from_double<S>(p) / power<S>(S(2), p - 1);
  auto& chain = out.chain;

  S path_sum(0), path_sum_from2(0);
  for (unsigned k = 1; k <= N; ++k) {
    path_sum += kp[k] * g[k];
    if (k >= 2) path_sum_from2 += kp[k] * g[k];
  }
  chain.push_back(step<S>("path_restriction", lhs, ">=", path_sum));
  chain.push_back(step<S>("drop_first_term", path_sum, ">=", path_sum_from2));

  auto per_k_identity = [&](std::string id, auto lhs_at, auto rhs_at) {
    ChainStep<S> s = step<S>(std::move(id), lhs_at(N), "=", rhs_at(N));
    s.at_k = N;
    for (unsigned k = 2; k <= N; ++k) {
      if (!eq_tol<S>(lhs_at(k), rhs_at(k))) {
        s.lhs = lhs_at(k);
        s.rhs = rhs_at(k);
        s.holds = false;
        s.at_k = k;
        break;
      }
    }
    chain.push_back(std::move(s));
  };
  per_k_identity(
      "increment_identity_descendant", [&](unsigned k) { return g[k]; },
      [&](unsigned k) { return S(down[k] - down[k - 1]); });

  S abel1(0), weighted(0);
  for (unsigned k = 2; k <= N; ++k) {
    abel1 += down[k] * (kp[k] - kp[k - 1]);
    weighted += down[k] * kp1[k];
  }
  chain.push_back(step<S>("summation_by_parts_descendant", path_sum_from2, "=", abel1));
  chain.push_back(step<S>("power_increment_bound", abel1, ">=", S(c * weighted)));

  per_k_identity(
      "increment_identity_potential", [&](unsigned k) { return down[k]; },
      [&](unsigned k) { return S(pot[k] - pot[k - 1]); });

  S tail(0), telescoped(0), kp2_sum(0);
  for (unsigned k = 1; k + 1 <= N; ++k) {
    tail += pot[k] * (kp1[k + 1] - kp1[k]);
    telescoped += kp1[k + 1] - kp1[k];
    kp2_sum += kp2[k];
  }
  const S star = pot[N] * kp1[N] - pot[1] - tail;
  chain.push_back(step<S>("summation_by_parts_potential", weighted, "=", star));

  // The lower summation limit of the replaced sum is read as 1.
  const S replaced = M * kp1[N] - pot[1] - M * telescoped;
  chain.push_back(step<S>("sup_replacement", star, ">=", replaced));

  const S p_minus_1 = from_double<S>(p - 1);
  const S star_star = M * kp1[N] - pot[1] - M * p_minus_1 * kp2_sum;
  chain.push_back(step<S>("increment_to_derivative", replaced, ">=", star_star));

  const S integral = (kp1[N - 1] - S(1)) / p_minus_1;
  chain.push_back(step<S>("sum_vs_integral", kp2_sum, "<=", integral));

  const S substituted = M * kp1[N] - pot[1] - M * (kp1[N - 1] - S(1));
  chain.push_back(step<S>("integral_substitution", star_star, ">=", substituted));

  const S gap = kp1[N] - kp1[N - 1];
  chain.push_back(step<S>("drop_root_potential", substituted, ">=", S(M * gap)));

  const S final_bound = c * M * gap;
  chain.push_back(step<S>("final_lower_bound", lhs, ">=", final_bound));
  chain.push_back(step<S>("lemma_contradiction", final_bound, ">", S(M * n_s)));

  // Claimed limit of the normalized left side; e^{p-1} has no exact value,
  // so this step compares the double approximation in both modes.
  const S normalized = c * gap / kp1[N - 1];
  const S claimed = from_double<S>(to_double(c) * (std::exp(p - 1) - 1.0));
  chain.push_back(step<S>("normalized_limit", normalized, ">=", claimed));

  for (const auto& s : chain) {
    require_finite(s.lhs, s.id.c_str());
    require_finite(s.rhs, s.id.c_str());
    if (!s.holds && !out.first_failure) out.first_failure = s.id;
  }
  require_finite(lhs, "lhs");
  require_finite(M, "sup potential");
  out.report.params["first_failure_index"] = from_uint<S>(static_cast<std::uint64_t>(
      std::find_if(chain.begin(), chain.end(), [](const auto& s) { return !s.holds; }) - chain.begin()));
  return out;
}

}  // namespace

template <Scalar S>
std::vector<New23Audit<S>> gen_cex_new23(unsigned N, double p, bool allow_any_p) {
  if (N < 3) throw ArgumentError("N must be >= 3");
  if (allow_any_p ? !(p >= 2) : !(p > 2)) throw ArgumentError("p must be > 2 for the path audit");
  return {audit_variant<S>(New23Variant::halving_path, N, p), audit_variant<S>(New23Variant::constant_one, N, p)};
}

// ---------------------------------------------------------------------------

std::pair<TreeFn<Rational>, TreeFn<Rational>> random_new23_instance(const TreeDomain& d, Rng& rng) {
  TreeFn<Rational> g = random_increasing(d, rng);
  TreeFn<Rational> f(d);
  switch (rng.below(3)) {
    case 0:
      f = random_sparse(d, rng, 1, 4);
      break;
    case 1:
      f = random_sparse(d, rng, 1, 32);
      break;
    default: {
      NodeAddress a;
      f.set(a, Rational(1));
      while (!d.is_leaf(a)) {
        a = a.child(rng.chance(1, 2));
        f.set(a, Rational(1));
      }
    }
  }
  return {std::move(f), std::move(g)};
}

std::pair<TreeFn<double>, TreeFn<double>> new23_search_instance(unsigned levels, std::uint64_t seed,
                                                                std::size_t index) {
  Rng rng(mix_seed(seed, index));
  const auto [f, g] = random_new23_instance(TreeDomain{levels}, rng);
  return {convert<double>(f), convert<double>(g)};
}

New23Search search_new23(double p, unsigned levels, std::size_t budget, std::uint64_t seed, unsigned threads) {
  if (budget == 0) throw ArgumentError("search budget must be positive");
  if (levels < 1 || levels > 14) throw ArgumentError("search depth must be in 1..14");
  if (!(p >= 1)) throw ArgumentError("p must be >= 1");
  const TreeDomain d{levels};

  struct Best {
    double ratio = -1;
    std::size_t index = 0;
  };
  auto scan = [&](std::size_t begin, std::size_t end) {
    Best best;
    for (std::size_t i = begin; i < end; ++i) {
      const auto [f, g] = new23_search_instance(levels, seed, i);
      const auto r = verify_new23(f, g, p, d);
      const double ratio = r.ratio_or(0.0);
      if (ratio > best.ratio) best = {ratio, i};
    }
    return best;
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, budget));
  std::vector<std::future<Best>> parts;
  const std::size_t chunk = (budget + threads - 1) / threads;
  for (std::size_t begin = 0; begin < budget; begin += chunk) {
    parts.push_back(std::async(std::launch::async, scan, begin, std::min(budget, begin + chunk)));
  }
  Best best;
  for (auto& part : parts) {
    const Best b = part.get();
    if (b.ratio > best.ratio || (b.ratio == best.ratio && b.index < best.index)) best = b;
  }

  New23Search out;
  out.evaluated = budget;
  out.best_index = best.index;
  out.best_seed = mix_seed(seed, best.index);
  std::tie(out.f, out.g) = new23_search_instance(levels, seed, best.index);
  out.best = verify_new23(out.f, out.g, p, d);
  out.best.name = "search_new23";
  out.best.seed = seed;
  out.best.params["levels"] = levels;
  out.best.params["budget"] = static_cast<double>(budget);
  out.best.params["best_index"] = static_cast<double>(best.index);
  return out;
}

#define CXLAB_INSTANTIATE_CEX(S)                                             \
  template TreeFn<S> materialize_halving_tree<S>(unsigned);                  \
  template TreeFn<S> materialize_left_path<S>(unsigned);                     \
  template IncreasingCex<S> gen_cex_increasing<S>(unsigned, double);         \
  template DirectCex<S> gen_cex_direct<S>(unsigned, double);                 \
  template std::vector<New23Audit<S>> gen_cex_new23<S>(unsigned, double, bool);

CXLAB_INSTANTIATE_CEX(Rational)
CXLAB_INSTANTIATE_CEX(double)

}  // namespace cxlab
