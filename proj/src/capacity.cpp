#include "cxlab/capacity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <thread>

#include "cxlab/errors.hpp"
#include "cxlab/report.hpp"

namespace cxlab {

std::vector<std::vector<double>> reduced_kernel(const std::vector<BiNode>& family, const SymmetryClasses& classes,
                                                unsigned threads) {
  const std::size_t m = classes.size();
  std::vector<std::vector<double>> kc(m, std::vector<double>(m, 0.0));
  auto rows = [&](std::size_t begin, std::size_t end) {
    for (std::size_t a = begin; a < end; ++a) {
      const BiNode& rep = family[classes[a].front()];
      for (std::size_t b = 0; b < m; ++b) {
        std::uint64_t sum = 0;
        for (std::size_t v : classes[b]) sum += bitree_kernel(rep, family[v]);
        kc[a][b] = static_cast<double>(sum);
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, m));
  if (threads <= 1) {
    rows(0, m);
    return kc;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (m + threads - 1) / threads;
  for (std::size_t begin = 0; begin < m; begin += chunk) pool.emplace_back(rows, begin, std::min(m, begin + chunk));
  return kc;
}

namespace {

std::vector<double> multiply(const std::vector<std::vector<double>>& k, const std::vector<double>& x) {
  std::vector<double> y(k.size(), 0.0);
  for (std::size_t a = 0; a < k.size(); ++a) {
    double s = 0;
    for (std::size_t b = 0; b < x.size(); ++b) s += k[a][b] * x[b];
    y[a] = s;
  }
  return y;
}

double kkt_violation(const std::vector<double>& rho, const std::vector<double>& v) {
  double worst = 0;
  for (std::size_t a = 0; a < rho.size(); ++a) {
    const double r = rho[a] > 0 ? std::fabs(v[a] - 1.0) : std::max(0.0, 1.0 - v[a]);
    worst = std::max(worst, r);
  }
  return worst;
}

}  // namespace

EquilibriumResult solve_equilibrium(const std::vector<std::vector<double>>& kc,
                                    const std::vector<std::size_t>& class_sizes, double tol,
                                    std::size_t max_iters) {
  const std::size_t m = kc.size();
  if (m == 0) throw ArgumentError("capacity of an empty family");
  double row_max = 0;
  for (const auto& row : kc) {
    double s = 0;
    for (double x : row) s += std::fabs(x);
    row_max = std::max(row_max, s);
  }
  const double step = 1.0 / row_max;

  EquilibriumResult out;
  out.class_sizes = class_sizes;
  out.rho.assign(m, 0.0);
  std::vector<double> v = multiply(kc, out.rho);
  for (;;) {
    out.kkt_max_violation = kkt_violation(out.rho, v);
    if (out.kkt_max_violation <= tol) {
      out.converged = true;
      break;
    }
    if (out.iterations >= max_iters) break;
    for (std::size_t a = 0; a < m; ++a) out.rho[a] = std::max(0.0, out.rho[a] - step * (v[a] - 1.0));
    v = multiply(kc, out.rho);
    ++out.iterations;
  }
  for (std::size_t a = 0; a < m; ++a) {
    const double size = static_cast<double>(class_sizes[a]);
    out.cap += size * out.rho[a];
    out.energy += size * out.rho[a] * v[a];
  }
  return out;
}

EquilibriumResult capacity_qp(const std::vector<BiNode>& family, const std::optional<SymmetryClasses>& classes,
                              double tol, std::size_t max_iters) {
  if (family.empty()) throw ArgumentError("capacity of an empty family");
  SymmetryClasses parts;
  if (classes) {
    parts = *classes;
    std::vector<bool> seen(family.size(), false);
    for (const auto& c : parts) {
      if (c.empty()) throw ArgumentError("empty symmetry class");
      for (std::size_t v : c) {
        if (v >= family.size() || seen[v]) throw ArgumentError("symmetry classes must partition the family");
        seen[v] = true;
      }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
      throw ArgumentError("symmetry classes must partition the family");
    }
  } else {
    for (std::size_t i = 0; i < family.size(); ++i) parts.push_back({i});
  }
  std::vector<std::size_t> sizes;
  for (const auto& c : parts) sizes.push_back(c.size());
  return solve_equilibrium(reduced_kernel(family, parts), sizes, tol, max_iters);
}

// ---------------------------------------------------------------------------

namespace {

/// Solves a x = 1 exactly; empty when a is singular.
std::optional<std::vector<Rational>> solve_ones(std::vector<std::vector<Rational>> a) {
  const std::size_t m = a.size();
  std::vector<Rational> b(m, Rational(1));
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    while (pivot < m && a[pivot][col] == 0) ++pivot;
    if (pivot == m) return std::nullopt;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const Rational factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c < m; ++c) a[r][c] -= factor * a[col][c];
      b[r] -= factor * b[col];
    }
  }
  for (std::size_t r = 0; r < m; ++r) b[r] /= a[r][r];
  return b;
}

}  // namespace

Rational capacity_bruteforce(const std::vector<BiNode>& family) {
  const std::size_t m = family.size();
  if (m == 0) throw ArgumentError("capacity of an empty family");
  if (m > 12) throw ArgumentError("brute-force capacity supports at most 12 members");
  std::vector<std::vector<Rational>> k(m, std::vector<Rational>(m));
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) k[a][b] = Rational(static_cast<unsigned long>(bitree_kernel(family[a], family[b])));
  }

  std::optional<Rational> best;
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (1u << i)) idx.push_back(i);
    }
    std::vector<std::vector<Rational>> ks(idx.size(), std::vector<Rational>(idx.size()));
    for (std::size_t a = 0; a < idx.size(); ++a) {
      for (std::size_t b = 0; b < idx.size(); ++b) ks[a][b] = k[idx[a]][idx[b]];
    }
    const auto rho = solve_ones(std::move(ks));
    if (!rho) continue;
    if (std::any_of(rho->begin(), rho->end(), [](const Rational& r) { return r < 0; })) continue;
    bool feasible = true;
    for (std::size_t v = 0; v < m && feasible; ++v) {
      Rational pot(0);
      for (std::size_t a = 0; a < idx.size(); ++a) pot += (*rho)[a] * k[v][idx[a]];
      feasible = pot >= 1;
    }
    if (!feasible) continue;
    Rational total(0);
    for (const auto& r : *rho) total += r;
    if (!best || total < *best) best = total;
  }
  if (!best) throw std::logic_error("no feasible active set for a nonempty family");
  return *best;
}

Rational primal_energy(const std::vector<BiNode>& family, const std::vector<Rational>& rho) {
  std::map<BiNode, Rational> phi;
  for (std::size_t a = 0; a < family.size(); ++a) {
    for (const auto& r : ancestors(family[a])) phi[r] += rho[a];
  }
  Rational sum(0);
  for (const auto& [r, v] : phi) sum += v * v;
  return sum;
}

Rational bitree_energy(const std::vector<BiNode>& family, const std::vector<Rational>& rho) {
  Rational sum(0);
  for (std::size_t a = 0; a < family.size(); ++a) {
    for (std::size_t b = 0; b < family.size(); ++b) {
      sum += rho[a] * rho[b] * Rational(static_cast<unsigned long>(bitree_kernel(family[a], family[b])));
    }
  }
  return sum;
}

// ---------------------------------------------------------------------------

namespace {

NodeAddress labelled_path(std::size_t j, unsigned M, std::size_t zeros) {
  return NodeAddress::from_integer(j - 1, M).append(NodeAddress::repeat(false, zeros));
}

/// Common prefix length of the M-bit labels of groups j and j'.
unsigned label_lcp(std::size_t j, std::size_t jp, unsigned M) {
  const std::uint64_t diff = static_cast<std::uint64_t>((j - 1) ^ (jp - 1));
  return M - static_cast<unsigned>(std::bit_width(diff));
}

Rational sq(unsigned c) { return Rational(static_cast<unsigned long>(c + 1) * (c + 1)); }

}  // namespace

BiNode BitreeInstance::omega(std::size_t j) const {
  if (j < 1 || j > groups) throw DomainError("group index out of range");
  return {labelled_path(j, M, n), labelled_path(j, M, n)};
}

BiNode BitreeInstance::member(std::size_t j, std::size_t k) const {
  if (j < 1 || j > groups || k > s) throw DomainError("family index out of range");
  return {labelled_path(j, M, x_extra[k]), labelled_path(j, M, y_extra[k])};
}

SymmetryClasses BitreeInstance::symmetry_classes() const {
  SymmetryClasses classes(s + 1);
  for (std::size_t j = 1; j <= groups; ++j) {
    for (std::size_t k = 0; k <= s; ++k) classes[k].push_back((j - 1) * (s + 1) + k);
  }
  return classes;
}

namespace {

constexpr unsigned kAdmissibleN[] = {4, 16, 256, 65536};

/// Sizes and potentials, without λ or explicit nodes.
BitreeInstance skeleton(unsigned n) {
  if (std::find(std::begin(kAdmissibleN), std::end(kAdmissibleN), n) == std::end(kAdmissibleN)) {
    throw ArgumentError("n must be one of 4, 16, 256, 65536, got " + std::to_string(n));
  }
  BitreeInstance inst;
  inst.n = n;
  inst.s = static_cast<unsigned>(std::countr_zero(n));
  inst.groups = n / inst.s;
  inst.M = static_cast<unsigned>(std::countr_zero(inst.groups));
  for (unsigned k = 0; k <= inst.s; ++k) {
    const std::size_t pk = std::size_t{1} << k;
    inst.x_extra.push_back((n + pk - 1) / pk);
    inst.y_extra.push_back(pk);
  }
  inst.delta = Rational(1, static_cast<unsigned long>(n) * inst.s);
  inst.delta.canonicalize();
  for (unsigned k = 0; k <= inst.s; ++k) inst.potential_by_k.push_back(structured_potential(inst, 1, k));
  return inst;
}

const Rational& min_potential(const BitreeInstance& inst) {
  return *std::min_element(inst.potential_by_k.begin(), inst.potential_by_k.end());
}

}  // namespace

const Rational& lambda_constant() {
  static const Rational c = [] {
    std::optional<Rational> least;
    for (unsigned n : kAdmissibleN) {
      const BitreeInstance inst = skeleton(n);
      const Rational scaled = Rational(n) * min_potential(inst);
      if (!least || scaled < *least) least = scaled;
    }
    return Rational(*least / 2);
  }();
  return c;
}

BitreeInstance build_instance(unsigned n) {
  BitreeInstance inst = skeleton(n);
  inst.lambda = lambda_constant() / Rational(n);
  inst.lambda_instance = min_potential(inst) / 2;
  const auto [lo, hi] = std::minmax_element(inst.potential_by_k.begin(), inst.potential_by_k.end());
  inst.inclusion_full = 2 * inst.lambda <= *lo && *hi <= 4 * inst.lambda;

  if (n <= kExplicitInstanceLimit) {
    const Rational atom(1, static_cast<unsigned long>(n) * n);
    for (std::size_t j = 1; j <= inst.groups; ++j) inst.nu.add(inst.omega(j), atom);
    for (std::size_t j = 1; j <= inst.groups; ++j) {
      for (unsigned k = 0; k <= inst.s; ++k) inst.family.push_back(inst.member(j, k));
    }
  }
  return inst;
}

Rational structured_potential(const BitreeInstance& inst, std::size_t j, std::size_t k) {
  // q_jk contains ω_j, so their common ancestors are those of q_jk; for
  // j' != j both paths part inside the label.
  Rational sum(static_cast<unsigned long>((inst.M + inst.x_extra[k] + 1) * (inst.M + inst.y_extra[k] + 1)));
  for (std::size_t jp = 1; jp <= inst.groups; ++jp) {
    if (jp != j) sum += sq(label_lcp(j, jp, inst.M));
  }
  Rational out = sum / Rational(static_cast<unsigned long>(inst.n) * inst.n);
  out.canonicalize();
  return out;
}

std::vector<std::vector<double>> structured_reduced_kernel(const BitreeInstance& inst) {
  double off = 0;
  for (std::size_t jp = 2; jp <= inst.groups; ++jp) off += to_double(sq(label_lcp(1, jp, inst.M)));
  const std::size_t m = inst.s + 1;
  std::vector<std::vector<double>> kc(m, std::vector<double>(m));
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      const double kx = static_cast<double>(inst.M + std::min(inst.x_extra[a], inst.x_extra[b]) + 1);
      const double ky = static_cast<double>(inst.M + std::min(inst.y_extra[a], inst.y_extra[b]) + 1);
      kc[a][b] = kx * ky + off;
    }
  }
  return kc;
}

LemmaGReport check_lemma_g(const BitreeInstance& inst) {
  LemmaGReport r;
  r.n = inst.n;
  for (unsigned k = 0; k <= inst.s; ++k) {
    if (inst.is_explicit()) {
      r.values.push_back(potential(inst.nu, inst.member(1, k)));
      r.values_j2.push_back(potential(inst.nu, inst.member(2, k)));
    } else {
      r.values.push_back(structured_potential(inst, 1, k));
      r.values_j2.push_back(structured_potential(inst, 2, k));
    }
  }
  const auto [lo, hi] = std::minmax_element(r.values.begin(), r.values.end());
  const Rational n_s(inst.n);
  r.n_min = n_s * *lo;
  r.n_max = n_s * *hi;
  r.ratio = to_double(Rational(*hi / *lo));
  r.symmetric = r.values == r.values_j2;
  r.inclusion_full = 2 * inst.lambda <= *lo && *hi <= 4 * inst.lambda;
  return r;
}

EquilibriumResult instance_capacity(const BitreeInstance& inst, bool use_symmetry, double tol,
                                    std::size_t max_iters) {
  if (use_symmetry) {
    std::vector<std::size_t> sizes(inst.s + 1, inst.groups);
    return solve_equilibrium(structured_reduced_kernel(inst), sizes, tol, max_iters);
  }
  if (!inst.is_explicit()) {
    throw ResourceError("capacity without symmetry reduction", inst.family_size(),
                        skeleton(kExplicitInstanceLimit).family_size());
  }
  return capacity_qp(inst.family, std::nullopt, tol, max_iters);
}

D2Row report_d2(const BitreeInstance& inst, const EquilibriumResult& eq) {
  if (!eq.converged) {
    throw PreconditionError("equilibrium did not converge (kkt violation " + to_string(eq.kkt_max_violation) +
                            " after " + std::to_string(eq.iterations) + " iterations)");
  }
  D2Row row;
  row.n = inst.n;
  row.delta = inst.delta;
  row.lambda = inst.lambda;
  row.delta_over_lambda = to_double(Rational(inst.delta / inst.lambda));
  row.delta_over_lambda_instance = to_double(Rational(inst.delta / inst.lambda_instance));
  row.cap = eq.cap;
  row.cap_over_delta_lambda = eq.cap / row.delta_over_lambda;
  row.kkt_max_violation = eq.kkt_max_violation;
  row.iterations = eq.iterations;
  row.inclusion_full = inst.inclusion_full;

  const bool reduced = eq.rho.size() == inst.s + 1 && inst.family_size() != inst.s + 1;
  const std::size_t k_lo = (inst.s + 1) / 2;
  const std::size_t k_hi = 3 * inst.s / 4;
  double sum = 0;
  std::size_t count = 0;
  for (std::size_t k = k_lo; k <= k_hi; ++k) {
    if (reduced) {
      sum += eq.rho[k];
      ++count;
    } else {
      for (std::size_t j = 1; j <= inst.groups; ++j) {
        sum += eq.rho[(j - 1) * (inst.s + 1) + k];
        ++count;
      }
    }
  }
  row.n_mean_middle_rho = inst.n * sum / static_cast<double>(count);
  return row;
}

nlohmann::json to_json(const EquilibriumResult& eq) {
  return {{"rho", eq.rho},
          {"class_sizes", eq.class_sizes},
          {"cap", scalar_json(eq.cap)},
          {"energy", scalar_json(eq.energy)},
          {"kkt_max_violation", scalar_json(eq.kkt_max_violation)},
          {"iterations", eq.iterations},
          {"converged", eq.converged}};
}

nlohmann::json to_json(const LemmaGReport& r) {
  nlohmann::json values = nlohmann::json::array();
  for (const auto& v : r.values) values.push_back(scalar_json(v));
  return {{"n", r.n},
          {"values", values},
          {"n_min", scalar_json(r.n_min)},
          {"n_max", scalar_json(r.n_max)},
          {"ratio", r.ratio},
          {"symmetric", r.symmetric},
          {"inclusion_full", r.inclusion_full}};
}

nlohmann::json to_json(const D2Row& r) {
  return {{"n", r.n},
          {"delta", scalar_json(r.delta)},
          {"lambda", scalar_json(r.lambda)},
          {"delta_over_lambda", r.delta_over_lambda},
          {"delta_over_lambda_instance", r.delta_over_lambda_instance},
          {"cap", r.cap},
          {"cap_over_delta_lambda", r.cap_over_delta_lambda},
          {"n_mean_middle_rho", r.n_mean_middle_rho},
          {"kkt_max_violation", r.kkt_max_violation},
          {"iterations", r.iterations},
          {"inclusion_full", r.inclusion_full}};
}

}  // namespace cxlab
