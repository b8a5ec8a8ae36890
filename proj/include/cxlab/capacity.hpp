#pragma once

// Bi-tree capacity of rectangle families and the diagonal-squares instance.
//
// Capacity is computed on the measure side: minimize (1/2) E(ρ) − Σρ over
// ρ >= 0 on the family, where E(ρ) = Σ ρ_a ρ_b K(a, b) and K(a, b) counts the
// rectangles containing both a and b. At the optimum V^ρ = Kρ equals 1 on
// supp ρ, is >= 1 on the family, and cap = Σρ = E(ρ).
//
// The instance: n = 2^s with s a power of two, 2^M = n/s diagonal squares.
// ω_j is the square of side 2^{-n}·2^{-M} at the south-west corner of the
// j-th diagonal square; q_jk (k = 0..s) is the rectangle above ω_j with x
// depth M + ⌈n/2^k⌉ and y depth M + 2^k; ν puts mass 1/n² on every ω_j.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cxlab/hardy.hpp"

namespace cxlab {

/// One variable per class; members of a class must be images of each other
/// under tree automorphisms that preserve the family.
using SymmetryClasses = std::vector<std::vector<std::size_t>>;

struct EquilibriumResult {
  std::vector<double> rho;               // mass per member of each class (or per rectangle)
  std::vector<std::size_t> class_sizes;  // all 1 without symmetry
  double cap = 0;                        // Σ_c |c| ρ_c
  double energy = 0;                     // E(ρ) over the full family
  double kkt_max_violation = 0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// K(a, b) = (lcp_x + 1)(lcp_y + 1).
inline std::uint64_t bitree_kernel(const BiNode& a, const BiNode& b) { return common_ancestor_count(a, b); }

/// Class-reduced kernel Kc[a][b] = Σ_{v in class b} K(rep_a, v), rep_a the
/// first member of class a. Rows are assembled on `threads` threads.
std::vector<std::vector<double>> reduced_kernel(const std::vector<BiNode>& family, const SymmetryClasses& classes,
                                                unsigned threads = 0);

/// Projected gradient on the reduced problem: step 1/(max row sum of Kc),
/// gradient Kcρ − 1, clamp at 0, starting from ρ = 0. Stops when the KKT
/// violation (|V−1| on supp ρ, max(0, 1−V) off it) is <= tol.
EquilibriumResult solve_equilibrium(const std::vector<std::vector<double>>& kc,
                                    const std::vector<std::size_t>& class_sizes, double tol,
                                    std::size_t max_iters);

/// Capacity of an explicit family. Throws ArgumentError for an empty family.
EquilibriumResult capacity_qp(const std::vector<BiNode>& family, const std::optional<SymmetryClasses>& classes,
                              double tol, std::size_t max_iters);

/// Exact capacity by enumerating active sets. Throws ArgumentError for an
/// empty family or more than 12 members.
Rational capacity_bruteforce(const std::vector<BiNode>& family);

/// Σ_R (I*ρ)(R)² over every rectangle R containing a family member, by
/// explicit enumeration. Equals E(ρ); intended for small instances.
Rational primal_energy(const std::vector<BiNode>& family, const std::vector<Rational>& rho);

Rational bitree_energy(const std::vector<BiNode>& family, const std::vector<Rational>& rho);

// ---------------------------------------------------------------------------

/// Largest n whose nodes and family are stored explicitly.
inline constexpr unsigned kExplicitInstanceLimit = 256;

struct BitreeInstance {
  unsigned n = 0;
  unsigned s = 0;
  unsigned M = 0;
  std::size_t groups = 0;          // n/s, the range of j
  std::vector<std::size_t> x_extra;  // ⌈n/2^k⌉ for k = 0..s
  std::vector<std::size_t> y_extra;  // 2^k
  Rational delta;
  /// c/n with one constant c for every admissible n: half the smallest
  /// n·potential(ν, q) over all admissible instances.
  Rational lambda;
  /// Half the smallest family potential of this instance alone.
  Rational lambda_instance;
  std::vector<Rational> potential_by_k;  // potential(ν, q_1k)
  bool inclusion_full = false;           // 2λ <= potential <= 4λ on the whole family
  /// Materialized for n <= kExplicitInstanceLimit, empty otherwise.
  PointMeasure<Rational> nu;
  std::vector<BiNode> family;  // j-major: index (j-1)(s+1) + k

  BiNode omega(std::size_t j) const;
  BiNode member(std::size_t j, std::size_t k) const;
  bool is_explicit() const { return !family.empty(); }
  std::size_t family_size() const { return groups * (s + 1); }
  /// Classes {q_jk : j} for each k.
  SymmetryClasses symmetry_classes() const;
};

/// Admissible n: 4, 16, 256, 65536. Throws ArgumentError otherwise.
BitreeInstance build_instance(unsigned n);

/// The constant c in λ = c/n.
const Rational& lambda_constant();

/// potential(ν, q_jk) from the label structure, without materializing nodes.
Rational structured_potential(const BitreeInstance& inst, std::size_t j, std::size_t k);

/// Reduced kernel over the classes {q_jk : j}, from the label structure.
std::vector<std::vector<double>> structured_reduced_kernel(const BitreeInstance& inst);

struct LemmaGReport {
  unsigned n = 0;
  std::vector<Rational> values;     // potential(ν, q_1k), k = 0..s
  std::vector<Rational> values_j2;  // potential(ν, q_2k)
  Rational n_min;                   // n · min
  Rational n_max;                   // n · max
  double ratio = 0;                 // max/min
  bool symmetric = false;           // values == values_j2
  bool inclusion_full = false;
};

LemmaGReport check_lemma_g(const BitreeInstance& inst);

/// Equilibrium for the instance's family, using the class-reduced structured
/// kernel when `use_symmetry` (required above kExplicitInstanceLimit).
EquilibriumResult instance_capacity(const BitreeInstance& inst, bool use_symmetry, double tol,
                                    std::size_t max_iters);

struct D2Row {
  unsigned n = 0;
  Rational delta;
  Rational lambda;
  double delta_over_lambda = 0;
  double delta_over_lambda_instance = 0;
  double cap = 0;
  double cap_over_delta_lambda = 0;
  double n_mean_middle_rho = 0;  // n · mean of ρ_k over k in [s/2, 3s/4]
  double kkt_max_violation = 0;
  std::size_t iterations = 0;
  bool inclusion_full = false;
};

/// Throws PreconditionError when `eq` did not converge.
D2Row report_d2(const BitreeInstance& inst, const EquilibriumResult& eq);

nlohmann::json to_json(const EquilibriumResult& eq);
nlohmann::json to_json(const LemmaGReport& r);
nlohmann::json to_json(const D2Row& r);

}  // namespace cxlab
