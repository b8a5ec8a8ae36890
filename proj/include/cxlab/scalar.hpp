#pragma once

// Scalar modes: exact rationals (GMP) and IEEE doubles. Every numeric
// template in cxlab is instantiated for exactly these two types.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>

namespace cxlab {

using Rational = mpq_class;
using Real = double;

template <class S>
inline constexpr bool is_exact_v = std::is_same_v<S, Rational>;

template <class S>
concept Scalar = std::is_same_v<S, Rational> || std::is_same_v<S, Real>;

enum class Mode { exact, floating };

std::string_view mode_name(Mode m);

template <Scalar S>
constexpr Mode mode_of() {
  return is_exact_v<S> ? Mode::exact : Mode::floating;
}

/// Relative slack used when a float-mode comparison should count as "<=".
/// Zero in exact mode.
template <Scalar S>
constexpr double comparison_tolerance() {
  return is_exact_v<S> ? 0.0 : 1e-9;
}

double to_double(const Rational& x);
inline double to_double(double x) { return x; }

/// Builds a scalar from a double. Exact mode converts the binary value exactly.
template <Scalar S>
S from_double(double x) {
  if constexpr (is_exact_v<S>) {
    Rational r(x);
    r.canonicalize();
    return r;
  } else {
    return x;
  }
}

template <Scalar S>
S from_ratio(std::int64_t num, std::int64_t den) {
  if constexpr (is_exact_v<S>) {
    Rational r(mpz_class(static_cast<long>(num)), mpz_class(static_cast<long>(den)));
    r.canonicalize();
    return r;
  } else {
    return static_cast<double>(num) / static_cast<double>(den);
  }
}

/// x^e for a non-negative integer exponent, by repeated squaring.
template <Scalar S>
S pow_int(const S& x, unsigned e) {
  S result = from_ratio<S>(1, 1);
  S base = x;
  while (e != 0) {
    if (e & 1u) result *= base;
    e >>= 1u;
    if (e != 0) base *= base;
  }
  return result;
}

/// 2^e for any integer e.
template <Scalar S>
S pow2(long e) {
  if constexpr (is_exact_v<S>) {
    Rational r(1);
    if (e >= 0) {
      mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<unsigned long>(e));
    } else {
      mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<unsigned long>(-e));
    }
    return r;
  } else {
    return std::ldexp(1.0, static_cast<int>(e));
  }
}

bool is_integral_exponent(double p);

/// x^p for real p. Exact mode accepts only integral p and throws
/// std::domain_error otherwise. 0^0 is 1.
template <Scalar S>
S power(const S& x, double p);

bool is_zero(const Rational& x);
inline bool is_zero(double x) { return x == 0.0; }

bool is_negative(const Rational& x);
inline bool is_negative(double x) { return x < 0.0; }

/// a <= b, with the mode's relative tolerance in float mode.
template <Scalar S>
bool leq_tol(const S& a, const S& b) {
  if constexpr (is_exact_v<S>) {
    return a <= b;
  } else {
    const double scale = std::max({1e-300, std::fabs(a), std::fabs(b)});
    return a - b <= comparison_tolerance<S>() * scale;
  }
}

/// Exact mode: canonical fraction "a/b" (or "a"). Float mode: %.17g.
std::string to_string(const Rational& x);
std::string to_string(double x);

/// Parses "a/b", an integer, or a decimal literal. Decimals are exact in
/// rational mode (0.25 -> 1/4).
template <Scalar S>
S parse_scalar(std::string_view text);

}  // namespace cxlab
