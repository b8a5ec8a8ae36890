#include "cxlab/scalar.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace cxlab {

std::string_view mode_name(Mode m) { return m == Mode::exact ? "exact" : "float"; }

double to_double(const Rational& x) { return x.get_d(); }

bool is_integral_exponent(double p) { return std::isfinite(p) && std::floor(p) == p && p >= 0; }

template <>
Rational power<Rational>(const Rational& x, double p) {
  if (!is_integral_exponent(p)) {
    throw std::domain_error("exact mode needs a non-negative integral exponent, got " +
                            to_string(p));
  }
  return pow_int(x, static_cast<unsigned>(p));
}

template <>
double power<double>(const double& x, double p) {
  if (p == 0.0) return 1.0;
  if (x == 0.0) return 0.0;
  if (is_integral_exponent(p) && p <= 64) return pow_int(x, static_cast<unsigned>(p));
  return std::pow(x, p);
}

bool is_zero(const Rational& x) { return sgn(x) == 0; }
bool is_negative(const Rational& x) { return sgn(x) < 0; }

std::string to_string(const Rational& x) { return x.get_str(); }

std::string to_string(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty scalar literal");
  if (s.find('/') != std::string::npos) {
    Rational r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad fraction: " + s);
    r.canonicalize();
    if (r.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
    return r;
  }
  // Decimal: split mantissa/exponent and build exactly.
  std::string mant = s;
  long exp10 = 0;
  if (auto e = s.find_first_of("eE"); e != std::string::npos) {
    mant = s.substr(0, e);
    exp10 = std::stol(s.substr(e + 1));
  }
  bool neg = false;
  if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
    neg = mant[0] == '-';
    mant.erase(0, 1);
  }
  std::string digits;
  for (char c : mant) {
    if (c == '.') {
      --exp10;  // compensated below per fractional digit
      continue;
    }
    if (c < '0' || c > '9') throw std::invalid_argument("bad decimal: " + s);
    digits.push_back(c);
  }
  // Each fractional digit shifts by one; undo the single decrement per '.'.
  if (auto dot = mant.find('.'); dot != std::string::npos) {
    exp10 += 1;
    exp10 -= static_cast<long>(mant.size() - dot - 1);
  }
  if (digits.empty()) throw std::invalid_argument("bad decimal: " + s);
  mpz_class num(digits, 10);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
  Rational r = exp10 >= 0 ? Rational(num * scale) : Rational(num, scale);
  r.canonicalize();
  return neg ? Rational(-r) : r;
}

}  // namespace

template <>
Rational parse_scalar<Rational>(std::string_view text) {
  return parse_rational(text);
}

template <>
double parse_scalar<double>(std::string_view text) {
  if (text.find('/') != std::string_view::npos) return parse_rational(text).get_d();
  std::size_t used = 0;
  std::string s(text);
  double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad decimal: " + s);
  return v;
}

}  // namespace cxlab
