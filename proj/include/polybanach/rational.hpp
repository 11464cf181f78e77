#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace polybanach {

// Exact arbitrary-precision rational, always stored in lowest terms with a
// positive denominator (GMP canonicalizes on every operation). Expression
// templates are disabled so the type composes cleanly with Eigen.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

/// Parses "p", "-p" or "p/q" (q > 0 after normalization). Throws
/// std::invalid_argument on malformed input or a zero denominator.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] {
    throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
  };
  if (text.empty()) fail();
  const auto slash = text.find('/');
  const std::string_view num_part = text.substr(0, slash == std::string_view::npos ? text.size() : slash);
  const std::string_view den_part = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  auto check_int = [&](std::string_view s) {
    if (s.empty()) fail();
    std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (start == s.size()) fail();
    for (std::size_t i = start; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') fail();
  };
  check_int(num_part);
  check_int(den_part);
  Integer num{std::string(num_part)};
  Integer den{std::string(den_part)};
  if (den == 0) throw std::invalid_argument("zero denominator in rational: '" + std::string(text) + "'");
  return Rational(num) / Rational(den);
}

/// Formats in lowest terms as "p" or "p/q" with q > 1.
inline std::string rational_to_string(const Rational& q) {
  const Integer num = numerator(q);
  const Integer den = denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

/// Exact base^exp for integer exponents (negative allowed when base != 0).
inline Rational rational_pow(const Rational& base, long exp) {
  if (exp == 0) return Rational(1);
  if (exp < 0) {
    if (base == 0) throw std::invalid_argument("rational_pow: zero base with negative exponent");
    return Rational(1) / rational_pow(base, -exp);
  }
  Rational acc(1);
  Rational b = base;
  long e = exp;
  while (e > 0) {
    if (e & 1) acc *= b;
    b *= b;
    e >>= 1;
  }
  return acc;
}

/// 2^(-n) as an exact rational, n >= 0.
inline Rational pow2_inv(long n) { return rational_pow(Rational(1, 2), n); }

}  // namespace polybanach
