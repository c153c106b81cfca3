#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace dihp {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt pow2(unsigned e) { return BigInt(1) << e; }

inline BigInt factorial(unsigned n) {
  BigInt r = 1;
  for (unsigned i = 2; i <= n; ++i) r *= i;
  return r;
}

inline BigInt binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt r = 1;
  for (unsigned i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

inline double to_double(const BigInt& v) { return v.convert_to<double>(); }
inline double to_double(const Rational& v) { return v.convert_to<double>(); }

// log2 of a positive integer, accurate even when the value overflows a double
inline double log2_big(const BigInt& v) {
  if (v <= 0) throw std::domain_error("log2 of non-positive integer");
  unsigned bits = boost::multiprecision::msb(v);
  if (bits < 1000) return std::log2(to_double(v));
  unsigned shift = bits - 60;
  return std::log2(to_double(BigInt(v >> shift))) + shift;
}

inline double log2_ratio(const BigInt& num, const BigInt& den) { return log2_big(num) - log2_big(den); }

inline Rational rpow(const Rational& b, unsigned e) {
  using boost::multiprecision::numerator;
  using boost::multiprecision::denominator;
  return Rational(BigInt(boost::multiprecision::pow(numerator(b), e)), BigInt(boost::multiprecision::pow(denominator(b), e)));
}

inline std::string to_string(const Rational& r) { return r.str(); }

}  // namespace dihp
