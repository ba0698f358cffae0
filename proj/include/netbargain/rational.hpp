#pragma once

// Exact rational scalar used for every weight, split, payoff and coalition
// value in the library.

#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace netbargain {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an exhaustive routine would exceed its desk-scale bound.
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline bool is_integer_literal(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

}  // namespace detail

// Accepts "7", "-3", "35/3". Denominator must be positive.
inline Rational parse_rational(std::string_view text) {
  auto trimmed = text;
  while (!trimmed.empty() && trimmed.front() == ' ') trimmed.remove_prefix(1);
  while (!trimmed.empty() && trimmed.back() == ' ') trimmed.remove_suffix(1);
  const auto slash = trimmed.find('/');
  const auto num = trimmed.substr(0, slash);
  if (!detail::is_integer_literal(num)) {
    throw ParseError("malformed rational '" + std::string(text) + "'");
  }
  Integer n(std::string(num[0] == '+' ? num.substr(1) : num));
  if (slash == std::string_view::npos) return Rational(n);
  const auto den = trimmed.substr(slash + 1);
  if (!detail::is_integer_literal(den) || den[0] == '-' || den[0] == '+') {
    throw ParseError("malformed rational '" + std::string(text) + "'");
  }
  Integer d{std::string(den)};
  if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  return Rational(n, d);
}

inline std::string to_string(const Rational& q) {
  const auto& num = boost::multiprecision::numerator(q);
  const auto& den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

// Exact value of a finite double.
inline Rational from_double(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite value");
  return Rational(value);
}

// Closest rational to `value` with denominator at most `max_denominator`
// (continued-fraction convergents and the best semiconvergent).
inline Rational limit_denominator(const Rational& value, const Integer& max_denominator) {
  if (max_denominator < 1) throw std::invalid_argument("max_denominator must be >= 1");
  if (boost::multiprecision::denominator(value) <= max_denominator) return value;
  Integer p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  Integer n = boost::multiprecision::numerator(value);
  Integer d = boost::multiprecision::denominator(value);
  while (true) {
    Integer a = n / d;
    if (n < 0 && a * d != n) a -= 1;  // floor for negatives
    Integer q2 = q0 + a * q1;
    if (q2 > max_denominator) break;
    Integer p2 = p0 + a * p1;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    Integer r = n - a * d;
    n = d;
    d = r;
    if (d == 0) break;
  }
  Integer k = (max_denominator - q0) / q1;
  Rational bound1(p0 + k * p1, q0 + k * q1);
  Rational bound2(p1, q1);
  return abs(bound2 - value) <= abs(bound1 - value) ? bound2 : bound1;
}

inline Integer lcm(const Integer& a, const Integer& b) {
  return boost::multiprecision::lcm(a, b);
}

}  // namespace netbargain
