#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <boost/rational.hpp>

namespace boost {

using rational64 = rational<std::int64_t>;

// Under C++20 comparison rewriting, boost::rational compared with a built-in
// integer resolves to a template that calls itself. These exact matches win;
// they live in boost so argument-dependent lookup finds them from any namespace.
inline bool operator==(const rational64& a, std::int64_t b) { return a.denominator() == 1 && a.numerator() == b; }
inline bool operator==(std::int64_t a, const rational64& b) { return b.denominator() == 1 && b.numerator() == a; }
inline bool operator==(const rational64& a, int b) { return a == static_cast<std::int64_t>(b); }
inline bool operator==(int a, const rational64& b) { return b == static_cast<std::int64_t>(a); }
inline bool operator!=(const rational64& a, std::int64_t b) { return !(a == b); }
inline bool operator!=(std::int64_t a, const rational64& b) { return !(b == a); }
inline bool operator!=(const rational64& a, int b) { return !(a == b); }
inline bool operator!=(int a, const rational64& b) { return !(b == a); }

}  // namespace boost

namespace delone {

using Rational = boost::rational<std::int64_t>;

/// 50 significant decimal digits; used wherever a transcendental enters.
using Real = boost::multiprecision::cpp_dec_float_50;

/// Parses "p/q", "p", or "-p/q". Throws ParseError on anything else or q == 0.
Rational parse_rational(std::string_view text);

/// Always "p/q" with q > 0, e.g. "3/1".
std::string to_string(const Rational& r);

std::int64_t floor(const Rational& r);
std::int64_t ceil(const Rational& r);
inline Rational abs(const Rational& r) { return r < 0 ? -r : r; }

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

inline Real to_real(const Rational& r) {
  return Real(r.numerator()) / Real(r.denominator());
}

/// True when r is an integer.
inline bool is_integral(const Rational& r) { return r.denominator() == 1; }

}  // namespace delone
