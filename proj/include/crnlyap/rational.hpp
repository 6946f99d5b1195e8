#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace crnlyap {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "p/q", an unsigned integer, or a decimal literal such as "0.125" or
/// "3e-2" into an exact rational. Returns nullopt on malformed input.
std::optional<Rational> parse_rational(std::string_view text);

/// Canonical text: "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& value);

double to_double(const Rational& value);

/// Exact conversion; every finite double is a dyadic rational.
Rational from_double(double value);

Rational pow(const Rational& base, int exponent);

BigInt gcd(const BigInt& a, const BigInt& b);

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  return Rational(num, den);
}

}  // namespace crnlyap
