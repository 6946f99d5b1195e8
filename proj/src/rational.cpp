#include "crnlyap/rational.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace crnlyap {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

BigInt pow10(long exponent) {
  BigInt result = 1;
  for (long i = 0; i < exponent; ++i) result *= 10;
  return result;
}

// Boost reads a leading 0 as an octal prefix.
BigInt decimal_int(std::string_view digits) {
  const auto first = digits.find_first_not_of('0');
  if (first == std::string_view::npos) return BigInt(0);
  return BigInt(std::string(digits.substr(first)));
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view text) {
  if (text.empty()) return std::nullopt;

  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto num = text.substr(0, slash);
    const auto den = text.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) return std::nullopt;
    const BigInt d = decimal_int(den);
    if (d == 0) return std::nullopt;
    return Rational(decimal_int(num), d);
  }

  // decimal := digits ["." digits] [("e"|"E") ["+"|"-"] digits], or "." digits
  std::string_view mantissa = text;
  long exponent = 0;
  if (const auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = text.substr(0, e);
    auto exp_text = text.substr(e + 1);
    bool negative = false;
    if (!exp_text.empty() && (exp_text[0] == '+' || exp_text[0] == '-')) {
      negative = exp_text[0] == '-';
      exp_text.remove_prefix(1);
    }
    if (!all_digits(exp_text) || exp_text.size() > 4) return std::nullopt;
    exponent = std::stol(std::string(exp_text));
    if (negative) exponent = -exponent;
  }

  std::string_view int_part = mantissa;
  std::string_view frac_part;
  if (const auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    int_part = mantissa.substr(0, dot);
    frac_part = mantissa.substr(dot + 1);
    if (!frac_part.empty() && !all_digits(frac_part)) return std::nullopt;
  }
  if (int_part.empty() && frac_part.empty()) return std::nullopt;
  if (!int_part.empty() && !all_digits(int_part)) return std::nullopt;

  const std::string digits = std::string(int_part) + std::string(frac_part);
  const BigInt numerator = decimal_int(digits);
  exponent -= static_cast<long>(frac_part.size());
  if (exponent >= 0) return Rational(numerator * pow10(exponent));
  return Rational(numerator, pow10(-exponent));
}

std::string to_string(const Rational& value) {
  const BigInt num = boost::multiprecision::numerator(value);
  const BigInt den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

Rational from_double(double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("cannot convert a non-finite value to a rational");
  }
  int exponent = 0;
  const double mantissa = std::frexp(value, &exponent);
  // mantissa * 2^53 is an exact integer
  const auto scaled = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
  exponent -= 53;
  Rational result{BigInt(scaled)};
  BigInt power = 1;
  power <<= std::abs(exponent);
  if (exponent >= 0) return result * Rational(power);
  return result / Rational(power);
}

Rational pow(const Rational& base, int exponent) {
  if (exponent < 0) return Rational(1) / pow(base, -exponent);
  Rational result = 1;
  Rational factor = base;
  unsigned e = static_cast<unsigned>(exponent);
  while (e != 0) {
    if (e & 1U) result *= factor;
    factor *= factor;
    e >>= 1U;
  }
  return result;
}

BigInt gcd(const BigInt& a, const BigInt& b) {
  return boost::multiprecision::gcd(a, b);
}

}  // namespace crnlyap
