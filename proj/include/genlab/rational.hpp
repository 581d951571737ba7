#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>

namespace genlab {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational ratio(std::int64_t num, std::int64_t den) { return Rational(num, den); }

// "p/q" or "p" for integers.
std::string to_string(const Rational& r);

// Accepts "p/q", integers and finite decimals ("0.27"); throws std::invalid_argument.
Rational parse_rational(const std::string& text);

double to_double(const Rational& r);
BigInt floor(const Rational& r);
BigInt ceil(const Rational& r);
std::int64_t floor_i64(const Rational& r);
std::int64_t ceil_i64(const Rational& r);

}  // namespace genlab
