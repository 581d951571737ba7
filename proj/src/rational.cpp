#include "genlab/rational.hpp"

#include <stdexcept>

namespace genlab {

std::string to_string(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational");
  try {
    if (auto slash = text.find('/'); slash != std::string::npos) {
      const Rational num = parse_rational(text.substr(0, slash));
      const Rational den = parse_rational(text.substr(slash + 1));
      if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
      return Rational(num / den);
    }
    std::string mantissa = text;
    int exponent = 0;
    if (auto e = mantissa.find_first_of("eE"); e != std::string::npos) {
      exponent = std::stoi(mantissa.substr(e + 1));
      mantissa = mantissa.substr(0, e);
    }
    if (auto dot = mantissa.find('.'); dot != std::string::npos) {
      exponent -= static_cast<int>(mantissa.size() - dot - 1);
      mantissa.erase(dot, 1);
    }
    if (mantissa.empty() || mantissa == "-" || mantissa == "+")
      throw std::invalid_argument("malformed number '" + text + "'");
    if (mantissa[0] == '+') mantissa.erase(0, 1);
    // Leading zeros would make the integer parser read octal.
    const std::size_t sign = mantissa[0] == '-' ? 1 : 0;
    const std::size_t nz = mantissa.find_first_not_of('0', sign);
    mantissa.erase(sign, (nz == std::string::npos ? mantissa.size() - 1 : nz) - sign);
    Rational value{BigInt(mantissa)};
    BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(exponent < 0 ? -exponent : exponent));
    if (exponent < 0) return value / scale;
    return value * scale;
  } catch (const std::runtime_error&) {
    throw std::invalid_argument("malformed number '" + text + "'");
  }
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

BigInt floor(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  BigInt q = num / den;
  if (num < 0 && q * den != num) q -= 1;
  return q;
}

BigInt ceil(const Rational& r) { return -floor(-r); }

std::int64_t floor_i64(const Rational& r) { return floor(r).convert_to<std::int64_t>(); }
std::int64_t ceil_i64(const Rational& r) { return ceil(r).convert_to<std::int64_t>(); }

}  // namespace genlab
