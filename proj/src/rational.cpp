#include "coarsemed/rational.hpp"

#include <regex>

#include "coarsemed/errors.hpp"

namespace coarsemed {

std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

Rational parse_rational(const std::string& text) {
  static const std::regex pattern(R"(\s*(-?\d+)\s*(?:/\s*(\d+)\s*)?)");
  std::smatch match;
  if (!std::regex_match(text, match, pattern)) {
    throw InputError("not a rational number: '" + text + "'");
  }
  const BigInt num(match[1].str());
  const BigInt den = match[2].matched ? BigInt(match[2].str()) : BigInt(1);
  if (den == 0) throw InputError("zero denominator in '" + text + "'");
  return Rational(num, den);
}

}  // namespace coarsemed
