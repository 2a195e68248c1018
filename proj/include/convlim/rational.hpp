#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace convlim {

/// Exact arbitrary-precision rational. All probabilities in the library use it.
using Rational = mpq_class;

/// Parses "p/q" (q > 0, gcd(p, q) = 1) or an integer string.
/// Throws std::invalid_argument on anything else, including non-reduced fractions.
Rational parse_rational(std::string_view text);

/// Canonical text form: "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& value);

}  // namespace convlim
