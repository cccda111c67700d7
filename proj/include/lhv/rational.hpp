#pragma once

#include <gmpxx.h>

#include <string>

namespace lhv {

using Rational = mpq_class;

// Parses "num/den" or a bare integer into an exact canonical rational.
// Throws ParseError on malformed input or zero denominator.
Rational parse_rational(const std::string& s);

std::string rational_to_string(const Rational& q);

// floor(10^k * w) for a nonnegative double w, computed exactly.
mpz_class truncate_decimal(double w, int k);

mpz_class pow10(int k);

} // namespace lhv
