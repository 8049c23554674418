#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace linred {

using Rational = mpq_class;

// Exact point in the predicate's variable space, in declaration order.
using Valuation = std::vector<Rational>;

// Accepts "p", "-p", "p/q", "-p/q" and finite decimals such as "5.25".
// Throws std::invalid_argument on anything else or on a zero denominator.
Rational parse_rational(std::string_view text);

// Same as parse_rational but rejects decimal points.
Rational parse_fraction(std::string_view text);

// Canonical "p" or "p/q" form (sign on the numerator).
std::string to_string(const Rational& value);

bool is_integer(const Rational& value);

mpz_class floor_of(const Rational& value);
mpz_class ceil_of(const Rational& value);

// True iff the value has a finite decimal expansion (denominator 2^a 5^b).
bool has_exact_decimal(const Rational& value);

// Exact decimal rendering; precondition has_exact_decimal(value).
std::string to_decimal(const Rational& value);

// Least positive integer that clears every denominator in the range.
mpz_class denominator_lcm(const std::vector<Rational>& values);

std::string to_string(const Valuation& point);

} // namespace linred
