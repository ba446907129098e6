#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace entlab {

// Exact probabilities, advantages and caps. Never converted to floating point
// except for display and Monte Carlo cross-checks.
using Rational = mpq_class;

/// Parses "p/q", "p" or "-p/q". Throws Error(ParseError) on anything else or a
/// zero denominator.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" (or "p" for integers).
std::string to_string(const Rational& r);

double to_double(const Rational& r);

Rational pow(const Rational& base, unsigned long exponent);

/// 2^e for any integer e.
Rational pow2(long e);

/// -log2(r) for display only.
double neg_log2(const Rational& r);

Rational sum(std::span<const Rational> values);

inline const Rational& max_of(const Rational& a, const Rational& b) { return a < b ? b : a; }
inline const Rational& min_of(const Rational& a, const Rational& b) { return b < a ? b : a; }

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

/// Ceiling of a nonnegative rational as an integer.
std::uint64_t ceil_to_u64(const Rational& r);

/// Exact square root when r is the square of a rational.
bool exact_sqrt(const Rational& r, Rational& out);

}  // namespace entlab
