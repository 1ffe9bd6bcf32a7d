#ifndef COBOUNDARY_RAT_HPP
#define COBOUNDARY_RAT_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace coboundary {

// Exact rational scalar. cpp_rational keeps lowest terms and a positive
// denominator as class invariants; all arithmetic is exact.
using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rat rat(long num, long den = 1) { return Rat(num, den); }

inline int sign(const Rat& x) { return x.sign(); }

inline Rat abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }

inline const Rat& min(const Rat& a, const Rat& b) { return a < b ? a : b; }
inline const Rat& max(const Rat& a, const Rat& b) { return a < b ? b : a; }

// Renders "p/q", or just "p" for integers.
std::string to_string(const Rat& x);

// Parses "p/q" or "p" (optional leading '-'). Throws structural_error on
// malformed input or zero denominator.
Rat rat_from_string(const std::string& s);

// Optional guard on denominator bit size, configurable via
// COBOUNDARY_MAX_DENOM_BITS (0 or unset = unlimited). Tower composition
// multiplies denominators, so long runs can hit this deliberately.
void set_denominator_guard(unsigned bits);
unsigned denominator_guard();
void check_denominator_guard(const Rat& x);

// Decimal rendering with the given number of significant digits (round half
// away from zero). Used only by CSV export; everything else stays rational.
std::string to_decimal_string(const Rat& x, int significant_digits);

// Largest integer n with n <= x.
BigInt floor_int(const Rat& x);

} // namespace coboundary

#endif
