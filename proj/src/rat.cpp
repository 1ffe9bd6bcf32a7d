#include "coboundary/rat.hpp"
#include "coboundary/errors.hpp"

#include <cstdlib>

namespace coboundary {

namespace {
unsigned g_denominator_guard_bits = []() -> unsigned {
  const char* env = std::getenv("COBOUNDARY_MAX_DENOM_BITS");
  if (env == nullptr) return 0;
  long v = std::atol(env);
  return v > 0 ? static_cast<unsigned>(v) : 0;
}();

bool valid_integer_token(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return true;
}
} // namespace

std::string to_string(const Rat& x) { return x.str(); }

Rat rat_from_string(const std::string& s) {
  std::string t;
  for (char c : s)
    if (c != ' ' && c != '\t') t.push_back(c);
  const auto slash = t.find('/');
  if (slash == std::string::npos) {
    if (!valid_integer_token(t)) throw structural_error("malformed rational: '" + s + "'");
    return Rat(BigInt(t));
  }
  const std::string num = t.substr(0, slash);
  const std::string den = t.substr(slash + 1);
  if (!valid_integer_token(num) || !valid_integer_token(den))
    throw structural_error("malformed rational: '" + s + "'");
  BigInt d(den);
  if (d == 0) throw structural_error("zero denominator in rational: '" + s + "'");
  return Rat(BigInt(num), d);
}

void set_denominator_guard(unsigned bits) { g_denominator_guard_bits = bits; }

unsigned denominator_guard() { return g_denominator_guard_bits; }

void check_denominator_guard(const Rat& x) {
  if (g_denominator_guard_bits == 0) return;
  const BigInt d = denominator(x);
  if (d > 1 && boost::multiprecision::msb(d) + 1 > g_denominator_guard_bits)
    throw resource_limit_error("denominator exceeds guard of " +
                               std::to_string(g_denominator_guard_bits) + " bits: " +
                               to_string(x));
}

BigInt floor_int(const Rat& x) {
  BigInt q = numerator(x) / denominator(x);
  if (x < 0 && q * denominator(x) != numerator(x)) q -= 1;
  return q;
}

std::string to_decimal_string(const Rat& x, int significant_digits) {
  if (significant_digits < 1) significant_digits = 1;
  if (x == 0) return "0";
  const bool neg = x < 0;
  Rat a = neg ? Rat(-x) : x;

  // Scale so that the integer part has exactly `significant_digits` digits,
  // then round to nearest (half away from zero).
  int exp10 = 0;
  Rat scaled = a;
  while (scaled >= 10) { scaled /= 10; ++exp10; }
  while (scaled < 1) { scaled *= 10; --exp10; }
  Rat shifted = a;
  int shift = significant_digits - 1 - exp10;
  for (int i = 0; i < shift; ++i) shifted *= 10;
  for (int i = 0; i < -shift; ++i) shifted /= 10;
  BigInt digits = floor_int(shifted + Rat(1, 2));
  std::string ds = digits.str();
  // Rounding may add a digit (e.g. 999.6 -> 1000).
  if (static_cast<int>(ds.size()) > significant_digits) {
    ds.pop_back();
    ++exp10;
  }

  // Lay out as plain decimal when the exponent is moderate, else e-notation.
  std::string out;
  if (exp10 >= significant_digits + 3 || exp10 <= -5) {
    out = ds.substr(0, 1);
    std::string frac = ds.substr(1);
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    if (!frac.empty()) out += "." + frac;
    out += "e" + std::to_string(exp10);
  } else if (exp10 >= 0) {
    if (exp10 + 1 >= static_cast<int>(ds.size())) {
      out = ds + std::string(exp10 + 1 - ds.size(), '0');
    } else {
      out = ds.substr(0, exp10 + 1);
      std::string frac = ds.substr(exp10 + 1);
      while (!frac.empty() && frac.back() == '0') frac.pop_back();
      if (!frac.empty()) out += "." + frac;
    }
  } else {
    std::string frac = std::string(-exp10 - 1, '0') + ds;
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    out = "0." + (frac.empty() ? "0" : frac);
  }
  return neg ? "-" + out : out;
}

} // namespace coboundary
