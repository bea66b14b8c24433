#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace lipfree {

/// Exact rational scalar. Every distance, mass, norm and threshold in the
/// library is one of these; no floating point enters any predicate.
using Rat = boost::multiprecision::mpq_rational;
using Int = boost::multiprecision::mpz_int;

inline Int rat_num(const Rat& r) { return boost::multiprecision::numerator(r); }
inline Int rat_den(const Rat& r) { return boost::multiprecision::denominator(r); }

/// Parses "p", "-p", "p/q" or "-p/q". Returns nullopt on anything else
/// (whitespace, floats, zero denominators, empty strings).
inline std::optional<Rat> parse_rat(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::size_t pos = 0;
  bool negative = false;
  if (s[pos] == '+' || s[pos] == '-') {
    negative = (s[pos] == '-');
    ++pos;
  }
  auto read_digits = [&](Int& out) -> bool {
    if (pos >= s.size() || s[pos] < '0' || s[pos] > '9') return false;
    out = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      out = out * 10 + (s[pos] - '0');
      ++pos;
    }
    return true;
  };
  Int num;
  if (!read_digits(num)) return std::nullopt;
  Int den = 1;
  if (pos < s.size()) {
    if (s[pos] != '/') return std::nullopt;
    ++pos;
    if (!read_digits(den)) return std::nullopt;
    if (pos != s.size()) return std::nullopt;
    if (den == 0) return std::nullopt;
  }
  Rat r(num, den);
  return negative ? Rat(-r) : r;
}

/// "p/q" with denominator 1 collapsed to "p". Used for data files.
inline std::string rat_string(const Rat& r) {
  std::string out = rat_num(r).str();
  if (rat_den(r) != 1) {
    out += '/';
    out += rat_den(r).str();
  }
  return out;
}

/// Always "p/q", even for integers ("2/1", "0/1"). Used for report values.
inline std::string fraction_string(const Rat& r) {
  return rat_num(r).str() + "/" + rat_den(r).str();
}

/// Display-only decimal rendering (round toward zero, fixed digits).
inline std::string decimal_string(const Rat& r, unsigned digits = 6) {
  Int num = rat_num(r);
  Int den = rat_den(r);
  bool neg = num < 0;
  if (neg) num = -num;
  Int scale = 1;
  for (unsigned i = 0; i < digits; ++i) scale *= 10;
  Int whole = num / den;
  Int frac = ((num % den) * scale) / den;
  std::string f = frac.str();
  while (f.size() < digits) f.insert(f.begin(), '0');
  std::string out = (neg ? "-" : "") + whole.str();
  if (digits > 0) out += "." + f;
  return out;
}

}  // namespace lipfree
