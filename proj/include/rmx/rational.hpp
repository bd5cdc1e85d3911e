#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <string>

namespace rmx {

using BigInt = boost::multiprecision::mpz_int;
using Rat = boost::multiprecision::mpq_rational;

// 2^-k as an exact rational, k >= 0.
inline Rat pow2_inv(unsigned k) { return Rat(BigInt(1), BigInt(1) << k); }

inline Rat rat_pow(const Rat& base, unsigned long e) {
  using boost::multiprecision::pow;
  return Rat(pow(numerator(base), static_cast<unsigned>(e)),
             pow(denominator(base), static_cast<unsigned>(e)));
}

inline double to_double(const Rat& q) { return q.convert_to<double>(); }

inline std::string rat_str(const Rat& q) {
  return numerator(q).str() + "/" + denominator(q).str();
}

// Parses "p/q" or a plain integer.
Rat rat_parse(const std::string& s);

}  // namespace rmx
