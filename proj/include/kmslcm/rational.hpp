#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kmslcm {

// Exact rational scalar. All scale values and inclusion-exclusion bookkeeping
// are done in Rational; conversion to double happens once, at the final power
// evaluation or when a report is emitted.
using Rational = mpq_class;

inline Rational rational_from_int(std::int64_t v) {
  Rational r;
  r = static_cast<long>(v);
  return r;
}

// Parses "p" or "p/q" with p, q decimal integers, q > 0.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  mpq_class q;
  if (q.set_str(s, 10) != 0)
    throw std::invalid_argument("bad rational literal: \"" + s + "\"");
  if (q.get_den() <= 0)
    throw std::invalid_argument("rational denominator must be positive: \"" + s + "\"");
  q.canonicalize();
  return q;
}

inline std::string rational_to_string(const Rational& r) { return r.get_str(); }

inline double to_double(const Rational& r) { return r.get_d(); }

inline bool is_integer(const Rational& r) { return r.get_den() == 1; }

// r^k for k >= 0.
inline Rational rational_pow(const Rational& r, unsigned long k) {
  Rational out;
  mpz_pow_ui(mpq_numref(out.get_mpq_t()), mpq_numref(r.get_mpq_t()), k);
  mpz_pow_ui(mpq_denref(out.get_mpq_t()), mpq_denref(r.get_mpq_t()), k);
  return out;
}

// N^{-beta} in double precision; N an exact rational >= 1.
inline double pow_neg_beta(const Rational& n, double beta) {
  if (n == 1) return 1.0;
  return std::pow(to_double(n), -beta);
}

// beta values that admit the exact rational evaluation path: small nonnegative
// integers, so N^{-beta} is an exact rational.
inline std::optional<unsigned> exact_beta_exponent(double beta) {
  if (beta < 0.0 || beta > 64.0) return std::nullopt;
  double r = std::nearbyint(beta);
  if (r != beta) return std::nullopt;
  return static_cast<unsigned>(r);
}

}  // namespace kmslcm
