#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kmslcm {

// Polynomial over GF(2), bit i of `bits` = coefficient of T^i (lowest degree
// first). Degree is capped at 63; operations that would exceed the cap throw
// instead of truncating. Addition is XOR; subtraction equals addition.
class Gf2Poly {
 public:
  constexpr Gf2Poly() = default;
  constexpr explicit Gf2Poly(std::uint64_t bits) : bits_(bits) {}

  static Gf2Poly zero() { return Gf2Poly{}; }
  static Gf2Poly one() { return Gf2Poly{1}; }
  // T^k
  static Gf2Poly monomial(unsigned k) {
    if (k > 63) throw std::domain_error("Gf2Poly: degree cap 63 exceeded");
    return Gf2Poly{std::uint64_t{1} << k};
  }

  std::uint64_t bits() const { return bits_; }
  bool is_zero() const { return bits_ == 0; }
  // degree of the zero polynomial is reported as -1
  int degree() const { return bits_ == 0 ? -1 : 63 - __builtin_clzll(bits_); }

  Gf2Poly operator+(Gf2Poly o) const { return Gf2Poly{bits_ ^ o.bits_}; }
  Gf2Poly& operator+=(Gf2Poly o) {
    bits_ ^= o.bits_;
    return *this;
  }

  Gf2Poly operator*(Gf2Poly o) const {
    if (bits_ == 0 || o.bits_ == 0) return zero();
    if (degree() + o.degree() > 63)
      throw std::domain_error("Gf2Poly: degree cap 63 exceeded in product");
    std::uint64_t acc = 0, a = bits_;
    for (std::uint64_t b = o.bits_; b; b >>= 1, a <<= 1)
      if (b & 1) acc ^= a;
    return Gf2Poly{acc};
  }

  // quotient and remainder by a nonzero divisor
  struct DivMod;
  DivMod divmod(Gf2Poly d) const;
  Gf2Poly operator%(Gf2Poly d) const;
  Gf2Poly operator/(Gf2Poly d) const;

  bool divisible_by(Gf2Poly d) const { return (*this % d).is_zero(); }

  // largest k with T^k | this; 0 for the zero polynomial by convention
  unsigned t_valuation() const { return bits_ == 0 ? 0 : __builtin_ctzll(bits_); }
  // largest k with (1+T)^k | this; 0 for the zero polynomial by convention
  unsigned one_plus_t_valuation() const;

  friend auto operator<=>(const Gf2Poly&, const Gf2Poly&) = default;

  // lowercase hex of the coefficient bits, e.g. 1+T -> "0x3"
  std::string to_hex() const;
  static Gf2Poly from_hex(std::string_view text);

 private:
  std::uint64_t bits_ = 0;
};

struct Gf2Poly::DivMod {
  Gf2Poly quot, rem;
};

inline Gf2Poly::DivMod Gf2Poly::divmod(Gf2Poly d) const {
  if (d.is_zero()) throw std::domain_error("Gf2Poly: division by zero");
  std::uint64_t r = bits_, q = 0;
  const int dd = d.degree();
  while (r != 0) {
    int rd = 63 - __builtin_clzll(r);
    if (rd < dd) break;
    int shift = rd - dd;
    r ^= d.bits() << shift;
    q ^= std::uint64_t{1} << shift;
  }
  return {Gf2Poly{q}, Gf2Poly{r}};
}

inline Gf2Poly Gf2Poly::operator%(Gf2Poly d) const { return divmod(d).rem; }
inline Gf2Poly Gf2Poly::operator/(Gf2Poly d) const { return divmod(d).quot; }

inline unsigned Gf2Poly::one_plus_t_valuation() const {
  if (bits_ == 0) return 0;
  unsigned v = 0;
  Gf2Poly p = *this;
  const Gf2Poly d{3};  // 1 + T
  while (true) {
    auto [q, r] = p.divmod(d);
    if (!r.is_zero()) return v;
    ++v;
    p = q;
  }
}

// gcd via Euclid
Gf2Poly gf2_gcd(Gf2Poly a, Gf2Poly b);
// Bezout coefficients: returns (g, u, v) with u*a + v*b = g = gcd(a, b)
struct Gf2Bezout {
  Gf2Poly g, u, v;
};
Gf2Bezout gf2_extended_gcd(Gf2Poly a, Gf2Poly b);
// T^x * (1+T)^y
Gf2Poly gf2_theta_modulus(unsigned x, unsigned y);

}  // namespace kmslcm
