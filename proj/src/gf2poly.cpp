#include "kmslcm/gf2poly.hpp"

#include <cstdio>

namespace kmslcm {

std::string Gf2Poly::to_hex() const {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(bits_));
  return buf;
}

Gf2Poly Gf2Poly::from_hex(std::string_view text) {
  std::string s(text);
  if (s.size() > 2 && (s[0] == '0') && (s[1] == 'x' || s[1] == 'X')) s = s.substr(2);
  if (s.empty() || s.size() > 16)
    throw std::invalid_argument("bad GF(2) polynomial literal: \"" + std::string(text) + "\"");
  std::uint64_t v = 0;
  for (char ch : s) {
    int d;
    if (ch >= '0' && ch <= '9')
      d = ch - '0';
    else if (ch >= 'a' && ch <= 'f')
      d = ch - 'a' + 10;
    else if (ch >= 'A' && ch <= 'F')
      d = ch - 'A' + 10;
    else
      throw std::invalid_argument("bad GF(2) polynomial literal: \"" + std::string(text) + "\"");
    v = (v << 4) | static_cast<std::uint64_t>(d);
  }
  return Gf2Poly{v};
}

Gf2Poly gf2_gcd(Gf2Poly a, Gf2Poly b) {
  while (!b.is_zero()) {
    Gf2Poly r = a % b;
    a = b;
    b = r;
  }
  return a;
}

Gf2Bezout gf2_extended_gcd(Gf2Poly a, Gf2Poly b) {
  // invariant: r0 = u0*a + v0*b, r1 = u1*a + v1*b
  Gf2Poly r0 = a, r1 = b;
  Gf2Poly u0 = Gf2Poly::one(), v0 = Gf2Poly::zero();
  Gf2Poly u1 = Gf2Poly::zero(), v1 = Gf2Poly::one();
  while (!r1.is_zero()) {
    auto [q, r] = r0.divmod(r1);
    r0 = r1;
    r1 = r;
    Gf2Poly u2 = u0 + q * u1, v2 = v0 + q * v1;
    u0 = u1;
    v0 = v1;
    u1 = u2;
    v1 = v2;
  }
  return {r0, u0, v0};
}

Gf2Poly gf2_theta_modulus(unsigned x, unsigned y) {
  Gf2Poly m = Gf2Poly::monomial(x);
  const Gf2Poly d{3};
  for (unsigned i = 0; i < y; ++i) m = m * d;
  return m;
}

}  // namespace kmslcm
