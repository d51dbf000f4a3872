#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kmslcm/gf2poly.hpp"

namespace kmslcm {

// Word in a free monoid, ordered by shortlex.
struct WordEl {
  std::string letters;
  friend bool operator==(const WordEl&, const WordEl&) = default;
  friend std::strong_ordering operator<=>(const WordEl& a, const WordEl& b) {
    if (a.letters.size() != b.letters.size()) return a.letters.size() <=> b.letters.size();
    return a.letters <=> b.letters;
  }
};

// Point of Z_+^k (free abelian monoid), ordered lexicographically.
struct VecEl {
  std::vector<std::int64_t> exps;
  friend bool operator==(const VecEl&, const VecEl&) = default;
  friend auto operator<=>(const VecEl&, const VecEl&) = default;
};

// (c, n) in Z_+ x| N with (c,n)(d,m) = (c + n d, n m); ordered by (n, c).
struct AxbEl {
  std::int64_t c = 0;
  std::int64_t n = 1;
  friend bool operator==(const AxbEl&, const AxbEl&) = default;
  friend std::strong_ordering operator<=>(const AxbEl& a, const AxbEl& b) {
    if (a.n != b.n) return a.n <=> b.n;
    return a.c <=> b.c;
  }
};

// Normal form x1^a x2^b x3^k for the monoid <x1,x2,x3 | x1x2=x2x1, x3x1=x2x3,
// x3x2=x1x3>; x3 swaps the abelian coordinates when it moves past them.
struct C3El {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::int64_t k = 0;
  friend bool operator==(const C3El&, const C3El&) = default;
  friend auto operator<=>(const C3El&, const C3El&) = default;
};

// (g, x, y) in (⊕_{Z_+} Z/2Z) x| Z_+^2 where (x, y) acts as multiplication by
// T^x (1+T)^y on GF(2)[T]; ordered by (x, y, g).
struct LampEl {
  Gf2Poly g;
  std::int64_t x = 0;
  std::int64_t y = 0;
  friend bool operator==(const LampEl&, const LampEl&) = default;
  friend std::strong_ordering operator<=>(const LampEl& a, const LampEl& b) {
    if (a.x != b.x) return a.x <=> b.x;
    if (a.y != b.y) return a.y <=> b.y;
    return a.g <=> b.g;
  }
};

using Element = std::variant<WordEl, VecEl, AxbEl, C3El, LampEl>;

enum class Family { free_monoid, free_abelian, axb, c3, lamplighter };

std::string family_name(Family f);
Family family_from_name(std::string_view name);

struct MonoidDescriptor {
  Family family = Family::free_monoid;
  // alphabet size (free_monoid) or rank (free_abelian); ignored otherwise
  int rank = 2;
  // largest prime p with (0, p) in the declared generating set of axb
  int axb_max_prime = 7;
};

// One of the five built-in right LCM monoids. Every operation validates that
// its element arguments belong to this family and throws invalid_argument
// otherwise. right_lcm(s, t) returns the canonical generator r of sS ∩ tS
// (reduced coset representative for the lamplighter, where the unit group is
// nontrivial), or nullopt when the ideals are disjoint.
class Monoid {
 public:
  explicit Monoid(MonoidDescriptor d);

  const MonoidDescriptor& descriptor() const { return d_; }
  Family family() const { return d_.family; }

  Element identity() const;
  const std::vector<Element>& generators() const { return generators_; }
  std::vector<std::string> generator_names() const;

  Element multiply(const Element& s, const Element& t) const;
  // unique u with s u = t, if t lies in sS
  std::optional<Element> left_divide(const Element& s, const Element& t) const;
  std::optional<Element> right_lcm(const Element& s, const Element& t) const;

  // canonical representative of (s, t) modulo a common right unit: for any
  // invertible u the pairs (s u, t u) all describe the same spanning operator
  // v_s v_t^*.  Only the lamp group has nontrivial units; there the leg with
  // the smaller orbit-invariant key (shift coordinates, then residue modulo
  // its own theta modulus) is reduced and the matching unit is applied to the
  // other leg.  All other families return the pair unchanged.
  std::pair<Element, Element> unit_normal_pair(Element s, Element t) const;

  // all products of at most `depth` generators, deduplicated, sorted
  std::vector<Element> enumerate(int depth) const;

  // holds for all five families; recorded so callers need not special-case
  bool right_cancellative() const { return true; }

  std::string render(const Element& e) const;
  Element parse(std::string_view text) const;

  void require_element(const Element& e) const;

 private:
  MonoidDescriptor d_;
  std::vector<Element> generators_;
};

std::vector<int> primes_upto(int n);

}  // namespace kmslcm
