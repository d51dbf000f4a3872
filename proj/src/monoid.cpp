#include "kmslcm/monoid.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <set>
#include <stdexcept>

namespace kmslcm {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("monoid coordinate overflow");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("monoid coordinate overflow");
  return r;
}

// inverse of a modulo m, gcd(a, m) = 1, m >= 1
std::int64_t mod_inverse(std::int64_t a, std::int64_t m) {
  std::int64_t r0 = m, r1 = ((a % m) + m) % m, t0 = 0, t1 = 1;
  while (r1 != 0) {
    std::int64_t q = r0 / r1;
    std::int64_t r2 = r0 - q * r1, t2 = t0 - q * t1;
    r0 = r1;
    r1 = r2;
    t0 = t1;
    t1 = t2;
  }
  return ((t0 % m) + m) % m;
}

// minimal x >= lo with x ≡ c (mod n) and x ≡ d (mod m); caller guarantees
// compatibility (g = gcd(n, m) divides c - d)
std::int64_t crt_min_at_least(std::int64_t c, std::int64_t n, std::int64_t d, std::int64_t m,
                              std::int64_t lo) {
  std::int64_t g = std::gcd(n, m);
  std::int64_t l = checked_mul(n / g, m);
  std::int64_t m1 = m / g;
  std::int64_t delta = (d - c) / g;
  std::int64_t t = 0;
  if (m1 > 1) {
    std::int64_t inv = mod_inverse((n / g) % m1, m1);
    t = static_cast<std::int64_t>(static_cast<__int128>(((delta % m1) + m1) % m1) * inv % m1);
  }
  std::int64_t x = checked_add(c, checked_mul(n, t));
  if (x < lo) {
    std::int64_t k = (lo - x + l - 1) / l;
    x = checked_add(x, checked_mul(k, l));
  } else {
    x -= (x - lo) / l * l;
  }
  return x;
}

Gf2Poly theta(const Gf2Poly& g, std::int64_t x, std::int64_t y) {
  if (g.is_zero()) return g;
  return g * gf2_theta_modulus(static_cast<unsigned>(x), static_cast<unsigned>(y));
}

std::int64_t parse_i64(std::string_view s) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw std::invalid_argument("bad integer literal: \"" + std::string(s) + "\"");
  return v;
}

// splits "(a,b,...)" into components
std::vector<std::string_view> split_tuple(std::string_view text, std::size_t arity) {
  if (text.size() < 2 || text.front() != '(' || text.back() != ')')
    throw std::invalid_argument("expected a (..) tuple, got \"" + std::string(text) + "\"");
  std::string_view body = text.substr(1, text.size() - 2);
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = body.find(',', pos);
    if (comma == std::string_view::npos) {
      out.push_back(body.substr(pos));
      break;
    }
    out.push_back(body.substr(pos, comma - pos));
    pos = comma + 1;
  }
  if (out.size() != arity)
    throw std::invalid_argument("expected " + std::to_string(arity) + " components in \"" +
                                std::string(text) + "\"");
  return out;
}

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::free_monoid: return "free_monoid";
    case Family::free_abelian: return "free_abelian";
    case Family::axb: return "axb";
    case Family::c3: return "c3";
    case Family::lamplighter: return "lamplighter";
  }
  throw std::logic_error("unreachable");
}

Family family_from_name(std::string_view name) {
  if (name == "free_monoid") return Family::free_monoid;
  if (name == "free_abelian") return Family::free_abelian;
  if (name == "axb") return Family::axb;
  if (name == "c3") return Family::c3;
  if (name == "lamplighter") return Family::lamplighter;
  throw std::invalid_argument("unknown family: \"" + std::string(name) + "\"");
}

std::vector<int> primes_upto(int n) {
  std::vector<int> out;
  for (int p = 2; p <= n; ++p) {
    bool prime = true;
    for (int q = 2; q * q <= p; ++q)
      if (p % q == 0) {
        prime = false;
        break;
      }
    if (prime) out.push_back(p);
  }
  return out;
}

Monoid::Monoid(MonoidDescriptor d) : d_(d) {
  switch (d_.family) {
    case Family::free_monoid:
      if (d_.rank < 1 || d_.rank > 26) throw std::invalid_argument("alphabet size must be 1..26");
      for (int i = 0; i < d_.rank; ++i)
        generators_.push_back(WordEl{std::string(1, static_cast<char>('a' + i))});
      break;
    case Family::free_abelian: {
      if (d_.rank < 1 || d_.rank > 64) throw std::invalid_argument("rank must be 1..64");
      for (int i = 0; i < d_.rank; ++i) {
        VecEl v{std::vector<std::int64_t>(d_.rank, 0)};
        v.exps[i] = 1;
        generators_.push_back(std::move(v));
      }
      break;
    }
    case Family::axb: {
      if (d_.axb_max_prime < 2) throw std::invalid_argument("axb max prime must be >= 2");
      generators_.push_back(AxbEl{1, 1});
      for (int p : primes_upto(d_.axb_max_prime)) generators_.push_back(AxbEl{0, p});
      break;
    }
    case Family::c3:
      generators_.push_back(C3El{1, 0, 0});
      generators_.push_back(C3El{0, 1, 0});
      generators_.push_back(C3El{0, 0, 1});
      break;
    case Family::lamplighter:
      generators_.push_back(LampEl{Gf2Poly::one(), 0, 0});
      generators_.push_back(LampEl{Gf2Poly::zero(), 1, 0});
      generators_.push_back(LampEl{Gf2Poly::zero(), 0, 1});
      break;
  }
}

Element Monoid::identity() const {
  switch (d_.family) {
    case Family::free_monoid: return WordEl{};
    case Family::free_abelian: return VecEl{std::vector<std::int64_t>(d_.rank, 0)};
    case Family::axb: return AxbEl{0, 1};
    case Family::c3: return C3El{};
    case Family::lamplighter: return LampEl{};
  }
  throw std::logic_error("unreachable");
}

std::vector<std::string> Monoid::generator_names() const {
  std::vector<std::string> out;
  out.reserve(generators_.size());
  for (const auto& g : generators_) out.push_back(render(g));
  return out;
}

void Monoid::require_element(const Element& e) const {
  switch (d_.family) {
    case Family::free_monoid: {
      const auto* w = std::get_if<WordEl>(&e);
      if (!w) throw std::invalid_argument("element does not belong to a free monoid");
      for (char ch : w->letters)
        if (ch < 'a' || ch >= 'a' + d_.rank)
          throw std::invalid_argument("letter out of alphabet: " + std::string(1, ch));
      return;
    }
    case Family::free_abelian: {
      const auto* v = std::get_if<VecEl>(&e);
      if (!v) throw std::invalid_argument("element does not belong to a free abelian monoid");
      if (static_cast<int>(v->exps.size()) != d_.rank)
        throw std::invalid_argument("exponent vector has wrong rank");
      for (auto x : v->exps)
        if (x < 0) throw std::invalid_argument("exponents must be nonnegative");
      return;
    }
    case Family::axb: {
      const auto* a = std::get_if<AxbEl>(&e);
      if (!a) throw std::invalid_argument("element does not belong to the ax+b monoid");
      if (a->c < 0 || a->n < 1) throw std::invalid_argument("need c >= 0 and n >= 1");
      return;
    }
    case Family::c3: {
      const auto* c = std::get_if<C3El>(&e);
      if (!c) throw std::invalid_argument("element does not belong to the x1x2x3 monoid");
      if (c->a < 0 || c->b < 0 || c->k < 0)
        throw std::invalid_argument("normal form exponents must be nonnegative");
      return;
    }
    case Family::lamplighter: {
      const auto* l = std::get_if<LampEl>(&e);
      if (!l) throw std::invalid_argument("element does not belong to the lamplighter monoid");
      if (l->x < 0 || l->y < 0) throw std::invalid_argument("need x >= 0 and y >= 0");
      return;
    }
  }
}

Element Monoid::multiply(const Element& s, const Element& t) const {
  require_element(s);
  require_element(t);
  switch (d_.family) {
    case Family::free_monoid:
      return WordEl{std::get<WordEl>(s).letters + std::get<WordEl>(t).letters};
    case Family::free_abelian: {
      VecEl out = std::get<VecEl>(s);
      const auto& u = std::get<VecEl>(t);
      for (std::size_t i = 0; i < out.exps.size(); ++i)
        out.exps[i] = checked_add(out.exps[i], u.exps[i]);
      return out;
    }
    case Family::axb: {
      const auto& a = std::get<AxbEl>(s);
      const auto& b = std::get<AxbEl>(t);
      return AxbEl{checked_add(a.c, checked_mul(a.n, b.c)), checked_mul(a.n, b.n)};
    }
    case Family::c3: {
      const auto& u = std::get<C3El>(s);
      const auto& v = std::get<C3El>(t);
      std::int64_t va = (u.k % 2 == 0) ? v.a : v.b;
      std::int64_t vb = (u.k % 2 == 0) ? v.b : v.a;
      return C3El{checked_add(u.a, va), checked_add(u.b, vb), checked_add(u.k, v.k)};
    }
    case Family::lamplighter: {
      const auto& u = std::get<LampEl>(s);
      const auto& v = std::get<LampEl>(t);
      return LampEl{u.g + theta(v.g, u.x, u.y), checked_add(u.x, v.x), checked_add(u.y, v.y)};
    }
  }
  throw std::logic_error("unreachable");
}

std::optional<Element> Monoid::left_divide(const Element& s, const Element& t) const {
  require_element(s);
  require_element(t);
  switch (d_.family) {
    case Family::free_monoid: {
      const auto& a = std::get<WordEl>(s).letters;
      const auto& b = std::get<WordEl>(t).letters;
      if (a.size() > b.size() || b.compare(0, a.size(), a) != 0) return std::nullopt;
      return WordEl{b.substr(a.size())};
    }
    case Family::free_abelian: {
      const auto& a = std::get<VecEl>(s).exps;
      VecEl out = std::get<VecEl>(t);
      for (std::size_t i = 0; i < a.size(); ++i) {
        out.exps[i] -= a[i];
        if (out.exps[i] < 0) return std::nullopt;
      }
      return out;
    }
    case Family::axb: {
      const auto& a = std::get<AxbEl>(s);
      const auto& b = std::get<AxbEl>(t);
      if (b.n % a.n != 0) return std::nullopt;
      std::int64_t diff = b.c - a.c;
      if (diff < 0 || diff % a.n != 0) return std::nullopt;
      return AxbEl{diff / a.n, b.n / a.n};
    }
    case Family::c3: {
      const auto& u = std::get<C3El>(s);
      const auto& v = std::get<C3El>(t);
      if (v.k < u.k || v.a < u.a || v.b < u.b) return std::nullopt;
      std::int64_t da = v.a - u.a, db = v.b - u.b;
      if (u.k % 2 != 0) std::swap(da, db);
      return C3El{da, db, v.k - u.k};
    }
    case Family::lamplighter: {
      const auto& u = std::get<LampEl>(s);
      const auto& v = std::get<LampEl>(t);
      if (v.x < u.x || v.y < u.y) return std::nullopt;
      Gf2Poly diff = u.g + v.g;
      Gf2Poly mod = gf2_theta_modulus(static_cast<unsigned>(u.x), static_cast<unsigned>(u.y));
      auto [q, r] = diff.divmod(mod);
      if (!r.is_zero()) return std::nullopt;
      return LampEl{q, v.x - u.x, v.y - u.y};
    }
  }
  throw std::logic_error("unreachable");
}

std::optional<Element> Monoid::right_lcm(const Element& s, const Element& t) const {
  require_element(s);
  require_element(t);
  switch (d_.family) {
    case Family::free_monoid: {
      const auto& a = std::get<WordEl>(s).letters;
      const auto& b = std::get<WordEl>(t).letters;
      const auto& shorter = a.size() <= b.size() ? a : b;
      const auto& longer = a.size() <= b.size() ? b : a;
      if (longer.compare(0, shorter.size(), shorter) != 0) return std::nullopt;
      return WordEl{longer};
    }
    case Family::free_abelian: {
      VecEl out = std::get<VecEl>(s);
      const auto& b = std::get<VecEl>(t).exps;
      for (std::size_t i = 0; i < b.size(); ++i) out.exps[i] = std::max(out.exps[i], b[i]);
      return out;
    }
    case Family::axb: {
      const auto& a = std::get<AxbEl>(s);
      const auto& b = std::get<AxbEl>(t);
      std::int64_t g = std::gcd(a.n, b.n);
      if (((a.c - b.c) % g + g) % g != 0) return std::nullopt;
      std::int64_t l = checked_mul(a.n / g, b.n);
      std::int64_t r = crt_min_at_least(a.c, a.n, b.c, b.n, std::max(a.c, b.c));
      return AxbEl{r, l};
    }
    case Family::c3: {
      const auto& u = std::get<C3El>(s);
      const auto& v = std::get<C3El>(t);
      return C3El{std::max(u.a, v.a), std::max(u.b, v.b), std::max(u.k, v.k)};
    }
    case Family::lamplighter: {
      const auto& u = std::get<LampEl>(s);
      const auto& v = std::get<LampEl>(t);
      Gf2Poly d = u.g + v.g;
      unsigned xm = static_cast<unsigned>(std::min(u.x, v.x));
      unsigned ym = static_cast<unsigned>(std::min(u.y, v.y));
      Gf2Poly mmin = gf2_theta_modulus(xm, ym);
      if (!d.divisible_by(mmin)) return std::nullopt;
      std::int64_t p = std::max(u.x, v.x), q = std::max(u.y, v.y);
      // CRT: f ≡ u.g mod T^{u.x}(1+T)^{u.y}, f ≡ v.g mod T^{v.x}(1+T)^{v.y};
      // the cofactors A, B of the two moduli over their gcd are coprime
      Gf2Poly ms = gf2_theta_modulus(static_cast<unsigned>(u.x), static_cast<unsigned>(u.y));
      Gf2Poly a = ms / mmin;
      Gf2Poly b =
          gf2_theta_modulus(static_cast<unsigned>(v.x), static_cast<unsigned>(v.y)) / mmin;
      Gf2Poly dt = d / mmin;
      Gf2Poly f = u.g;
      if (!b.is_zero() && b != Gf2Poly::one()) {
        auto bez = gf2_extended_gcd(a, b);
        Gf2Poly sol = (bez.u * dt) % b;
        f = u.g + ms * sol;
      } else {
        // b = 1: t-side congruence is vacuous
      }
      Gf2Poly mjoin = gf2_theta_modulus(static_cast<unsigned>(p), static_cast<unsigned>(q));
      return LampEl{f % mjoin, p, q};
    }
  }
  throw std::logic_error("unreachable");
}

std::pair<Element, Element> Monoid::unit_normal_pair(Element s, Element t) const {
  if (d_.family != Family::lamplighter) return {std::move(s), std::move(t)};
  const auto& a = std::get<LampEl>(s);
  const auto& b = std::get<LampEl>(t);
  const Gf2Poly ma =
      gf2_theta_modulus(static_cast<unsigned>(a.x), static_cast<unsigned>(a.y));
  const Gf2Poly mb =
      gf2_theta_modulus(static_cast<unsigned>(b.x), static_cast<unsigned>(b.y));
  // the residues are invariant under a common right unit, so the leg choice
  // is well-defined on the whole orbit
  const auto key_a = std::make_tuple(a.x, a.y, (a.g % ma).bits());
  const auto key_b = std::make_tuple(b.x, b.y, (b.g % mb).bits());
  const Gf2Poly q = (key_a <= key_b) ? (a.g / ma) : (b.g / mb);
  if (q.is_zero()) return {std::move(s), std::move(t)};
  const Element u{LampEl{q, 0, 0}};
  return {multiply(s, u), multiply(t, u)};
}

std::vector<Element> Monoid::enumerate(int depth) const {
  if (depth < 0) throw std::invalid_argument("enumeration depth must be >= 0");
  std::set<Element> seen{identity()};
  std::vector<Element> frontier{identity()};
  for (int level = 0; level < depth; ++level) {
    std::vector<Element> next;
    for (const auto& e : frontier)
      for (const auto& g : generators_) {
        Element p = multiply(e, g);
        if (seen.insert(p).second) next.push_back(p);
      }
    frontier = std::move(next);
  }
  return {seen.begin(), seen.end()};
}

std::string Monoid::render(const Element& e) const {
  require_element(e);
  switch (d_.family) {
    case Family::free_monoid: {
      const auto& w = std::get<WordEl>(e).letters;
      return w.empty() ? std::string("e") : w;
    }
    case Family::free_abelian: {
      const auto& v = std::get<VecEl>(e).exps;
      std::string out = "[";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(v[i]);
      }
      return out + "]";
    }
    case Family::axb: {
      const auto& a = std::get<AxbEl>(e);
      return "(" + std::to_string(a.c) + "," + std::to_string(a.n) + ")";
    }
    case Family::c3: {
      const auto& c = std::get<C3El>(e);
      return "(" + std::to_string(c.a) + "," + std::to_string(c.b) + "," + std::to_string(c.k) +
             ")";
    }
    case Family::lamplighter: {
      const auto& l = std::get<LampEl>(e);
      return "(" + l.g.to_hex() + "," + std::to_string(l.x) + "," + std::to_string(l.y) + ")";
    }
  }
  throw std::logic_error("unreachable");
}

Element Monoid::parse(std::string_view text) const {
  switch (d_.family) {
    case Family::free_monoid: {
      if (text == "e" && d_.rank <= 4) return WordEl{};
      if (text.empty()) return WordEl{};
      WordEl w{std::string(text)};
      require_element(w);
      return w;
    }
    case Family::free_abelian: {
      if (text.size() < 2 || text.front() != '[' || text.back() != ']')
        throw std::invalid_argument("expected [..] vector, got \"" + std::string(text) + "\"");
      std::string body = "(" + std::string(text.substr(1, text.size() - 2)) + ")";
      auto parts = split_tuple(body, static_cast<std::size_t>(d_.rank));
      VecEl v;
      for (auto p : parts) v.exps.push_back(parse_i64(p));
      require_element(v);
      return v;
    }
    case Family::axb: {
      auto parts = split_tuple(text, 2);
      AxbEl a{parse_i64(parts[0]), parse_i64(parts[1])};
      require_element(a);
      return a;
    }
    case Family::c3: {
      auto parts = split_tuple(text, 3);
      C3El c{parse_i64(parts[0]), parse_i64(parts[1]), parse_i64(parts[2])};
      require_element(c);
      return c;
    }
    case Family::lamplighter: {
      auto parts = split_tuple(text, 3);
      LampEl l{Gf2Poly::from_hex(parts[0]), parse_i64(parts[1]), parse_i64(parts[2])};
      require_element(l);
      return l;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace kmslcm
