#include "kmslcm/scale.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace kmslcm {

namespace {

constexpr std::uint64_t kClassBudget = 5'000'000;

bool is_prime_i64(std::int64_t p) {
  if (p < 2) return false;
  for (std::int64_t q = 2; q <= p / q; ++q)
    if (p % q == 0) return false;
  return true;
}

std::vector<std::int64_t> divisors_of(std::int64_t j) {
  std::vector<std::int64_t> out;
  for (std::int64_t d = 1; d <= j / d; ++d) {
    if (j % d != 0) continue;
    out.push_back(d);
    if (d != j / d) out.push_back(j / d);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::int64_t parse_index(std::string_view key, std::string_view prefix, int rank) {
  if (key.size() <= prefix.size() || key.substr(0, prefix.size()) != prefix)
    return -1;
  std::int64_t idx = 0;
  for (char ch : key.substr(prefix.size())) {
    if (ch < '0' || ch > '9') return -1;
    idx = idx * 10 + (ch - '0');
  }
  return (idx >= 1 && idx <= rank) ? idx : -1;
}

}  // namespace

Scale::Scale(Monoid monoid, const std::map<std::string, Rational>& weights)
    : monoid_(std::move(monoid)) {
  for (const auto& [key, w] : weights)
    if (w < 1)
      throw std::invalid_argument("weight for \"" + key + "\" must be >= 1");
  const auto fam = monoid_.descriptor().family;
  const int rank = monoid_.descriptor().rank;
  switch (fam) {
    case Family::free_monoid: {
      coord_weights_.assign(static_cast<std::size_t>(rank), Rational(2));
      for (const auto& [key, w] : weights) {
        if (key.size() != 1 || key[0] < 'a' || key[0] >= 'a' + rank)
          throw std::invalid_argument("unknown letter \"" + key + "\" in weight map");
        coord_weights_[static_cast<std::size_t>(key[0] - 'a')] = w;
      }
      for (int i = 0; i < rank; ++i) {
        weights_echo_[std::string(1, static_cast<char>('a' + i))] =
            coord_weights_[static_cast<std::size_t>(i)];
        if (coord_weights_[static_cast<std::size_t>(i)] == 1) quotient_supported_ = false;
      }
      break;
    }
    case Family::free_abelian: {
      coord_weights_.assign(static_cast<std::size_t>(rank), Rational(2));
      for (const auto& [key, w] : weights) {
        std::int64_t idx = parse_index(key, "x", rank);
        if (idx < 0)
          throw std::invalid_argument("unknown coordinate \"" + key + "\" in weight map");
        coord_weights_[static_cast<std::size_t>(idx - 1)] = w;
      }
      for (int i = 0; i < rank; ++i)
        weights_echo_["x" + std::to_string(i + 1)] = coord_weights_[static_cast<std::size_t>(i)];
      break;
    }
    case Family::axb: {
      for (const auto& [key, w] : weights) {
        std::int64_t p = 0;
        try {
          std::size_t used = 0;
          p = std::stoll(std::string(key), &used);
          if (used != key.size()) p = 0;
        } catch (const std::exception&) {
          p = 0;
        }
        if (!is_prime_i64(p))
          throw std::invalid_argument("weight keys must be primes, got \"" + key + "\"");
        if (w <= 1)
          throw std::invalid_argument("prime weights must exceed 1 (weight-1 primes would "
                                      "collapse the level structure)");
        prime_weights_[p] = w;
      }
      for (int p : primes_upto(monoid_.descriptor().axb_max_prime)) {
        auto it = prime_weights_.find(p);
        weights_echo_[std::to_string(p)] = it != prime_weights_.end() ? it->second : Rational(p);
      }
      for (const auto& [p, w] : prime_weights_) weights_echo_[std::to_string(p)] = w;
      break;
    }
    case Family::c3: {
      std::optional<Rational> w12, w3;
      for (const auto& [key, w] : weights) {
        if (key == "x1" || key == "x2") {
          if (w12 && *w12 != w)
            throw std::invalid_argument("the flip relation forces x1 and x2 to share a weight");
          w12 = w;
        } else if (key == "x3") {
          w3 = w;
        } else {
          throw std::invalid_argument("unknown generator \"" + key + "\" in weight map");
        }
      }
      if (w3 && *w3 != 1)
        throw std::invalid_argument("x3 must have weight 1 (it generates the kernel)");
      wa_ = w12.value_or(Rational(2));
      if (wa_ <= 1) throw std::invalid_argument("x1 and x2 weights must exceed 1");
      weights_echo_["x1"] = wa_;
      weights_echo_["x2"] = wa_;
      weights_echo_["x3"] = Rational(1);
      break;
    }
    case Family::lamplighter: {
      for (const auto& [key, w] : weights) {
        if (key == "g") {
          if (w != 1)
            throw std::invalid_argument("the lamp generator is torsion, so its weight is "
                                        "forced to 1");
        } else if (key == "x") {
          wx_ = w;
        } else if (key == "y") {
          wy_ = w;
        } else {
          throw std::invalid_argument("unknown generator \"" + key + "\" in weight map");
        }
      }
      if (wx_ <= 1 || wy_ <= 1)
        throw std::invalid_argument("the shift weights x and y must exceed 1");
      weights_echo_["g"] = Rational(1);
      weights_echo_["x"] = wx_;
      weights_echo_["y"] = wy_;
      break;
    }
  }
}

Rational Scale::axb_level_value(std::int64_t n) const {
  if (prime_weights_.empty()) return Rational(n);
  Rational out = 1;
  std::int64_t m = n;
  for (std::int64_t p = 2; p <= m / p; ++p) {
    if (m % p != 0) continue;
    unsigned k = 0;
    while (m % p == 0) {
      m /= p;
      ++k;
    }
    auto it = prime_weights_.find(p);
    out *= rational_pow(it != prime_weights_.end() ? it->second : Rational(p), k);
  }
  if (m > 1) {
    auto it = prime_weights_.find(m);
    out *= it != prime_weights_.end() ? it->second : Rational(m);
  }
  return out;
}

Rational Scale::n_value(const Element& s) const {
  monoid_.require_element(s);
  switch (monoid_.descriptor().family) {
    case Family::free_monoid: {
      Rational out = 1;
      for (char ch : std::get<WordEl>(s).letters)
        out *= coord_weights_[static_cast<std::size_t>(ch - 'a')];
      return out;
    }
    case Family::free_abelian: {
      Rational out = 1;
      const auto& v = std::get<VecEl>(s).exps;
      for (std::size_t i = 0; i < v.size(); ++i)
        out *= rational_pow(coord_weights_[i], static_cast<unsigned>(v[i]));
      return out;
    }
    case Family::axb:
      return axb_level_value(std::get<AxbEl>(s).n);
    case Family::c3: {
      const auto& c = std::get<C3El>(s);
      return rational_pow(wa_, static_cast<unsigned>(c.a + c.b));
    }
    case Family::lamplighter: {
      const auto& l = std::get<LampEl>(s);
      return rational_pow(wx_, static_cast<unsigned>(l.x)) *
             rational_pow(wy_, static_cast<unsigned>(l.y));
    }
  }
  throw std::logic_error("unreachable");
}

void Scale::require_quotient() const {
  if (!quotient_supported_)
    throw std::invalid_argument(
        "class operations need every letter weight to exceed 1; a free monoid with weight-1 "
        "letters has no canonical class representatives here");
}

NClass Scale::n_class(const Element& s) const {
  monoid_.require_element(s);
  require_quotient();
  switch (monoid_.descriptor().family) {
    case Family::free_monoid:
      return NClass{s, n_value(s)};
    case Family::free_abelian: {
      VecEl rep = std::get<VecEl>(s);
      for (std::size_t i = 0; i < rep.exps.size(); ++i)
        if (coord_weights_[i] == 1) rep.exps[i] = 0;
      return NClass{rep, n_value(rep)};
    }
    case Family::axb: {
      const auto& a = std::get<AxbEl>(s);
      return NClass{AxbEl{a.c % a.n, a.n}, axb_level_value(a.n)};
    }
    case Family::c3: {
      const auto& c = std::get<C3El>(s);
      return NClass{C3El{c.a, c.b, 0}, rational_pow(wa_, static_cast<unsigned>(c.a + c.b))};
    }
    case Family::lamplighter: {
      const auto& l = std::get<LampEl>(s);
      Gf2Poly mod = gf2_theta_modulus(static_cast<unsigned>(l.x), static_cast<unsigned>(l.y));
      return NClass{LampEl{l.g % mod, l.x, l.y}, n_value(s)};
    }
  }
  throw std::logic_error("unreachable");
}

bool Scale::class_leq(const NClass& a, const NClass& b) const {
  auto r = monoid_.right_lcm(a.rep, b.rep);
  return r.has_value() && n_value(*r) == b.n;
}

JoinResult Scale::class_join(const NClass& a, const NClass& b) const {
  auto r = monoid_.right_lcm(a.rep, b.rep);
  if (!r) return std::nullopt;
  return n_class(*r);
}

JoinResult Scale::join_of_set(std::span<const NClass> classes) const {
  NClass acc = class_of_identity();
  for (const auto& c : classes) {
    auto j = class_join(acc, c);
    if (!j) return std::nullopt;
    acc = *j;
  }
  return acc;
}

NClass Scale::class_act(const Element& s, const NClass& a) const {
  return n_class(monoid_.multiply(s, a.rep));
}

std::optional<NClass> Scale::class_preimage(const Element& s, const NClass& a) const {
  auto r = monoid_.right_lcm(s, a.rep);
  if (!r || n_value(*r) != a.n) return std::nullopt;
  auto t = monoid_.left_divide(s, *r);
  if (!t)
    throw InternalInconsistencyError("a right lcm is not divisible by one of its factors");
  return n_class(*t);
}

NClass Scale::class_act_inv(const Element& kernel_elt, const NClass& a) const {
  if (!ker_contains(kernel_elt))
    throw std::invalid_argument("class_act_inv needs a kernel element");
  auto p = class_preimage(kernel_elt, a);
  if (!p)
    throw InternalInconsistencyError("kernel element " + monoid_.render(kernel_elt) +
                                     " does not act onto class " + render_class(a) +
                                     "; the kernel action should be bijective");
  return *p;
}

std::vector<NClass> Scale::enumerate_classes(const Rational& max_n) const {
  require_quotient();
  if (max_n < 1) return {};
  std::vector<NClass> out;
  auto guard = [&out] {
    if (out.size() > kClassBudget)
      throw std::invalid_argument("class enumeration budget exceeded; lower the cutoff");
  };
  switch (monoid_.descriptor().family) {
    case Family::free_monoid: {
      // weights all exceed 1, so N grows strictly with each appended letter
      std::vector<std::pair<std::string, Rational>> frontier{{"", Rational(1)}};
      while (!frontier.empty()) {
        std::vector<std::pair<std::string, Rational>> next;
        for (auto& [word, value] : frontier) {
          out.push_back(NClass{WordEl{word}, value});
          guard();
          for (std::size_t i = 0; i < coord_weights_.size(); ++i) {
            Rational v = value * coord_weights_[i];
            if (v <= max_n)
              next.emplace_back(word + static_cast<char>('a' + i), std::move(v));
          }
        }
        frontier = std::move(next);
      }
      break;
    }
    case Family::free_abelian: {
      const int rank = monoid_.descriptor().rank;
      VecEl v{std::vector<std::int64_t>(static_cast<std::size_t>(rank), 0)};
      auto rec = [&](auto&& self, int i, Rational value) -> void {
        if (i == rank) {
          out.push_back(NClass{v, value});
          guard();
          return;
        }
        if (coord_weights_[static_cast<std::size_t>(i)] == 1) {
          self(self, i + 1, value);
          return;
        }
        Rational cur = value;
        for (std::int64_t e = 0;; ++e) {
          if (cur > max_n) break;
          v.exps[static_cast<std::size_t>(i)] = e;
          self(self, i + 1, cur);
          cur *= coord_weights_[static_cast<std::size_t>(i)];
        }
        v.exps[static_cast<std::size_t>(i)] = 0;
      };
      rec(rec, 0, Rational(1));
      break;
    }
    case Family::axb: {
      double bound = to_double(max_n);
      double alpha = 1.0;
      for (const auto& [p, w] : prime_weights_)
        alpha = std::min(alpha, std::log(to_double(w)) / std::log(static_cast<double>(p)));
      double nmax_f = std::pow(bound, 1.0 / alpha) + 2.0;
      if (nmax_f > 1e7)
        throw std::invalid_argument("class enumeration budget exceeded; lower the cutoff");
      std::int64_t nmax = static_cast<std::int64_t>(nmax_f);
      for (std::int64_t n = 1; n <= nmax; ++n) {
        Rational value = axb_level_value(n);
        if (value > max_n) continue;
        for (std::int64_t c = 0; c < n; ++c) {
          out.push_back(NClass{AxbEl{c, n}, value});
          guard();
        }
      }
      break;
    }
    case Family::c3: {
      Rational value = 1;
      for (std::int64_t k = 0; value <= max_n; ++k, value *= wa_) {
        for (std::int64_t a = 0; a <= k; ++a) {
          out.push_back(NClass{C3El{a, k - a, 0}, value});
          guard();
        }
      }
      break;
    }
    case Family::lamplighter: {
      Rational vx = 1;
      for (std::int64_t x = 0; vx <= max_n; ++x, vx *= wx_) {
        Rational v = vx;
        for (std::int64_t y = 0; v <= max_n; ++y, v *= wy_) {
          if (x + y > 24)
            throw std::invalid_argument("class enumeration budget exceeded; lower the cutoff");
          std::uint64_t count = std::uint64_t{1} << (x + y);
          for (std::uint64_t bits = 0; bits < count; ++bits) {
            out.push_back(NClass{LampEl{Gf2Poly{bits}, x, y}, v});
            guard();
          }
        }
      }
      break;
    }
  }
  std::vector<std::pair<std::string, std::size_t>> order;
  order.reserve(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) order.emplace_back(render_class(out[i]), i);
  std::sort(order.begin(), order.end(),
            [&](const auto& lhs, const auto& rhs) {
              int c = cmp(out[lhs.second].n, out[rhs.second].n);
              if (c != 0) return c < 0;
              return lhs.first < rhs.first;
            });
  std::vector<NClass> sorted;
  sorted.reserve(out.size());
  for (const auto& [text, i] : order) sorted.push_back(std::move(out[i]));
  return sorted;
}

std::vector<LevelCount> Scale::class_levels(const Rational& max_n) const {
  require_quotient();
  std::map<Rational, std::uint64_t> counts;
  if (max_n < 1) return {};
  switch (monoid_.descriptor().family) {
    case Family::free_monoid: {
      std::vector<Rational> frontier{Rational(1)};
      while (!frontier.empty()) {
        std::vector<Rational> next;
        for (const auto& value : frontier) {
          counts[value] += 1;
          for (const auto& w : coord_weights_) {
            Rational v = value * w;
            if (v <= max_n) next.push_back(std::move(v));
          }
        }
        frontier = std::move(next);
        if (counts.size() > kClassBudget)
          throw std::invalid_argument("level enumeration budget exceeded; lower the cutoff");
      }
      break;
    }
    case Family::free_abelian: {
      const int rank = monoid_.descriptor().rank;
      auto rec = [&](auto&& self, int i, Rational value) -> void {
        if (i == rank) {
          counts[value] += 1;
          return;
        }
        if (coord_weights_[static_cast<std::size_t>(i)] == 1) {
          self(self, i + 1, std::move(value));
          return;
        }
        Rational cur = value;
        while (cur <= max_n) {
          self(self, i + 1, cur);
          cur *= coord_weights_[static_cast<std::size_t>(i)];
        }
      };
      rec(rec, 0, Rational(1));
      break;
    }
    case Family::axb: {
      double bound = to_double(max_n);
      double alpha = 1.0;
      for (const auto& [p, w] : prime_weights_)
        alpha = std::min(alpha, std::log(to_double(w)) / std::log(static_cast<double>(p)));
      double nmax_f = std::pow(bound, 1.0 / alpha) + 2.0;
      if (nmax_f > 1e7)
        throw std::invalid_argument("level enumeration budget exceeded; lower the cutoff");
      std::int64_t nmax = static_cast<std::int64_t>(nmax_f);
      for (std::int64_t n = 1; n <= nmax; ++n) {
        Rational value = axb_level_value(n);
        if (value <= max_n) counts[value] += static_cast<std::uint64_t>(n);
      }
      break;
    }
    case Family::c3: {
      Rational value = 1;
      for (std::int64_t k = 0; value <= max_n; ++k, value *= wa_)
        counts[value] += static_cast<std::uint64_t>(k + 1);
      break;
    }
    case Family::lamplighter: {
      Rational vx = 1;
      for (std::int64_t x = 0; vx <= max_n; ++x, vx *= wx_) {
        Rational v = vx;
        for (std::int64_t y = 0; v <= max_n; ++y, v *= wy_) {
          if (x + y > 62)
            throw std::invalid_argument("level enumeration budget exceeded; lower the cutoff");
          counts[v] += std::uint64_t{1} << (x + y);
        }
      }
      break;
    }
  }
  std::vector<LevelCount> out;
  out.reserve(counts.size());
  for (const auto& [n, c] : counts) out.push_back(LevelCount{n, c});
  return out;
}

std::vector<Element> Scale::kernel_elements(int size_bound) const {
  if (size_bound < 0) throw std::invalid_argument("kernel size bound must be >= 0");
  std::vector<Element> out;
  switch (monoid_.descriptor().family) {
    case Family::free_monoid: {
      std::vector<std::string> kernel_letters;
      for (std::size_t i = 0; i < coord_weights_.size(); ++i)
        if (coord_weights_[i] == 1)
          kernel_letters.push_back(std::string(1, static_cast<char>('a' + i)));
      std::vector<std::string> frontier{""};
      for (int len = 0; len <= size_bound && !frontier.empty(); ++len) {
        std::vector<std::string> next;
        for (const auto& w : frontier) {
          out.push_back(WordEl{w});
          for (const auto& l : kernel_letters) next.push_back(w + l);
        }
        frontier = std::move(next);
        if (out.size() > kClassBudget)
          throw std::invalid_argument("kernel enumeration budget exceeded");
      }
      break;
    }
    case Family::free_abelian: {
      const int rank = monoid_.descriptor().rank;
      VecEl v{std::vector<std::int64_t>(static_cast<std::size_t>(rank), 0)};
      auto rec = [&](auto&& self, int i, int budget) -> void {
        if (i == rank) {
          out.push_back(v);
          return;
        }
        if (coord_weights_[static_cast<std::size_t>(i)] != 1) {
          self(self, i + 1, budget);
          return;
        }
        for (std::int64_t e = 0; e <= budget; ++e) {
          v.exps[static_cast<std::size_t>(i)] = e;
          self(self, i + 1, budget - static_cast<int>(e));
        }
        v.exps[static_cast<std::size_t>(i)] = 0;
      };
      rec(rec, 0, size_bound);
      break;
    }
    case Family::axb:
      for (std::int64_t c = 0; c <= size_bound; ++c) out.push_back(AxbEl{c, 1});
      break;
    case Family::c3:
      for (std::int64_t k = 0; k <= size_bound; ++k) out.push_back(C3El{0, 0, k});
      break;
    case Family::lamplighter: {
      // the kernel is the lamp group; the bound caps polynomial degree
      if (size_bound > 20)
        throw std::invalid_argument("kernel enumeration budget exceeded (degree bound > 20)");
      std::uint64_t count = std::uint64_t{1} << size_bound;
      for (std::uint64_t bits = 0; bits < count; ++bits)
        out.push_back(LampEl{Gf2Poly{bits}, 0, 0});
      break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

CertificateVerdict Scale::check_kernel_directed(int depth) const {
  auto kernel = kernel_elements(depth);
  for (std::size_t i = 0; i < kernel.size(); ++i)
    for (std::size_t j = i + 1; j < kernel.size(); ++j) {
      auto r = monoid_.right_lcm(kernel[i], kernel[j]);
      if (!r || n_value(*r) != 1)
        return CertificateVerdict{false, PairCounterexample{kernel[i], kernel[j]}, depth};
    }
  return CertificateVerdict{true, std::nullopt, depth};
}

CertificateVerdict Scale::check_admissibility(int depth) const {
  auto elements = monoid_.enumerate(depth);
  auto kernel = kernel_elements(depth);
  for (const auto& s : elements) {
    Rational ns = n_value(s);
    for (const auto& a : kernel) {
      auto r = monoid_.right_lcm(s, a);
      if (!r || n_value(*r) != ns)
        return CertificateVerdict{false, PairCounterexample{s, a}, depth};
    }
  }
  return CertificateVerdict{true, std::nullopt, depth};
}

EqualTranslateSet Scale::equal_translate_classes(const Element& s, const Element& t,
                                                 const Rational& max_n) const {
  monoid_.require_element(s);
  monoid_.require_element(t);
  require_quotient();
  EqualTranslateSet out;
  if (s == t) {
    out.all_classes = true;
    return out;
  }
  switch (monoid_.descriptor().family) {
    case Family::free_monoid:
      // trivial kernel: classes are elements and S is cancellative
      return out;
    case Family::free_abelian: {
      if (n_class(s) == n_class(t)) out.all_classes = true;
      return out;
    }
    case Family::axb: {
      const auto& a = std::get<AxbEl>(s);
      const auto& b = std::get<AxbEl>(t);
      if (a.n != b.n) return out;
      std::int64_t diff = a.c > b.c ? a.c - b.c : b.c - a.c;
      if (diff == 0) {
        out.all_classes = true;  // unreachable: s == t was handled above
        return out;
      }
      if (diff % a.n != 0) return out;
      // [s(x,l)] = [t(x,l)]  iff  n*l divides c - d; every class at such a level works
      for (std::int64_t l : divisors_of(diff / a.n)) {
        Rational value = axb_level_value(l);
        if (value > max_n) continue;
        for (std::int64_t x = 0; x < l; ++x) out.classes.push_back(NClass{AxbEl{x, l}, value});
      }
      break;
    }
    case Family::c3: {
      const auto& u = std::get<C3El>(s);
      const auto& v = std::get<C3El>(t);
      if (u.k % 2 == v.k % 2) {
        if (u.a == v.a && u.b == v.b) out.all_classes = true;
        return out;
      }
      // opposite parities: translating by (p, q) matches the two flips exactly
      // along a diagonal q = p + delta
      if (u.a + u.b != v.a + v.b) return out;
      std::int64_t delta = (u.k % 2 == 0) ? (u.a - v.a) : (v.a - u.a);
      for (std::int64_t p = std::max<std::int64_t>(0, -delta);; ++p) {
        Rational value = rational_pow(wa_, static_cast<unsigned>(2 * p + delta));
        if (value > max_n) break;
        out.classes.push_back(NClass{C3El{p, p + delta, 0}, value});
      }
      break;
    }
    case Family::lamplighter: {
      const auto& u = std::get<LampEl>(s);
      const auto& v = std::get<LampEl>(t);
      if (u.x != v.x || u.y != v.y) return out;
      Gf2Poly diff = u.g + v.g;
      if (diff.is_zero()) {
        out.all_classes = true;  // unreachable: s == t was handled above
        return out;
      }
      // [s(f,p,q)] = [t(f,p,q)] iff T^{x+p}(1+T)^{y+q} divides g - h
      std::int64_t pmax = static_cast<std::int64_t>(diff.t_valuation()) - u.x;
      std::int64_t qmax = static_cast<std::int64_t>(diff.one_plus_t_valuation()) - u.y;
      if (pmax < 0 || qmax < 0) return out;
      for (std::int64_t p = 0; p <= pmax; ++p) {
        Rational vp = rational_pow(wx_, static_cast<unsigned>(p));
        if (vp > max_n) break;
        for (std::int64_t q = 0; q <= qmax; ++q) {
          Rational value = vp * rational_pow(wy_, static_cast<unsigned>(q));
          if (value > max_n) break;
          if (p + q > 24)
            throw std::invalid_argument("contributing-class budget exceeded; lower the cutoff");
          std::uint64_t count = std::uint64_t{1} << (p + q);
          for (std::uint64_t bits = 0; bits < count; ++bits)
            out.classes.push_back(NClass{LampEl{Gf2Poly{bits}, p, q}, value});
        }
      }
      break;
    }
  }
  std::sort(out.classes.begin(), out.classes.end(),
            [this](const NClass& lhs, const NClass& rhs) {
              int c = cmp(lhs.n, rhs.n);
              if (c != 0) return c < 0;
              return render_class(lhs) < render_class(rhs);
            });
  return out;
}

std::optional<double> Scale::zeta_closed_form(double beta) const {
  switch (monoid_.descriptor().family) {
    case Family::free_monoid: {
      double x = 0;
      for (const auto& w : coord_weights_) x += std::pow(to_double(w), -beta);
      if (x >= 1) return std::nullopt;
      return 1.0 / (1.0 - x);
    }
    case Family::free_abelian: {
      double prod = 1;
      for (const auto& w : coord_weights_) {
        if (w == 1) continue;  // kernel coordinate, no class direction
        double r = std::pow(to_double(w), -beta);
        if (r >= 1) return std::nullopt;
        prod *= 1.0 - r;
      }
      return 1.0 / prod;
    }
    case Family::axb: {
      // sum over levels n of n * N(n)^{-beta}; Euler product per prime
      if (beta <= 2) return std::nullopt;
      double base = std::riemann_zeta(beta - 1);
      for (const auto& [p, w] : prime_weights_) {
        double pd = static_cast<double>(p);
        double r = pd * std::pow(to_double(w), -beta);
        if (r >= 1) return std::nullopt;
        base *= (1.0 - std::pow(pd, 1.0 - beta)) / (1.0 - r);
      }
      return base;
    }
    case Family::c3: {
      double r = std::pow(to_double(wa_), -beta);
      if (r >= 1) return std::nullopt;
      return 1.0 / ((1.0 - r) * (1.0 - r));
    }
    case Family::lamplighter: {
      double rx = 2.0 * std::pow(to_double(wx_), -beta);
      double ry = 2.0 * std::pow(to_double(wy_), -beta);
      if (rx >= 1 || ry >= 1) return std::nullopt;
      return 1.0 / ((1.0 - rx) * (1.0 - ry));
    }
  }
  return std::nullopt;
}

}  // namespace kmslcm
