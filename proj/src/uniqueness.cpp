#include <kmslcm/uniqueness.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace kmslcm {

namespace {

constexpr std::uint64_t kRungBudget = 2'000'000;

std::int64_t factorial(int k) {
  if (k < 0 || k > 20)
    throw std::invalid_argument("ladder rung parameter out of range");
  std::int64_t f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

std::vector<std::int64_t> divisors_of(std::int64_t n) {
  std::vector<std::int64_t> low, high;
  for (std::int64_t d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    low.push_back(d);
    if (d != n / d) high.push_back(n / d);
  }
  low.insert(low.end(), high.rbegin(), high.rend());
  return low;
}

std::vector<std::int64_t> distinct_prime_factors(std::int64_t n) {
  std::vector<std::int64_t> out;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    out.push_back(p);
    while (n % p == 0) n /= p;
  }
  if (n > 1) out.push_back(n);
  return out;
}

bool exact_beta(double beta) { return exact_beta_exponent(beta).has_value(); }

MeasureValue mv_zero(double beta) {
  MeasureValue m;
  if (exact_beta(beta)) m.exact = Rational(0);
  return m;
}

void mv_accum(MeasureValue& acc, const MeasureValue& x) {
  acc.value += x.value;
  if (acc.exact && x.exact)
    *acc.exact += *x.exact;
  else
    acc.exact.reset();
}

MeasureValue mv_one_minus(const MeasureValue& x) {
  MeasureValue out;
  out.value = 1.0 - x.value;
  if (x.exact) out.exact = Rational(1) - *x.exact;
  return out;
}

// N^{-beta} as a MeasureValue (exact at nonnegative integer beta).
MeasureValue mv_pow(const Rational& n, double beta) {
  MeasureValue out;
  out.value = pow_neg_beta(n, beta);
  if (auto k = exact_beta_exponent(beta))
    out.exact = Rational(1) / rational_pow(n, *k);
  return out;
}

MeasureValue mv_div(const MeasureValue& num, const MeasureValue& den) {
  MeasureValue out;
  out.value = num.value / den.value;
  if (num.exact && den.exact && *den.exact != 0)
    out.exact = *num.exact / *den.exact;
  return out;
}

// The base class of a ladder interpreted per family.
const AxbEl& axb_base(const TruncationLadder& ladder) {
  return std::get<AxbEl>(ladder.base.rep);
}

struct BoxSpec {
  std::vector<std::int64_t> caps;
  std::vector<std::int64_t> base;
  std::vector<Rational> weights;  // per boxed coordinate
};

BoxSpec box_spec(const Scale& scale, const TruncationLadder& ladder,
                 int rung) {
  const std::int64_t k = ladder.params.at(static_cast<std::size_t>(rung));
  BoxSpec spec;
  const Monoid& m = scale.monoid();
  if (m.family() == Family::c3) {
    Rational w = scale.weights().at("x1");
    const auto& b = std::get<C3El>(ladder.base.rep);
    spec.base = {b.a, b.b};
    spec.weights = {w, w};
  } else {  // free_abelian: every coordinate of weight > 1 is boxed
    const auto& b = std::get<VecEl>(ladder.base.rep);
    for (std::size_t i = 0; i < b.exps.size(); ++i) {
      Rational w = scale.weights().at("x" + std::to_string(i + 1));
      if (w == 1) continue;
      spec.base.push_back(b.exps[i]);
      spec.weights.push_back(w);
    }
  }
  // Join closure of the classes with scale value at most 2^k is the full
  // exponent box with per-coordinate caps floor(k ln 2 / ln w).
  for (const Rational& w : spec.weights) {
    double cap = static_cast<double>(k) * std::log(2.0) /
                 std::log(to_double(w));
    spec.caps.push_back(static_cast<std::int64_t>(std::floor(cap + 1e-9)));
  }
  return spec;
}

// Rebuilds a class element from box offsets.
Element box_element(const Scale& scale, const BoxSpec& spec,
                    const std::vector<std::int64_t>& offsets) {
  const Monoid& m = scale.monoid();
  if (m.family() == Family::c3)
    return Element(
        C3El{spec.base[0] + offsets[0], spec.base[1] + offsets[1], 0});
  const auto rank = static_cast<std::size_t>(m.descriptor().rank);
  VecEl v;
  v.exps.assign(rank, 0);
  std::size_t boxed = 0;
  for (std::size_t i = 0; i < rank; ++i) {
    if (scale.weights().at("x" + std::to_string(i + 1)) == 1) continue;
    v.exps[i] = spec.base[boxed] + offsets[boxed];
    ++boxed;
  }
  return Element(std::move(v));
}

std::optional<std::vector<std::int64_t>> box_offsets(const Scale& scale,
                                                     const BoxSpec& spec,
                                                     const NClass& cls) {
  const Monoid& m = scale.monoid();
  std::vector<std::int64_t> coords;
  if (m.family() == Family::c3) {
    const auto& e = std::get<C3El>(cls.rep);
    if (e.k != 0) return std::nullopt;
    coords = {e.a, e.b};
  } else {
    const auto& v = std::get<VecEl>(cls.rep);
    for (std::size_t i = 0; i < v.exps.size(); ++i) {
      if (scale.weights().at("x" + std::to_string(i + 1)) == 1) {
        if (v.exps[i] != 0) return std::nullopt;
        continue;
      }
      coords.push_back(v.exps[i]);
    }
  }
  std::vector<std::int64_t> offsets(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    offsets[i] = coords[i] - spec.base[i];
    if (offsets[i] < 0 || offsets[i] > spec.caps[i]) return std::nullopt;
  }
  return offsets;
}

void check_rung_index(const TruncationLadder& ladder, int rung) {
  if (rung < 0 || static_cast<std::size_t>(rung) >= ladder.params.size())
    throw std::out_of_range("ladder rung index out of range");
}

}  // namespace

// ---------------------------------------------------------------------------
// B-sets and the trivially-fixed measure
// ---------------------------------------------------------------------------

std::vector<NClass> b_set(const Scale& scale, const Element& a,
                          const Element& b, const Rational& cutoff,
                          int scan_depth) {
  const Monoid& m = scale.monoid();
  m.require_element(a);
  m.require_element(b);
  std::set<NClass> found;
  if (a == b) {
    NClass ca = scale.n_class(a);
    for (const NClass& cls : scale.enumerate_classes(cutoff))
      if (scale.class_leq(ca, cls)) found.insert(cls);
  } else {
    for (const Element& t : m.enumerate(scan_depth)) {
      Element at = m.multiply(a, t);
      if (at != m.multiply(b, t)) continue;
      if (scale.n_value(at) <= cutoff) found.insert(scale.n_class(at));
    }
  }
  return {found.begin(), found.end()};
}

MeasureValue mu_omega_triv(const Scale& scale, double beta, const Element& a,
                           const Element& b, const Rational& cutoff,
                           int scan_depth) {
  std::vector<NClass> minimals;
  if (a == b) {
    // The union is the single cylinder over [a].
    minimals = {scale.n_class(a)};
  } else {
    minimals = b_set(scale, a, b, cutoff, scan_depth);
  }
  MeasureValue complement =
      mu_class_cylinder(scale, scale.class_of_identity(), minimals, beta);
  return mv_one_minus(complement);
}

// ---------------------------------------------------------------------------
// T-sets over explicit families
// ---------------------------------------------------------------------------

std::vector<NClass> t_set_kernel_path(const Scale& scale, const Element& a,
                                      const Element& b,
                                      const std::vector<NClass>& F) {
  if (!scale.ker_contains(a) || !scale.ker_contains(b))
    throw std::invalid_argument(
        "the kernel route requires kernel elements on both sides");
  std::vector<NClass> out;
  for (const NClass& cls : F)
    if (scale.class_act_inv(a, cls) == scale.class_act_inv(b, cls))
      out.push_back(cls);
  return out;
}

std::vector<NClass> t_set_general_path(const Scale& scale, const Element& a,
                                       const Element& b,
                                       const std::vector<NClass>& F) {
  if (F.empty()) return {};
  NClass ca = scale.n_class(a);
  NClass cb = scale.n_class(b);
  JoinResult anchor = scale.class_join(ca, cb);
  if (is_infinite(anchor))
    throw std::invalid_argument(
        "the classes of the pair admit no common multiple, so no family "
        "lies above both");
  for (const NClass& cls : F)
    if (!scale.class_leq(*anchor, cls))
      throw std::invalid_argument(
          "every family member must lie above the join of the pair's "
          "classes");

  auto preimage = [&](const Element& u, const NClass& cls) {
    auto pre = scale.class_preimage(u, cls);
    if (!pre)
      throw InternalInconsistencyError(
          "a class above the pair's join has no preimage under " +
          scale.monoid().render(u));
    return *pre;
  };

  std::vector<NClass> out;
  for (const NClass& s : F) {
    NClass u = preimage(a, s);
    NClass v = preimage(b, s);
    JoinResult j = scale.class_join(u, v);
    if (is_infinite(j)) continue;
    bool excluded = false;
    for (const NClass& r : F) {
      if (r == s || !scale.class_leq(s, r)) continue;
      if (scale.class_leq(preimage(a, r), *j) ||
          scale.class_leq(preimage(b, r), *j)) {
        excluded = true;
        break;
      }
    }
    if (!excluded) out.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ladders
// ---------------------------------------------------------------------------

TruncationLadder default_ladder(const Scale& scale, const Element& a,
                                const Element& b, int height) {
  if (height < 1 || height > 12)
    throw std::invalid_argument("ladder height must be between 1 and 12");
  const Monoid& m = scale.monoid();
  JoinResult anchor = scale.class_join(scale.n_class(a), scale.n_class(b));
  if (is_infinite(anchor))
    throw std::invalid_argument(
        "the pair's classes admit no common multiple; no ladder is anchored "
        "above them");
  TruncationLadder ladder;
  ladder.base = *anchor;
  for (int k = 1; k <= height; ++k) ladder.params.push_back(k);
  switch (m.family()) {
    case Family::axb:
      ladder.kind = LadderKind::divisor_levels;
      return ladder;
    case Family::lamplighter:
      if (ladder.base != scale.class_of_identity())
        throw std::invalid_argument(
            "lamplighter ladders are defined over the identity class only");
      ladder.kind = LadderKind::lamp_box;
      return ladder;
    case Family::c3:
    case Family::free_abelian:
      ladder.kind = LadderKind::exponent_box;
      return ladder;
    case Family::free_monoid:
      throw std::invalid_argument(
          "the free monoid admits no comparable equal-scale pairs; no "
          "ladder is defined");
  }
  throw std::logic_error("unknown family");
}

std::uint64_t rung_size(const Scale& scale, const TruncationLadder& ladder,
                        int rung) {
  check_rung_index(ladder, rung);
  const std::int64_t k = ladder.params[static_cast<std::size_t>(rung)];
  switch (ladder.kind) {
    case LadderKind::divisor_levels: {
      std::uint64_t total = 0;
      for (std::int64_t d : divisors_of(factorial(static_cast<int>(k))))
        total += static_cast<std::uint64_t>(d);
      return total;
    }
    case LadderKind::lamp_box: {
      // sum over x, y <= k of 2^{x+y}
      std::uint64_t root = (std::uint64_t{1} << (k + 1)) - 1;
      return root * root;
    }
    case LadderKind::exponent_box: {
      BoxSpec spec = box_spec(scale, ladder, rung);
      std::uint64_t total = 1;
      for (std::int64_t cap : spec.caps)
        total *= static_cast<std::uint64_t>(cap + 1);
      return total;
    }
  }
  throw std::logic_error("unknown ladder kind");
}

MeasureValue rung_zeta(const Scale& scale, const TruncationLadder& ladder,
                       int rung, double beta) {
  check_rung_index(ladder, rung);
  const std::int64_t k = ladder.params[static_cast<std::size_t>(rung)];
  MeasureValue acc = mv_zero(beta);
  switch (ladder.kind) {
    case LadderKind::divisor_levels: {
      const AxbEl& base = axb_base(ladder);
      for (std::int64_t d : divisors_of(factorial(static_cast<int>(k)))) {
        std::int64_t level = base.n * d;
        Rational nv = scale.n_value(Element(AxbEl{base.c % level, level}));
        MeasureValue w = mv_pow(nv, beta);
        w.value *= static_cast<double>(d);
        if (w.exact) *w.exact *= d;
        mv_accum(acc, w);
      }
      return acc;
    }
    case LadderKind::lamp_box: {
      for (std::int64_t x = 0; x <= k; ++x)
        for (std::int64_t y = 0; y <= k; ++y) {
          Rational nv = scale.n_value(Element(LampEl{Gf2Poly::zero(), x, y}));
          MeasureValue w = mv_pow(nv, beta);
          double count = std::pow(2.0, static_cast<double>(x + y));
          w.value *= count;
          if (w.exact) *w.exact *= rational_pow(Rational(2), x + y);
          mv_accum(acc, w);
        }
      return acc;
    }
    case LadderKind::exponent_box: {
      BoxSpec spec = box_spec(scale, ladder, rung);
      Rational base_n = ladder.base.n;
      MeasureValue total = mv_pow(base_n, beta);
      for (std::size_t i = 0; i < spec.caps.size(); ++i) {
        MeasureValue coord = mv_zero(beta);
        for (std::int64_t e = 0; e <= spec.caps[i]; ++e)
          mv_accum(coord, mv_pow(rational_pow(spec.weights[i], e), beta));
        total.value *= coord.value;
        if (total.exact && coord.exact)
          *total.exact *= *coord.exact;
        else
          total.exact.reset();
      }
      return total;
    }
  }
  throw std::logic_error("unknown ladder kind");
}

Rational rung_top(const Scale& scale, const TruncationLadder& ladder,
                  int rung) {
  check_rung_index(ladder, rung);
  const std::int64_t k = ladder.params[static_cast<std::size_t>(rung)];
  switch (ladder.kind) {
    case LadderKind::divisor_levels: {
      const AxbEl& base = axb_base(ladder);
      std::int64_t level = base.n * factorial(static_cast<int>(k));
      return scale.n_value(Element(AxbEl{base.c % level, level}));
    }
    case LadderKind::lamp_box:
      return scale.n_value(Element(LampEl{Gf2Poly::zero(), k, k}));
    case LadderKind::exponent_box: {
      BoxSpec spec = box_spec(scale, ladder, rung);
      Rational top = ladder.base.n;
      for (std::size_t i = 0; i < spec.caps.size(); ++i)
        top *= rational_pow(spec.weights[i], spec.caps[i]);
      return top;
    }
  }
  throw std::logic_error("unknown ladder kind");
}

bool rung_contains(const Scale& scale, const TruncationLadder& ladder,
                   int rung, const NClass& cls) {
  check_rung_index(ladder, rung);
  const std::int64_t k = ladder.params[static_cast<std::size_t>(rung)];
  switch (ladder.kind) {
    case LadderKind::divisor_levels: {
      const AxbEl& base = axb_base(ladder);
      const auto& e = std::get<AxbEl>(cls.rep);
      if (e.n % base.n != 0) return false;
      std::int64_t d = e.n / base.n;
      if (factorial(static_cast<int>(k)) % d != 0) return false;
      return (e.c - base.c) % base.n == 0;
    }
    case LadderKind::lamp_box: {
      const auto& e = std::get<LampEl>(cls.rep);
      return e.x <= k && e.y <= k;
    }
    case LadderKind::exponent_box: {
      BoxSpec spec = box_spec(scale, ladder, rung);
      return box_offsets(scale, spec, cls).has_value();
    }
  }
  throw std::logic_error("unknown ladder kind");
}

std::vector<NClass> rung_classes(const Scale& scale,
                                 const TruncationLadder& ladder, int rung) {
  if (rung_size(scale, ladder, rung) > kRungBudget)
    throw std::invalid_argument(
        "rung too large to materialize; use the closed-form accessors");
  const std::int64_t k = ladder.params[static_cast<std::size_t>(rung)];
  std::vector<NClass> out;
  switch (ladder.kind) {
    case LadderKind::divisor_levels: {
      const AxbEl& base = axb_base(ladder);
      for (std::int64_t d : divisors_of(factorial(static_cast<int>(k)))) {
        std::int64_t level = base.n * d;
        for (std::int64_t j = 0; j < d; ++j) {
          std::int64_t rep = (base.c + base.n * j) % level;
          out.push_back(scale.n_class(Element(AxbEl{rep, level})));
        }
      }
      break;
    }
    case LadderKind::lamp_box: {
      for (std::int64_t x = 0; x <= k; ++x)
        for (std::int64_t y = 0; y <= k; ++y) {
          std::uint64_t span = std::uint64_t{1} << (x + y);
          for (std::uint64_t g = 0; g < span; ++g)
            out.push_back(
                scale.n_class(Element(LampEl{Gf2Poly(g), x, y})));
        }
      break;
    }
    case LadderKind::exponent_box: {
      BoxSpec spec = box_spec(scale, ladder, rung);
      std::vector<std::int64_t> offsets(spec.caps.size(), 0);
      while (true) {
        out.push_back(scale.n_class(box_element(scale, spec, offsets)));
        std::size_t i = 0;
        for (; i < offsets.size(); ++i) {
          if (offsets[i] < spec.caps[i]) {
            ++offsets[i];
            break;
          }
          offsets[i] = 0;
        }
        if (i == offsets.size()) break;
      }
      break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NClass> rung_minimal_above(const Scale& scale,
                                       const TruncationLadder& ladder,
                                       int rung, const NClass& cls) {
  check_rung_index(ladder, rung);
  if (!rung_contains(scale, ladder, rung, cls))
    throw std::invalid_argument("class does not belong to the rung");
  const std::int64_t k = ladder.params[static_cast<std::size_t>(rung)];
  std::vector<NClass> out;
  switch (ladder.kind) {
    case LadderKind::divisor_levels: {
      const AxbEl& base = axb_base(ladder);
      const auto& e = std::get<AxbEl>(cls.rep);
      std::int64_t d = e.n / base.n;
      std::int64_t L = factorial(static_cast<int>(k));
      for (std::int64_t p : distinct_prime_factors(L / d)) {
        std::int64_t level = e.n * p;
        for (std::int64_t j = 0; j < p; ++j) {
          std::int64_t rep = (e.c + e.n * j) % level;
          out.push_back(scale.n_class(Element(AxbEl{rep, level})));
        }
      }
      break;
    }
    case LadderKind::lamp_box: {
      const auto& e = std::get<LampEl>(cls.rep);
      Gf2Poly step = gf2_theta_modulus(static_cast<unsigned>(e.x),
                                       static_cast<unsigned>(e.y));
      if (e.x < k) {
        out.push_back(scale.n_class(Element(LampEl{e.g, e.x + 1, e.y})));
        out.push_back(
            scale.n_class(Element(LampEl{e.g + step, e.x + 1, e.y})));
      }
      if (e.y < k) {
        out.push_back(scale.n_class(Element(LampEl{e.g, e.x, e.y + 1})));
        out.push_back(
            scale.n_class(Element(LampEl{e.g + step, e.x, e.y + 1})));
      }
      break;
    }
    case LadderKind::exponent_box: {
      BoxSpec spec = box_spec(scale, ladder, rung);
      auto offsets = *box_offsets(scale, spec, cls);
      for (std::size_t i = 0; i < offsets.size(); ++i) {
        if (offsets[i] >= spec.caps[i]) continue;
        auto up = offsets;
        ++up[i];
        out.push_back(scale.n_class(box_element(scale, spec, up)));
      }
      break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NClass> rung_t_set(const Scale& scale,
                               const TruncationLadder& ladder, int rung,
                               const Element& a, const Element& b) {
  check_rung_index(ladder, rung);
  const std::int64_t k = ladder.params[static_cast<std::size_t>(rung)];
  const bool both_kernel = scale.ker_contains(a) && scale.ker_contains(b);
  if (!both_kernel) return t_set_general_path(scale, a, b, rung_classes(scale, ladder, rung));

  const Monoid& m = scale.monoid();
  switch (m.family()) {
    case Family::axb: {
      std::int64_t delta =
          std::llabs(std::get<AxbEl>(a).c - std::get<AxbEl>(b).c);
      if (delta == 0) return rung_classes(scale, ladder, rung);
      // a^{-1}[(x, n)] = b^{-1}[(x, n)] exactly when n divides the kernel
      // difference, and then the whole level qualifies.
      std::vector<NClass> out;
      for (std::int64_t d : divisors_of(factorial(static_cast<int>(k)))) {
        if (delta % d != 0) continue;
        for (std::int64_t j = 0; j < d; ++j)
          out.push_back(scale.n_class(Element(AxbEl{j, d})));
      }
      std::sort(out.begin(), out.end());
      return out;
    }
    case Family::lamplighter: {
      Gf2Poly diff(std::get<LampEl>(a).g.bits() ^
                   std::get<LampEl>(b).g.bits());
      if (diff.is_zero()) return rung_classes(scale, ladder, rung);
      // Levels (x, y) whose modulus divides the kernel difference qualify
      // wholesale.
      std::int64_t xmax = std::min<std::int64_t>(k, diff.t_valuation());
      std::int64_t ymax = std::min<std::int64_t>(k, diff.one_plus_t_valuation());
      std::vector<NClass> out;
      for (std::int64_t x = 0; x <= xmax; ++x)
        for (std::int64_t y = 0; y <= ymax; ++y) {
          std::uint64_t span = std::uint64_t{1} << (x + y);
          for (std::uint64_t g = 0; g < span; ++g)
            out.push_back(scale.n_class(Element(LampEl{Gf2Poly(g), x, y})));
        }
      std::sort(out.begin(), out.end());
      return out;
    }
    case Family::c3: {
      std::int64_t ja = std::get<C3El>(a).k, jb = std::get<C3El>(b).k;
      if ((ja - jb) % 2 == 0) return rung_classes(scale, ladder, rung);
      // Opposite parity: the flip must fix the class, so only the diagonal
      // survives.
      BoxSpec spec = box_spec(scale, ladder, rung);
      std::vector<NClass> out;
      std::int64_t cap = std::min(spec.caps[0], spec.caps[1]);
      for (std::int64_t i = 0; i <= cap; ++i) {
        std::int64_t pa = spec.base[0] + i, pb = spec.base[1] + i;
        if (pa == pb)
          out.push_back(scale.n_class(Element(C3El{pa, pb, 0})));
      }
      // Off-diagonal bases can still hit the diagonal when the base itself
      // is asymmetric; walk the box to stay correct for shifted ladders.
      if (spec.base[0] != spec.base[1]) {
        out.clear();
        for (std::int64_t i = 0; i <= spec.caps[0]; ++i)
          for (std::int64_t j = 0; j <= spec.caps[1]; ++j)
            if (spec.base[0] + i == spec.base[1] + j)
              out.push_back(scale.n_class(
                  Element(C3El{spec.base[0] + i, spec.base[1] + j, 0})));
      }
      std::sort(out.begin(), out.end());
      return out;
    }
    case Family::free_abelian:
      // The kernel acts trivially on the quotient: everything is fixed.
      return rung_classes(scale, ladder, rung);
    case Family::free_monoid:
      break;
  }
  throw std::invalid_argument("no T-set closed form for this family");
}

bool verify_ladder_rung(const Scale& scale, const TruncationLadder& ladder,
                        int rung, const Element& a, std::uint64_t seed,
                        int samples) {
  check_rung_index(ladder, rung);
  std::uint64_t size = rung_size(scale, ladder, rung);
  std::vector<NClass> classes;
  const bool small = size <= 512;
  if (small) {
    classes = rung_classes(scale, ladder, rung);
  } else {
    // Seeded sample of classes drawn through the closed-form structure.
    std::mt19937_64 rng(seed);
    const std::int64_t k = ladder.params[static_cast<std::size_t>(rung)];
    for (int i = 0; i < samples; ++i) {
      switch (ladder.kind) {
        case LadderKind::divisor_levels: {
          const AxbEl& base = axb_base(ladder);
          auto divs = divisors_of(factorial(static_cast<int>(k)));
          std::int64_t d = divs[rng() % divs.size()];
          std::int64_t level = base.n * d;
          std::int64_t j = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(d));
          classes.push_back(
              scale.n_class(Element(AxbEl{(base.c + base.n * j) % level, level})));
          break;
        }
        case LadderKind::lamp_box: {
          std::int64_t x = static_cast<std::int64_t>(rng() % (k + 1));
          std::int64_t y = static_cast<std::int64_t>(rng() % (k + 1));
          std::uint64_t g = rng() & ((std::uint64_t{1} << (x + y)) - 1);
          classes.push_back(scale.n_class(Element(LampEl{Gf2Poly(g), x, y})));
          break;
        }
        case LadderKind::exponent_box: {
          BoxSpec spec = box_spec(scale, ladder, rung);
          std::vector<std::int64_t> offsets;
          for (std::int64_t cap : spec.caps)
            offsets.push_back(static_cast<std::int64_t>(
                rng() % static_cast<std::uint64_t>(cap + 1)));
          classes.push_back(scale.n_class(box_element(scale, spec, offsets)));
          break;
        }
      }
    }
  }
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  const std::size_t n = classes.size();
  if (n == 0) return true;
  const int pair_checks = small ? static_cast<int>(n * n) : samples;
  for (int i = 0; i < pair_checks; ++i) {
    const NClass& x = small ? classes[static_cast<std::size_t>(i) / n]
                            : classes[rng() % n];
    const NClass& y = small ? classes[static_cast<std::size_t>(i) % n]
                            : classes[rng() % n];
    JoinResult j = scale.class_join(x, y);
    if (j && !rung_contains(scale, ladder, rung, *j)) return false;
  }
  if (scale.ker_contains(a)) {
    for (const NClass& cls : classes)
      if (!rung_contains(scale, ladder, rung, scale.class_act_inv(a, cls)))
        return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Rung evaluation
// ---------------------------------------------------------------------------

RungValue evaluate_rung(const Scale& scale, const TruncationLadder& ladder,
                        int rung, double beta, const Element& a,
                        const Element& b, int scan_depth) {
  check_rung_index(ladder, rung);
  RungValue rv;
  rv.param = ladder.params[static_cast<std::size_t>(rung)];
  rv.f_size = rung_size(scale, ladder, rung);

  std::vector<NClass> T = rung_t_set(scale, ladder, rung, a, b);
  rv.t_size = T.size();

  // Raw value: the T-set atoms Z_{s, F_s} are disjoint, and each atom is an
  // inclusion-exclusion over the minimal rung classes above its base.
  MeasureValue fix = mv_zero(beta);
  MeasureValue fix_points = mv_zero(beta);
  for (const NClass& s : T) {
    auto mins = rung_minimal_above(scale, ladder, rung, s);
    mv_accum(fix, mu_class_cylinder(scale, s, mins, beta));
    mv_accum(fix_points, mv_pow(s.n, beta));
  }
  rv.mu_fix = fix;

  MeasureValue zh = rung_zeta(scale, ladder, rung, beta);
  rv.mu_fix_atomic = mv_div(fix_points, zh);

  Rational top = rung_top(scale, ladder, rung);
  rv.mu_triv = mu_omega_triv(scale, beta, a, b, top, scan_depth);

  MeasureValue triv_points = mv_zero(beta);
  if (a == b) {
    // Every rung class above [a] carries its point mass.
    NClass ca = scale.n_class(a);
    for (const NClass& cls : rung_classes(scale, ladder, rung))
      if (scale.class_leq(ca, cls)) mv_accum(triv_points, mv_pow(cls.n, beta));
  } else {
    for (const NClass& cls : b_set(scale, a, b, top, scan_depth))
      if (rung_contains(scale, ladder, rung, cls))
        mv_accum(triv_points, mv_pow(cls.n, beta));
  }
  rv.mu_triv_atomic = mv_div(triv_points, zh);
  return rv;
}

// ---------------------------------------------------------------------------
// Generalized-scale diagnostics
// ---------------------------------------------------------------------------

GsCheckResult gs_check(const Scale& scale, int depth,
                       std::uint64_t level_cutoff) {
  GsCheckResult res;
  res.axiom = {true, true, true, true};
  const Monoid& m = scale.monoid();
  auto elems = m.enumerate(depth);
  auto note = [&](int axiom, const std::string& text) {
    res.axiom[static_cast<std::size_t>(axiom - 1)] = false;
    if (res.detail.empty())
      res.detail = "axiom " + std::to_string(axiom) + ": " + text;
  };

  // (1) kernel = core: kernel elements meet everything; non-kernel elements
  // must fail to meet something at this depth.
  for (const Element& a : elems) {
    bool meets_all = true;
    for (const Element& s : elems)
      if (!m.right_lcm(a, s)) {
        meets_all = false;
        break;
      }
    if (scale.ker_contains(a) && !meets_all)
      note(1, "kernel element " + m.render(a) + " misses an ideal");
    if (!scale.ker_contains(a) && meets_all)
      note(1, "non-kernel element " + m.render(a) +
                  " meets every enumerated ideal");
  }

  // (2) the level of scale value n carries exactly n classes.
  std::vector<LevelCount> levels;
  if (scale.quotient_supported()) {
    levels = scale.class_levels(Rational(static_cast<long>(level_cutoff)));
    for (const LevelCount& lc : levels) {
      if (!is_integer(lc.n)) {
        note(2, "scale value " + rational_to_string(lc.n) +
                    " is not an integer");
        continue;
      }
      Rational expected = lc.n;
      if (Rational(static_cast<long>(lc.classes)) != expected)
        note(2, "level " + rational_to_string(lc.n) + " has " +
                    std::to_string(lc.classes) + " classes");
    }
  } else {
    note(2, "class quotient unsupported for these weights");
  }

  // (3) equal scale values are equivalent or disjoint.
  for (std::size_t i = 0; i < elems.size() && res.axiom[2]; ++i)
    for (std::size_t j = i + 1; j < elems.size(); ++j) {
      if (scale.n_value(elems[i]) != scale.n_value(elems[j])) continue;
      if (!scale.quotient_supported()) break;
      if (scale.n_class(elems[i]) == scale.n_class(elems[j])) continue;
      if (m.right_lcm(elems[i], elems[j])) {
        note(3, m.render(elems[i]) + " and " + m.render(elems[j]) +
                    " share scale value but are neither equivalent nor "
                    "disjoint");
        break;
      }
    }

  // (4) every element meets some element at every level.
  if (scale.quotient_supported()) {
    std::vector<Element> candidates = elems;
    for (const NClass& cls : scale.enumerate_classes(
             Rational(static_cast<long>(level_cutoff))))
      candidates.push_back(cls.rep);
    for (const Element& s : elems) {
      for (const LevelCount& lc : levels) {
        bool met = false;
        for (const Element& t : candidates) {
          if (scale.n_value(t) != lc.n) continue;
          if (m.right_lcm(s, t)) {
            met = true;
            break;
          }
        }
        if (!met) {
          note(4, m.render(s) + " meets nothing at level " +
                      rational_to_string(lc.n));
          break;
        }
      }
      if (!res.axiom[3]) break;
    }
  }

  res.pass = res.axiom[0] && res.axiom[1] && res.axiom[2] && res.axiom[3];
  return res;
}

GsRatios gs_ratios(const Scale& scale, const GsCheckResult& check,
                   const Element& a, const Element& b, std::uint64_t level,
                   int scan_depth) {
  if (!check.pass)
    throw std::invalid_argument(
        "generalized-scale axioms were not verified for this scale");
  if (!scale.ker_contains(a) || !scale.ker_contains(b))
    throw std::invalid_argument(
        "per-level ratios are defined for kernel pairs");
  if (level == 0) throw std::invalid_argument("level must be positive");
  GsRatios out;
  out.level = level;
  Rational lv(static_cast<long>(level));
  std::vector<NClass> at_level;
  for (const NClass& cls : scale.enumerate_classes(lv))
    if (cls.n == lv) at_level.push_back(cls);

  for (const NClass& cls : at_level)
    if (scale.class_act_inv(a, cls) == scale.class_act_inv(b, cls))
      ++out.t_count;

  if (a == b) {
    out.b_count = at_level.size();
  } else {
    for (const NClass& cls : b_set(scale, a, b, lv, scan_depth))
      if (cls.n == lv) ++out.b_count;
  }
  out.b_ratio = Rational(static_cast<long>(out.b_count)) / lv;
  out.t_ratio = Rational(static_cast<long>(out.t_count)) / lv;
  return out;
}

SmoothStage axb_smooth_stage(const Scale& scale, double beta,
                             const Element& a, const Element& b,
                             const std::vector<int>& primes) {
  if (scale.monoid().family() != Family::axb)
    throw std::invalid_argument(
        "smooth stages are defined for the affine monoid");
  for (const auto& [key, w] : scale.weights())
    if (w != Rational(std::stol(key)))
      throw std::invalid_argument(
          "smooth stages require the natural level weights");
  if (beta <= 1.0)
    throw std::invalid_argument("smooth stages require beta > 1");
  if (!scale.ker_contains(a) || !scale.ker_contains(b) || a == b)
    throw std::invalid_argument(
        "smooth stages are defined for distinct kernel elements");
  SmoothStage out;
  out.primes = primes;
  std::int64_t delta =
      std::llabs(std::get<AxbEl>(a).c - std::get<AxbEl>(b).c);
  auto smooth = [&](std::int64_t n) {
    for (int p : primes)
      while (n % p == 0) n /= p;
    return n == 1;
  };
  double sum = 0.0;
  for (std::int64_t d : divisors_of(delta))
    if (smooth(d)) sum += std::pow(static_cast<double>(d), 1.0 - beta);
  double product = 1.0;
  for (int p : primes)
    product *= 1.0 - std::pow(static_cast<double>(p), 1.0 - beta);
  out.fix = product * sum;
  out.triv = 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------------

namespace {

PairReport evaluate_pair(const Scale& scale, double beta, const Element& a,
                         const Element& b, int ladder_height, double tol,
                         int scan_depth) {
  PairReport pr;
  pr.a = a;
  pr.b = b;
  TruncationLadder ladder = default_ladder(scale, a, b, ladder_height);
  std::vector<double> gaps;
  for (std::size_t r = 0; r < ladder.params.size(); ++r) {
    RungValue rv = evaluate_rung(scale, ladder, static_cast<int>(r), beta, a,
                                 b, scan_depth);
    // Prefer the exact route when it is available so that cancellations are
    // certified rather than approximated.
    if (rv.mu_fix.exact && rv.mu_triv.exact)
      gaps.push_back(std::abs(to_double(*rv.mu_fix.exact - *rv.mu_triv.exact)));
    else
      gaps.push_back(std::abs(rv.mu_fix.value - rv.mu_triv.value));
    pr.rungs.push_back(std::move(rv));
  }
  pr.gap = gaps.back();
  pr.stabilized =
      gaps.size() >= 2 && std::abs(gaps.back() - gaps[gaps.size() - 2]) <= tol;
  if (pr.gap <= tol)
    pr.verdict = PairVerdict::equal_at_tolerance;
  else if (pr.stabilized)
    pr.verdict = PairVerdict::separated;
  else
    pr.verdict = PairVerdict::inconclusive;
  return pr;
}

}  // namespace

UniquenessReport uniqueness_verdict(const Scale& scale, double beta,
                                    int pair_depth, int ladder_height,
                                    std::optional<double> tolerance) {
  UniquenessReport rep;
  rep.beta = beta;
  rep.exact_path = exact_beta(beta);
  rep.tolerance = tolerance.value_or(rep.exact_path ? 1e-9 : 1e-6);
  rep.existence = existence_check(scale, beta, Rational(16), 3, 200'000);

  // Separating pairs: kernel pairs when the kernel is nontrivial (the scale
  // values of non-kernel generators are bounded away from 1, so kernel pairs
  // suffice); otherwise comparable equal-scale pairs.
  std::vector<std::pair<Element, Element>> pairs;
  auto kernel = scale.kernel_elements(pair_depth);
  if (kernel.size() > 1) {
    for (std::size_t i = 0; i < kernel.size(); ++i)
      for (std::size_t j = i + 1; j < kernel.size(); ++j)
        pairs.emplace_back(kernel[i], kernel[j]);
  } else {
    const Monoid& m = scale.monoid();
    auto elems = m.enumerate(pair_depth);
    for (std::size_t i = 0; i < elems.size() && pairs.size() < 64; ++i)
      for (std::size_t j = i + 1; j < elems.size() && pairs.size() < 64; ++j) {
        if (scale.n_value(elems[i]) != scale.n_value(elems[j])) continue;
        if (!m.right_lcm(elems[i], elems[j])) continue;
        pairs.emplace_back(elems[i], elems[j]);
      }
  }

  if (pairs.empty()) {
    rep.verdict = GlobalVerdict::unique_at_tolerance;
    rep.certificate_only = true;
    rep.note =
        "no separating pairs exist at this depth; every state agrees on the "
        "inspected elements";
    return rep;
  }

  const int scan_depth = 4;
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  std::vector<PairReport> reports(pairs.size());
  for (std::size_t start = 0; start < pairs.size(); start += hw) {
    std::vector<std::future<PairReport>> batch;
    const std::size_t end = std::min(pairs.size(), start + hw);
    for (std::size_t i = start; i < end; ++i)
      batch.push_back(std::async(std::launch::async, [&, i] {
        return evaluate_pair(scale, beta, pairs[i].first, pairs[i].second,
                             ladder_height, rep.tolerance, scan_depth);
      }));
    for (std::size_t i = start; i < end; ++i)
      reports[i] = batch[i - start].get();
  }
  rep.pairs = std::move(reports);

  bool all_equal = true, any_separated = false, all_stable = true;
  for (const PairReport& pr : rep.pairs) {
    all_equal = all_equal && pr.verdict == PairVerdict::equal_at_tolerance;
    any_separated = any_separated || pr.verdict == PairVerdict::separated;
    all_stable = all_stable && pr.stabilized;
  }
  if (any_separated)
    rep.verdict = GlobalVerdict::not_unique;
  else if (all_equal)
    rep.verdict = GlobalVerdict::unique_at_tolerance;
  else
    rep.verdict = GlobalVerdict::inconclusive;
  rep.certificate_only = !all_stable;
  rep.note = rep.certificate_only
                 ? "rung sequences have not stabilized: certificate, not proof"
                 : "values certified at the final truncation rung";
  if (!rep.existence.nonnegative) {
    rep.verdict = GlobalVerdict::inconclusive;
    rep.note =
        "a negative cylinder witness rules out states at this exponent; the "
        "uniqueness question is vacuous";
  }
  return rep;
}

}  // namespace kmslcm
