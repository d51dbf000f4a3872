#include <kmslcm/kms.hpp>

#include <kmslcm/measure.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace kmslcm {

namespace {

constexpr double kUnitTol = 1e-9;

std::complex<double> ipow(std::complex<double> z, std::int64_t k) {
  // |z| = 1, so the inverse is the conjugate.
  if (k < 0) return ipow(std::conj(z), -k);
  std::complex<double> acc{1.0, 0.0};
  while (k > 0) {
    if (k & 1) acc *= z;
    z *= z;
    k >>= 1;
  }
  return acc;
}

// Exponent coordinates of a kernel element with respect to the kernel
// generators, in generator order.  The lamp group is handled separately by
// lamp_character traces; character traces on the free monoid's kernel factor
// through letter counts.
std::vector<std::int64_t> kernel_exponents(const Scale& scale,
                                           const Element& a) {
  if (!scale.ker_contains(a))
    throw InternalInconsistencyError(
        "trace evaluated on a non-kernel element: " +
        scale.monoid().render(a));
  const Monoid& m = scale.monoid();
  switch (m.family()) {
    case Family::free_monoid: {
      const auto& w = std::get<WordEl>(a);
      std::vector<std::int64_t> exps;
      for (const std::string& name : m.generator_names()) {
        if (scale.weights().at(name) != 1) continue;
        exps.push_back(static_cast<std::int64_t>(
            std::count(w.letters.begin(), w.letters.end(), name[0])));
      }
      return exps;
    }
    case Family::free_abelian: {
      const auto& v = std::get<VecEl>(a);
      std::vector<std::int64_t> exps;
      for (std::size_t i = 0; i < v.exps.size(); ++i)
        if (scale.weights().at("x" + std::to_string(i + 1)) == 1)
          exps.push_back(v.exps[i]);
      return exps;
    }
    case Family::axb:
      return {std::get<AxbEl>(a).c};
    case Family::c3:
      return {std::get<C3El>(a).k};
    case Family::lamplighter:
      throw std::invalid_argument(
          "the lamp group has no integer exponent coordinates; use a "
          "lamp_character trace");
  }
  throw std::logic_error("unknown family");
}

std::size_t kernel_generator_count(const Scale& scale) {
  const Monoid& m = scale.monoid();
  switch (m.family()) {
    case Family::free_monoid:
    case Family::free_abelian: {
      std::size_t n = 0;
      for (const auto& [name, w] : scale.weights())
        if (w == 1) ++n;
      return n;
    }
    case Family::axb:
    case Family::c3:
      return 1;
    case Family::lamplighter:
      throw std::invalid_argument(
          "the lamp group has no integer exponent coordinates; use a "
          "lamp_character trace");
  }
  throw std::logic_error("unknown family");
}

double n_to_minus_beta(const Scale& scale, const Element& s, double beta) {
  return std::exp(-beta * std::log(to_double(scale.n_value(s))));
}

}  // namespace

// ---------------------------------------------------------------------------
// SpanElement
// ---------------------------------------------------------------------------

SpanElement SpanElement::term(const Monoid& m, Element s, Element t,
                              std::complex<double> coeff) {
  SpanElement x;
  x.add(m, s, t, coeff);
  return x;
}

void SpanElement::add(const Monoid& m, const Element& s, const Element& t,
                      std::complex<double> coeff) {
  auto key = m.unit_normal_pair(s, t);
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    if (coeff != 0.0) terms_.emplace(std::move(key), coeff);
    return;
  }
  it->second += coeff;
  if (it->second == 0.0) terms_.erase(it);
}

std::vector<SpanTerm> SpanElement::terms() const {
  std::vector<SpanTerm> out;
  out.reserve(terms_.size());
  for (const auto& [key, c] : terms_) out.push_back({key.first, key.second, c});
  return out;
}

std::optional<SpanTerm> mul_spanning(const Monoid& monoid, const Element& s,
                                     const Element& t, const Element& u,
                                     const Element& v) {
  auto r = monoid.right_lcm(t, u);
  if (!r) return std::nullopt;
  auto tp = monoid.left_divide(t, *r);
  auto up = monoid.left_divide(u, *r);
  if (!tp || !up)
    throw InternalInconsistencyError(
        "a right lcm is not divisible by one of its factors");
  return SpanTerm{monoid.multiply(s, *tp), monoid.multiply(v, *up), 1.0};
}

SpanElement span_product(const Monoid& monoid, const SpanElement& x,
                         const SpanElement& y) {
  SpanElement out;
  for (const SpanTerm& a : x.terms()) {
    for (const SpanTerm& b : y.terms()) {
      auto prod = mul_spanning(monoid, a.s, a.t, b.s, b.t);
      if (prod) out.add(monoid, prod->s, prod->t, a.coeff * b.coeff);
    }
  }
  return out;
}

SpanElement span_adjoint(const Monoid& m, const SpanElement& x) {
  SpanElement out;
  for (const SpanTerm& a : x.terms())
    out.add(m, a.t, a.s, std::conj(a.coeff));
  return out;
}

SpanElement apply_dynamics(const Scale& scale, const SpanElement& x,
                           double beta) {
  SpanElement out;
  for (const SpanTerm& a : x.terms()) {
    Rational ratio = scale.n_value(a.s) / scale.n_value(a.t);
    double factor = std::exp(-beta * std::log(to_double(ratio)));
    out.add(scale.monoid(), a.s, a.t, a.coeff * factor);
  }
  return out;
}

SpanElement conditional_expectation(const Scale& scale, const SpanElement& x) {
  SpanElement out;
  for (const SpanTerm& a : x.terms())
    if (scale.ker_contains(a.s) && scale.ker_contains(a.t))
      out.add(scale.monoid(), a.s, a.t, a.coeff);
  return out;
}

// ---------------------------------------------------------------------------
// Traces
// ---------------------------------------------------------------------------

Trace Trace::character(std::vector<std::complex<double>> z) {
  for (const auto& zi : z)
    if (std::abs(std::abs(zi) - 1.0) > kUnitTol)
      throw std::invalid_argument(
          "character trace requires unit complex parameters");
  Trace t;
  t.kind_ = TraceKind::character;
  t.z_ = std::move(z);
  return t;
}

Trace Trace::fourier(std::vector<double> coeffs) {
  if (coeffs.empty() || std::abs(coeffs[0] - 1.0) > 1e-12)
    throw std::invalid_argument(
        "fourier trace requires moment 0 equal to 1");
  for (double c : coeffs)
    if (std::abs(c) > 1.0 + 1e-12)
      throw std::invalid_argument(
          "fourier trace moments must lie in [-1, 1]");
  Trace t;
  t.kind_ = TraceKind::fourier;
  t.coeffs_ = std::move(coeffs);
  return t;
}

Trace Trace::lamp_character(std::vector<int> signs) {
  for (int s : signs)
    if (s != 1 && s != -1)
      throw std::invalid_argument("lamp_character signs must be +1 or -1");
  if (signs.size() > 63)
    throw std::invalid_argument("lamp_character supports at most 63 signs");
  Trace t;
  t.kind_ = TraceKind::lamp_character;
  t.signs_ = std::move(signs);
  return t;
}

std::complex<double> Trace::eval(const Scale& scale, const Element& q,
                                 const Element& p) const {
  switch (kind_) {
    case TraceKind::character: {
      auto kq = kernel_exponents(scale, q);
      auto kp = kernel_exponents(scale, p);
      if (z_.size() != kernel_generator_count(scale))
        throw std::invalid_argument(
            "character trace parameter count does not match the number of "
            "kernel generators");
      std::complex<double> acc{1.0, 0.0};
      for (std::size_t i = 0; i < z_.size(); ++i)
        acc *= ipow(z_[i], kq[i] - kp[i]);
      return acc;
    }
    case TraceKind::fourier: {
      if (kernel_generator_count(scale) != 1)
        throw std::invalid_argument(
            "fourier trace requires a kernel with a single generator");
      auto kq = kernel_exponents(scale, q);
      auto kp = kernel_exponents(scale, p);
      std::int64_t k = std::llabs(kq[0] - kp[0]);
      if (static_cast<std::size_t>(k) >= coeffs_.size()) return 0.0;
      return coeffs_[static_cast<std::size_t>(k)];
    }
    case TraceKind::lamp_character: {
      if (scale.monoid().family() != Family::lamplighter)
        throw std::invalid_argument(
            "lamp_character traces apply only to the lamplighter monoid");
      if (!scale.ker_contains(q) || !scale.ker_contains(p))
        throw InternalInconsistencyError(
            "trace evaluated on a non-kernel element");
      std::uint64_t mask = 0;
      for (std::size_t j = 0; j < signs_.size(); ++j)
        if (signs_[j] == -1) mask |= (std::uint64_t{1} << j);
      std::uint64_t diff =
          std::get<LampEl>(q).g.bits() ^ std::get<LampEl>(p).g.bits();
      return (std::popcount(diff & mask) % 2 == 0) ? 1.0 : -1.0;
    }
  }
  throw std::logic_error("unknown trace kind");
}

std::string Trace::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case TraceKind::character: {
      os << "character(";
      for (std::size_t i = 0; i < z_.size(); ++i) {
        if (i) os << ", ";
        os << z_[i].real() << (z_[i].imag() < 0 ? "-" : "+")
           << std::abs(z_[i].imag()) << "i";
      }
      os << ")";
      break;
    }
    case TraceKind::fourier: {
      os << "fourier(";
      for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (i) os << ", ";
        os << coeffs_[i];
      }
      os << ")";
      break;
    }
    case TraceKind::lamp_character: {
      os << "lamp_character(";
      for (std::size_t i = 0; i < signs_.size(); ++i) {
        if (i) os << ", ";
        os << signs_[i];
      }
      os << ")";
      break;
    }
  }
  return os.str();
}

bool trace_psd_check(const Scale& scale, const Trace& trace,
                     std::size_t kernel_bound, double tol) {
  auto kernel = scale.kernel_elements(static_cast<int>(kernel_bound));
  const std::size_t n = kernel.size();
  std::vector<std::vector<std::complex<double>>> gram(
      n, std::vector<std::complex<double>>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      gram[i][j] = trace.eval(scale, kernel[i], kernel[j]);
  // Hermitian symmetry.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (std::abs(gram[i][j] - std::conj(gram[j][i])) > tol) return false;
  // Cholesky with pivot tolerance (in-place LL^*).
  for (std::size_t k = 0; k < n; ++k) {
    double pivot = gram[k][k].real();
    if (pivot < -tol) return false;
    if (pivot <= tol) {
      // Rank-deficient direction: the rest of the column must vanish too.
      for (std::size_t i = k + 1; i < n; ++i)
        if (std::abs(gram[i][k]) > std::sqrt(tol)) return false;
      for (std::size_t i = k + 1; i < n; ++i) gram[i][k] = 0.0;
      continue;
    }
    double root = std::sqrt(pivot);
    gram[k][k] = root;
    for (std::size_t i = k + 1; i < n; ++i) gram[i][k] /= root;
    for (std::size_t j = k + 1; j < n; ++j)
      for (std::size_t i = j; i < n; ++i)
        gram[i][j] -= gram[i][k] * std::conj(gram[j][k]);
  }
  return true;
}

// ---------------------------------------------------------------------------
// Finite-type states
// ---------------------------------------------------------------------------

namespace {

// Kernel witnesses p, q with (s x) p = (t x) q = right_lcm(s x, t x), for a
// class representative x of an equal-translate class.
std::pair<Element, Element> translation_witnesses(const Scale& scale,
                                                  const Element& sx,
                                                  const Element& tx) {
  const Monoid& m = scale.monoid();
  auto r = m.right_lcm(sx, tx);
  if (!r)
    throw InternalInconsistencyError(
        "an equal-translate class admits no common multiple: " + m.render(sx) +
        " vs " + m.render(tx));
  auto p = m.left_divide(sx, *r);
  auto q = m.left_divide(tx, *r);
  if (!p || !q)
    throw InternalInconsistencyError(
        "a right lcm is not divisible by one of its factors");
  if (!scale.ker_contains(*p) || !scale.ker_contains(*q))
    throw InternalInconsistencyError(
        "translation witnesses for " + m.render(sx) + " vs " + m.render(tx) +
        " are not kernel elements");
  return {*p, *q};
}

}  // namespace

PhiResult phi_finite_type(const Scale& scale, double beta, const Trace& trace,
                          const Element& s, const Element& t,
                          std::uint64_t cutoff) {
  if (!scale.quotient_supported())
    throw std::invalid_argument(
        "state evaluation requires a supported class quotient");
  const Monoid& m = scale.monoid();
  m.require_element(s);
  m.require_element(t);

  PhiResult out;
  if (scale.n_value(s) != scale.n_value(t)) {
    // Distinct scale values admit no equal translates.
    return out;
  }

  EqualTranslateSet et = scale.equal_translate_classes(s, t, cutoff);
  const double ns_beta = n_to_minus_beta(scale, s, beta);

  if (et.all_classes) {
    // Every class translates equally, and the trace argument is the same
    // kernel pair for all of them, so the normalized sum telescopes to a
    // single exact factor.
    auto [p, q] = translation_witnesses(scale, s, t);
    out.value = ns_beta * trace.eval(scale, q, p);
    out.truncated = false;
    return out;
  }

  std::complex<double> num{0.0, 0.0};
  for (const NClass& cls : et.classes) {
    Element sx = m.multiply(s, cls.rep);
    Element tx = m.multiply(t, cls.rep);
    auto [p, q] = translation_witnesses(scale, sx, tx);
    double nx_beta = std::exp(-beta * std::log(to_double(cls.n)));
    num += nx_beta * trace.eval(scale, q, p);
  }
  out.contributing = et.classes.size();

  ZetaResult zeta = zeta_partial(scale, beta, cutoff);
  out.value = ns_beta * num / zeta.value;
  out.truncated = true;
  if (zeta.closed_form) {
    // |tau| <= 1 bounds every omitted term by its zeta weight.
    out.tail_bound =
        ns_beta * std::max(0.0, *zeta.closed_form - zeta.value) / zeta.value;
    out.tail_heuristic = false;
  } else {
    auto levels = scale.class_levels(cutoff);
    double last = 0.0;
    if (!levels.empty()) {
      const LevelCount& top = levels.back();
      last = static_cast<double>(top.classes) *
             std::exp(-beta * std::log(to_double(top.n)));
    }
    out.tail_bound = ns_beta * last / zeta.value;
    out.tail_heuristic = true;
  }
  return out;
}

PhiResult phi_span(const Scale& scale, double beta, const Trace& trace,
                   const SpanElement& x, std::uint64_t cutoff) {
  PhiResult out;
  for (const SpanTerm& term : x.terms()) {
    PhiResult r = phi_finite_type(scale, beta, trace, term.s, term.t, cutoff);
    out.value += term.coeff * r.value;
    out.tail_bound += std::abs(term.coeff) * r.tail_bound;
    out.tail_heuristic = out.tail_heuristic || r.tail_heuristic;
    out.contributing += r.contributing;
    out.truncated = out.truncated || r.truncated;
  }
  return out;
}

std::complex<double> phi_kms_infty(const Scale& scale, const Trace& trace,
                                   const Element& s, const Element& t) {
  if (!scale.ker_contains(s) || !scale.ker_contains(t)) return 0.0;
  return trace.eval(scale, s, t);
}

std::complex<double> ground_state(const Scale& scale, const StateEval& psi,
                                  const SpanElement& x) {
  return psi(conditional_expectation(scale, x));
}

double kms_residual(const Scale& scale, double beta, const Trace& trace,
                    const SpanElement& x, const SpanElement& y,
                    std::uint64_t cutoff) {
  const Monoid& m = scale.monoid();
  SpanElement xy = span_product(m, x, y);
  SpanElement y_sigma_x = span_product(m, y, apply_dynamics(scale, x, beta));
  PhiResult lhs = phi_span(scale, beta, trace, xy, cutoff);
  PhiResult rhs = phi_span(scale, beta, trace, y_sigma_x, cutoff);
  return std::abs(lhs.value - rhs.value);
}

// ---------------------------------------------------------------------------
// Closed-form affine-monoid values
// ---------------------------------------------------------------------------

namespace {

double fourier_moment(const std::vector<double>& fourier, std::int64_t k) {
  k = std::llabs(k);
  if (static_cast<std::size_t>(k) >= fourier.size()) return 0.0;
  return fourier[static_cast<std::size_t>(k)];
}

}  // namespace

std::complex<double> axb_state_direct(double beta,
                                      const std::vector<double>& fourier,
                                      const AxbEl& s, const AxbEl& t) {
  if (beta <= 2.0)
    throw std::invalid_argument(
        "the closed-form affine-monoid state requires beta > 2");
  if (fourier.empty() || std::abs(fourier[0] - 1.0) > 1e-12)
    throw std::invalid_argument("moment 0 must be 1");
  if (s.n != t.n) return 0.0;
  const double n_beta = std::pow(static_cast<double>(s.n), -beta);
  if (s.c == t.c) return n_beta;
  const std::int64_t delta = s.c - t.c;
  const std::int64_t abs_delta = std::llabs(delta);
  double sum = 0.0;
  for (std::int64_t m = 1; m * s.n <= abs_delta; ++m) {
    if (abs_delta % (m * s.n) != 0) continue;
    sum += std::pow(static_cast<double>(m), 1.0 - beta) *
           fourier_moment(fourier, delta / (m * s.n));
  }
  return n_beta * sum / std::riemann_zeta(beta - 1.0);
}

double axb_tilde_measure(double beta, const std::vector<double>& fourier,
                         std::int64_t k) {
  if (beta <= 2.0)
    throw std::invalid_argument(
        "the induced circle measure requires beta > 2");
  k = std::llabs(k);
  if (k == 0) return 1.0;
  double sum = 0.0;
  for (std::int64_t m = 1; m <= k; ++m) {
    if (k % m != 0) continue;
    sum += std::pow(static_cast<double>(m), 1.0 - beta) *
           fourier_moment(fourier, k / m);
  }
  return sum / std::riemann_zeta(beta - 1.0);
}

}  // namespace kmslcm
