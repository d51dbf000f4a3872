// Equilibrium states in the finite-type regime: the spanning-element algebra,
// traces and their positivity certificate, the state formula with its tail
// bounds, the defining equilibrium condition on random monomial pairs, and an
// independent closed-form oracle for the affine monoid.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <kmslcm/gf2poly.hpp>
#include <kmslcm/kms.hpp>
#include <kmslcm/measure.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

using namespace kmslcm;

namespace {

constexpr std::uint64_t kSeed = 0x5eed'0005u;

Scale axb_scale() { return Scale(Monoid({Family::axb}), {}); }
Scale c3_scale() { return Scale(Monoid({Family::c3}), {}); }
Scale lamp_scale() { return Scale(Monoid({Family::lamplighter}), {}); }

Element random_element(const Monoid& m, std::mt19937_64& rng) {
  switch (m.family()) {
    case Family::axb:
      return AxbEl{static_cast<std::int64_t>(rng() % 12),
                   static_cast<std::int64_t>(1 + rng() % 6)};
    case Family::c3:
      return C3El{static_cast<std::int64_t>(rng() % 4),
                  static_cast<std::int64_t>(rng() % 4),
                  static_cast<std::int64_t>(rng() % 3)};
    case Family::lamplighter:
      return LampEl{Gf2Poly{rng() % 32}, static_cast<std::int64_t>(rng() % 3),
                    static_cast<std::int64_t>(rng() % 3)};
    default:
      throw std::logic_error("family not used here");
  }
}

SpanElement random_span(const Monoid& m, std::mt19937_64& rng, int terms) {
  SpanElement x;
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  for (int i = 0; i < terms; ++i)
    x.add(m, random_element(m, rng), random_element(m, rng),
          {coeff(rng), coeff(rng)});
  return x;
}

bool span_close(const Monoid& m, const SpanElement& a, const SpanElement& b,
                double tol) {
  SpanElement diff = a;
  for (const auto& t : b.terms()) diff.add(m, t.s, t.t, -t.coeff);
  for (const auto& t : diff.terms())
    if (std::abs(t.coeff) > tol) return false;
  return true;
}

}  // namespace

TEST_CASE("spanning product follows the ideal-intersection rule") {
  Scale A = axb_scale();
  Element s{AxbEl{2, 2}}, t{AxbEl{1, 3}}, u{AxbEl{0, 5}};
  auto mt = mul_spanning(A.monoid(), s, t, t, u);
  REQUIRE(mt.has_value());
  CHECK(mt->s == s);
  CHECK(mt->t == u);
  // disjoint middle ideals annihilate
  CHECK_FALSE(mul_spanning(A.monoid(), s, Element{AxbEl{0, 2}}, Element{AxbEl{1, 2}}, u)
                  .has_value());
}

TEST_CASE("span algebra: associativity, adjoint laws, dynamics group law") {
  std::mt19937_64 rng(kSeed);
  for (const auto& scale : {axb_scale(), c3_scale(), lamp_scale()}) {
    const auto& m = scale.monoid();
    for (int iter = 0; iter < 200; ++iter) {
      SpanElement x = random_span(m, rng, 2);
      SpanElement y = random_span(m, rng, 2);
      SpanElement z = random_span(m, rng, 2);
      SpanElement left = span_product(m, span_product(m, x, y), z);
      SpanElement right = span_product(m, x, span_product(m, y, z));
      CHECK(span_close(m, left, right, 1e-12));
      // involution: (x*)* = x and (x y)* = y* x*
      CHECK(span_close(m, span_adjoint(m, span_adjoint(m, x)), x, 0.0));
      CHECK(span_close(m, span_adjoint(m, span_product(m, x, y)),
                       span_product(m, span_adjoint(m, y), span_adjoint(m, x)),
                       1e-12));
      // analytic dynamics compose additively in beta
      SpanElement d1 = apply_dynamics(scale, apply_dynamics(scale, x, 1.25), 0.5);
      SpanElement d2 = apply_dynamics(scale, x, 1.75);
      CHECK(span_close(m, d1, d2, 1e-12));
      // scale-one legs are fixed by the dynamics
      SpanElement fixed = apply_dynamics(scale, conditional_expectation(scale, x), 2.0);
      CHECK(span_close(m, fixed, conditional_expectation(scale, x), 0.0));
    }
  }
}

TEST_CASE("conditional expectation is idempotent and a kernel-bimodule map") {
  std::mt19937_64 rng(kSeed + 1);
  for (const auto& scale : {axb_scale(), c3_scale(), lamp_scale()}) {
    const auto& m = scale.monoid();
    const auto kernel = scale.kernel_elements(3);
    REQUIRE(kernel.size() >= 2);
    for (int iter = 0; iter < 300; ++iter) {
      SpanElement x = random_span(m, rng, 3);
      SpanElement ex = conditional_expectation(scale, x);
      CHECK(span_close(m, conditional_expectation(scale, ex), ex, 0.0));
      for (const auto& t : ex.terms()) {
        CHECK(scale.ker_contains(t.s));
        CHECK(scale.ker_contains(t.t));
      }
      // kernel-supported left factor passes through the expectation
      SpanElement k;
      k.add(m, kernel[rng() % kernel.size()], kernel[rng() % kernel.size()],
            {0.7, -0.2});
      SpanElement lhs = conditional_expectation(scale, span_product(m, k, x));
      SpanElement rhs = span_product(m, k, ex);
      CHECK(span_close(m, lhs, rhs, 1e-12));
    }
  }
}

TEST_CASE("character traces are blind to a common kernel factor on the right") {
  std::mt19937_64 rng(kSeed + 2);
  struct Setup {
    Scale scale;
    Trace trace;
  };
  std::vector<Setup> setups;
  setups.push_back({axb_scale(), Trace::character({std::polar(1.0, 0.9)})});
  setups.push_back({c3_scale(), Trace::character({std::complex<double>(-1.0, 0.0)})});
  setups.push_back({lamp_scale(), Trace::lamp_character({-1, 1, -1, 1})});
  setups.push_back({Scale(Monoid({Family::free_abelian, 2}),
                          {{"x1", Rational(1)}, {"x2", Rational(2)}}),
                    Trace::character({std::polar(1.0, 2.1)})});
  for (const auto& [scale, trace] : setups) {
    const auto& m = scale.monoid();
    const auto kernel = scale.kernel_elements(5);
    REQUIRE(kernel.size() >= 3);
    for (int iter = 0; iter < 600; ++iter) {
      const Element& q = kernel[rng() % kernel.size()];
      const Element& p = kernel[rng() % kernel.size()];
      const Element& c = kernel[rng() % kernel.size()];
      auto base = trace.eval(scale, q, p);
      auto shifted = trace.eval(scale, m.multiply(q, c), m.multiply(p, c));
      CHECK(std::abs(base - shifted) < 1e-12);
      // tracial symmetry: swapping the legs conjugates the value
      auto swapped = trace.eval(scale, p, q);
      CHECK(std::abs(base - std::conj(swapped)) < 1e-12);
    }
  }
}

TEST_CASE("trace positivity certificate accepts the genuine traces") {
  Scale A = axb_scale();
  std::vector<double> ones(16, 1.0);
  std::vector<double> alt(16);
  for (int i = 0; i < 16; ++i) alt[i] = (i % 2 == 0) ? 1.0 : -1.0;
  std::vector<double> leb(16, 0.0);
  leb[0] = 1.0;
  CHECK(trace_psd_check(A, Trace::fourier(ones), 8));
  CHECK(trace_psd_check(A, Trace::fourier(alt), 8));
  CHECK(trace_psd_check(A, Trace::fourier(leb), 8));
  CHECK(trace_psd_check(A, Trace::character({std::polar(1.0, 0.4)}), 8));
  CHECK(trace_psd_check(c3_scale(), Trace::character({{-1.0, 0.0}}), 6));
  CHECK(trace_psd_check(lamp_scale(), Trace::lamp_character({-1, 1, -1}), 3));
}

TEST_CASE("trace positivity certificate rejects a non-positive moment sequence") {
  Scale A = axb_scale();
  CHECK_FALSE(trace_psd_check(A, Trace::fourier({1.0, 1.0, -1.0}), 8));
  // moments outside [-1, 1] are rejected at construction
  CHECK_THROWS_AS(Trace::fourier({1.0, 1.2}), std::invalid_argument);
}

TEST_CASE("state normalization: unit on the identity, inverse power on isometries") {
  std::mt19937_64 rng(kSeed + 3);
  struct Setup {
    Scale scale;
    double beta;
    Trace trace;
    std::uint64_t cutoff;
  };
  std::vector<Setup> setups;
  setups.push_back({axb_scale(), 3.0, Trace::fourier(std::vector<double>(16, 1.0)), 2000});
  setups.push_back({c3_scale(), 1.0, Trace::character({{-1.0, 0.0}}), 1024});
  setups.push_back({lamp_scale(), 2.0, Trace::lamp_character({-1, 1, -1}), 1024});
  for (const auto& st : setups) {
    Element e = st.scale.monoid().identity();
    auto unit = phi_finite_type(st.scale, st.beta, st.trace, e, e, st.cutoff);
    CHECK_FALSE(unit.truncated);
    CHECK(std::abs(unit.value - std::complex<double>(1.0)) < 1e-15);
    for (int iter = 0; iter < 200; ++iter) {
      Element s = random_element(st.scale.monoid(), rng);
      auto pr = phi_finite_type(st.scale, st.beta, st.trace, s, s, st.cutoff);
      CHECK_FALSE(pr.truncated);
      double expect = std::pow(to_double(st.scale.n_value(s)), -st.beta);
      CHECK(std::abs(pr.value - std::complex<double>(expect)) < 1e-14);
    }
  }
}

TEST_CASE("states vanish on legs of different scale value") {
  Scale A = axb_scale();
  Trace nu = Trace::fourier(std::vector<double>(16, 1.0));
  auto pr = phi_finite_type(A, 3.0, nu, Element{AxbEl{0, 2}}, Element{AxbEl{0, 3}}, 100);
  CHECK(pr.value == std::complex<double>(0.0, 0.0));
  CHECK_FALSE(pr.truncated);
}

TEST_CASE("affine closed-form oracle: frozen desk values") {
  const double zeta2 = 1.6449340668482264;  // Riemann zeta at 2
  std::vector<double> ones(16, 1.0);
  auto v = axb_state_direct(3.0, ones, AxbEl{2, 2}, AxbEl{0, 2});
  CHECK(std::abs(v.real() - 0.125 / zeta2) < 1e-12);
  CHECK(std::abs(v.imag()) < 1e-15);
  CHECK(axb_state_direct(3.0, ones, AxbEl{0, 2}, AxbEl{0, 3}) ==
        std::complex<double>(0.0, 0.0));
  double tm = axb_tilde_measure(3.0, ones, 2);
  CHECK(std::abs(tm - 1.25 / zeta2) < 1e-12);
  CHECK(axb_tilde_measure(3.0, ones, 0) == 1.0);
  // moments of the induced measure stay in the unit disc
  for (std::int64_t k = 1; k <= 20; ++k)
    CHECK(std::abs(axb_tilde_measure(3.0, ones, k)) <= 1.0 + 1e-12);
  // the k-th moment is the state value on the depth-one pair at distance k
  for (std::int64_t k = 1; k <= 12; ++k) {
    auto direct = axb_state_direct(3.0, ones, AxbEl{k, 1}, AxbEl{0, 1});
    CHECK(std::abs(direct.real() - axb_tilde_measure(3.0, ones, k)) < 1e-14);
  }
}

TEST_CASE("finite-type evaluation agrees with the affine oracle on a grid") {
  Scale A = axb_scale();
  std::vector<std::vector<double>> measures;
  measures.push_back(std::vector<double>(16, 1.0));  // point mass at 1
  std::vector<double> alt(16);
  for (int i = 0; i < 16; ++i) alt[i] = (i % 2 == 0) ? 1.0 : -1.0;  // point mass at -1
  measures.push_back(alt);
  std::vector<double> leb(16, 0.0);
  leb[0] = 1.0;  // uniform measure on the circle
  measures.push_back(leb);
  for (const auto& mm : measures) {
    Trace tr = Trace::fourier(mm);
    for (int n = 1; n <= 3; ++n)
      for (int c = 0; c <= 8; ++c)
        for (int d = 0; d <= 8; ++d) {
          auto direct = axb_state_direct(3.0, mm, AxbEl{c, n}, AxbEl{d, n});
          auto ft = phi_finite_type(A, 3.0, tr, Element{AxbEl{c, n}},
                                    Element{AxbEl{d, n}}, 20000);
          CHECK(std::abs(ft.value - direct) <= ft.tail_bound + 1e-9);
          CHECK_FALSE(ft.tail_heuristic);
        }
  }
}

TEST_CASE("c3 states depend only on the shift parity through the character") {
  Scale C = c3_scale();
  std::complex<double> z = std::polar(1.0, 0.7);
  Trace chi = Trace::character({z});
  auto pr = phi_finite_type(C, 1.0, chi, Element{C3El{0, 0, 2}}, Element{C3El{0, 0, 0}}, 50);
  CHECK_FALSE(pr.truncated);
  CHECK(std::abs(pr.value - z * z) < 1e-12);
  // opposite parity: only the diagonal classes contribute
  auto mixed = phi_finite_type(C, 1.0, chi, Element{C3El{0, 0, 1}}, Element{C3El{0, 0, 0}},
                               4096);
  CHECK(mixed.truncated);
  CHECK(mixed.contributing > 0);
}

TEST_CASE("lamp state: only the bottom class equates distinct lamp translates") {
  Scale L = lamp_scale();
  Trace lc = Trace::lamp_character({-1, 1, -1});
  Element g1{LampEl{Gf2Poly::one(), 0, 0}};
  Element e{LampEl{Gf2Poly::zero(), 0, 0}};
  auto pl = phi_finite_type(L, 2.0, lc, g1, e, 4096);
  CHECK(pl.truncated);
  CHECK(pl.contributing == 1);
  CHECK(std::abs(pl.value.real() + 0.25) <= pl.tail_bound + 1e-12);
}

TEST_CASE("equilibrium condition holds on random monomial pairs") {
  std::mt19937_64 rng(kSeed + 4);
  struct Setup {
    Scale scale;
    double beta;
    Trace trace;
    std::uint64_t cutoff;
    double tol;
  };
  std::vector<Setup> setups;
  setups.push_back({axb_scale(), 3.0, Trace::fourier(std::vector<double>(16, 1.0)), 10000, 1e-6});
  // the c3 equal-translate sets are finite, so a deep cutoff makes the
  // evaluation exact rather than merely truncated
  setups.push_back({c3_scale(), 1.0, Trace::character({{-1.0, 0.0}}), std::uint64_t{1} << 24, 1e-6});
  setups.push_back({lamp_scale(), 2.0, Trace::lamp_character({-1, 1, -1, 1}), 4096, 1e-6});
  for (const auto& st : setups) {
    for (int iter = 0; iter < 25; ++iter) {
      const Monoid& m = st.scale.monoid();
      SpanElement x =
          SpanElement::term(m, random_element(m, rng), random_element(m, rng));
      SpanElement y =
          SpanElement::term(m, random_element(m, rng), random_element(m, rng));
      CHECK(kms_residual(st.scale, st.beta, st.trace, x, y, st.cutoff) < st.tol);
    }
  }
}

TEST_CASE("linear extension adds values and tail bounds") {
  Scale A = axb_scale();
  Trace nu = Trace::fourier(std::vector<double>(16, 1.0));
  SpanElement x;
  x.add(A.monoid(), Element{AxbEl{2, 2}}, Element{AxbEl{0, 2}}, {2.0, 0.0});
  x.add(A.monoid(), Element{AxbEl{1, 1}}, Element{AxbEl{0, 1}}, {0.0, 1.0});
  auto whole = phi_span(A, 3.0, nu, x, 5000);
  auto first = phi_finite_type(A, 3.0, nu, Element{AxbEl{2, 2}}, Element{AxbEl{0, 2}}, 5000);
  auto second = phi_finite_type(A, 3.0, nu, Element{AxbEl{1, 1}}, Element{AxbEl{0, 1}}, 5000);
  std::complex<double> expect =
      std::complex<double>(2.0, 0.0) * first.value + std::complex<double>(0.0, 1.0) * second.value;
  CHECK(std::abs(whole.value - expect) < 1e-13);
  CHECK(whole.tail_bound >= 2.0 * first.tail_bound + 1.0 * second.tail_bound - 1e-15);
}

TEST_CASE("zero-temperature limit evaluates the trace on kernel legs only") {
  std::mt19937_64 rng(kSeed + 5);
  Scale A = axb_scale();
  Trace nu = Trace::fourier(std::vector<double>(16, 1.0));
  CHECK(std::abs(phi_kms_infty(A, nu, Element{AxbEl{3, 1}}, Element{AxbEl{1, 1}}) -
                 std::complex<double>(1.0)) < 1e-15);
  CHECK(phi_kms_infty(A, nu, Element{AxbEl{0, 2}}, Element{AxbEl{0, 2}}) ==
        std::complex<double>(0.0, 0.0));
  for (int iter = 0; iter < 500; ++iter) {
    Element s = random_element(A.monoid(), rng);
    Element t = random_element(A.monoid(), rng);
    auto v = phi_kms_infty(A, nu, s, t);
    if (!A.ker_contains(s) || !A.ker_contains(t))
      CHECK(v == std::complex<double>(0.0, 0.0));
    else
      CHECK(std::abs(v - nu.eval(A, s, t)) < 1e-15);
  }
}

TEST_CASE("ground state is the composition with the expectation") {
  Scale A = axb_scale();
  Trace nu = Trace::fourier(std::vector<double>(16, 1.0));
  SpanElement mix;
  mix.add(A.monoid(), Element{AxbEl{2, 1}}, Element{AxbEl{0, 1}}, {2.0, 0.0});
  mix.add(A.monoid(), Element{AxbEl{0, 2}}, Element{AxbEl{0, 2}}, {5.0, 0.0});
  SpanElement emix = conditional_expectation(A, mix);
  CHECK(emix.size() == 1);
  StateEval psi = [&](const SpanElement& w) {
    std::complex<double> acc = 0.0;
    for (const auto& t : w.terms()) acc += t.coeff * phi_kms_infty(A, nu, t.s, t.t);
    return acc;
  };
  CHECK(std::abs(ground_state(A, psi, mix) - std::complex<double>(2.0)) < 1e-12);
}

TEST_CASE("trace kind mismatches are rejected loudly") {
  Scale L = lamp_scale();
  CHECK_THROWS_AS(Trace::fourier({1.0}).eval(L, L.monoid().identity(),
                                             L.monoid().identity()),
                  std::invalid_argument);
  Scale A = axb_scale();
  Trace nu = Trace::fourier(std::vector<double>(4, 1.0));
  CHECK_THROWS_AS(nu.eval(A, Element{AxbEl{0, 2}}, Element{AxbEl{0, 1}}),
                  InternalInconsistencyError);
}
