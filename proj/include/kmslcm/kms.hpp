#pragma once

#include <kmslcm/scale.hpp>

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kmslcm {

// ---------------------------------------------------------------------------
// Spanning elements: finite linear combinations of terms v_s v_t^*.
// ---------------------------------------------------------------------------

struct SpanTerm {
  Element s;
  Element t;
  std::complex<double> coeff;
};

// A normalized finite linear combination of spanning terms.  Keys are stored
// in unit-normal form (Monoid::unit_normal_pair), terms with equal normalized
// legs are merged, and exact-zero coefficients are dropped, so equal
// combinations compare equal term-by-term even over the lamp group's
// nontrivial unit group.
class SpanElement {
 public:
  SpanElement() = default;

  static SpanElement term(const Monoid& m, Element s, Element t,
                          std::complex<double> coeff = 1.0);

  void add(const Monoid& m, const Element& s, const Element& t,
           std::complex<double> coeff);

  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  std::vector<SpanTerm> terms() const;

 private:
  std::map<std::pair<Element, Element>, std::complex<double>> terms_;
};

// Product of two spanning terms:
//   (v_s v_t^*)(v_u v_v^*) = v_{s(t\r)} v_{v(u\r)}^*  when r = t ∨ u exists,
// and zero when tS ∩ uS = ∅ (nullopt).
std::optional<SpanTerm> mul_spanning(const Monoid& monoid, const Element& s,
                                     const Element& t, const Element& u,
                                     const Element& v);

SpanElement span_product(const Monoid& monoid, const SpanElement& x,
                         const SpanElement& y);

// (v_s v_t^*)^* = v_t v_s^*.
SpanElement span_adjoint(const Monoid& m, const SpanElement& x);

// Analytic extension of the scale dynamics at time i*beta:
// v_s v_t^* maps to (N(s)/N(t))^{-beta} v_s v_t^*.
SpanElement apply_dynamics(const Scale& scale, const SpanElement& x,
                           double beta);

// Conditional expectation onto the kernel subalgebra: keeps exactly the terms
// whose two legs both lie in the kernel of the scale.
SpanElement conditional_expectation(const Scale& scale, const SpanElement& x);

// ---------------------------------------------------------------------------
// Traces on the kernel subalgebra.
// ---------------------------------------------------------------------------

enum class TraceKind {
  character,       // point evaluation: one unit complex number per kernel
                   // generator; value z^(k(q) - k(p)) on exponent vectors
  fourier,         // moment sequence of a probability measure on the circle;
                   // requires a kernel with a single generator
  lamp_character,  // {±1}-valued character of the lamp group, one sign per
                   // power of the polynomial variable
};

class Trace {
 public:
  static Trace character(std::vector<std::complex<double>> z);
  static Trace fourier(std::vector<double> coeffs);
  static Trace lamp_character(std::vector<int> signs);

  TraceKind kind() const { return kind_; }
  const std::vector<std::complex<double>>& character_units() const {
    return z_;
  }
  const std::vector<double>& fourier_coeffs() const { return coeffs_; }
  const std::vector<int>& lamp_signs() const { return signs_; }

  // tau(v_q v_p^*) for kernel elements q, p.  Throws std::invalid_argument if
  // the trace kind does not apply to the scale's kernel, and
  // InternalInconsistencyError if q or p is not a kernel element.
  std::complex<double> eval(const Scale& scale, const Element& q,
                            const Element& p) const;

  std::string describe() const;

 private:
  Trace() = default;
  TraceKind kind_ = TraceKind::character;
  std::vector<std::complex<double>> z_;
  std::vector<double> coeffs_;
  std::vector<int> signs_;
};

// Positive-semidefiniteness certificate for a trace: builds the Gram matrix
// tau(v_q v_p^*) over the kernel elements enumerated up to `kernel_bound` and
// runs a pivoted Cholesky factorization, accepting pivots down to -tol.
// Also verifies hermitian symmetry of the Gram matrix to the same tolerance.
bool trace_psd_check(const Scale& scale, const Trace& trace,
                     std::size_t kernel_bound, double tol = 1e-10);

// ---------------------------------------------------------------------------
// Finite-type KMS states.
// ---------------------------------------------------------------------------

struct PhiResult {
  std::complex<double> value{0.0, 0.0};
  // Rigorous bound on the truncation error when the zeta function has a
  // closed form; otherwise the last enumerated level's contribution, with
  // tail_heuristic set.
  double tail_bound = 0.0;
  bool tail_heuristic = false;
  // Number of equal-translate classes summed at the cutoff (0 when a closed
  // form made enumeration unnecessary).
  std::uint64_t contributing = 0;
  // False when the value is exact (closed form or vanishing); true when it is
  // a truncated sum.
  bool truncated = false;
};

// State value phi_{tau,beta}(v_s v_t^*) =
//   N(s)^{-beta} / zeta(beta) * sum over classes [x] with [sx] = [tx] of
//   N(x)^{-beta} tau(v_{q_x} v_{p_x}^*),   where  s x p_x = t x q_x,
// truncated to classes with scale value at most `cutoff`; the normalizing
// partial zeta sum runs over the same classes.  Requires a supported class
// quotient.  Throws InternalInconsistencyError if an equal-translate class
// fails to produce kernel witnesses p_x, q_x.
PhiResult phi_finite_type(const Scale& scale, double beta, const Trace& trace,
                          const Element& s, const Element& t,
                          std::uint64_t cutoff);

// Linear extension of phi_finite_type to spanning elements.  Tail bounds add
// with coefficient magnitudes.
PhiResult phi_span(const Scale& scale, double beta, const Trace& trace,
                   const SpanElement& x, std::uint64_t cutoff);

// KMS-infinity state: tau(v_s v_t^*) when both legs are kernel elements,
// 0 otherwise.
std::complex<double> phi_kms_infty(const Scale& scale, const Trace& trace,
                                   const Element& s, const Element& t);

// Ground state attached to a state psi on the kernel subalgebra: psi after
// the conditional expectation.
using StateEval = std::function<std::complex<double>(const SpanElement&)>;
std::complex<double> ground_state(const Scale& scale, const StateEval& psi,
                                  const SpanElement& x);

// |phi(x y) - phi(y sigma_{i beta}(x))| evaluated with phi_finite_type at the
// given truncation cutoff.
double kms_residual(const Scale& scale, double beta, const Trace& trace,
                    const SpanElement& x, const SpanElement& y,
                    std::uint64_t cutoff);

// ---------------------------------------------------------------------------
// Independent closed-form values for the natural affine monoid scale
// (weights p on each prime generator, valid for beta > 2).  Kept free of the
// general evaluation machinery so the two routes stay independent.
// ---------------------------------------------------------------------------

// State value on v_{(c,n)} v_{(d,n)}^* for the measure on the circle with
// moment sequence `fourier` (fourier[k] is the k-th moment, fourier[0] = 1):
//   n^{-beta} / zeta(beta-1) * sum over m with n m | (c - d) of
//   m^{1-beta} fourier[(c-d)/(n m)].
// Different scale values give 0.
std::complex<double> axb_state_direct(double beta,
                                      const std::vector<double>& fourier,
                                      const AxbEl& s, const AxbEl& t);

// k-th moment of the induced measure on the circle:
//   zeta(beta-1)^{-1} * sum over m | k of m^{1-beta} fourier[k/m]
// for k >= 1, and 1 for k = 0.
double axb_tilde_measure(double beta, const std::vector<double>& fourier,
                         std::int64_t k);

}  // namespace kmslcm
