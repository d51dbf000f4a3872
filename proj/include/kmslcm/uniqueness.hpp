#pragma once

#include <kmslcm/measure.hpp>
#include <kmslcm/scale.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace kmslcm {

// ---------------------------------------------------------------------------
// Trivially-fixed and fixed sets of the partial translation attached to a
// pair (a, b).
// ---------------------------------------------------------------------------

// Classes [s] with scale value at most `cutoff` admitting t with a t = b t
// and [a t] = [s].  For a == b these are exactly the classes above [a]; for
// a != b candidates are found by scanning products of at most `scan_depth`
// generators (right-cancellative families produce none).
std::vector<NClass> b_set(const Scale& scale, const Element& a,
                          const Element& b, const Rational& cutoff,
                          int scan_depth = 4);

// Measure of the union of the cylinders over b_set: 1 minus the
// inclusion-exclusion complement anchored at the identity class.  Exact at
// integer beta.
MeasureValue mu_omega_triv(const Scale& scale, double beta, const Element& a,
                           const Element& b, const Rational& cutoff,
                           int scan_depth = 4);

// The fixed-set slice T^{a,b}_[F] of an explicit finite family F of classes:
// classes [s] in F such that the translated germs of a and b agree at [s]
// relative to F.  Two routes are provided and must agree where both apply.
//
// Kernel route (a, b in the kernel; sound when F is join-closed, contains the
// identity class and is invariant under the kernel action): keeps [s] with
// a^{-1}[s] = b^{-1}[s].
std::vector<NClass> t_set_kernel_path(const Scale& scale, const Element& a,
                                      const Element& b,
                                      const std::vector<NClass>& F);
// General route (requires [a] v [b] <= [s] for every [s] in F, else
// std::invalid_argument): keeps [s] when a^{-1}[s] v b^{-1}[s] is finite and
// no [r] in F strictly above [s] has a^{-1}[r] or b^{-1}[r] below that join.
std::vector<NClass> t_set_general_path(const Scale& scale, const Element& a,
                                       const Element& b,
                                       const std::vector<NClass>& F);

// ---------------------------------------------------------------------------
// Truncation ladders: increasing join-closed families of classes exhausting
// the quotient, with closed-form structure so large rungs never have to be
// materialized.
// ---------------------------------------------------------------------------

enum class LadderKind {
  divisor_levels,  // affine monoid: levels n0 * d for divisors d of k!
  lamp_box,        // lamplighter: classes with both shifts at most k
  exponent_box,    // c3 / free abelian: exponent boxes (join closure of the
                   // classes with scale value at most 2^k)
};

struct TruncationLadder {
  LadderKind kind;
  // Class the ladder is anchored at; the identity class for kernel pairs.
  NClass base;
  // One parameter per rung (k above), increasing.
  std::vector<std::int64_t> params;
};

// The family's default ladder anchored at [a] v [b].  Throws
// std::invalid_argument when [a] v [b] is infinite or the family has no
// ladder (free monoid).
TruncationLadder default_ladder(const Scale& scale, const Element& a,
                                const Element& b, int height);

// Closed-form rung structure.
std::uint64_t rung_size(const Scale& scale, const TruncationLadder& ladder,
                        int rung);
// Partial zeta sum over the rung's classes; exact at integer beta.
MeasureValue rung_zeta(const Scale& scale, const TruncationLadder& ladder,
                       int rung, double beta);
// Largest scale value occurring in the rung.
Rational rung_top(const Scale& scale, const TruncationLadder& ladder,
                  int rung);
bool rung_contains(const Scale& scale, const TruncationLadder& ladder,
                   int rung, const NClass& cls);
// All classes of the rung (budget-guarded; intended for small rungs/tests).
std::vector<NClass> rung_classes(const Scale& scale,
                                 const TruncationLadder& ladder, int rung);
// Minimal classes of the rung strictly above `cls`.
std::vector<NClass> rung_minimal_above(const Scale& scale,
                                       const TruncationLadder& ladder,
                                       int rung, const NClass& cls);
// The rung's T-set for the pair (a, b): closed per-family forms for kernel
// pairs, the general route over materialized classes otherwise.
std::vector<NClass> rung_t_set(const Scale& scale,
                               const TruncationLadder& ladder, int rung,
                               const Element& a, const Element& b);
// Seeded spot-check that the rung is join-closed and (when a is a kernel
// element) invariant under the kernel action.
bool verify_ladder_rung(const Scale& scale, const TruncationLadder& ladder,
                        int rung, const Element& a, std::uint64_t seed,
                        int samples);

// ---------------------------------------------------------------------------
// Rung evaluations.
// ---------------------------------------------------------------------------

struct RungValue {
  std::int64_t param = 0;       // ladder parameter of this rung
  std::uint64_t f_size = 0;     // classes in the rung
  std::uint64_t t_size = 0;     // classes in the rung's T-set
  MeasureValue mu_triv;         // measure of the trivially-fixed union
  MeasureValue mu_fix;          // disjoint-atom sum over the T-set
  MeasureValue mu_triv_atomic;  // same truncation, atomic normalization
  MeasureValue mu_fix_atomic;   // (rung-restricted point masses)
};

// Evaluates one rung for the pair (a, b): the fixed-set value as the sum of
// the atoms Z_{s, F_s} over the T-set (inclusion-exclusion over the minimal
// classes above each [s]), the trivially-fixed value from b_set at the rung's
// top scale value, and the matching atomic normalizations used for the
// point-mass consistency check.  Exact at integer beta.
RungValue evaluate_rung(const Scale& scale, const TruncationLadder& ladder,
                        int rung, double beta, const Element& a,
                        const Element& b, int scan_depth = 4);

// ---------------------------------------------------------------------------
// Generalized-scale diagnostics.
// ---------------------------------------------------------------------------

struct GsCheckResult {
  bool pass = false;
  // (1) kernel = core, (2) level n has n classes, (3) equal scale values are
  // equivalent or disjoint, (4) every element meets every level.
  std::array<bool, 4> axiom{};
  std::string detail;  // first counterexample, rendered
};

GsCheckResult gs_check(const Scale& scale, int depth,
                       std::uint64_t level_cutoff);

struct GsRatios {
  std::uint64_t level = 0;
  std::uint64_t b_count = 0;
  std::uint64_t t_count = 0;
  Rational b_ratio;  // b_count / level
  Rational t_ratio;  // t_count / level
};

// Per-level counts of the b_set / T-set class fractions, defined for kernel
// pairs of a verified generalized scale; refuses (std::invalid_argument) when
// `check` did not pass.
GsRatios gs_ratios(const Scale& scale, const GsCheckResult& check,
                   const Element& a, const Element& b, std::uint64_t level,
                   int scan_depth = 4);

// Finite-prime-set stage value for the affine monoid at 1 < beta <= 2: the
// normalized fixed-set measure over classes whose level is smooth with
// respect to `primes`, in closed form.  The trivially-fixed value is 0 for
// distinct kernel elements.
struct SmoothStage {
  std::vector<int> primes;
  double triv = 0.0;
  double fix = 0.0;
};
SmoothStage axb_smooth_stage(const Scale& scale, double beta,
                             const Element& a, const Element& b,
                             const std::vector<int>& primes);

// ---------------------------------------------------------------------------
// Verdicts.
// ---------------------------------------------------------------------------

enum class PairVerdict { equal_at_tolerance, separated, inconclusive };
enum class GlobalVerdict { unique_at_tolerance, not_unique, inconclusive };

struct PairReport {
  Element a, b;
  std::vector<RungValue> rungs;
  double gap = 0.0;         // |mu_fix - mu_triv| at the final rung
  bool stabilized = false;  // final two gaps agree within tolerance
  PairVerdict verdict = PairVerdict::inconclusive;
};

struct UniquenessReport {
  double beta = 1.0;
  double tolerance = 1e-6;
  bool exact_path = false;  // integer beta: rung values are exact rationals
  ExistenceResult existence;
  std::vector<PairReport> pairs;
  GlobalVerdict verdict = GlobalVerdict::inconclusive;
  // The rung sequences certify values at finite truncation only; this stays
  // true whenever some pair has not visibly stabilized.
  bool certificate_only = true;
  std::string note;
};

// Full uniqueness certificate at the given inverse temperature: existence
// pre-check, separating-pair enumeration (kernel pairs when the kernel is
// nontrivial, equal-scale comparable pairs otherwise), one ladder of rung
// evaluations per pair (computed in parallel), and the verdict.  The default
// tolerance is 1e-9 when beta is a small integer (exact rung arithmetic) and
// 1e-6 otherwise.
UniquenessReport uniqueness_verdict(const Scale& scale, double beta,
                                    int pair_depth, int ladder_height,
                                    std::optional<double> tolerance = {});

}  // namespace kmslcm
