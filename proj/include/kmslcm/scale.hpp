#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kmslcm/monoid.hpp"
#include "kmslcm/rational.hpp"

namespace kmslcm {

// Equivalence class of the scale kernel relation, held as its canonical
// representative together with the common N-value of the class.
struct NClass {
  Element rep;
  Rational n;

  friend bool operator==(const NClass& a, const NClass& b) { return a.rep == b.rep; }
  friend bool operator!=(const NClass& a, const NClass& b) { return !(a == b); }
  friend bool operator<(const NClass& a, const NClass& b) {
    int c = cmp(a.n, b.n);
    if (c != 0) return c < 0;
    return a.rep < b.rep;
  }
};

// nullopt encodes a join at infinity (disjoint ideals)
using JoinResult = std::optional<NClass>;
inline bool is_infinite(const JoinResult& j) { return !j.has_value(); }

struct PairCounterexample {
  Element s, t;
};

// Outcome of a depth-bounded certificate check. A pass certifies the property
// only for the elements actually inspected.
struct CertificateVerdict {
  bool pass = true;
  std::optional<PairCounterexample> counterexample;
  int depth = 0;
};

struct LevelCount {
  Rational n;
  std::uint64_t classes = 0;
};

// Classes [x] with [s x] = [t x], as needed by the finite-type state formula.
// `all_classes` means every class contributes (this happens exactly when the
// two translations agree classwise, and then the kernel corrections are
// independent of [x]); otherwise `classes` lists the contributors with
// N-value at most the requested cutoff.
struct EqualTranslateSet {
  bool all_classes = false;
  std::vector<NClass> classes;
};

// Violation of an invariant that admissibility guarantees; mapped to a
// dedicated process exit code by the CLI.
class InternalInconsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A multiplicative scale N : S -> [1, infinity) given by generator weights,
// together with the induced quotient quasi-lattice S/~N. Weight maps are
// validated against the defining relations of the family at construction.
class Scale {
 public:
  Scale(Monoid monoid, const std::map<std::string, Rational>& weights);

  const Monoid& monoid() const { return monoid_; }
  // weights echoed with the keys the constructor accepts
  const std::map<std::string, Rational>& weights() const { return weights_echo_; }

  Rational n_value(const Element& s) const;
  bool ker_contains(const Element& s) const { return n_value(s) == 1; }

  // false only when the family's canonical class representatives are not
  // defined for this weight pattern (free monoid with weight-1 letters)
  bool quotient_supported() const { return quotient_supported_; }

  NClass n_class(const Element& s) const;
  NClass class_of_identity() const { return n_class(monoid_.identity()); }
  bool class_leq(const NClass& a, const NClass& b) const;
  JoinResult class_join(const NClass& a, const NClass& b) const;
  JoinResult join_of_set(std::span<const NClass> classes) const;
  NClass class_act(const Element& s, const NClass& a) const;
  // the unique [t] with s[t] = [a], if s divides a representative of [a]
  std::optional<NClass> class_preimage(const Element& s, const NClass& a) const;
  // inverse of the (bijective) kernel action; throws InternalInconsistencyError
  // when the preimage promised by admissibility is missing
  NClass class_act_inv(const Element& kernel_elt, const NClass& a) const;

  // all classes with N-value <= max_n, sorted by (N-value, rendered text)
  std::vector<NClass> enumerate_classes(const Rational& max_n) const;
  // distinct N-values <= max_n with class counts, sorted by N-value
  std::vector<LevelCount> class_levels(const Rational& max_n) const;

  // kernel elements up to a family size bound, sorted: word length, exponent
  // sum, and shift count are capped inclusively; lamp polynomials keep their
  // degree strictly below the bound
  std::vector<Element> kernel_elements(int size_bound) const;

  CertificateVerdict check_kernel_directed(int depth) const;
  CertificateVerdict check_admissibility(int depth) const;

  EqualTranslateSet equal_translate_classes(const Element& s, const Element& t,
                                            const Rational& max_n) const;

  // closed form of the full zeta series at beta, when the family has one and
  // the series converges for these weights
  std::optional<double> zeta_closed_form(double beta) const;

  std::string render_class(const NClass& c) const { return monoid_.render(c.rep); }

 private:
  Monoid monoid_;
  std::map<std::string, Rational> weights_echo_;
  bool quotient_supported_ = true;

  // free_monoid / free_abelian: per letter or coordinate
  std::vector<Rational> coord_weights_;
  // axb: overridden prime weights; unlisted primes keep their natural weight
  std::map<std::int64_t, Rational> prime_weights_;
  // c3: common weight of x1, x2; lamplighter: weights of the two shifts
  Rational wa_ = 2, wx_ = 2, wy_ = 2;

  void require_quotient() const;
  Rational axb_level_value(std::int64_t n) const;
};

}  // namespace kmslcm
