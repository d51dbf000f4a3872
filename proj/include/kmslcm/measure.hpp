#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kmslcm/scale.hpp"

namespace kmslcm {

// A numeric result carried in floating point, with an exact rational shadow
// whenever the exponent permits one (nonnegative integer beta).
struct MeasureValue {
  double value = 0.0;
  std::optional<Rational> exact;
};

// The basic boundary set attached to s with the cylinders of the elements of
// `removed` taken out; every removed element must lie in sS.
struct Cylinder {
  Element base;
  std::vector<Element> removed;
};

// Inclusion-exclusion value of a cylinder. Joins at infinity contribute
// nothing and their whole superset branch is skipped. The value is reported
// as computed; it is negative exactly when the chosen beta admits no state.
MeasureValue mu_cylinder(const Scale& scale, const Cylinder& cyl, double beta);

// Same evaluation on quotient classes: base class with removed class
// cylinders, each weakly above the base.
MeasureValue mu_class_cylinder(const Scale& scale, const NClass& base,
                               std::span<const NClass> removed, double beta);

struct ExistenceResult {
  bool nonnegative = true;
  std::optional<Cylinder> witness;
  double witness_value = 0.0;
  // true when the node budget ran out before the search space was exhausted
  bool partial = false;
  std::uint64_t nodes_visited = 0;
};

// Searches antichains of classes (smallest size first) for a cylinder of
// negative measure. A witness disproves existence of a state at this beta;
// a clean pass certifies nonnegativity only up to the cutoff and size bound.
ExistenceResult existence_check(const Scale& scale, double beta, const Rational& cutoff,
                                int max_antichain = 6, std::uint64_t node_budget = 2'000'000);

struct ZetaResult {
  double value = 0.0;
  std::optional<Rational> exact;
  std::uint64_t class_count = 0;
  std::optional<double> closed_form;
};

// Truncated class zeta series: sum of N(c)^{-beta} over classes with
// N-value <= cutoff, with the family closed form alongside when available.
ZetaResult zeta_partial(const Scale& scale, double beta, const Rational& cutoff);

// Residual measure of the base cylinder after removing every class cylinder
// at the given level value.
MeasureValue boundary_residual(const Scale& scale, double beta, const Rational& level);

}  // namespace kmslcm
