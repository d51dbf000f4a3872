#include "kmslcm/measure.hpp"

#include <algorithm>
#include <cmath>

namespace kmslcm {

namespace {

constexpr std::size_t kMaxAntichain = 26;

// shared inclusion-exclusion core over an abstract join semilattice with a
// point at infinity; Join is optional<T>, joined by `join`, valued by `n_of`
template <typename T, typename JoinFn, typename ValueFn>
MeasureValue inclusion_exclusion(const T& base, const std::vector<T>& items, double beta,
                                 JoinFn&& join, ValueFn&& n_of) {
  if (items.size() > kMaxAntichain)
    throw std::invalid_argument("inclusion-exclusion over more than 26 sets; lower the cutoff");
  auto k = exact_beta_exponent(beta);
  MeasureValue out;
  out.value = pow_neg_beta(n_of(base), beta);
  Rational exact = 0;
  if (k) exact = Rational(1) / rational_pow(n_of(base), *k);

  auto rec = [&](auto&& self, std::size_t start, const T& acc, int sign) -> void {
    for (std::size_t i = start; i < items.size(); ++i) {
      std::optional<T> j = join(acc, items[i]);
      if (!j) continue;  // join at infinity: all supersets through acc + items[i] vanish
      out.value += sign * pow_neg_beta(n_of(*j), beta);
      if (k) exact += Rational(sign) / rational_pow(n_of(*j), *k);
      self(self, i + 1, *j, -sign);
    }
  };
  rec(rec, 0, base, -1);
  if (k) out.exact = exact;
  return out;
}

}  // namespace

MeasureValue mu_cylinder(const Scale& scale, const Cylinder& cyl, double beta) {
  const Monoid& m = scale.monoid();
  m.require_element(cyl.base);
  for (const auto& f : cyl.removed) {
    m.require_element(f);
    if (!m.left_divide(cyl.base, f))
      throw std::invalid_argument("removed element " + m.render(f) +
                                  " is not in the cylinder of " + m.render(cyl.base));
  }
  // reduce to the minimal antichain: smaller elements absorb their multiples;
  // mutually dividing elements (associates differing by a unit, as in the lamp
  // kernel) keep only the first in sort order
  std::vector<Element> f = cyl.removed;
  std::sort(f.begin(), f.end());
  f.erase(std::unique(f.begin(), f.end()), f.end());
  std::vector<Element> minimal;
  for (const auto& x : f) {
    bool absorbed = false;
    for (const auto& y : f)
      if (y != x && m.left_divide(y, x) && (y < x || !m.left_divide(x, y))) {
        absorbed = true;
        break;
      }
    if (!absorbed) minimal.push_back(x);
  }
  return inclusion_exclusion(
      cyl.base, minimal, beta,
      [&](const Element& a, const Element& b) { return m.right_lcm(a, b); },
      [&](const Element& e) { return scale.n_value(e); });
}

MeasureValue mu_class_cylinder(const Scale& scale, const NClass& base,
                               std::span<const NClass> removed, double beta) {
  std::vector<NClass> f(removed.begin(), removed.end());
  for (const auto& c : f)
    if (!scale.class_leq(base, c))
      throw std::invalid_argument("removed class " + scale.render_class(c) +
                                  " is not above the base class " + scale.render_class(base));
  std::sort(f.begin(), f.end());
  f.erase(std::unique(f.begin(), f.end()), f.end());
  std::vector<NClass> minimal;
  for (const auto& x : f) {
    bool absorbed = false;
    for (const auto& y : f)
      if (y != x && scale.class_leq(y, x) && (y < x || !scale.class_leq(x, y))) {
        absorbed = true;
        break;
      }
    if (!absorbed) minimal.push_back(x);
  }
  return inclusion_exclusion(
      base, minimal, beta,
      [&](const NClass& a, const NClass& b) { return scale.class_join(a, b); },
      [&](const NClass& c) { return c.n; });
}

ExistenceResult existence_check(const Scale& scale, double beta, const Rational& cutoff,
                                int max_antichain, std::uint64_t node_budget) {
  ExistenceResult out;
  NClass identity = scale.class_of_identity();
  std::vector<NClass> candidates;
  for (auto& c : scale.enumerate_classes(cutoff))
    if (c.rep != identity.rep) candidates.push_back(std::move(c));

  struct Term {
    NClass join;
    int sign;
  };
  std::vector<Term> terms{{identity, +1}};
  std::vector<std::size_t> chosen;
  double value = 1.0;
  bool exhausted_space = true;
  bool found = false;

  auto rec = [&](auto&& self, std::size_t start, int target) -> void {
    if (found) return;
    for (std::size_t i = start; i < candidates.size() && !found; ++i) {
      if (++out.nodes_visited > node_budget) {
        exhausted_space = false;
        return;
      }
      const NClass& c = candidates[i];
      bool comparable = false;
      for (std::size_t idx : chosen) {
        const NClass& p = candidates[idx];
        if (scale.class_leq(p, c) || scale.class_leq(c, p)) {
          comparable = true;
          break;
        }
      }
      if (comparable) continue;
      std::size_t old_size = terms.size();
      double delta = 0.0;
      for (std::size_t t = 0; t < old_size; ++t) {
        auto j = scale.class_join(terms[t].join, c);
        if (!j) continue;
        int sign = -terms[t].sign;
        delta += sign * pow_neg_beta(j->n, beta);
        terms.push_back(Term{std::move(*j), sign});
      }
      value += delta;
      chosen.push_back(i);
      if (static_cast<int>(chosen.size()) == target) {
        if (value < -1e-12) {
          found = true;
          out.nonnegative = false;
          out.witness_value = value;
          Cylinder w{scale.monoid().identity(), {}};
          for (std::size_t idx : chosen) w.removed.push_back(candidates[idx].rep);
          out.witness = std::move(w);
        }
      } else {
        self(self, i + 1, target);
      }
      chosen.pop_back();
      value -= delta;
      terms.resize(old_size);
    }
  };

  for (int target = 1; target <= max_antichain && !found; ++target) {
    rec(rec, 0, target);
    if (out.nodes_visited > node_budget) break;
  }
  out.partial = !found && !exhausted_space;
  return out;
}

ZetaResult zeta_partial(const Scale& scale, double beta, const Rational& cutoff) {
  ZetaResult out;
  auto k = exact_beta_exponent(beta);
  Rational exact = 0;
  for (const auto& level : scale.class_levels(cutoff)) {
    out.value += static_cast<double>(level.classes) * pow_neg_beta(level.n, beta);
    out.class_count += level.classes;
    if (k) exact += Rational(static_cast<unsigned long>(level.classes)) / rational_pow(level.n, *k);
  }
  if (k) out.exact = exact;
  out.closed_form = scale.zeta_closed_form(beta);
  return out;
}

MeasureValue boundary_residual(const Scale& scale, double beta, const Rational& level) {
  std::vector<NClass> at_level;
  for (auto& c : scale.enumerate_classes(level))
    if (c.n == level) at_level.push_back(std::move(c));
  return mu_class_cylinder(scale, scale.class_of_identity(), at_level, beta);
}

}  // namespace kmslcm
