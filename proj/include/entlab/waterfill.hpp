#pragma once

#include <vector>

#include "entlab/rational.hpp"

namespace entlab {

/// {E D(Y) : max_x P(Y = x) <= cap} for one column of D values.
struct AchievableInterval {
  Rational lower;
  Rational upper;
};

/// Greedy fill: cap mass on each point in descending (or ascending) value order,
/// ties broken by lowest index. Throws CapOutOfRange unless 1/N <= cap.
/// Caps above 1 behave like 1.
std::vector<Rational> waterfill_mass(const std::vector<Rational>& values, const Rational& cap, bool descending);

AchievableInterval achievable_interval(const std::vector<Rational>& values, const Rational& cap);

/// A distribution with max mass <= cap whose expectation under `values` is the
/// projection of `target` onto the achievable interval (a mix of the two fills).
std::vector<Rational> interval_witness(const std::vector<Rational>& values, const Rational& cap,
                                       const Rational& target);

/// Distance from a point to an interval.
Rational distance_to(const Rational& a, const Rational& lo, const Rational& hi);

/// Piecewise-linear function given by breakpoints with strictly increasing xs.
struct PiecewiseLinear {
  std::vector<Rational> xs;
  std::vector<Rational> ys;

  Rational eval(const Rational& x) const;
  PiecewiseLinear negated() const;
};

/// m -> upper end of achievable_interval(values, m) on [1/N, 1]; breakpoints at
/// m = 1/j. Concave and non-decreasing.
PiecewiseLinear upper_curve(const std::vector<Rational>& values);
/// m -> lower end; convex and non-increasing.
PiecewiseLinear lower_curve(const std::vector<Rational>& values);

/// Pointwise maximum of functions sharing the same domain [x0, x1]. Exact:
/// crossing points of the pieces become breakpoints.
PiecewiseLinear upper_envelope(const std::vector<PiecewiseLinear>& fs);

/// Per-z penalty m -> max(0, a - upper(m), lower(m) - a): the distance from a
/// to the achievable interval at cap m. Convex, non-increasing.
PiecewiseLinear distance_curve(const std::vector<Rational>& values, const Rational& a);

struct Allocation {
  Rational value;           // sum_z w_z f_z(x_z)
  std::vector<Rational> x;  // chosen point per function
};

/// Maximises sum_z w_z f_z(x_z) subject to sum_z w_z x_z <= budget with every
/// f_z concave and x_z in its domain. Greedy over segments by slope, which is
/// exact for concave pieces (fractional knapsack). Throws CapOutOfRange when
/// even the left endpoints exceed the budget.
Allocation allocate_concave(const std::vector<Rational>& weights, const std::vector<PiecewiseLinear>& fs,
                            const Rational& budget);

}  // namespace entlab
