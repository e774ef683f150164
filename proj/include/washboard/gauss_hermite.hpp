#pragma once

#include <vector>

namespace washboard {

/// Quadrature for the standard normal weight: sum_i w_i f(x_i) ~ E[f(X)], X ~ N(0, 1).
/// Weights are also given as logarithms because the outer ones underflow long before
/// the nodes become useless.
struct NormalRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> log_weights;

  int size() const { return static_cast<int>(nodes.size()); }
};

/// Gauss rule, exact for polynomials of degree <= 2n - 1. Golub-Welsch eigenvalues of the
/// Jacobi matrix, Newton-polished, with weights from the Christoffel function evaluated by
/// an overflow-safe recurrence. O(n^2).
NormalRule gauss_hermite_rule(int n);

/// Trapezoid rule on [-half_width, half_width] with `nodes` points. For smooth integrands
/// it converges geometrically in the spacing, and unlike the Gauss rule it never places
/// nodes beyond half_width.
NormalRule trapezoid_normal_rule(double half_width, int nodes);
/// Same on [lo, hi].
NormalRule trapezoid_normal_rule(double lo, double hi, int nodes);

}  // namespace washboard
