#include "washboard/gauss_hermite.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace washboard {

namespace {

struct ScaledRecurrence {
  double current = 0.0;   // h_n(x) * exp(-log_scale)
  double previous = 0.0;  // h_{n-1}(x) * exp(-log_scale)
  double sum_squares = 0.0;  // sum_{k<n} h_k(x)^2 * exp(-2 log_scale)
  double log_scale = 0.0;
};

// Orthonormal Hermite recurrence with periodic rescaling.
ScaledRecurrence recur(double x, int n) {
  constexpr double kBig = 1e150;
  constexpr double kShrink = 1e-150;
  ScaledRecurrence r;
  double prev = 1.0;
  double cur = x;
  double sum = 1.0;
  for (int k = 1; k < n; ++k) {
    sum += cur * cur;
    const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) /
                        std::sqrt(static_cast<double>(k + 1));
    prev = cur;
    cur = next;
    if (std::fabs(cur) > kBig) {
      cur *= kShrink;
      prev *= kShrink;
      sum *= kShrink * kShrink;
      r.log_scale += std::log(kBig);
    }
  }
  r.current = cur;
  r.previous = prev;
  r.sum_squares = sum;
  return r;
}

}  // namespace

NormalRule gauss_hermite_rule(int n) {
  if (n < 1) throw std::invalid_argument("Gauss-Hermite rule needs at least one node");
  NormalRule rule;
  if (n == 1) {
    rule.nodes = {0.0};
    rule.weights = {1.0};
    rule.log_weights = {0.0};
    return rule;
  }
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n - 1);
  for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("Gauss-Hermite eigensolve failed");

  rule.nodes.resize(n);
  rule.log_weights.resize(n);
  rule.weights.resize(n);
  const double root_n = std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) {
    double x = solver.eigenvalues()[i];
    for (int it = 0; it < 3; ++it) {
      const ScaledRecurrence r = recur(x, n);
      if (r.previous == 0.0) break;
      x -= r.current / (root_n * r.previous);
    }
    const ScaledRecurrence r = recur(x, n);
    rule.nodes[i] = x;
    rule.log_weights[i] = -(std::log(r.sum_squares) + 2.0 * r.log_scale);
    rule.weights[i] = std::exp(rule.log_weights[i]);
  }
  // Enforce exact mirror symmetry of the rule.
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double lw = 0.5 * (rule.log_weights[i] + rule.log_weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.log_weights[i] = rule.log_weights[j] = lw;
    rule.weights[i] = rule.weights[j] = std::exp(lw);
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

NormalRule trapezoid_normal_rule(double lo, double hi, int nodes) {
  if (nodes < 2 || !(hi > lo)) throw std::invalid_argument("bad trapezoid rule");
  NormalRule rule;
  const double h = (hi - lo) / (nodes - 1);
  const double log_norm = std::log(h) - 0.5 * std::log(2.0 * std::numbers::pi);
  for (int i = 0; i < nodes; ++i) {
    const double x = lo + i * h;
    const double end = (i == 0 || i == nodes - 1) ? std::log(0.5) : 0.0;
    rule.nodes.push_back(x);
    rule.log_weights.push_back(log_norm + end - 0.5 * x * x);
    rule.weights.push_back(std::exp(rule.log_weights.back()));
  }
  return rule;
}

NormalRule trapezoid_normal_rule(double half_width, int nodes) {
  if (!(half_width > 0.0)) throw std::invalid_argument("bad trapezoid rule");
  return trapezoid_normal_rule(-half_width, half_width, nodes);
}

}  // namespace washboard
