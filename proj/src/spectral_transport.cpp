#include "washboard/spectral_transport.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>

namespace washboard {

namespace {

constexpr double kRcondFloor = 1e-14;

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using BlockFn = std::function<Mat(int)>;

// X_{k-1} = -(diag(k) + minus(k) X_k)^{-1} plus(k), k = top..1, seeded with `closure`.
// Returns X_0..X_{top-1}.
std::vector<Mat> eliminate_downward(int top, const Mat& closure, const BlockFn& plus,
                                            const BlockFn& diag, const BlockFn& minus,
                                            const char* what, double& min_rcond) {
  std::vector<Mat> x(static_cast<std::size_t>(top));
  Mat next = closure;
  for (int k = top; k >= 1; --k) {
    Mat pivot = diag(k);
    if (next.any()) pivot.noalias() += minus(k) * next;
    Eigen::PartialPivLU<Mat> lu(pivot);
    const double rc = lu.rcond();
    min_rcond = std::min(min_rcond, rc);
    if (!(rc > kRcondFloor)) {
      throw SolverError(std::string(what) + ": singular recursion block at level " +
                        std::to_string(k) + " (rcond " + std::to_string(rc) +
                        "); increase n_hermite or check gamma");
    }
    next = -lu.solve(plus(k));
    x[static_cast<std::size_t>(k - 1)] = next;
  }
  return x;
}

Eigen::MatrixXd closure_matrix(const TruncationSpec& trunc) {
  const int d = trunc.block_size();
  if (trunc.closure == Closure::Neumann) return Eigen::MatrixXd::Identity(d, d);
  return Eigen::MatrixXd::Zero(d, d);
}

HermiteFourierBasis basis_for(const ModelParams& params, const TruncationSpec& trunc) {
  return {trunc.n_hermite, trunc.n_fourier, params.potential.period(), params.beta};
}

void validate_inputs(const ModelParams& params, const TruncationSpec& trunc) {
  params.validate();
  trunc.validate(params.potential);
}

}  // namespace

Eigen::MatrixXd BlockSet::q_plus(int n) const { return std::sqrt(static_cast<double>(n)) * derivative; }

Eigen::MatrixXd BlockSet::q_diag(int n) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(size(), size()) * (-gamma * std::sqrt(beta) * n);
  if (shift != 0.0) m += shift * std::sqrt(beta) * derivative;
  return m;
}

Eigen::MatrixXd BlockSet::p_diag(int m) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(size(), size()) * (-gamma * std::sqrt(beta) * m);
  if (shift != 0.0) out -= shift * std::sqrt(beta) * derivative;
  return out;
}

Eigen::MatrixXd BlockSet::q_minus(int n) const {
  return std::sqrt(n + 1.0) * (derivative + force_coupling);
}

Eigen::MatrixXd BlockSet::p_plus(int m) const {
  return std::sqrt(static_cast<double>(m)) * (force_coupling - derivative);
}

Eigen::MatrixXd BlockSet::p_minus(int m) const { return -std::sqrt(m + 1.0) * derivative; }

Eigen::VectorXd BlockSet::a_vector() const {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(size());
  a[0] = -1.0;
  return a;
}

Eigen::VectorXd BlockSet::b_vector(double drift) const {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(size());
  b[0] = std::sqrt(beta) * (drift - shift);
  return b;
}

BlockSet build_blocks(const ModelParams& params, const TruncationSpec& trunc, double shift) {
  validate_inputs(params, trunc);
  if (!std::isfinite(shift)) throw ModelError("momentum shift must be finite");
  BlockSet blocks;
  blocks.n_hermite = trunc.n_hermite;
  blocks.n_fourier = trunc.n_fourier;
  blocks.gamma = params.gamma;
  blocks.beta = params.beta;
  blocks.period = params.potential.period();
  blocks.shift = shift;
  blocks.derivative = derivative_matrix(trunc.n_fourier, blocks.period);
  FourierVector drift_field = potential_derivative_coefficients(params.potential, trunc.n_fourier);
  drift_field.packed() *= -1.0;
  drift_field.xi(0) += params.force - params.gamma * shift;
  blocks.force_coupling = params.beta * multiplication_matrix(drift_field, trunc.n_fourier);
  return blocks;
}

DownwardRecursion downward_recursion(const BlockSet& blocks, const TruncationSpec& trunc) {
  DownwardRecursion out;
  out.s = eliminate_downward(
      blocks.n_hermite, closure_matrix(trunc), [&](int k) { return blocks.q_plus(k); },
      [&](int k) { return blocks.q_diag(k); }, [&](int k) { return blocks.q_minus(k); },
      "cell problem", out.min_rcond);
  return out;
}

namespace {

// Density hierarchy; returns the (2M+1) x (N+1) coefficients.
Mat density_coefficients(const BlockSet& blocks, const TruncationSpec& trunc, double& min_rcond) {
  const int d = blocks.size();
  const int top = trunc.n_hermite;
  const std::vector<Mat> t = eliminate_downward(
      top, closure_matrix(trunc), [&](int k) { return blocks.p_plus(k); },
      [&](int k) { return blocks.p_diag(k); }, [&](int k) { return blocks.p_minus(k); },
      "stationary density", min_rcond);

  // Level 0: D (T_0 + c sqrt(beta)) R_0 = 0. Row 0 of D vanishes; it carries the
  // normalization L R_0^0 = 1.
  Mat shifted = t[0];
  shifted.diagonal().array() += blocks.shift * std::sqrt(blocks.beta);
  Mat level0 = blocks.derivative * shifted;
  level0.row(0).setZero();
  level0(0, 0) = blocks.period;
  Vec rhs = Vec::Zero(d);
  rhs[0] = 1;
  Eigen::FullPivLU<Mat> lu(level0);
  if (!lu.isInvertible()) throw SolverError("stationary density: level-0 system is singular");
  min_rcond = std::min(min_rcond, lu.rcond());
  Mat r(d, top + 1);
  r.col(0) = lu.solve(rhs);
  for (int n = 0; n < top; ++n) r.col(n + 1) = t[static_cast<std::size_t>(n)] * r.col(n);
  return r;
}

}  // namespace

StationaryDensity solve_stationary_fp(const ModelParams& params, const TruncationSpec& trunc, double shift) {
  const BlockSet blocks = build_blocks(params, trunc, shift);
  StationaryDensity out{HermiteFourierField(basis_for(params, trunc)), 0.0, 0.0, 1.0, shift};
  out.r.coefficients() = density_coefficients(blocks, trunc, out.min_rcond);
  out.normalization_residual = std::fabs(blocks.period * out.r.coefficients()(0, 0) - 1.0);
  out.drift = shift + blocks.period * out.r.coefficients()(0, 1) / std::sqrt(params.beta);
  return out;
}

namespace {

double pairing(const Vec& a, const Vec& b) {
  return 2 * a.dot(b) - a[0] * b[0];
}

// Cell hierarchy against density coefficients `r`. Fills the
// diagnostics of `out` and returns Phi as (2M+1) x (N+1).
Mat cell_coefficients(const BlockSet& blocks, const TruncationSpec& trunc, const Mat& r,
                      double solvability_tolerance, CellSolution& out) {
  const int d = blocks.size();
  const int top = trunc.n_hermite;
  const std::vector<Mat> s = eliminate_downward(
      top, closure_matrix(trunc), [&](int k) { return blocks.q_plus(k); },
      [&](int k) { return blocks.q_diag(k); }, [&](int k) { return blocks.q_minus(k); },
      "cell problem", out.min_rcond);

  // Phi_1 = S_0 Phi_0 + X_1^{-1} A with X_1 = Q_1 + Q_1^- S_1.
  Mat x1 = blocks.q_diag(1);
  x1.noalias() += blocks.q_minus(1) * (top >= 2 ? s[1] : closure_matrix(trunc));
  const Vec x1_inv_a = Eigen::PartialPivLU<Mat>(x1).solve(blocks.a_vector());

  const Mat q0m = blocks.q_minus(0);
  const Mat g = blocks.q_diag(0) + q0m * s[0];
  const Vec transfer = q0m * x1_inv_a;
  // B carries U - c straight from the density coefficients; recomputing it from the
  // rounded drift would cost digits once c is large.
  const double sqrt_beta = std::sqrt(blocks.beta);
  Vec b = Vec::Zero(d);
  b[0] = blocks.period * r(0, 1);
  const Vec rhs = b - transfer;

  Eigen::JacobiSVD<Mat> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec& sigma = svd.singularValues();
  const double s0 = sigma[0];
  const double s_last = sigma[d - 1];
  const double s_next = d >= 2 ? sigma[d - 2] : s0;
  out.null_gap = s0 > 0 ? s_last / s0 : 1.0;
  if (!(s0 > 0) || s_last > 1e-8 * s0) {
    throw SolverError("cell problem: level-0 matrix has no null direction (sigma_min/sigma_max = " +
                      std::to_string(out.null_gap) + ")");
  }
  if (s_next <= 1e-10 * s0) {
    throw SolverError("cell problem: level-0 null space has dimension > 1; truncation too small");
  }
  const Vec left_null = svd.matrixU().col(d - 1);
  const Vec right_null = svd.matrixV().col(d - 1);
  // Measured against the two pieces that should cancel, not their difference, which is
  // itself ~0 for a free particle.
  const double scale = b.norm() + transfer.norm();
  out.solvability_residual = scale > 0 ? std::fabs(left_null.dot(rhs)) / scale : 0.0;
  if (std::fabs(left_null[0]) > 0) {
    out.drift_from_solvability = left_null.dot(transfer) / (sqrt_beta * left_null[0]);
  }
  if (out.solvability_residual > solvability_tolerance) {
    throw SolverError("cell problem: right-hand side violates solvability (residual " +
                      std::to_string(out.solvability_residual) + ")");
  }

  // Minimum-norm solution on the range, then fix the null component by centering.
  Vec phi0 = Vec::Zero(d);
  const Vec ut_rhs = svd.matrixU().transpose() * rhs;
  for (int i = 0; i < d - 1; ++i) phi0 += (ut_rhs[i] / sigma[i]) * svd.matrixV().col(i);

  Mat phi(d, top + 1);
  auto propagate = [&](const Vec& base, const Vec& level1_shift) {
    phi.col(0) = base;
    phi.col(1) = s[0] * base + level1_shift;
    for (int n = 1; n < top; ++n) phi.col(n + 1) = s[static_cast<std::size_t>(n)] * phi.col(n);
  };
  auto centering = [&]() {
    double c = 0;
    for (int n = 0; n <= top; ++n) c += pairing(r.col(n), phi.col(n));
    return c;
  };
  // Shifting Phi_0 along the null vector moves the levels n >= 1 by S_0 v, which is
  // zero up to rounding; so the centering functional is linear in the shift through level 0.
  propagate(right_null, Vec::Zero(d));
  const double slope = centering();
  propagate(phi0, x1_inv_a);
  const double c0 = centering();
  if (!(std::fabs(slope) > 0)) throw SolverError("cell problem: null direction is invisible to centering");
  propagate(phi0 - (c0 / slope) * right_null, x1_inv_a);
  return phi;
}

}  // namespace

CellSolution solve_cell_problem(const ModelParams& params, const TruncationSpec& trunc,
                                const StationaryDensity& density, double solvability_tolerance) {
  const BlockSet blocks = build_blocks(params, trunc, density.shift);
  if (!(density.r.basis() == basis_for(params, trunc))) {
    throw ModelError("density was solved on a different truncation");
  }
  CellSolution out{HermiteFourierField(density.r.basis()), 0.0, 0.0, 0.0, 1.0};
  out.phi.coefficients() = cell_coefficients(blocks, trunc, density.r.coefficients(), solvability_tolerance, out);
  return out;
}

double cell_residual(const ModelParams& params, const TruncationSpec& trunc,
                     const HermiteFourierField& phi, double drift, double shift) {
  const BlockSet blocks = build_blocks(params, trunc, shift);
  const int top = trunc.n_hermite;
  const Eigen::MatrixXd closure = closure_matrix(trunc);
  double worst = 0.0;
  for (int n = 0; n <= top; ++n) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(blocks.size());
    if (n >= 1) r += blocks.q_plus(n) * phi.level(n - 1);
    r += blocks.q_diag(n) * phi.level(n);
    const Eigen::VectorXd above = n < top ? Eigen::VectorXd(phi.level(n + 1))
                                          : Eigen::VectorXd(closure * phi.level(n));
    r += blocks.q_minus(n) * above;
    if (n == 0) r -= blocks.b_vector(drift);
    if (n == 1) r -= blocks.a_vector();
    worst = std::max(worst, r.lpNorm<Eigen::Infinity>());
  }
  return worst;
}

namespace {

DiffusionEstimate diffusion_estimate(const Mat& r, const Mat& phi, const HermiteFourierBasis& basis,
                                     const ModelParams& params, double shift, bool with_ibp, int ibp_nodes) {
  const int top = basis.n_hermite;
  const double l = basis.period;
  DiffusionEstimate out;
  double sum = 0;
  for (int n = 0; n < top; ++n) {
    const double c = std::sqrt((n + 1.0) / params.beta);
    sum += c * (pairing(r.col(n + 1), phi.col(n)) + pairing(r.col(n), phi.col(n + 1)));
  }
  out.primary = l * sum;

  out.ibp = std::numeric_limits<double>::quiet_NaN();
  if (!with_ibp) return out;
  // d_p phi has Hermite coefficients sqrt(beta (n+1)) Phi_{n+1}.
  Mat grad = Mat::Zero(phi.rows(), phi.cols());
  for (int n = 1; n <= top; ++n) grad.col(n - 1) = std::sqrt(params.beta * n) * phi.col(n);

  // Uniform nodes in x = (p - c) sqrt(beta). Momenta live between the locked (p = 0)
  // and free-running (p = F / gamma) velocities; the window spans both plus 8 thermal
  // widths, past which the Gaussian tails are below 1e-14.
  // Farther out a truncated Hermite sum is mostly noise: rounding eps in the d_p phi sum
  // grows like e^{x^2/4}, so the squared gradient carries eps^2 e^{x^2/2} against a
  // density ~ e^{-(x-a)^2/2} about its mean a. So the edge on the side of a also stops
  // where that product reaches 1e-4. With the basis centred on the drift, a is ~0 and
  // the cut rarely bites.
  const double center = l * r(0, 1);
  const double sqrt_beta = std::sqrt(params.beta);
  const double locked = -shift * sqrt_beta;
  const double free_run = (params.force / params.gamma - shift) * sqrt_beta;
  double lo = std::min(locked, free_run) - 8.0, hi = std::max(locked, free_run) + 8.0;
  const double eps = std::numeric_limits<double>::epsilon();
  const double budget = std::log(1e-4 / (eps * eps));
  if (std::fabs(center) > 1e-12) {
    const double edge = (budget + 0.5 * center * center) / std::fabs(center);
    if (center > 0.0) hi = std::min(hi, edge);
    else lo = std::max(lo, -edge);
  }
  lo = std::max(lo, -17.0);
  hi = std::min(hi, 17.0);
  const int np = ibp_nodes > 0 ? ibp_nodes : 10 * static_cast<int>(std::ceil(hi - lo)) + 1;
  const NormalRule rule = trapezoid_normal_rule(lo, hi, np);
  const int nq = std::max(64, 4 * basis.n_fourier + 8);
  std::vector<double> q(static_cast<std::size_t>(nq));
  for (int i = 0; i < nq; ++i) q[static_cast<std::size_t>(i)] = i * l / nq;
  const Mat synth = fourier_synthesis(basis.n_fourier, l, q);

  // H_n(x_k) with the Gaussian weight split over the three factors so nothing overflows.
  Mat h(top + 1, np);
  for (int k = 0; k < np; ++k) {
    const double x = rule.nodes[static_cast<std::size_t>(k)];
    h(0, k) = std::exp(rule.log_weights[static_cast<std::size_t>(k)] / 3);
    if (top >= 1) h(1, k) = x * h(0, k);
    for (int n = 1; n < top; ++n) {
      h(n + 1, k) = (x * h(n, k) - std::sqrt(n) * h(n - 1, k)) / std::sqrt(n + 1);
    }
  }
  const Mat g = synth * grad * h;
  const Mat rho = synth * r * h;
  const double total = (g.array().square() * rho.array()).sum();
  out.ibp = params.gamma / params.beta * total * l / nq;
  return out;
}

}  // namespace

DiffusionEstimate compute_diffusion(const StationaryDensity& density, const CellSolution& cell,
                                    const ModelParams& params, bool with_ibp, int ibp_nodes) {
  if (!(density.r.basis() == cell.phi.basis())) throw ModelError("density and corrector bases differ");
  return diffusion_estimate(density.r.coefficients(), cell.phi.coefficients(), cell.phi.basis(), params,
                            density.shift, with_ibp, ibp_nodes);
}

double hermite_tail_ratio(const HermiteFourierField& field) {
  const Eigen::VectorXd norms = field.coefficients().colwise().norm();
  const double peak = norms.maxCoeff();
  return peak > 0.0 ? norms[norms.size() - 1] / peak : 0.0;
}

double fourier_tail_ratio(const HermiteFourierField& field) {
  const int m = field.basis().n_fourier;
  const auto& c = field.coefficients();
  const double peak = c.cwiseAbs().maxCoeff();
  if (!(peak > 0.0) || m == 0) return 0.0;
  const double top = std::max(c.row(m).cwiseAbs().maxCoeff(), c.row(2 * m).cwiseAbs().maxCoeff());
  return top / peak;
}

TransportResult solve_transport(const ModelParams& params, const TransportOptions& options) {
  validate_inputs(params, options.truncation);
  TruncationSpec trunc = options.truncation;
  int refinements = 0;
  double shift = 0.0;
  bool tried_free_run = false;
  int recentred = 0;
  while (true) {
    const bool can_grow_n = 2 * trunc.n_hermite <= options.max_hermite;
    const bool can_grow_m = 2 * trunc.n_fourier <= options.max_fourier;
    std::optional<StationaryDensity> density_try;
    std::optional<CellSolution> cell_try;
    try {
      density_try.emplace(solve_stationary_fp(params, trunc, shift));
      cell_try.emplace(solve_cell_problem(params, trunc, *density_try, options.solvability_tolerance));
    } catch (const SolverError&) {
      // Expanding around p = 0 can fail outright when the drift is many thermal
      // velocities; the free-running velocity is a better centre, and more levels the
      // general cure.
      if (options.comoving && !tried_free_run) {
        tried_free_run = true;
        shift = params.force / params.gamma;
        ++refinements;
        continue;
      }
      if (!options.adaptive || !can_grow_n) throw;
      trunc.n_hermite *= 2;
      ++refinements;
      continue;
    }
    StationaryDensity& density = *density_try;
    CellSolution& cell = *cell_try;
    // Re-centre while the basis is off by more than a quarter of a thermal velocity.
    if (options.comoving && recentred < 8 &&
        std::fabs(density.drift - shift) * std::sqrt(params.beta) > 0.25) {
      shift = density.drift;
      ++recentred;
      ++refinements;
      continue;
    }
    const double tail_r = hermite_tail_ratio(density.r);
    const double tail_phi = hermite_tail_ratio(cell.phi);
    const double tail_f = std::max(fourier_tail_ratio(density.r), fourier_tail_ratio(cell.phi));
    const bool hermite_ok = std::max(tail_r, tail_phi) <= options.tolerance;
    const bool fourier_ok = tail_f <= options.tolerance;
    if (options.adaptive && ((!hermite_ok && can_grow_n) || (!fourier_ok && can_grow_m))) {
      if (!hermite_ok && can_grow_n) trunc.n_hermite *= 2;
      if (!fourier_ok && can_grow_m) trunc.n_fourier *= 2;
      ++refinements;
      continue;
    }
    const DiffusionEstimate diff = compute_diffusion(density, cell, params, options.compute_ibp);
    TransportResult res{.drift = density.drift,
                        .diffusion = diff.primary,
                        .diffusion_ibp = diff.ibp,
                        .truncation = trunc,
                        .momentum_shift = shift,
                        .hermite_tail_density = tail_r,
                        .hermite_tail_phi = tail_phi,
                        .fourier_tail = tail_f,
                        .solvability_residual = cell.solvability_residual,
                        .drift_from_solvability = cell.drift_from_solvability,
                        .cell_residual = cell_residual(params, trunc, cell.phi, density.drift, shift),
                        .min_rcond = std::min(density.min_rcond, cell.min_rcond),
                        .refinements = refinements,
                        .density = std::move(density.r),
                        .phi = std::move(cell.phi)};
    return res;
  }
}

}  // namespace washboard
