#include "washboard/overdamped.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>

namespace washboard {

namespace {

// Values of a packed vector at n uniform nodes.
Eigen::VectorXd sample(const FourierVector& v, int n) {
  std::vector<double> q(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) q[static_cast<std::size_t>(i)] = i * v.period() / n;
  return fourier_synthesis(v.modes(), v.period(), q) * v.packed();
}

}  // namespace

OverdampedResult solve_overdamped(const PeriodicPotential& potential, double beta, double force,
                                  int n_fourier) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ModelError("beta must be > 0");
  if (!std::isfinite(force)) throw ModelError("force must be finite");
  if (n_fourier < std::max(1, potential.harmonics())) {
    throw ModelError("Fourier truncation below potential harmonics");
  }
  const int m = n_fourier;
  const int d = 2 * m + 1;
  const double period = potential.period();
  const Eigen::MatrixXd deriv = derivative_matrix(m, period);
  FourierVector drift_field = potential_derivative_coefficients(potential, m);
  drift_field.packed() *= -1.0;
  drift_field.xi(0) += force;
  const Eigen::MatrixXd mult = multiplication_matrix(drift_field, m);

  // Stationary density: -d_q((F - V') rho) + beta^{-1} rho'' = 0. The constant-mode row
  // is identically zero (a total derivative), so it carries the normalization instead.
  Eigen::MatrixXd fp = -deriv * mult + (deriv * deriv) / beta;
  Eigen::MatrixXd fp_norm = fp;
  fp_norm.row(0).setZero();
  fp_norm(0, 0) = period;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
  rhs[0] = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(fp_norm);
  if (!lu.isInvertible()) throw SolverError("overdamped stationary problem is singular");
  const Eigen::VectorXd rho = lu.solve(rhs);

  OverdampedResult out{0.0, 0.0, 0.0, FourierVector(m, period, rho), FourierVector(m, period), 0.0, 0.0};
  out.stationary_residual = (fp * rho).lpNorm<Eigen::Infinity>();
  out.drift = period * fourier_pairing(drift_field.packed(), rho);

  // Corrector: (F - V') phi' + beta^{-1} phi'' = -(F - V' - U_O). The constant column is
  // zero, so drop it (mean-zero phi) and solve the consistent overdetermined system.
  const Eigen::MatrixXd gen = mult * deriv + (deriv * deriv) / beta;
  Eigen::VectorXd cell_rhs = -drift_field.packed();
  cell_rhs[0] += out.drift;
  const Eigen::MatrixXd reduced = gen.rightCols(d - 1);
  const Eigen::VectorXd tail = reduced.colPivHouseholderQr().solve(cell_rhs);
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(d);
  phi.tail(d - 1) = tail;
  out.corrector = FourierVector(m, period, phi);
  out.cell_residual = (gen * phi - cell_rhs).lpNorm<Eigen::Infinity>();

  const int n = std::max(512, 8 * m);
  const Eigen::VectorXd rv = sample(out.density, n);
  const Eigen::VectorXd grad = (1.0 + sample(apply_q_derivative(out.corrector), n).array()).matrix();
  const double h = period / n;
  out.diffusion = h * (grad.array().square() * rv.array()).sum() / beta;
  out.diffusion_displayed = h * (grad.array() * rv.array()).sum() / beta;
  return out;
}

double stratonovich_drift(const PeriodicPotential& potential, double beta, double force, int q_nodes) {
  if (force == 0.0) return 0.0;
  using Rule = boost::math::quadrature::gauss<double, 20>;
  const int panels = 48;
  const double period = potential.period();
  const double panel = period / panels;

  // Nodes in y on [0, L]: Boost stores the non-negative half of a symmetric rule.
  std::vector<double> ys, wy;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * panel;
    for (std::size_t i = 0; i < x.size(); ++i) {
      ys.push_back(mid + 0.5 * panel * x[i]);
      wy.push_back(0.5 * panel * w[i]);
      if (x[i] != 0.0) {
        ys.push_back(mid - 0.5 * panel * x[i]);
        wy.push_back(0.5 * panel * w[i]);
      }
    }
  }

  auto tilted = [&](double q) { return potential.value(q) - force * q; };
  std::vector<double> exponents;
  exponents.reserve(static_cast<std::size_t>(q_nodes) * ys.size());
  double emax = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < q_nodes; ++i) {
    const double q = i * period / q_nodes;
    const double wq = tilted(q);
    for (double y : ys) {
      const double e = beta * (wq - tilted(q - y));
      exponents.push_back(e);
      emax = std::max(emax, e);
    }
  }
  double sum = 0.0;
  std::size_t k = 0;
  for (int i = 0; i < q_nodes; ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j, ++k) sum += wy[j] * std::exp(exponents[k] - emax);
  }
  sum *= period / q_nodes;
  // U_O = L (1 - e^{-beta L F}) / (beta e^{emax} sum), assembled in logs.
  const double numer = -std::expm1(-beta * period * force);
  const double log_u = std::log(std::fabs(numer)) + std::log(period) - std::log(beta) - emax - std::log(sum);
  return std::copysign(std::exp(log_u), numer);
}

double lifson_jackson_diffusion(const PeriodicPotential& potential, double beta, int nodes) {
  const double period = potential.period();
  std::vector<double> v(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) v[static_cast<std::size_t>(i)] = potential.value(i * period / nodes);
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double vmin = *lo, vmax = *hi;
  double up = 0.0, down = 0.0;
  for (double x : v) {
    up += std::exp(beta * (x - vmax));
    down += std::exp(-beta * (x - vmin));
  }
  up /= nodes;
  down /= nodes;
  // L^2 / (L up e^{beta vmax} * L down e^{-beta vmin}).
  return std::exp(-beta * (vmax - vmin)) / (beta * up * down);
}

AsymptoticsReport check_overdamped_asymptotics(const ModelParams& params, const std::vector<double>& gammas,
                                               const TransportOptions& options) {
  AsymptoticsReport report;
  report.overdamped = solve_overdamped(params.potential, params.beta, params.force,
                                       std::max(options.truncation.n_fourier, params.potential.harmonics()));
  for (double g : gammas) {
    TransportOptions o = options;
    o.compute_ibp = false;
    const TransportResult r = solve_transport(params.with_gamma(g), o);
    AsymptoticsRow row{g, g * r.drift, g * r.diffusion, 0.0, 0.0};
    row.drift_error = std::fabs(row.scaled_drift - report.overdamped.drift);
    row.diffusion_error = std::fabs(row.scaled_diffusion - report.overdamped.diffusion);
    report.rows.push_back(row);
  }
  auto ratio = [](double a, double b) { return a > 0.0 ? b / a : 0.0; };
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    report.drift_ratios.push_back(ratio(report.rows[i - 1].drift_error, report.rows[i].drift_error));
    report.diffusion_ratios.push_back(ratio(report.rows[i - 1].diffusion_error, report.rows[i].diffusion_error));
  }
  return report;
}

}  // namespace washboard
