#include "washboard/expansion.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace washboard {

struct EquilibriumSolver::Factor {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  Eigen::SparseMatrix<double> op;
};

namespace {

void add_block(std::vector<Eigen::Triplet<double>>& t, int row0, int col0, const Eigen::MatrixXd& b,
               double scale) {
  if (scale == 0.0) return;
  for (int j = 0; j < b.cols(); ++j) {
    for (int i = 0; i < b.rows(); ++i) {
      if (b(i, j) != 0.0) t.emplace_back(row0 + i, col0 + j, scale * b(i, j));
    }
  }
}

}  // namespace

EquilibriumSolver::EquilibriumSolver(const ModelParams& params, const TruncationSpec& trunc)
    : basis_{trunc.n_hermite, trunc.n_fourier, params.potential.period(), params.beta},
      gamma_(params.gamma),
      derivative_(derivative_matrix(trunc.n_fourier, params.potential.period())),
      force_(multiplication_matrix(potential_derivative_coefficients(params.potential, trunc.n_fourier),
                                   trunc.n_fourier)),
      quad_(params.potential, basis_) {
  params.validate();
  trunc.validate(params.potential);
  if (trunc.n_hermite < 1) throw ModelError("equilibrium solver needs at least one Hermite level");
  const int nq = quad_.orders().n_q;
  std::vector<double> q(static_cast<std::size_t>(nq));
  for (int i = 0; i < nq; ++i) q[static_cast<std::size_t>(i)] = i * basis_.period / nq;
  synthesis_ = fourier_synthesis(basis_.n_fourier, basis_.period, q);

  const int d = 2 * basis_.n_fourier + 1;
  const int size = d * (basis_.n_hermite + 1);
  const Eigen::RowVectorXd& r = quad_.mean_functional();
  for (bool adjoint : {false, true}) {
    auto f = std::make_shared<Factor>();
    f->op = generator(adjoint);
    // Border: one extra unknown feeding the constant mode of level 0, one extra row
    // imposing <psi, 1> = 0.
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(f->op.nonZeros()) + d + 1);
    for (int k = 0; k < f->op.outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(f->op, k); it; ++it) {
        t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
      }
    }
    t.emplace_back(0, size, 1.0);
    for (int i = 0; i < d; ++i) {
      if (r[i] != 0.0) t.emplace_back(size, i, r[i]);
    }
    Eigen::SparseMatrix<double> bordered(size + 1, size + 1);
    bordered.setFromTriplets(t.begin(), t.end());
    bordered.makeCompressed();
    f->lu.compute(bordered);
    if (f->lu.info() != Eigen::Success) {
      throw SolverError(std::string("equilibrium Poisson system is singular (") +
                        (adjoint ? "adjoint" : "forward") + ")");
    }
    (adjoint ? adjoint_ : forward_) = std::move(f);
  }
}

Eigen::SparseMatrix<double> EquilibriumSolver::generator(bool adjoint) const {
  const int d = 2 * basis_.n_fourier + 1;
  const int top = basis_.n_hermite;
  const int size = d * (top + 1);
  const double sb = std::sqrt(basis_.beta);
  // -L0 = -A - gamma S and -L0^ = A - gamma S; -gamma S is gamma m on level m.
  const double sign = adjoint ? 1.0 : -1.0;
  std::vector<Eigen::Triplet<double>> t;
  for (int m = 0; m <= top; ++m) {
    const int row = m * d;
    for (int i = 0; i < d; ++i) {
      if (m > 0) t.emplace_back(row + i, row + i, gamma_ * m);
    }
    if (m > 0) add_block(t, row, row - d, derivative_, sign * std::sqrt(static_cast<double>(m)) / sb);
    if (m < top) {
      const double s = std::sqrt(static_cast<double>(m + 1));
      add_block(t, row, row + d, derivative_, sign * s / sb);
      add_block(t, row, row + d, force_, -sign * s * sb);
    }
  }
  Eigen::SparseMatrix<double> op(size, size);
  op.setFromTriplets(t.begin(), t.end());
  op.makeCompressed();
  return op;
}

double EquilibriumSolver::pairing(const HermiteFourierField& g, const HermiteFourierField& h) const {
  if (!(g.basis() == basis_) || !(h.basis() == basis_)) throw ModelError("pairing: basis mismatch");
  const Eigen::MatrixXd gv = synthesis_ * g.coefficients();
  const Eigen::MatrixXd hv = synthesis_ * h.coefficients();
  return quad_.position_weights().dot(gv.cwiseProduct(hv).rowwise().sum());
}

double EquilibriumSolver::mean(const HermiteFourierField& g) const {
  return quad_.mean_functional().dot(g.level(0));
}

EquilibriumSolver::Result EquilibriumSolver::solve(const HermiteFourierField& rhs, bool adjoint) const {
  if (!(rhs.basis() == basis_)) throw ModelError("equilibrium solve: basis mismatch");
  const double scale = std::max(1.0, rhs.coefficients().cwiseAbs().maxCoeff());
  const double defect = mean(rhs);
  if (std::fabs(defect) > 1e-9 * scale) {
    throw SolverError("equilibrium solve: right-hand side has mean " + std::to_string(defect) +
                      ", so the Poisson equation has no solution");
  }
  const Factor& f = adjoint ? *adjoint_ : *forward_;
  const Eigen::Index size = f.op.rows();
  Eigen::VectorXd b(size + 1);
  b.head(size) = rhs.coefficients().reshaped();
  b[size] = 0.0;
  const Eigen::VectorXd x = f.lu.solve(b);
  if (f.lu.info() != Eigen::Success || !x.allFinite()) throw SolverError("equilibrium solve failed");

  Result out{HermiteFourierField(basis_, x.head(size).reshaped(rhs.coefficients().rows(),
                                                               rhs.coefficients().cols())),
             0.0, x[size]};
  out.residual = (f.op * x.head(size) - b.head(size)).lpNorm<Eigen::Infinity>();
  return out;
}

EquilibriumChain build_chain(const EquilibriumSolver& solver, int order) {
  if (order < 1) throw ModelError("expansion order must be >= 1");
  const HermiteFourierBasis& basis = solver.basis();
  const double beta = basis.beta;
  const HermiteFourierField one = HermiteFourierField::constant(basis, 1.0);
  const HermiteFourierField p = HermiteFourierField::momentum(basis);

  EquilibriumChain chain;
  chain.order = order;
  chain.beta = beta;
  chain.velocity.assign(static_cast<std::size_t>(order) + 1, 0.0);
  chain.velocity_phi.assign(static_cast<std::size_t>(order) + 1, 0.0);
  chain.solvability.assign(static_cast<std::size_t>(order), 0.0);

  auto track = [&](const EquilibriumSolver::Result& r) { chain.max_residual = std::max(chain.max_residual, r.residual); };

  chain.f.push_back(one);
  for (int j = 1; j <= order; ++j) {
    auto r = solver.solve(apply_raise(chain.f.back()), true);
    track(r);
    chain.f.push_back(std::move(r.psi));
    chain.velocity[static_cast<std::size_t>(j)] = solver.pairing(chain.f.back(), p);
  }

  {
    auto r = solver.solve(p, false);
    track(r);
    chain.phi.push_back(std::move(r.psi));
  }
  for (int j = 1; j < order; ++j) {
    const double vj = chain.velocity[static_cast<std::size_t>(j)];
    HermiteFourierField rhs = apply_lower(chain.phi.back());
    const double defect = solver.mean(rhs) - vj;
    chain.solvability[static_cast<std::size_t>(j)] = defect;
    if (std::fabs(defect) > 1e-7 * std::max(1.0, std::fabs(vj))) {
      throw SolverError("expansion chain: solvability fails at j = " + std::to_string(j) + " (defect " +
                        std::to_string(defect) + "); raise the truncation");
    }
    // Project onto mean-zero functions; by the shift identity this removes exactly V_j
    // up to truncation error.
    rhs.level(0) -= (vj + defect) * one.level(0);
    auto r = solver.solve(rhs, false);
    track(r);
    double side = 0.0;
    for (int k = 1; k <= j; ++k) side -= solver.pairing(chain.f[static_cast<std::size_t>(k)], chain.phi[static_cast<std::size_t>(j - k)]);
    r.psi.level(0) += side * one.level(0);
    chain.phi.push_back(std::move(r.psi));
  }

  for (int j = 1; j <= order; ++j) {
    chain.velocity_phi[static_cast<std::size_t>(j)] = beta * solver.pairing(chain.phi[static_cast<std::size_t>(j - 1)], p);
  }
  return chain;
}

double velocity_coefficient(const EquilibriumChain& chain, int j) {
  if (j < 0 || j > chain.order) throw ModelError("velocity coefficient index out of range");
  const double vf = chain.velocity[static_cast<std::size_t>(j)];
  const double vp = chain.velocity_phi[static_cast<std::size_t>(j)];
  double scale = 0.0;
  for (double v : chain.velocity) scale = std::max(scale, std::fabs(v));
  if (std::fabs(vf - vp) > 1e-6 * std::max(std::fabs(vf), 1e-4 * scale)) {
    throw SolverError("V_" + std::to_string(j) + ": the two forms disagree (" + std::to_string(vf) + " vs " +
                      std::to_string(vp) + "); the chain is not converged");
  }
  return vf;
}

double ExpansionTable::sigma_sum(int l) const {
  double s = 0.0;
  for (int n = 1; n <= l; ++n) s += sigma[static_cast<std::size_t>(l)][static_cast<std::size_t>(n)];
  return s;
}

double ExpansionTable::xi_sum(int l) const {
  double s = 0.0;
  for (int n = 1; n <= l; ++n) s += xi[static_cast<std::size_t>(l)][static_cast<std::size_t>(n)];
  return s;
}

double ExpansionTable::diffusion_coefficient(int l) const {
  return velocity[static_cast<std::size_t>(l + 1)] / beta + sigma_sum(l);
}

double ExpansionTable::naive_coefficient(int l) const {
  return (l + 1) * velocity[static_cast<std::size_t>(l + 1)] / beta;
}

ExpansionTable diffusion_coefficients(const EquilibriumSolver& solver, const EquilibriumChain& chain) {
  const int k = chain.order;
  ExpansionTable table;
  table.order = k;
  table.beta = chain.beta;
  table.velocity.resize(static_cast<std::size_t>(k) + 1);
  for (int j = 0; j <= k; ++j) table.velocity[static_cast<std::size_t>(j)] = velocity_coefficient(chain, j);
  table.sigma.assign(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k), 0.0));
  table.xi = table.sigma;

  const GibbsQuadrature& quad = solver.quadrature();
  std::vector<HermiteFourierField> lowered;
  std::vector<HermiteFourierField> raised_phi;
  for (const auto& f : chain.f) lowered.push_back(apply_lower(f));
  for (const auto& phi : chain.phi) raised_phi.push_back(apply_momentum(phi));

  for (int l = 1; l < k; ++l) {
    for (int n = 1; n <= l; ++n) {
      const auto& phi = chain.phi[static_cast<std::size_t>(l - n)];
      const auto& f = chain.f[static_cast<std::size_t>(n)];
      const auto& df = lowered[static_cast<std::size_t>(n)];
      const HermiteFourierField* sig[2] = {&phi, &f};
      const HermiteFourierField* x[2] = {&phi, &df};
      const double s = quad.integrate(sig, 1);
      const double xv = quad.integrate(x, 0) / chain.beta;
      // Exact Hermite pairings: p phi is exact in the truncated basis because f has no level N+1.
      const double s_exact = solver.pairing(raised_phi[static_cast<std::size_t>(l - n)], f);
      const double x_exact = solver.pairing(phi, df) / chain.beta;
      table.quadrature_mismatch =
          std::max({table.quadrature_mismatch, std::fabs(s - s_exact), std::fabs(xv - x_exact)});
      table.sigma[static_cast<std::size_t>(l)][static_cast<std::size_t>(n)] = s;
      table.xi[static_cast<std::size_t>(l)][static_cast<std::size_t>(n)] = xv;
    }
  }
  // Relative to the largest table entry: odd-order entries of a symmetric potential vanish.
  double scale = 0.0;
  for (int l = 1; l < k; ++l) {
    for (int n = 1; n <= l; ++n) {
      scale = std::max({scale, std::fabs(table.sigma[static_cast<std::size_t>(l)][static_cast<std::size_t>(n)]),
                        std::fabs(table.xi[static_cast<std::size_t>(l)][static_cast<std::size_t>(n)])});
    }
  }
  if (scale > 0.0) table.quadrature_mismatch /= scale;
  return table;
}

double partial_sum_u(const ExpansionTable& table, double force, int order) {
  if (order > table.order) throw ModelError("partial sum order exceeds the table order");
  double sum = 0.0;
  double power = 1.0;
  for (int l = 1; l <= order; ++l) {
    power *= force;
    sum += power * table.velocity[static_cast<std::size_t>(l)];
  }
  return sum;
}

double partial_sum_d(const ExpansionTable& table, double force, int order, SeriesMode mode) {
  if (order > table.order - 1) throw ModelError("D partial sum order must be below the table order");
  double sum = 0.0;
  double power = 1.0;
  for (int l = 0; l <= order; ++l) {
    sum += power * (mode == SeriesMode::Full ? table.diffusion_coefficient(l) : table.naive_coefficient(l));
    power *= force;
  }
  return sum;
}

double shift_identity_defect(const EquilibriumSolver& solver, const EquilibriumChain& chain, int kmax) {
  if (kmax > chain.order - 1) throw ModelError("shift identity needs phi up to kmax");
  std::vector<HermiteFourierField> lowered;
  for (int m = 0; m <= kmax; ++m) lowered.push_back(apply_lower(chain.phi[static_cast<std::size_t>(m)]));
  double worst = 0.0;
  for (int k = 0; k <= kmax; ++k) {
    const double ref = solver.pairing(lowered[0], chain.f[static_cast<std::size_t>(k)]);
    for (int m = 1; m <= k; ++m) {
      const double v = solver.pairing(lowered[static_cast<std::size_t>(m)], chain.f[static_cast<std::size_t>(k - m)]);
      worst = std::max(worst, std::fabs(v - ref));
    }
  }
  return worst;
}

std::optional<double> ratio_test_radius(const ExpansionTable& table) {
  double scale = 0.0;
  for (double v : table.velocity) scale = std::max(scale, std::fabs(v));
  std::vector<int> kept;
  for (int l = 1; l <= table.order; ++l) {
    if (std::fabs(table.velocity[static_cast<std::size_t>(l)]) > 1e-8 * scale) kept.push_back(l);
  }
  if (kept.size() < 2) return std::nullopt;
  const int a = kept[kept.size() - 2];
  const int b = kept.back();
  return std::pow(std::fabs(table.velocity[static_cast<std::size_t>(a)] / table.velocity[static_cast<std::size_t>(b)]),
                  1.0 / (b - a));
}

void write_expansion_csv(std::ostream& out, const ExpansionTable& table) {
  const auto old = out.precision(17);
  out << "ell,V_ell,D_ell_full,D_ell_naive,sum_Sigma,sum_Xi\n";
  for (int l = 0; l <= table.order; ++l) {
    out << l << ',' << table.velocity[static_cast<std::size_t>(l)];
    if (l < table.order) {
      out << ',' << table.diffusion_coefficient(l) << ',' << table.naive_coefficient(l) << ',' << table.sigma_sum(l)
          << ',' << table.xi_sum(l);
    } else {
      out << ",nan,nan,nan,nan";
    }
    out << '\n';
  }
  out.precision(old);
}

}  // namespace washboard
