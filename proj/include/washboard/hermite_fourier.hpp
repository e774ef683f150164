#pragma once

// Hermite (momentum) x Fourier (position) expansions.
//
// A field g(q, p) = sum_n phi_n(q) H_n(p) with H_n(p) = He_n(p sqrt(beta)) / sqrt(n!)
// stores each phi_n as a packed real Fourier vector
//   (xi_0, xi_1 .. xi_M, eta_1 .. eta_M),
// meaning phi_n(q) = sum_{|j|<=M} Phi^j e^{i w_j q}, Phi^j = xi_j + i eta_j, w_j = 2 pi j / L,
// with Phi^{-j} the complex conjugate so that phi_n is real.

#include <Eigen/Dense>
#include <complex>
#include <iosfwd>
#include <span>
#include <vector>

#include "washboard/gauss_hermite.hpp"
#include "washboard/model.hpp"

namespace washboard {

enum class Closure { Dirichlet, Neumann };

struct TruncationSpec {
  int n_hermite = 64;  // highest Hermite level N
  int n_fourier = 32;  // highest Fourier harmonic M
  Closure closure = Closure::Dirichlet;

  void validate(const PeriodicPotential& potential) const;
  int block_size() const { return 2 * n_fourier + 1; }
};

class FourierVector {
 public:
  FourierVector(int n_fourier, double period);
  FourierVector(int n_fourier, double period, Eigen::VectorXd packed);

  static FourierVector constant(int n_fourier, double period, double value);

  int modes() const { return modes_; }
  double period() const { return period_; }
  double wavenumber(int j) const;
  Eigen::Index size() const { return packed_.size(); }

  double xi(int j) const { return packed_[j]; }
  double& xi(int j) { return packed_[j]; }
  double eta(int j) const { return packed_[modes_ + j]; }
  double& eta(int j) { return packed_[modes_ + j]; }

  const Eigen::VectorXd& packed() const { return packed_; }
  Eigen::VectorXd& packed() { return packed_; }

  /// Phi^j for j in [-M, M].
  std::complex<double> coefficient(int j) const;
  double evaluate(double q) const;

 private:
  int modes_;
  double period_;
  Eigen::VectorXd packed_;
};

/// (1/L) int_0^L a(q) b(q) dq for packed vectors: 2 a.b - a_0 b_0.
double fourier_pairing(const Eigen::Ref<const Eigen::VectorXd>& a,
                       const Eigen::Ref<const Eigen::VectorXd>& b);

/// d/dq in packed form: xi_j -> -w_j eta_j, eta_j -> w_j xi_j.
FourierVector apply_q_derivative(const FourierVector& v);
Eigen::MatrixXd derivative_matrix(int n_fourier, double period);

/// Galerkin matrix of q -> g(q) phi(q) on modes |j| <= n_fourier (products beyond are dropped).
Eigen::MatrixXd multiplication_matrix(const FourierVector& g, int n_fourier);

FourierVector potential_coefficients(const PeriodicPotential& potential, int n_fourier);
FourierVector potential_derivative_coefficients(const PeriodicPotential& potential, int n_fourier);

struct HermiteFourierBasis {
  int n_hermite = 0;
  int n_fourier = 0;
  double period = 1.0;
  double beta = 1.0;

  bool operator==(const HermiteFourierBasis&) const = default;
};

class HermiteFourierField {
 public:
  explicit HermiteFourierField(const HermiteFourierBasis& basis);
  HermiteFourierField(const HermiteFourierBasis& basis, Eigen::MatrixXd coefficients);

  static HermiteFourierField constant(const HermiteFourierBasis& basis, double value);
  /// The function p.
  static HermiteFourierField momentum(const HermiteFourierBasis& basis);

  const HermiteFourierBasis& basis() const { return basis_; }
  int levels() const { return basis_.n_hermite + 1; }

  /// Column n holds the packed Fourier vector of level n.
  const Eigen::MatrixXd& coefficients() const { return coeffs_; }
  Eigen::MatrixXd& coefficients() { return coeffs_; }
  auto level(int n) { return coeffs_.col(n); }
  auto level(int n) const { return coeffs_.col(n); }
  FourierVector level_vector(int n) const;

  double evaluate(double q, double p) const;

  HermiteFourierField& operator+=(const HermiteFourierField& other);
  HermiteFourierField& operator-=(const HermiteFourierField& other);
  HermiteFourierField& operator*=(double s);

 private:
  HermiteFourierBasis basis_;
  Eigen::MatrixXd coeffs_;
};

HermiteFourierField operator+(HermiteFourierField a, const HermiteFourierField& b);
HermiteFourierField operator-(HermiteFourierField a, const HermiteFourierField& b);
HermiteFourierField operator*(double s, HermiteFourierField a);

/// H_n(p) = He_n(p sqrt(beta)) / sqrt(n!).
double hermite_eval(int n, double p, double beta);

/// a+ = -d/dp + beta p: level n -> sqrt(beta (n+1)) at level n+1; overflow past N is dropped.
HermiteFourierField apply_raise(const HermiteFourierField& field);
/// a- = d/dp: level n -> sqrt(beta n) at level n-1.
HermiteFourierField apply_lower(const HermiteFourierField& field);
/// Multiplication by p: beta^{-1/2} (sqrt(n+1) H_{n+1} + sqrt(n) H_{n-1}); overflow dropped.
HermiteFourierField apply_momentum(const HermiteFourierField& field);

/// Debug dump: one "level,component,value" row per coefficient (component xi<j>/eta<j>).
void write_field_csv(std::ostream& out, const HermiteFourierField& field);

struct QuadratureOrders {
  int n_p = 0;  // Gauss-Hermite nodes in p
  int n_q = 0;  // uniform nodes in q
};

/// n_p = 2N + 8, n_q = max(64, 8M).
QuadratureOrders default_quadrature(const HermiteFourierBasis& basis);

/// Quadrature for the Gibbs weight rho(q, p) = exp(-beta (p^2/2 + V(q))) / Z:
/// Gauss-Hermite in p times the periodic trapezoid rule in q. Z comes from the same rule,
/// so <1, 1> = 1 up to rounding.
class GibbsQuadrature {
 public:
  GibbsQuadrature(const PeriodicPotential& potential, const HermiteFourierBasis& basis,
                  QuadratureOrders orders);
  GibbsQuadrature(const PeriodicPotential& potential, const HermiteFourierBasis& basis);

  /// Plain Lebesgue measure dq on [0, L) times the caller's rule for rho_hat(p) (in the
  /// standard-normal variable x = p sqrt(beta)). Only n_q is guarded (n_q > 3M, enough for
  /// triple products in q).
  static GibbsQuadrature maxwellian(const HermiteFourierBasis& basis, NormalRule p_rule, int n_q);

  const HermiteFourierBasis& basis() const { return basis_; }
  QuadratureOrders orders() const { return orders_; }

  /// int prod_k fields[k] * p^momentum_power * rho dp dq.
  double integrate(std::span<const HermiteFourierField* const> fields, int momentum_power = 0) const;
  double inner(const HermiteFourierField& g, const HermiteFourierField& h) const;
  double mean(const HermiteFourierField& g) const;

  /// Row r with <psi, 1> = r . (level 0 of psi), computed with this rule's q-weights.
  const Eigen::RowVectorXd& mean_functional() const { return mean_functional_; }

  /// Position weights exp(-beta V(q_i)) dq / Z_q at the uniform nodes.
  const Eigen::VectorXd& position_weights() const { return q_weights_; }

 private:
  GibbsQuadrature(const HermiteFourierBasis& basis, NormalRule p_rule, int n_q);
  Eigen::MatrixXd position_values(const HermiteFourierField& field) const;

  HermiteFourierBasis basis_;
  QuadratureOrders orders_;
  std::vector<double> p_nodes_;      // standard-normal nodes x_k (p = x / sqrt(beta))
  std::vector<double> p_log_weights_;
  Eigen::MatrixXd fourier_synthesis_;  // n_q x (2M+1)
  Eigen::VectorXd q_weights_;
  Eigen::RowVectorXd mean_functional_;
};

double weighted_inner_product(const HermiteFourierField& g, const HermiteFourierField& h,
                              const PeriodicPotential& potential, QuadratureOrders orders);

/// Fourier synthesis matrix: row i evaluates a packed vector at q_i.
Eigen::MatrixXd fourier_synthesis(int n_fourier, double period, std::span<const double> q);

}  // namespace washboard
