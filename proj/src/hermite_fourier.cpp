#include "washboard/hermite_fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "washboard/kernels/kernels.hpp"

namespace washboard {

namespace {

using Complex = std::complex<double>;

std::vector<Complex> to_complex(const Eigen::Ref<const Eigen::VectorXd>& packed, int m) {
  std::vector<Complex> c(2 * m + 1);
  c[m] = Complex(packed[0], 0.0);
  for (int j = 1; j <= m; ++j) {
    c[m + j] = Complex(packed[j], packed[m + j]);
    c[m - j] = std::conj(c[m + j]);
  }
  return c;
}

void require_same_basis(const HermiteFourierField& a, const HermiteFourierField& b) {
  if (!(a.basis() == b.basis())) throw ModelError("fields live on different Hermite-Fourier bases");
}

}  // namespace

void TruncationSpec::validate(const PeriodicPotential& potential) const {
  if (n_hermite < 2) throw ModelError("n_hermite must be >= 2");
  if (n_fourier < 1) throw ModelError("n_fourier must be >= 1");
  if (n_fourier < potential.harmonics()) {
    throw ModelError("n_fourier (" + std::to_string(n_fourier) +
                     ") is below the number of potential harmonics (" +
                     std::to_string(potential.harmonics()) + ")");
  }
}

FourierVector::FourierVector(int n_fourier, double period)
    : modes_(n_fourier), period_(period), packed_(Eigen::VectorXd::Zero(2 * n_fourier + 1)) {
  if (n_fourier < 0) throw ModelError("negative Fourier truncation");
}

FourierVector::FourierVector(int n_fourier, double period, Eigen::VectorXd packed)
    : modes_(n_fourier), period_(period), packed_(std::move(packed)) {
  if (packed_.size() != 2 * n_fourier + 1) throw ModelError("packed Fourier vector has wrong length");
}

FourierVector FourierVector::constant(int n_fourier, double period, double value) {
  FourierVector v(n_fourier, period);
  v.xi(0) = value;
  return v;
}

double FourierVector::wavenumber(int j) const { return 2.0 * std::numbers::pi * j / period_; }

std::complex<double> FourierVector::coefficient(int j) const {
  if (j == 0) return {xi(0), 0.0};
  const int a = std::abs(j);
  if (a > modes_) return {0.0, 0.0};
  const Complex c(xi(a), eta(a));
  return j > 0 ? c : std::conj(c);
}

double FourierVector::evaluate(double q) const {
  double v = xi(0);
  for (int j = 1; j <= modes_; ++j) {
    const double arg = wavenumber(j) * q;
    v += 2.0 * (xi(j) * std::cos(arg) - eta(j) * std::sin(arg));
  }
  return v;
}

double fourier_pairing(const Eigen::Ref<const Eigen::VectorXd>& a,
                       const Eigen::Ref<const Eigen::VectorXd>& b) {
  return 2.0 * a.dot(b) - a[0] * b[0];
}

FourierVector apply_q_derivative(const FourierVector& v) {
  FourierVector d(v.modes(), v.period());
  for (int j = 1; j <= v.modes(); ++j) {
    const double w = v.wavenumber(j);
    d.xi(j) = -w * v.eta(j);
    d.eta(j) = w * v.xi(j);
  }
  return d;
}

Eigen::MatrixXd derivative_matrix(int n_fourier, double period) {
  const int d = 2 * n_fourier + 1;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (int j = 1; j <= n_fourier; ++j) {
    const double w = 2.0 * std::numbers::pi * j / period;
    m(j, n_fourier + j) = -w;
    m(n_fourier + j, j) = w;
  }
  return m;
}

Eigen::MatrixXd multiplication_matrix(const FourierVector& g, int n_fourier) {
  const int m = n_fourier;
  const int d = 2 * m + 1;
  const int kg = g.modes();
  const std::vector<Complex> gc = to_complex(g.packed(), kg);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(d);
  for (int col = 0; col < d; ++col) {
    unit.setZero();
    unit[col] = 1.0;
    const std::vector<Complex> phi = to_complex(unit, m);
    for (int j = 0; j <= m; ++j) {
      Complex acc(0.0, 0.0);
      for (int k = std::max(-kg, j - m); k <= std::min(kg, j + m); ++k) {
        acc += gc[kg + k] * phi[m + j - k];
      }
      out(j, col) = acc.real();
      if (j > 0) out(m + j, col) = acc.imag();
    }
  }
  return out;
}

FourierVector potential_coefficients(const PeriodicPotential& potential, int n_fourier) {
  if (n_fourier < potential.harmonics()) throw ModelError("Fourier truncation below potential harmonics");
  FourierVector v(n_fourier, potential.period());
  v.xi(0) = potential.offset();
  const auto c = potential.cos_coeffs();
  const auto s = potential.sin_coeffs();
  for (int k = 1; k <= potential.harmonics(); ++k) {
    v.xi(k) = 0.5 * c[k - 1];
    v.eta(k) = -0.5 * s[k - 1];
  }
  return v;
}

FourierVector potential_derivative_coefficients(const PeriodicPotential& potential, int n_fourier) {
  return apply_q_derivative(potential_coefficients(potential, n_fourier));
}

HermiteFourierField::HermiteFourierField(const HermiteFourierBasis& basis)
    : basis_(basis),
      coeffs_(Eigen::MatrixXd::Zero(2 * basis.n_fourier + 1, basis.n_hermite + 1)) {
  if (basis.n_hermite < 0 || basis.n_fourier < 0) throw ModelError("negative truncation");
  if (!(basis.period > 0.0) || !(basis.beta > 0.0)) throw ModelError("bad Hermite-Fourier basis");
}

HermiteFourierField::HermiteFourierField(const HermiteFourierBasis& basis, Eigen::MatrixXd coefficients)
    : HermiteFourierField(basis) {
  if (coefficients.rows() != coeffs_.rows() || coefficients.cols() != coeffs_.cols()) {
    throw ModelError("coefficient matrix does not match the basis");
  }
  coeffs_ = std::move(coefficients);
}

HermiteFourierField HermiteFourierField::constant(const HermiteFourierBasis& basis, double value) {
  HermiteFourierField f(basis);
  f.coeffs_(0, 0) = value;
  return f;
}

HermiteFourierField HermiteFourierField::momentum(const HermiteFourierBasis& basis) {
  HermiteFourierField f(basis);
  if (basis.n_hermite < 1) throw ModelError("momentum needs at least one Hermite level");
  f.coeffs_(0, 1) = 1.0 / std::sqrt(basis.beta);
  return f;
}

FourierVector HermiteFourierField::level_vector(int n) const {
  return FourierVector(basis_.n_fourier, basis_.period, coeffs_.col(n));
}

double HermiteFourierField::evaluate(double q, double p) const {
  const double x = p * std::sqrt(basis_.beta);
  double prev = 1.0;
  double cur = x;
  double v = level_vector(0).evaluate(q);
  for (int n = 1; n <= basis_.n_hermite; ++n) {
    v += cur * level_vector(n).evaluate(q);
    const double next = (x * cur - std::sqrt(static_cast<double>(n)) * prev) / std::sqrt(n + 1.0);
    prev = cur;
    cur = next;
  }
  return v;
}

HermiteFourierField& HermiteFourierField::operator+=(const HermiteFourierField& other) {
  require_same_basis(*this, other);
  coeffs_ += other.coeffs_;
  return *this;
}

HermiteFourierField& HermiteFourierField::operator-=(const HermiteFourierField& other) {
  require_same_basis(*this, other);
  coeffs_ -= other.coeffs_;
  return *this;
}

HermiteFourierField& HermiteFourierField::operator*=(double s) {
  coeffs_ *= s;
  return *this;
}

HermiteFourierField operator+(HermiteFourierField a, const HermiteFourierField& b) { return a += b; }
HermiteFourierField operator-(HermiteFourierField a, const HermiteFourierField& b) { return a -= b; }
HermiteFourierField operator*(double s, HermiteFourierField a) { return a *= s; }

double hermite_eval(int n, double p, double beta) {
  if (n < 0) throw ModelError("negative Hermite index");
  const double x = p * std::sqrt(beta);
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int k = 1; k < n; ++k) {
    const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) / std::sqrt(k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

HermiteFourierField apply_raise(const HermiteFourierField& field) {
  HermiteFourierField out(field.basis());
  const double beta = field.basis().beta;
  for (int n = 0; n < field.basis().n_hermite; ++n) {
    out.level(n + 1) = std::sqrt(beta * (n + 1)) * field.level(n);
  }
  return out;
}

HermiteFourierField apply_lower(const HermiteFourierField& field) {
  HermiteFourierField out(field.basis());
  const double beta = field.basis().beta;
  for (int n = 1; n <= field.basis().n_hermite; ++n) {
    out.level(n - 1) = std::sqrt(beta * n) * field.level(n);
  }
  return out;
}

HermiteFourierField apply_momentum(const HermiteFourierField& field) {
  HermiteFourierField out(field.basis());
  const int top = field.basis().n_hermite;
  const double s = 1.0 / std::sqrt(field.basis().beta);
  for (int n = 0; n <= top; ++n) {
    if (n < top) out.level(n + 1) += s * std::sqrt(n + 1.0) * field.level(n);
    if (n > 0) out.level(n - 1) += s * std::sqrt(static_cast<double>(n)) * field.level(n);
  }
  return out;
}

void write_field_csv(std::ostream& out, const HermiteFourierField& field) {
  const int m = field.basis().n_fourier;
  const auto old_precision = out.precision(17);
  out << "level,component,value\n";
  for (int n = 0; n < field.levels(); ++n) {
    for (int r = 0; r < 2 * m + 1; ++r) {
      out << n << ',' << (r <= m ? "xi" : "eta") << (r <= m ? r : r - m) << ','
          << field.coefficients()(r, n) << '\n';
    }
  }
  out.precision(old_precision);
}

QuadratureOrders default_quadrature(const HermiteFourierBasis& basis) {
  return {2 * basis.n_hermite + 8, std::max(64, 8 * basis.n_fourier)};
}

Eigen::MatrixXd fourier_synthesis(int n_fourier, double period, std::span<const double> q) {
  const Eigen::Index rows = static_cast<Eigen::Index>(q.size());
  Eigen::MatrixXd b(rows, 2 * n_fourier + 1);
  for (Eigen::Index i = 0; i < rows; ++i) {
    b(i, 0) = 1.0;
    for (int j = 1; j <= n_fourier; ++j) {
      const double arg = 2.0 * std::numbers::pi * j * q[static_cast<std::size_t>(i)] / period;
      b(i, j) = 2.0 * std::cos(arg);
      b(i, n_fourier + j) = -2.0 * std::sin(arg);
    }
  }
  return b;
}

GibbsQuadrature::GibbsQuadrature(const PeriodicPotential& potential, const HermiteFourierBasis& basis)
    : GibbsQuadrature(potential, basis, default_quadrature(basis)) {}

GibbsQuadrature::GibbsQuadrature(const HermiteFourierBasis& basis, NormalRule p_rule, int n_q)
    : basis_(basis),
      orders_{p_rule.size(), n_q},
      p_nodes_(std::move(p_rule.nodes)),
      p_log_weights_(std::move(p_rule.log_weights)) {
  std::vector<double> q(static_cast<std::size_t>(n_q));
  const double h = basis.period / n_q;
  for (int i = 0; i < n_q; ++i) q[static_cast<std::size_t>(i)] = i * h;
  fourier_synthesis_ = fourier_synthesis(basis.n_fourier, basis.period, q);
  q_weights_ = Eigen::VectorXd::Constant(n_q, h);
  mean_functional_ = q_weights_.transpose() * fourier_synthesis_;
}

namespace {

QuadratureOrders checked_orders(const PeriodicPotential& potential, const HermiteFourierBasis& basis,
                                QuadratureOrders orders) {
  if (orders.n_p < 2 * basis.n_hermite + 2) {
    throw ModelError("momentum quadrature order " + std::to_string(orders.n_p) +
                     " is below 2N+2 = " + std::to_string(2 * basis.n_hermite + 2));
  }
  if (orders.n_q < 4 * basis.n_fourier) {
    throw ModelError("position quadrature order " + std::to_string(orders.n_q) +
                     " is below 4M = " + std::to_string(4 * basis.n_fourier));
  }
  if (std::fabs(potential.period() - basis.period) > 1e-12 * basis.period) {
    throw ModelError("potential period does not match the basis period");
  }
  return orders;
}

}  // namespace

GibbsQuadrature::GibbsQuadrature(const PeriodicPotential& potential, const HermiteFourierBasis& basis,
                                 QuadratureOrders orders)
    : GibbsQuadrature(basis, gauss_hermite_rule(checked_orders(potential, basis, orders).n_p),
                      orders.n_q) {
  const double h = basis.period / orders.n_q;
  Eigen::VectorXd v(orders.n_q);
  for (int i = 0; i < orders.n_q; ++i) v[i] = potential.value(i * h);
  const double vmin = v.minCoeff();
  q_weights_ = (-basis.beta * (v.array() - vmin)).exp().matrix();
  q_weights_ /= q_weights_.sum();
  mean_functional_ = q_weights_.transpose() * fourier_synthesis_;
}

GibbsQuadrature GibbsQuadrature::maxwellian(const HermiteFourierBasis& basis, NormalRule p_rule,
                                            int n_q) {
  if (n_q <= 3 * basis.n_fourier) {
    throw ModelError("position quadrature order " + std::to_string(n_q) +
                     " is too small for triple products at M = " + std::to_string(basis.n_fourier));
  }
  return GibbsQuadrature(basis, std::move(p_rule), n_q);
}

Eigen::MatrixXd GibbsQuadrature::position_values(const HermiteFourierField& field) const {
  if (!(field.basis() == basis_)) throw ModelError("field basis does not match the quadrature basis");
  return fourier_synthesis_ * field.coefficients();  // n_q x (N+1)
}

double GibbsQuadrature::integrate(std::span<const HermiteFourierField* const> fields,
                                  int momentum_power) const {
  if (fields.empty()) throw ModelError("integrate needs at least one field");
  if (momentum_power < 0) throw ModelError("negative momentum power");
  const std::size_t np = p_nodes_.size();
  const int top = basis_.n_hermite;
  const double m = static_cast<double>(fields.size());
  // Split each Gauss weight evenly over the fields so no single table overflows.
  std::vector<double> seeds(np);
  for (std::size_t k = 0; k < np; ++k) {
    const double lw = p_log_weights_[k] / m;
    seeds[k] = lw < -700.0 ? 0.0 : std::exp(lw);
  }
  const auto& kern = kernels::active_kernels();
  std::vector<double> table(static_cast<std::size_t>(top + 1) * np);
  Eigen::ArrayXXd product = Eigen::ArrayXXd::Ones(orders_.n_q, static_cast<Eigen::Index>(np));
  for (const HermiteFourierField* f : fields) {
    kern.hermite_table(p_nodes_, seeds, top, table);
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> h(
        table.data(), top + 1, static_cast<Eigen::Index>(np));
    product *= (position_values(*f) * h).array();
  }
  if (momentum_power > 0) {
    const double scale = 1.0 / std::sqrt(basis_.beta);
    Eigen::RowVectorXd pw(static_cast<Eigen::Index>(np));
    for (std::size_t k = 0; k < np; ++k) {
      pw[static_cast<Eigen::Index>(k)] = std::pow(p_nodes_[k] * scale, momentum_power);
    }
    product.rowwise() *= pw.array();
  }
  return (q_weights_.transpose() * product.matrix()).sum();
}

double GibbsQuadrature::inner(const HermiteFourierField& g, const HermiteFourierField& h) const {
  const HermiteFourierField* f[2] = {&g, &h};
  return integrate(f);
}

double GibbsQuadrature::mean(const HermiteFourierField& g) const {
  return mean_functional_.dot(g.level(0));
}

double weighted_inner_product(const HermiteFourierField& g, const HermiteFourierField& h,
                              const PeriodicPotential& potential, QuadratureOrders orders) {
  return GibbsQuadrature(potential, g.basis(), orders).inner(g, h);
}

}  // namespace washboard
