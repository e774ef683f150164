#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "washboard/hermite_fourier.hpp"

using namespace washboard;
using std::numbers::pi;

namespace {

HermiteFourierField random_field(const HermiteFourierBasis& b, unsigned seed, int headroom) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  HermiteFourierField f(b);
  for (int n = 0; n <= b.n_hermite - headroom; ++n) {
    for (Eigen::Index r = 0; r < f.coefficients().rows(); ++r) f.coefficients()(r, n) = n01(rng);
  }
  return f;
}

}  // namespace

TEST_CASE("rescaled Hermite values") {
  CHECK(hermite_eval(0, 3.7, 2.0) == 1.0);
  CHECK(hermite_eval(1, 1.0, 4.0) == doctest::Approx(2.0));
  CHECK(hermite_eval(2, 0.0, 1.0) == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(hermite_eval(4, 0.7, 2.0) ==
        doctest::Approx([] {
          const double x = 0.7 * std::sqrt(2.0);
          return (x * x * x * x - 6 * x * x + 3) / std::sqrt(24.0);
        }()));
}

TEST_CASE("ladder operators on basis functions") {
  HermiteFourierBasis b{6, 2, 1.0, 1.0};
  const auto one = HermiteFourierField::constant(b, 1.0);
  auto up = apply_raise(one);
  CHECK(up.coefficients()(0, 1) == doctest::Approx(1.0));
  CHECK(apply_raise(HermiteFourierField(b)).coefficients().isZero());

  HermiteFourierBasis b4{6, 2, 1.0, 4.0};
  HermiteFourierField h1(b4);
  h1.coefficients()(0, 1) = 1.0;
  CHECK(apply_raise(h1).coefficients()(0, 2) == doctest::Approx(2.0 * std::sqrt(2.0)));

  HermiteFourierField g1(b);
  g1.coefficients()(0, 1) = 1.0;
  const auto down = apply_lower(g1);
  CHECK(down.coefficients()(0, 0) == doctest::Approx(1.0));
  CHECK(down.coefficients().col(1).isZero());
  CHECK(apply_lower(one).coefficients().isZero());
  const auto ll = apply_lower(apply_raise(HermiteFourierField::constant(b4, 1.0)));
  CHECK(ll.coefficients()(0, 0) == doctest::Approx(4.0));
}

TEST_CASE("momentum multiplication") {
  HermiteFourierBasis b{5, 1, 1.0, 1.0};
  auto p0 = apply_momentum(HermiteFourierField::constant(b, 1.0));
  CHECK(p0.coefficients()(0, 1) == doctest::Approx(1.0));
  HermiteFourierField h1(b);
  h1.coefficients()(0, 1) = 1.0;
  auto p1 = apply_momentum(h1);
  CHECK(p1.coefficients()(0, 0) == doctest::Approx(1.0));
  CHECK(p1.coefficients()(0, 2) == doctest::Approx(std::sqrt(2.0)));
  HermiteFourierBasis b4{5, 1, 1.0, 4.0};
  CHECK(apply_momentum(HermiteFourierField::constant(b4, 1.0)).coefficients()(0, 1) == doctest::Approx(0.5));
  // Pointwise: (p g)(q, p) = p g(q, p) for fields with headroom.
  const auto g = random_field(b, 3, 1);
  const auto pg = apply_momentum(g);
  for (double q : {0.1, 0.6}) {
    for (double p : {-1.3, 0.2, 2.0}) CHECK(pg.evaluate(q, p) == doctest::Approx(p * g.evaluate(q, p)));
  }
}

TEST_CASE("q derivative in packed form") {
  FourierVector c(3, 2 * pi);
  CHECK(apply_q_derivative(FourierVector::constant(3, 2 * pi, 1.0)).packed().isZero());
  // cos(q) = 2 Re(1/2 e^{iq}); sin(q) has eta_1 = -1/2.
  c.xi(1) = 0.5;
  auto dc = apply_q_derivative(c);
  for (double q : {0.0, 0.4, 2.0}) CHECK(dc.evaluate(q) == doctest::Approx(-std::sin(q)));
  FourierVector s(3, 2 * pi);
  s.eta(1) = -0.5;
  for (double q : {0.0, 0.4, 2.0}) CHECK(s.evaluate(q) == doctest::Approx(std::sin(q)));
  auto ds = apply_q_derivative(s);
  for (double q : {0.0, 0.4, 2.0}) CHECK(ds.evaluate(q) == doctest::Approx(std::cos(q)));
  const Eigen::MatrixXd d = derivative_matrix(3, 2 * pi);
  CHECK((d + d.transpose()).isZero());
  CHECK((d * s.packed() - ds.packed()).isZero());
}

TEST_CASE("Fourier vectors are periodic, real and paired correctly") {
  FourierVector v(4, 1.7);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n01;
  for (Eigen::Index i = 0; i < v.size(); ++i) v.packed()[i] = n01(rng);
  for (double q : {0.0, 0.3, 1.1}) CHECK(v.evaluate(q + 1.7) == doctest::Approx(v.evaluate(q)));
  CHECK(v.coefficient(-2) == std::conj(v.coefficient(2)));
  // (1/L) int v^2 dq by trapezoid.
  double s = 0.0;
  for (int i = 0; i < 64; ++i) s += std::pow(v.evaluate(1.7 * i / 64), 2) / 64;
  CHECK(fourier_pairing(v.packed(), v.packed()) == doctest::Approx(s));
}

TEST_CASE("multiplication matrix matches pointwise products") {
  const PeriodicPotential pot(1.0, {0.8, 0.3}, {0.2, -0.4}, 0.1);
  const FourierVector vp = potential_derivative_coefficients(pot, 6);
  for (double q : {0.05, 0.5, 0.77}) CHECK(vp.evaluate(q) == doctest::Approx(pot.derivative(q)));
  const FourierVector vv = potential_coefficients(pot, 6);
  for (double q : {0.05, 0.5}) CHECK(vv.evaluate(q) == doctest::Approx(pot.value(q)));
  // A band-limited factor keeps the product inside the truncation.
  FourierVector phi(6, 1.0);
  phi.xi(0) = 0.3;
  phi.xi(2) = -0.7;
  phi.eta(3) = 0.25;
  const Eigen::MatrixXd m = multiplication_matrix(vp, 6);
  const FourierVector prod(6, 1.0, m * phi.packed());
  for (double q : {0.05, 0.5, 0.77}) CHECK(prod.evaluate(q) == doctest::Approx(vp.evaluate(q) * phi.evaluate(q)));
}

TEST_CASE("Gibbs quadrature: normalization, orthonormality, moments") {
  HermiteFourierBasis b{8, 4, 1.0, 5.0};
  const auto pot = PeriodicPotential::cosine(1.0, 1.0);
  const GibbsQuadrature quad(pot, b);
  const auto one = HermiteFourierField::constant(b, 1.0);
  CHECK(quad.inner(one, one) == doctest::Approx(1.0).epsilon(1e-14));
  const GibbsQuadrature flat(PeriodicPotential::cosine(0.0, 1.0), b);
  HermiteFourierField h1(b), h2(b);
  h1.coefficients()(0, 1) = 1.0;
  h2.coefficients()(0, 2) = 1.0;
  CHECK(flat.inner(h1, h1) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::fabs(quad.inner(h1, h2)) < 1e-14);
  const HermiteFourierField* f1[1] = {&one};
  CHECK(quad.integrate(f1, 2) == doctest::Approx(1.0 / 5.0).epsilon(1e-12));
  CHECK(quad.mean(one) == doctest::Approx(1.0));
}

TEST_CASE("ladder operators are adjoint and satisfy the commutator") {
  HermiteFourierBasis b{10, 3, 1.0, 2.5};
  const PeriodicPotential pot(1.0, {1.0, 0.2}, {0.3, 0.0});
  const GibbsQuadrature quad(pot, b);
  const auto g = random_field(b, 1, 2);
  const auto h = random_field(b, 2, 2);
  CHECK(std::fabs(quad.inner(apply_raise(g), h) - quad.inner(g, apply_lower(h))) < 1e-10);
  const auto comm = apply_lower(apply_raise(g)) - apply_raise(apply_lower(g));
  CHECK((comm.coefficients() - b.beta * g.coefficients()).norm() < 1e-12);
  CHECK(quad.inner(g, h) == doctest::Approx(quad.inner(h, g)).epsilon(1e-13));
  CHECK(quad.inner(2.0 * g + h, h) == doctest::Approx(2 * quad.inner(g, h) + quad.inner(h, h)).epsilon(1e-12));
}

TEST_CASE("quadrature order guard") {
  HermiteFourierBasis b{10, 3, 1.0, 1.0};
  const auto pot = PeriodicPotential::cosine(1.0, 1.0);
  CHECK_THROWS_AS(GibbsQuadrature(pot, b, {21, 64}), ModelError);
  CHECK_THROWS_AS(GibbsQuadrature(pot, b, {30, 11}), ModelError);
  CHECK_NOTHROW(GibbsQuadrature(pot, b, {22, 12}));
}

TEST_CASE("point evaluation matches coefficient contraction") {
  HermiteFourierBasis b{7, 3, 2.0, 1.5};
  const auto g = random_field(b, 9, 0);
  for (double q : {0.2, 1.3}) {
    for (double p : {-0.8, 1.1}) {
      double s = 0.0;
      for (int n = 0; n <= 7; ++n) s += g.level_vector(n).evaluate(q) * hermite_eval(n, p, 1.5);
      CHECK(g.evaluate(q, p) == doctest::Approx(s));
    }
  }
}

TEST_CASE("field dump lists every coefficient") {
  HermiteFourierBasis b{2, 1, 1.0, 1.0};
  std::ostringstream os;
  write_field_csv(os, HermiteFourierField::constant(b, 2.5));
  const std::string s = os.str();
  CHECK(s.rfind("level,component,value\n", 0) == 0);
  CHECK(s.find("0,xi0,2.5") != std::string::npos);
  CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 3 * 3);
}

TEST_CASE("truncation validation") {
  const PeriodicPotential pot(1.0, {1.0, 0.5, 0.1}, {});
  CHECK_THROWS_AS((TruncationSpec{1, 4}.validate(pot)), ModelError);
  CHECK_THROWS_AS((TruncationSpec{8, 2}.validate(pot)), ModelError);
  CHECK_NOTHROW((TruncationSpec{8, 3}.validate(pot)));
}
