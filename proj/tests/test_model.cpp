#include <cmath>
#include <numbers>

#include "doctest.h"
#include "washboard/model.hpp"

using namespace washboard;
using std::numbers::pi;

TEST_CASE("cosine potential values") {
  const auto v = PeriodicPotential::cosine(1.0, 2 * pi);
  CHECK(evaluate_potential(v, 0.0) == doctest::Approx(1.0));
  CHECK(evaluate_potential(v, pi) == doctest::Approx(-1.0));
  const auto w = PeriodicPotential::cosine(pi * pi / 16, 2 * pi);
  CHECK(std::fabs(evaluate_potential(w, pi / 2)) < 1e-15);
}

TEST_CASE("effective potential adds the tilt") {
  const auto v = PeriodicPotential::cosine(1.0, 2 * pi);
  CHECK(effective_potential(v, 0.0, pi) == doctest::Approx(-1.0));
  CHECK(effective_potential(PeriodicPotential::cosine(0.0, 2 * pi), 2.0, 3.0) == doctest::Approx(-6.0));
  CHECK(effective_potential(v, 1.0, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("derivative is consistent with centered differences") {
  const PeriodicPotential v(1.3, {0.7, -0.2, 0.05}, {0.1, 0.3, 0.0}, 0.4);
  for (double h : {1e-3, 1e-4}) {
    double worst = 0.0;
    for (int i = 0; i < 64; ++i) {
      const double q = 1.3 * i / 64.0;
      const double fd = (v.value(q + h) - v.value(q - h)) / (2 * h);
      worst = std::max(worst, std::fabs(fd - v.derivative(q)));
    }
    CHECK(worst <= 200.0 * h * h);
  }
}

TEST_CASE("potential is periodic") {
  const PeriodicPotential v(2.0, {0.7, -0.2}, {0.1, 0.3});
  for (int i = 0; i < 64; ++i) {
    const double q = 2.0 * i / 64.0;
    CHECK(std::fabs(v.value(q + 2.0) - v.value(q)) < 1e-13);
  }
}

TEST_CASE("symmetry and reflection") {
  CHECK(PeriodicPotential::cosine(1.0, 1.0).is_symmetric());
  const PeriodicPotential v(1.0, {1.0}, {0.5});
  CHECK_FALSE(v.is_symmetric());
  for (double q : {0.1, 0.37, 0.8}) CHECK(v.reflected().value(q) == doctest::Approx(v.value(-q)));
  ModelParams p{0.5, 2.0, 0.3, v};
  const ModelParams back = p.reflected().reflected();
  CHECK(back.force == p.force);
  CHECK(back.potential.sin_coeffs()[0] == p.potential.sin_coeffs()[0]);
  CHECK(p.reflected().force == -0.3);
}

TEST_CASE("trailing zero harmonics are trimmed") {
  const PeriodicPotential v(1.0, {1.0, 0.0, 0.0}, {});
  CHECK(v.harmonics() == 1);
  CHECK(v.cosine_amplitude().value() == 1.0);
  CHECK(PeriodicPotential(1.0, {}, {}).harmonics() == 0);
}

TEST_CASE("invalid models are rejected") {
  CHECK_THROWS_AS(PeriodicPotential(0.0, {1.0}, {}), ModelError);
  CHECK_THROWS_AS(PeriodicPotential(1.0, {NAN}, {}), ModelError);
  ModelParams p;
  p.gamma = 0.0;
  CHECK_THROWS_AS(p.validate(), ModelError);
  p.gamma = 1.0;
  p.beta = -1.0;
  CHECK_THROWS_AS(p.validate(), ModelError);
}

TEST_CASE("reference scales") {
  ModelParams p{0.01, 1.0, 0.0, PeriodicPotential::cosine(pi * pi / 16, 2 * pi)};
  CHECK(reference_scales(p).critical_force.value() == doctest::Approx(3.36 * 0.01 * pi / 4));
  CHECK(reference_scales(p).critical_force.value() == doctest::Approx(0.0264).epsilon(0.01));
  ModelParams q{1.0, 1.0, 0.0, PeriodicPotential::cosine(1.0, 1.0)};
  CHECK(reference_scales(q).free_diffusion == 1.0);
  ModelParams r{2.0, 1.0, 4.0, PeriodicPotential::cosine(1.0, 1.0)};
  CHECK(reference_scales(r).free_drift == 2.0);
  ModelParams s{1.0, 1.0, 0.0, PeriodicPotential(1.0, {1.0, 0.5}, {})};
  CHECK_FALSE(reference_scales(s).critical_force.has_value());
}
