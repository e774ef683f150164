#include "washboard/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace washboard {

namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw ModelError(std::string("non-finite ") + what + " coefficient");
  }
}

}  // namespace

PeriodicPotential::PeriodicPotential(double period, std::vector<double> cos_coeffs,
                                     std::vector<double> sin_coeffs, double offset)
    : period_(period),
      wavenumber_(2.0 * std::numbers::pi / period),
      cos_(std::move(cos_coeffs)),
      sin_(std::move(sin_coeffs)),
      offset_(offset) {
  if (!(period > 0.0) || !std::isfinite(period)) throw ModelError("potential period must be > 0");
  if (!std::isfinite(offset)) throw ModelError("non-finite potential offset");
  require_finite(cos_, "cosine");
  require_finite(sin_, "sine");
  const std::size_t n = std::max(cos_.size(), sin_.size());
  cos_.resize(n, 0.0);
  sin_.resize(n, 0.0);
  while (!cos_.empty() && cos_.back() == 0.0 && sin_.back() == 0.0) {
    cos_.pop_back();
    sin_.pop_back();
  }
}

PeriodicPotential PeriodicPotential::cosine(double amplitude, double period) {
  return PeriodicPotential(period, {amplitude}, {0.0});
}

double PeriodicPotential::value(double q) const {
  double v = offset_;
  for (std::size_t k = 0; k < cos_.size(); ++k) {
    const double arg = static_cast<double>(k + 1) * wavenumber_ * q;
    v += cos_[k] * std::cos(arg) + sin_[k] * std::sin(arg);
  }
  return v;
}

double PeriodicPotential::derivative(double q) const {
  double d = 0.0;
  for (std::size_t k = 0; k < cos_.size(); ++k) {
    const double kw = static_cast<double>(k + 1) * wavenumber_;
    d += kw * (sin_[k] * std::cos(kw * q) - cos_[k] * std::sin(kw * q));
  }
  return d;
}

bool PeriodicPotential::is_symmetric() const {
  return std::all_of(sin_.begin(), sin_.end(), [](double s) { return s == 0.0; });
}

std::optional<double> PeriodicPotential::cosine_amplitude() const {
  if (cos_.size() == 1 && sin_[0] == 0.0) return cos_[0];
  return std::nullopt;
}

PeriodicPotential PeriodicPotential::reflected() const {
  std::vector<double> s(sin_.size());
  std::transform(sin_.begin(), sin_.end(), s.begin(), [](double v) { return -v; });
  return PeriodicPotential(period_, cos_, std::move(s), offset_);
}

void ModelParams::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ModelError("gamma must be > 0");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ModelError("beta must be > 0");
  if (!std::isfinite(force)) throw ModelError("force must be finite");
}

ModelParams ModelParams::reflected() const {
  ModelParams r = *this;
  r.force = -force;
  r.potential = potential.reflected();
  return r;
}

ModelParams ModelParams::with_force(double f) const {
  ModelParams r = *this;
  r.force = f;
  return r;
}

ModelParams ModelParams::with_gamma(double g) const {
  ModelParams r = *this;
  r.gamma = g;
  return r;
}

double evaluate_potential(const PeriodicPotential& potential, double q) { return potential.value(q); }

double effective_potential(const PeriodicPotential& potential, double force, double q) {
  return potential.value(q) - force * q;
}

ReferenceScales reference_scales(const ModelParams& params) {
  ReferenceScales scales;
  scales.free_drift = params.force / params.gamma;
  scales.free_diffusion = 1.0 / (params.beta * params.gamma);
  if (auto v0 = params.potential.cosine_amplitude()) {
    scales.critical_force = 3.36 * params.gamma * std::sqrt(std::fabs(*v0));
  }
  return scales;
}

}  // namespace washboard
