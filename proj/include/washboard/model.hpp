#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace washboard {

/// Raised for malformed problem definitions (bad periods, frictions, truncations).
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure cannot produce a trustworthy answer.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Periodic potential V(q) = offset + sum_k c_k cos(k w q) + s_k sin(k w q), w = 2 pi / L.
///
/// Trailing zero harmonics are trimmed so harmonics() is the highest harmonic that
/// actually couples Fourier modes.
class PeriodicPotential {
 public:
  PeriodicPotential(double period, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs,
                    double offset = 0.0);

  /// V0 cos(2 pi q / L).
  static PeriodicPotential cosine(double amplitude, double period);

  double period() const { return period_; }
  double wavenumber() const { return wavenumber_; }
  int harmonics() const { return static_cast<int>(cos_.size()); }
  std::span<const double> cos_coeffs() const { return cos_; }
  std::span<const double> sin_coeffs() const { return sin_; }
  double offset() const { return offset_; }

  double value(double q) const;
  double derivative(double q) const;

  /// V(q) = V(-q), i.e. no sine harmonics.
  bool is_symmetric() const;

  /// V0 when the potential is a single cosine harmonic (offset ignored).
  std::optional<double> cosine_amplitude() const;

  /// q -> -q mirror image (sine harmonics change sign).
  PeriodicPotential reflected() const;

 private:
  double period_;
  double wavenumber_;
  std::vector<double> cos_;
  std::vector<double> sin_;
  double offset_;
};

struct ModelParams {
  double gamma = 1.0;
  double beta = 1.0;
  double force = 0.0;
  PeriodicPotential potential = PeriodicPotential::cosine(0.0, 1.0);

  void validate() const;

  /// Image under (q, p, F) -> (-q, -p, -F).
  ModelParams reflected() const;
  ModelParams with_force(double f) const;
  ModelParams with_gamma(double g) const;
};

struct ReferenceScales {
  /// 3.36 gamma sqrt(V0); only defined for a single-cosine potential.
  std::optional<double> critical_force;
  double free_drift = 0.0;      // F / gamma
  double free_diffusion = 0.0;  // 1 / (beta gamma)
};

double evaluate_potential(const PeriodicPotential& potential, double q);

/// V(q) - F q.
double effective_potential(const PeriodicPotential& potential, double force, double q);

ReferenceScales reference_scales(const ModelParams& params);

}  // namespace washboard
