#pragma once

// Large-friction limit. With time measured in units of gamma the position obeys
//   dq = (F - V'(q)) ds + sqrt(2/beta) dW,   L_O = (F - V') d_q + beta^{-1} d_q^2,
// and the underdamped coefficients behave like U ~ U_O / gamma, D ~ D_O / gamma.

#include <vector>

#include "washboard/hermite_fourier.hpp"
#include "washboard/model.hpp"
#include "washboard/spectral_transport.hpp"

namespace washboard {

struct OverdampedResult {
  double drift = 0.0;              // U_O = int (F - V') rho_O dq
  double diffusion = 0.0;          // D_O = beta^{-1} int (1 + phi_O')^2 rho_O dq
  double diffusion_displayed = 0.0; // beta^{-1} int (1 + phi_O') rho_O dq; equals D_O only at F = 0
  FourierVector density{1, 1.0};   // rho_O, int_0^L rho_O = 1
  FourierVector corrector{1, 1.0}; // phi_O, mean zero
  double stationary_residual = 0.0;
  double cell_residual = 0.0;
};

/// Fourier-Galerkin solution of L_O* rho_O = 0 and -L_O phi_O = F - V' - U_O.
OverdampedResult solve_overdamped(const PeriodicPotential& potential, double beta, double force,
                                  int n_fourier = 64);

/// Double-quadrature closed form for the overdamped drift:
///   U_O = beta^{-1} L (1 - e^{-beta L F}) / int_0^L dq int_0^L dy e^{beta [W(q) - W(q - y)]},
/// W(q) = V(q) - F q. Trapezoid in q, Gauss-Legendre panels in y, exponents shifted by their max.
double stratonovich_drift(const PeriodicPotential& potential, double beta, double force,
                          int q_nodes = 512);

/// beta^{-1} L^2 / (int e^{beta V} int e^{-beta V}), the zero-tilt overdamped diffusivity.
double lifson_jackson_diffusion(const PeriodicPotential& potential, double beta, int nodes = 1024);

struct AsymptoticsRow {
  double gamma = 0.0;
  double scaled_drift = 0.0;      // gamma U
  double scaled_diffusion = 0.0;  // gamma D
  double drift_error = 0.0;       // |gamma U - U_O|
  double diffusion_error = 0.0;   // |gamma D - D_O|
};

struct AsymptoticsReport {
  OverdampedResult overdamped;
  std::vector<AsymptoticsRow> rows;
  /// error(gamma_{i+1}) / error(gamma_i); about (gamma_i / gamma_{i+1})^2 in the asymptotic regime.
  std::vector<double> drift_ratios;
  std::vector<double> diffusion_ratios;
};

/// Spectral U and D at each gamma (params.gamma is overridden) against the overdamped limit.
AsymptoticsReport check_overdamped_asymptotics(const ModelParams& params, const std::vector<double>& gammas,
                                               const TransportOptions& options);

}  // namespace washboard
