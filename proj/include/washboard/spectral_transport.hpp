#pragma once

// Drift and diffusion of the underdamped Langevin particle from the Hermite-Fourier
// hierarchy of the stationary Fokker-Planck equation and of the cell problem
//   -L phi = p - U,   L = p d_q + (F - V') d_p - gamma p d_p + gamma/beta d_p^2.
//
// Both hierarchies are block tridiagonal in the Hermite index and are eliminated by a
// downward matrix recursion closed at level N.

#include <Eigen/Dense>
#include <vector>

#include "washboard/hermite_fourier.hpp"
#include "washboard/model.hpp"

namespace washboard {

/// Blocks of the cell-problem hierarchy, scaled by sqrt(beta):
///   Q_n^+ Phi_{n-1} + Q_n Phi_n + Q_n^- Phi_{n+1} = (A at n = 1, B at n = 0, else 0)
/// with Q_n^+ = sqrt(n) D, Q_n = -gamma sqrt(beta) n I, Q_n^- = sqrt(n+1) (D + beta Mult(F - V')).
/// The density hierarchy uses P_m^+ = sqrt(m) (beta Mult(F - V') - D), P_m = Q_m, P_m^- = -sqrt(m+1) D.
///
/// With a momentum shift c the Hermite functions are centred on p = c instead of 0: F
/// becomes F - gamma c in Mult, Q_n gains + c sqrt(beta) D, P_m gains - c sqrt(beta) D, and
/// B becomes sqrt(beta) (U - c). c = 0 is the plain expansion.
struct BlockSet {
  int n_hermite = 0;
  int n_fourier = 0;
  double gamma = 0.0;
  double beta = 0.0;
  double period = 1.0;
  double shift = 0.0;              // c
  Eigen::MatrixXd derivative;      // D
  Eigen::MatrixXd force_coupling;  // beta Mult(F - V')

  int size() const { return 2 * n_fourier + 1; }
  Eigen::MatrixXd q_plus(int n) const;
  Eigen::MatrixXd q_diag(int n) const;
  Eigen::MatrixXd q_minus(int n) const;
  Eigen::MatrixXd p_plus(int m) const;
  Eigen::MatrixXd p_diag(int m) const;
  Eigen::MatrixXd p_minus(int m) const;
  Eigen::VectorXd a_vector() const;
  Eigen::VectorXd b_vector(double drift) const;
};

BlockSet build_blocks(const ModelParams& params, const TruncationSpec& trunc, double shift = 0.0);

struct DownwardRecursion {
  std::vector<Eigen::MatrixXd> s;  // s[n] = S_n, n = 0..N-1
  double min_rcond = 1.0;
};

/// S_n = -(Q_{n+1} + Q_{n+1}^- S_{n+1})^{-1} Q_{n+1}^+ from S_N (0 or I) down to S_0.
DownwardRecursion downward_recursion(const BlockSet& blocks, const TruncationSpec& trunc);

struct StationaryDensity {
  HermiteFourierField r;  // rho(q, p) = rho_hat(p - c) sum_n R_n(q) H_n(p - c)
  double drift = 0.0;
  double normalization_residual = 0.0;
  double min_rcond = 1.0;
  double shift = 0.0;  // c
};

StationaryDensity solve_stationary_fp(const ModelParams& params, const TruncationSpec& trunc,
                                      double shift = 0.0);

/// Phi is expanded in the same (shifted) basis as the density it was solved against.
struct CellSolution {
  HermiteFourierField phi;
  double solvability_residual = 0.0;  // |l . (B - transfer)| / (|B| + |transfer|)
  double null_gap = 0.0;              // sigma_{d-1} / sigma_0 of the level-0 matrix
  double drift_from_solvability = 0.0;
  double min_rcond = 1.0;
};

/// Throws SolverError when the solvability residual exceeds `solvability_tolerance`.
CellSolution solve_cell_problem(const ModelParams& params, const TruncationSpec& trunc,
                                const StationaryDensity& density, double solvability_tolerance = 1e-6);

/// Largest entry of (truncated hierarchy applied to Phi) - (U - p) projection, over all levels.
double cell_residual(const ModelParams& params, const TruncationSpec& trunc,
                     const HermiteFourierField& phi, double drift, double shift = 0.0);

struct DiffusionEstimate {
  double primary = 0.0;  // int (p - U) phi rho
  double ibp = 0.0;      // gamma/beta int (d_p phi)^2 rho
};

/// `with_ibp = false` skips the quadrature form. `ibp_nodes` overrides the number of
/// momentum nodes (0 = 10 per thermal velocity).
DiffusionEstimate compute_diffusion(const StationaryDensity& density, const CellSolution& cell,
                                    const ModelParams& params, bool with_ibp = true,
                                    int ibp_nodes = 0);

struct TransportOptions {
  TruncationSpec truncation;
  bool adaptive = false;       // double N (and M) until the tails fall below `tolerance`
  double tolerance = 1e-8;
  int max_hermite = 4096;
  int max_fourier = 256;
  bool compute_ibp = true;
  /// Centre the Hermite basis on the drift velocity, re-solving until they agree to a
  /// quarter of a thermal velocity. Around p = 0 the coefficients of a density drifting
  /// at U climb to ~exp(beta U^2 / 2) before decaying, and double rounding of those
  /// swamps D once U is a few thermal velocities. No effect when U is already small.
  bool comoving = true;
  /// Relative; the plain basis at large drift needs it this loose.
  double solvability_tolerance = 1e-6;
};

struct TransportResult {
  double drift = 0.0;
  double diffusion = 0.0;      // primary formula
  double diffusion_ibp = 0.0;  // integration-by-parts formula (NaN if skipped)
  TruncationSpec truncation;   // truncation actually used
  double momentum_shift = 0.0;  // centre of the Hermite basis of `density` and `phi`
  double hermite_tail_density = 0.0;  // |R_N| / max_n |R_n|
  double hermite_tail_phi = 0.0;      // |Phi_N| / max_n |Phi_n|
  double fourier_tail = 0.0;          // largest top-harmonic coefficient / largest coefficient
  double solvability_residual = 0.0;
  double drift_from_solvability = 0.0;
  double cell_residual = 0.0;
  double min_rcond = 1.0;
  int refinements = 0;
  HermiteFourierField density;
  HermiteFourierField phi;

  double hermite_tail() const { return std::max(hermite_tail_density, hermite_tail_phi); }
};

TransportResult solve_transport(const ModelParams& params, const TransportOptions& options);

/// |level N| / max_n |level n| in the Euclidean norm of the packed vectors.
double hermite_tail_ratio(const HermiteFourierField& field);
/// max_n |harmonic M of level n| / max |coefficient|.
double fourier_tail_ratio(const HermiteFourierField& field);

}  // namespace washboard
