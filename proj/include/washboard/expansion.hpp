#pragma once

// Power series of U(F) and D(F) about F = 0. Every coefficient comes from Poisson
// equations of the equilibrium generator
//   L0 = A + gamma S,   A = p d_q - V' d_p,   S = -p d_p + beta^{-1} d_p^2,
// and its Gibbs-adjoint L0^ = -A + gamma S. Inner products are taken against
// rho_bar = exp(-beta (p^2/2 + V)) / Z.

#include <Eigen/Sparse>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "washboard/hermite_fourier.hpp"
#include "washboard/model.hpp"

namespace washboard {

/// Solves -L0 psi = rhs (or -L0^ psi = rhs) with <psi, 1> = 0 as one bordered sparse system
/// over all Hermite levels and Fourier modes. The force in `params` is ignored.
class EquilibriumSolver {
 public:
  EquilibriumSolver(const ModelParams& params, const TruncationSpec& trunc);

  struct Result {
    HermiteFourierField psi;
    double residual = 0.0;    // max |(-L0) psi - rhs| over coefficients
    double multiplier = 0.0;  // bordering unknown; the discrete solvability defect
  };

  Result solve(const HermiteFourierField& rhs, bool adjoint) const;

  const HermiteFourierBasis& basis() const { return basis_; }
  const GibbsQuadrature& quadrature() const { return quad_; }

  /// <g, h> by Parseval in p and the Gibbs-weighted trapezoid rule in q.
  double pairing(const HermiteFourierField& g, const HermiteFourierField& h) const;
  /// <g, 1>.
  double mean(const HermiteFourierField& g) const;

  /// Matrix of -L0 (or -L0^) on the truncated space, without the border.
  Eigen::SparseMatrix<double> generator(bool adjoint) const;

 private:
  struct Factor;

  HermiteFourierBasis basis_;
  double gamma_;
  Eigen::MatrixXd derivative_;
  Eigen::MatrixXd force_;  // Mult(V')
  GibbsQuadrature quad_;
  Eigen::MatrixXd synthesis_;  // q-node values of packed vectors
  std::shared_ptr<Factor> forward_;
  std::shared_ptr<Factor> adjoint_;
};

struct EquilibriumChain {
  int order = 0;                        // K
  std::vector<HermiteFourierField> f;   // f_0 = 1, .., f_K
  std::vector<HermiteFourierField> phi; // phi_0 .. phi_{K-1}
  std::vector<double> velocity;         // V_0 = 0, V_1 .. V_K (f-form)
  std::vector<double> velocity_phi;     // same from beta <phi_{j-1}, p>
  std::vector<double> solvability;      // <a- phi_{j-1}, 1> - V_j, j = 1 .. K-1 (index j)
  double max_residual = 0.0;
  double beta = 1.0;
};

/// f_j = (-L0^)^{-1} a+ f_{j-1}; phi_0 = (-L0)^{-1} p; phi_j = (-L0)^{-1} (a- phi_{j-1} - V_j)
/// shifted to <phi_j, 1> = -sum_{r=1}^j <f_r, phi_{j-r}>.
EquilibriumChain build_chain(const EquilibriumSolver& solver, int order = 9);

/// V_j (f-form). Throws if the two forms disagree by more than 1e-6 relative.
double velocity_coefficient(const EquilibriumChain& chain, int j);

struct ExpansionTable {
  int order = 0;
  double beta = 1.0;
  std::vector<double> velocity;           // V_0 .. V_K, V_0 = 0
  std::vector<std::vector<double>> sigma; // sigma[l][n], 1 <= n <= l <= K-1
  std::vector<std::vector<double>> xi;
  double quadrature_mismatch = 0.0;       // quadrature vs exact Hermite pairing, over the largest entry

  double sigma_sum(int l) const;
  double xi_sum(int l) const;
  /// D_l = V_{l+1}/beta + sum_n sigma_{nl}.
  double diffusion_coefficient(int l) const;
  /// (l+1) V_{l+1}/beta, the coefficient the extended Einstein relation would predict.
  double naive_coefficient(int l) const;
};

ExpansionTable diffusion_coefficients(const EquilibriumSolver& solver, const EquilibriumChain& chain);

enum class SeriesMode { Full, NaiveEinstein };

double partial_sum_u(const ExpansionTable& table, double force, int order);
double partial_sum_d(const ExpansionTable& table, double force, int order, SeriesMode mode);

/// max over 0 <= m <= k <= kmax of |<a- phi_0, f_k> - <a- phi_m, f_{k-m}>|.
double shift_identity_defect(const EquilibriumSolver& solver, const EquilibriumChain& chain, int kmax);

/// Ratio test on the last two non-negligible V_l: |V_a / V_b|^{1/(b-a)}. Empty if fewer
/// than two coefficients survive.
std::optional<double> ratio_test_radius(const ExpansionTable& table);

/// Columns ell, V_ell, D_ell_full, D_ell_naive, sum_Sigma, sum_Xi; rows ell = 0..K.
void write_expansion_csv(std::ostream& out, const ExpansionTable& table);

}  // namespace washboard
