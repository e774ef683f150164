#pragma once

// Euler-Maruyama ensembles of
//   dq = p dt,   dp = (F - V'(q) - gamma p) dt + sqrt(2 gamma / beta) dW
// with U and D estimated from the spread of endpoint displacements.

#include <cstdint>
#include <vector>

#include "washboard/model.hpp"

namespace washboard {

struct McConfig {
  ModelParams params;
  double dt = 0.01;
  long long n_steps = 100000;
  long long n_burnin = -1;  // negative: 2% of n_steps
  int n_traj = 500;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency

  long long burnin() const { return n_burnin < 0 ? n_steps / 50 : n_burnin; }
  void validate() const;
};

struct McEstimate {
  double drift = 0.0;
  double diffusion = 0.0;
  double stderr_drift = 0.0;
  double stderr_diffusion = 0.0;
  int n_traj = 0;
  bool target_met = true;  // only meaningful for estimate_with_error_target
};

/// Trajectory k draws q(0) ~ U[0, L), p(0) ~ N(0, 1/beta) and all its noise from its own
/// generator seeded from (seed, k), so results do not depend on scheduling.
McEstimate simulate(const McConfig& config);

/// Displacements q_k(T) - q_k(T0) for trajectories first .. first + count - 1.
std::vector<double> simulate_displacements(const McConfig& config, int first, int count);

/// Mean/variance estimators over displacements collected during `window` time units.
McEstimate estimate_from_displacements(const std::vector<double>& x, double window);

enum class McTarget { Drift, Diffusion };

/// Doubles the ensemble (starting from config.n_traj) until the relative standard error
/// of the chosen quantity is <= target, or max_traj is reached (target_met = false).
McEstimate estimate_with_error_target(const McConfig& config, double target, McTarget quantity = McTarget::Drift,
                                      int max_traj = 1 << 16);

}  // namespace washboard
