#include "washboard/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <thread>

#include "washboard/kernels/kernels.hpp"

namespace washboard {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 trajectory_engine(std::uint64_t seed, int k) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(k)));
}

constexpr int kLanes = 64;  // trajectories advanced together by the step kernel

// Runs trajectories [first, first + count) and writes their displacements into out.
void run_batch(const McConfig& cfg, int first, int count, double* out) {
  const auto& pot = cfg.params.potential;
  const double period = pot.period();
  const auto cos_c = pot.cos_coeffs();
  const auto sin_c = pot.sin_coeffs();
  kernels::LangevinStep step{cfg.dt,
                             cfg.params.force,
                             cfg.params.gamma,
                             std::sqrt(2.0 * cfg.params.gamma * cfg.dt / cfg.params.beta),
                             2.0 * std::numbers::pi / period,
                             std::span<const double>(cos_c.data(), cos_c.size()),
                             std::span<const double>(sin_c.data(), sin_c.size())};
  const auto& kern = kernels::active_kernels();

  std::vector<std::mt19937_64> engines;
  std::vector<double> q(static_cast<std::size_t>(count)), p(q.size()), xi(q.size()), start(q.size()),
      cells(q.size(), 0.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, period);
  for (int i = 0; i < count; ++i) {
    engines.push_back(trajectory_engine(cfg.seed, first + i));
    q[static_cast<std::size_t>(i)] = uniform(engines.back());
    p[static_cast<std::size_t>(i)] = normal(engines.back()) / std::sqrt(cfg.params.beta);
  }

  // Positions are folded back into [0, L) every so often, with the number of periods kept
  // separately, so the trigonometric arguments stay small on long runs.
  auto fold = [&]() {
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (!std::isfinite(q[i]) || !std::isfinite(p[i])) {
        throw SolverError("Monte Carlo trajectory " + std::to_string(first + static_cast<int>(i)) +
                          " diverged; reduce dt");
      }
      const double c = std::floor(q[i] / period);
      q[i] -= c * period;
      cells[i] += c;
    }
  };
  const long long burn = cfg.burnin();
  for (long long s = 0; s < cfg.n_steps; ++s) {
    if (s == burn) {
      fold();
      for (std::size_t i = 0; i < q.size(); ++i) start[i] = q[i] + cells[i] * period;
    }
    for (std::size_t i = 0; i < q.size(); ++i) xi[i] = normal(engines[i]);
    kern.euler_maruyama(q, p, xi, step);
    if ((s & 63) == 63) fold();
  }
  fold();
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = (q[i] + cells[i] * period) - start[i];
}

}  // namespace

void McConfig::validate() const {
  params.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ModelError("dt must be > 0");
  if (dt * params.gamma >= 0.5) throw ModelError("dt * gamma must stay below 0.5 for a stable scheme");
  if (n_steps <= 0) throw ModelError("n_steps must be > 0");
  if (burnin() >= n_steps) throw ModelError("burn-in must be shorter than the run");
  if (n_traj < 1) throw ModelError("need at least one trajectory");
}

std::vector<double> simulate_displacements(const McConfig& config, int first, int count) {
  config.validate();
  std::vector<double> out(static_cast<std::size_t>(count));
  const int batches = (count + kLanes - 1) / kLanes;
  int workers = config.threads > 0 ? config.threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, std::max(1, batches));

  auto work = [&](int w, std::exception_ptr& err) {
    try {
      for (int b = w; b < batches; b += workers) {
        const int lo = b * kLanes;
        run_batch(config, first + lo, std::min(kLanes, count - lo), out.data() + lo);
      }
    } catch (...) {
      err = std::current_exception();
    }
  };
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work, w, std::ref(errors[static_cast<std::size_t>(w)]));
  work(0, errors[0]);
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

McEstimate estimate_from_displacements(const std::vector<double>& x, double window) {
  McEstimate est;
  const double n = static_cast<double>(x.size());
  est.n_traj = static_cast<int>(x.size());
  if (x.empty()) return est;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  est.drift = mean / window;
  if (x.size() < 2) return est;
  const double var = m2 / (n - 1.0);
  m4 /= n;
  est.diffusion = var / (2.0 * window);
  est.stderr_drift = std::sqrt(var / n) / window;
  // Standard error of the sample variance from the fourth central moment.
  const double var_of_var = std::max(0.0, (m4 - var * var * (n - 3.0) / (n - 1.0)) / n);
  est.stderr_diffusion = std::sqrt(var_of_var) / (2.0 * window);
  return est;
}

McEstimate simulate(const McConfig& config) {
  const auto x = simulate_displacements(config, 0, config.n_traj);
  return estimate_from_displacements(x, (config.n_steps - config.burnin()) * config.dt);
}

McEstimate estimate_with_error_target(const McConfig& config, double target, McTarget quantity, int max_traj) {
  if (!(target > 0.0 && target < 1.0)) throw ModelError("relative error target must lie in (0, 1)");
  const double window = (config.n_steps - config.burnin()) * config.dt;
  std::vector<double> x = simulate_displacements(config, 0, config.n_traj);
  for (;;) {
    McEstimate est = estimate_from_displacements(x, window);
    const double rel = quantity == McTarget::Drift ? est.stderr_drift / std::fabs(est.drift)
                                                   : est.stderr_diffusion / std::fabs(est.diffusion);
    if (rel <= target) return est;
    const int have = static_cast<int>(x.size());
    if (have >= max_traj) {
      est.target_met = false;
      return est;
    }
    // Trajectory k is the same whichever batch it lands in, so growing the ensemble
    // only needs the new ones.
    const int more = std::min(have, max_traj - have);
    const auto extra = simulate_displacements(config, have, more);
    x.insert(x.end(), extra.begin(), extra.end());
  }
}

}  // namespace washboard
