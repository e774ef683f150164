// End-to-end acceptance run: one PASS/FAIL line per criterion, tolerances fixed here.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "washboard/expansion.hpp"
#include "washboard/montecarlo.hpp"
#include "washboard/overdamped.hpp"
#include "washboard/spectral_transport.hpp"
#include "washboard/sweep.hpp"

using namespace washboard;
using std::numbers::pi;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

ModelParams cosine(double gamma, double v0, double beta, double period, double force = 0.0) {
  return {gamma, beta, force, PeriodicPotential::cosine(v0, period)};
}

// The figure 1-2 parameter set: V0 = pi^2/16, beta V0 = 1.2, L = 2 pi.
ModelParams underdamped_set(double gamma, double force = 0.0) {
  const double v0 = pi * pi / 16.0;
  return cosine(gamma, v0, 1.2 / v0, 2.0 * pi, force);
}

// Chains are shared between criteria 3 and 5-9.
struct Expansion {
  EquilibriumSolver solver;
  EquilibriumChain chain;
  ExpansionTable table;
  explicit Expansion(double gamma)
      : solver(cosine(gamma, 1.0, 5.0, 1.0), {128, 32}), chain(build_chain(solver, 9)),
        table(diffusion_coefficients(solver, chain)) {}
};

const Expansion& expansion(double gamma) {
  static const Expansion g1(1.0);
  static const Expansion g50(50.0);
  return gamma == 1.0 ? g1 : g50;
}

TransportOptions converged() {
  TransportOptions o;
  o.truncation = {128, 32};
  o.adaptive = true;
  o.tolerance = 1e-10;
  return o;
}

Verdict free_particle() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (double g : {0.2, 1.0, 5.0}) {
    for (double b : {0.5, 1.0, 4.0}) {
      for (double f : {-1.0, 0.3, 2.0}) {
        TransportOptions o;
        o.truncation = {g < 1.0 ? 160 : 48, 2};
        const auto r = solve_transport(cosine(g, 0.0, b, 1.0, f), o);
        worst = std::max({worst, rel(r.drift, f / g), rel(r.diffusion, 1.0 / (b * g))});
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst <= 1e-10 && secs < 1.0, fmt("27 points, worst relative error %.1e, %.2f s", worst, secs)};
}

Verdict gibbs_state() {
  const auto p = cosine(1.0, 1.0, 5.0, 1.0);
  const auto rho = solve_stationary_fp(p, {48, 32});
  // Reference profile from a fine trapezoid rule, independent of the Fourier solve.
  double z = 0.0;
  for (int i = 0; i < 4096; ++i) z += std::exp(-5.0 * std::cos(2 * pi * i / 4096.0)) / 4096.0;
  double profile = 0.0;
  const auto r0 = rho.r.level_vector(0);
  for (int i = 0; i < 64; ++i) {
    const double q = i / 64.0;
    profile = std::max(profile, rel(r0.evaluate(q), std::exp(-5.0 * std::cos(2 * pi * q)) / z));
  }
  double upper = 0.0;
  for (int n = 1; n < rho.r.levels(); ++n) upper = std::max(upper, rho.r.level(n).norm() / rho.r.level(0).norm());
  return {profile <= 1e-8 && upper <= 1e-8 && std::fabs(rho.drift) <= 1e-10,
          fmt("level-0 profile error %.1e, levels >= 1 at %.1e, |U| = %.1e", profile, upper, std::fabs(rho.drift))};
}

Verdict einstein_origin() {
  double worst = 0.0;
  for (double g : {1.0, 50.0}) {
    const double d = solve_transport(cosine(g, 1.0, 5.0, 1.0), converged()).diffusion;
    worst = std::max(worst, rel(expansion(g).table.velocity[1] / 5.0, d));
  }
  return {worst <= 1e-6, fmt("|D(0) - V1/beta| / D(0) = %.1e (gamma 1 and 50)", worst)};
}

Verdict dual_diffusion() {
  double worst = 0.0, worst_g = 0.0, worst_s = 0.0;
  int largest_n = 0;
  for (double g : {0.1, 1.0}) {
    const double fc = *reference_scales(underdamped_set(g)).critical_force;
    for (double s : {0.0, 0.5, 1.0, 2.0}) {
      auto o = converged();
      o.tolerance = 1e-12;
      const auto p = underdamped_set(g, s * fc);
      const auto r = solve_transport(p, o);
      const double gap = std::fabs(r.diffusion - r.diffusion_ibp) / reference_scales(p).free_diffusion;
      if (gap > worst) {
        worst = gap;
        worst_g = g;
        worst_s = s;
      }
      largest_n = std::max(largest_n, r.truncation.n_hermite);
    }
  }
  return {worst <= 1e-6, fmt("max |D - D_ibp| / D_L = %.1e at gamma = %g, F = %g F_c; N up to %.0f", worst, worst_g,
                             worst_s, largest_n)};
}

Verdict expansion_identity() {
  const auto& t = expansion(1.0).table;
  double scale = 0.0, worst = 0.0;
  for (int l = 0; l <= 4; ++l) scale = std::max(scale, std::fabs(t.diffusion_coefficient(l)));
  for (int l = 1; l <= 4; ++l) {
    const double lhs = t.naive_coefficient(l) + t.xi_sum(l);
    worst = std::max(worst, std::fabs(lhs - t.diffusion_coefficient(l)) / scale);
  }
  return {worst <= 1e-6, fmt("l = 1..4, largest mismatch %.1e of the largest D_l", worst)};
}

Verdict symmetry_vanishing() {
  const auto& t = expansion(1.0).table;
  const double v1 = std::fabs(t.velocity[1]);
  const double even_v = std::max(std::fabs(t.velocity[2]), std::fabs(t.velocity[4])) / v1;
  double scale = 0.0, odd = 0.0;
  for (int l = 1; l < t.order; ++l) scale = std::max({scale, std::fabs(t.sigma_sum(l)), std::fabs(t.xi_sum(l))});
  for (int l = 1; l < t.order; l += 2) odd = std::max({odd, std::fabs(t.sigma_sum(l)), std::fabs(t.xi_sum(l))});
  odd /= scale;
  return {even_v <= 1e-8 && odd <= 1e-8, fmt("|V2|,|V4| at %.1e of |V1|; odd-l sums at %.1e of scale", even_v, odd)};
}

Verdict shift_identity() {
  const auto& e = expansion(1.0);
  const double defect = shift_identity_defect(e.solver, e.chain, 4);
  const double scaled = defect / std::fabs(e.chain.velocity[1]);
  return {defect <= 1e-7, fmt("max defect %.1e (%.1e relative to V1)", defect, scaled)};
}

Verdict drift_series() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& t = expansion(1.0).table;
  const auto radius = ratio_test_radius(t);
  if (!radius) return {false, "ratio test found no radius"};
  // Convergent range read as F <= R/2, where the geometric tail past order 9 is small.
  double worst9 = 0.0, depart1 = 0.0;
  for (int k = 1; k <= 10; ++k) {
    const double f = *radius * k / 20.0;
    const double u = solve_transport(cosine(1.0, 1.0, 5.0, 1.0, f), converged()).drift;
    worst9 = std::max(worst9, rel(partial_sum_u(t, f, 9), u));
    depart1 = std::max(depart1, rel(partial_sum_u(t, f, 1), u));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst9 <= 0.01 && depart1 >= 0.1 && secs < 60.0,
          fmt("R = %.3f; order 9 within %.2e on F <= R/2, order 1 off by %.0f%%, %.1f s", *radius, worst9,
              100.0 * depart1, secs)};
}

Verdict naive_gap() {
  // Same force axis for both frictions, inside the convergent range of the gamma = 1 series.
  const std::vector<double> forces{0.0, 0.2, 0.4, 0.6, 0.8};
  std::vector<double> gaps[2];
  for (int i = 0; i < 2; ++i) {
    const double g = i == 0 ? 1.0 : 50.0;
    for (double f : forces) {
      const double d = solve_transport(cosine(g, 1.0, 5.0, 1.0, f), converged()).diffusion;
      gaps[i].push_back(rel(partial_sum_d(expansion(g).table, f, 8, SeriesMode::NaiveEinstein), d));
    }
  }
  bool grows = true, smaller = true;
  for (std::size_t k = 1; k < forces.size(); ++k) {
    grows = grows && gaps[0][k] > gaps[0][k - 1] && gaps[1][k] > gaps[1][k - 1];
    smaller = smaller && gaps[1][k] < gaps[0][k];
  }
  const double origin = std::max(gaps[0][0], gaps[1][0]);
  return {grows && smaller && origin <= 1e-6,
          fmt("relative gap at F = 0.8: %.2e (gamma 1), %.2e (gamma 50); at F = 0: %.1e", gaps[0].back(),
              gaps[1].back(), origin)};
}

Verdict overdamped_limit() {
  TransportOptions o;
  o.truncation = {96, 32};
  double lo = 1.0, hi = 0.0;
  for (double f : {0.5, 1.0}) {
    const auto rep = check_overdamped_asymptotics(cosine(1.0, 1.0, 5.0, 1.0, f), {10.0, 20.0}, o);
    for (double r : {rep.drift_ratios[0], rep.diffusion_ratios[0]}) {
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  }
  return {lo >= 0.15 && hi <= 0.4, fmt("error ratios e(20)/e(10) in [%.3f, %.3f]", lo, hi)};
}

Verdict overdamped_oracles() {
  double worst = 0.0;
  for (double v0 : {0.5, 1.0}) {
    for (double beta : {1.0, 5.0}) {
      for (double f : {0.0, 0.5, 1.0, 2.0, 4.0}) {
        const auto v = PeriodicPotential::cosine(v0, 1.0);
        const double galerkin = solve_overdamped(v, beta, f).drift;
        const double quad = stratonovich_drift(v, beta, f);
        worst = std::max(worst, f == 0.0 ? std::fabs(galerkin - quad) : rel(quad, galerkin));
      }
    }
  }
  double lj = 0.0;
  for (double beta : {1.0, 5.0}) {
    const auto v = PeriodicPotential::cosine(1.0, 1.0);
    lj = std::max(lj, rel(solve_overdamped(v, beta, 0.0).diffusion, lifson_jackson_diffusion(v, beta)));
  }
  return {worst <= 1e-6 && lj <= 1e-8, fmt("quadrature vs Galerkin U_O %.1e; Lifson-Jackson %.1e", worst, lj)};
}

Verdict monte_carlo() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (double f : {0.5, 1.0, 2.0}) {
    const auto p = cosine(1.0, 1.0, 5.0, 1.0, f);
    const auto s = solve_transport(p, converged());
    const auto e = simulate(McConfig{p, 0.01, 100000, -1, 500, 2024});
    worst = std::max({worst, std::fabs(e.drift - s.drift) / e.stderr_drift,
                      std::fabs(e.diffusion - s.diffusion) / e.stderr_diffusion});
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst <= 4.0 && secs < 300.0, fmt("largest deviation %.2f standard errors, %.0f s", worst, secs)};
}

Verdict figure_presets() {
  const auto table = run_figure(figure_preset(1, 19));
  const int errors = count_errors(table);
  double tail = 0.0;
  bool saturates = true, peaks = true;
  std::string peak_at;
  for (const char* label : {"gamma=0.01", "gamma=0.1", "gamma=1"}) {
    double best = 0.0, where = 0.0;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      if (table.rows[i][0] != label) continue;
      tail = std::max(tail, table.number(i, "hermite_tail"));
      const double s = table.number(i, "F_over_Fc");
      if (s >= 1.5) saturates = saturates && std::fabs(table.number(i, "U_over_UL") - 1.0) <= 0.01;
      if (table.number(i, "D_over_DL") > best) {
        best = table.number(i, "D_over_DL");
        where = table.number(i, "F_over_Fc");
      }
    }
    // F_c = 3.36 gamma sqrt(V0) is a small-friction scale; at gamma = 1 it lies well above the
    // static threshold max V' and the peak sits lower, so only its existence is required there.
    const bool small = std::string(label) != "gamma=1";
    peaks = peaks && best > 1.0 && (!small || (where >= 0.7 && where <= 1.3));
    peak_at += fmt(" %.1f", where);
  }
  return {errors == 0 && tail < 1e-6 && saturates && peaks,
          fmt("%.0f failed points, worst tail %.1e, ", errors, tail) + "U/U_L within 1% of 1 past 1.5 F_c: " +
              (saturates ? "yes" : "no") + "; D/D_L peaks at F/F_c =" + peak_at};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"free-particle exactness", free_particle},
      {"equilibrium Gibbs state", gibbs_state},
      {"Einstein relation at F = 0", einstein_origin},
      {"primary and integration-by-parts D agree", dual_diffusion},
      {"expansion consistency identity", expansion_identity},
      {"parity zeros of the series", symmetry_vanishing},
      {"shift identity", shift_identity},
      {"order-9 drift series", drift_series},
      {"naive Einstein series gap", naive_gap},
      {"overdamped asymptotics", overdamped_limit},
      {"overdamped oracles", overdamped_oracles},
      {"Monte Carlo vs spectral", monte_carlo},
      {"figure 1-2 presets", figure_presets},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s %2zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed;
}
