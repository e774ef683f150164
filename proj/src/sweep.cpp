#include "washboard/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <thread>

#include "washboard/expansion.hpp"
#include "washboard/overdamped.hpp"

namespace washboard {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// What a mode contributes to a row: its own columns plus the drift and diffusion that
// the scaled columns refer to.
struct PointValues {
  std::vector<double> values;
  double drift = kNaN;
  double diffusion = kNaN;
};

using PointFn = std::function<PointValues(const ModelParams&)>;

ModelParams at_point(const SweepConfig& cfg, double x) {
  return cfg.range.variable == SweepVariable::Force ? cfg.params.with_force(x) : cfg.params.with_gamma(x);
}

TransportOptions without_ibp(TransportOptions o) {
  o.compute_ibp = false;
  return o;
}

std::vector<std::string> transport_columns() {
  return {"U", "D", "D_ibp", "n_hermite", "n_fourier", "hermite_tail", "fourier_tail", "solvability_residual",
          "cell_residual"};
}

PointValues transport_point(const ModelParams& p, const TransportOptions& o) {
  const auto r = solve_transport(p, o);
  return {{r.drift, r.diffusion, r.diffusion_ibp, static_cast<double>(r.truncation.n_hermite),
           static_cast<double>(r.truncation.n_fourier), r.hermite_tail(), r.fourier_tail, r.solvability_residual,
           r.cell_residual},
          r.drift,
          r.diffusion};
}

// The series for one friction value; shared by all points of a force sweep.
struct Series {
  ExpansionTable table;
  double radius = kNaN;
};

std::shared_ptr<const Series> build_series(const ModelParams& p, const SweepConfig& cfg) {
  const EquilibriumSolver solver(p, cfg.expansion_truncation);
  const auto chain = build_chain(solver, cfg.order);
  auto s = std::make_shared<Series>();
  s->table = diffusion_coefficients(solver, chain);
  if (auto r = ratio_test_radius(s->table)) s->radius = *r;
  return s;
}

std::vector<int> d_orders(const SweepConfig& cfg) {
  std::vector<int> out;
  for (int k : cfg.orders) {
    if (k <= cfg.order - 1) out.push_back(k);
  }
  return out;
}

std::vector<std::string> expand_columns(const SweepConfig& cfg) {
  std::vector<std::string> cols{"U", "D"};
  for (int k : cfg.orders) cols.push_back("U_order_" + std::to_string(k));
  for (int k : d_orders(cfg)) cols.push_back("D_full_order_" + std::to_string(k));
  for (int k : d_orders(cfg)) cols.push_back("D_naive_order_" + std::to_string(k));
  cols.push_back("ratio_radius");
  return cols;
}

PointValues expand_point(const ModelParams& p, const SweepConfig& cfg, const Series& s) {
  const auto r = solve_transport(p, without_ibp(cfg.transport));
  PointValues v{{r.drift, r.diffusion}, r.drift, r.diffusion};
  const double f = p.force;
  for (int k : cfg.orders) v.values.push_back(partial_sum_u(s.table, f, k));
  for (int k : d_orders(cfg)) v.values.push_back(partial_sum_d(s.table, f, k, SeriesMode::Full));
  for (int k : d_orders(cfg)) v.values.push_back(partial_sum_d(s.table, f, k, SeriesMode::NaiveEinstein));
  v.values.push_back(s.radius);
  return v;
}

std::vector<std::string> overdamped_columns() {
  return {"U", "D", "U_O_over_gamma", "D_O_over_gamma", "U_O", "D_O", "D_O_displayed", "U_O_quadrature"};
}

PointValues overdamped_point(const ModelParams& p, const SweepConfig& cfg) {
  const auto od = solve_overdamped(p.potential, p.beta, p.force, cfg.overdamped_fourier);
  const double strat = stratonovich_drift(p.potential, p.beta, p.force);
  const auto r = solve_transport(p, without_ibp(cfg.transport));
  return {{r.drift, r.diffusion, od.drift / p.gamma, od.diffusion / p.gamma, od.drift, od.diffusion,
           od.diffusion_displayed, strat},
          r.drift,
          r.diffusion};
}

std::vector<std::string> mc_columns() {
  return {"U_mc", "D_mc", "stderr_U", "stderr_D", "n_traj", "U", "D"};
}

PointValues mc_point(const ModelParams& p, const SweepConfig& cfg) {
  McConfig mc = cfg.mc;
  mc.params = p;
  const auto e = simulate(mc);
  double u = kNaN, d = kNaN;
  if (cfg.mc_compare) {
    const auto r = solve_transport(p, without_ibp(cfg.transport));
    u = r.drift;
    d = r.diffusion;
  }
  return {{e.drift, e.diffusion, e.stderr_drift, e.stderr_diffusion, static_cast<double>(e.n_traj), u, d},
          e.drift,
          e.diffusion};
}

std::vector<std::string> einstein_columns() { return {"U", "D", "dU_dF", "D_einstein", "gap"}; }

PointValues einstein_point(const ModelParams& p, const TransportOptions& o, double h) {
  const auto opts = without_ibp(o);
  const auto mid = solve_transport(p, opts);
  const double up = solve_transport(p.with_force(p.force + h), opts).drift;
  const double down = solve_transport(p.with_force(p.force - h), opts).drift;
  const double slope = (up - down) / (2.0 * h);
  const double einstein = slope / p.beta;
  return {{mid.drift, mid.diffusion, slope, einstein, mid.diffusion - einstein}, mid.drift, mid.diffusion};
}

// Evaluates fn at every index, `threads` at a time; results land by index.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, std::max(1, n));
  std::atomic<int> next{0};
  auto loop = [&]() {
    for (int i = next++; i < n; i = next++) fn(i);
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(loop);
  loop();
  for (auto& t : pool) t.join();
}

}  // namespace

const char* mode_name(SweepMode mode) {
  switch (mode) {
    case SweepMode::Transport:
      return "transport";
    case SweepMode::Expand:
      return "expand";
    case SweepMode::Overdamped:
      return "overdamped";
    case SweepMode::MonteCarlo:
      return "mc";
    case SweepMode::EinsteinCheck:
      return "einstein-check";
  }
  return "?";
}

std::vector<double> SweepRange::points() const {
  std::vector<double> x(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    x[static_cast<std::size_t>(i)] = count == 1 ? min : min + (max - min) * i / (count - 1);
  }
  if (count > 1) x.back() = max;
  return x;
}

double einstein_step(const SweepRange& range) {
  const double h = (range.max - range.min) / 200.0;
  // A single point has no range to take the step from.
  return h > 0.0 ? h : 1e-3 * std::max(1.0, std::fabs(range.min));
}

void SweepConfig::validate() const {
  params.validate();
  if (!std::isfinite(range.min) || !std::isfinite(range.max)) throw ModelError("sweep range must be finite");
  if (range.count < 1) throw ModelError("sweep needs at least one point");
  if (range.max < range.min) throw ModelError("sweep range is reversed");
  if (range.variable == SweepVariable::Gamma && !(range.min > 0.0)) {
    throw ModelError("a friction sweep must stay above zero");
  }
  if (scale.force && !params.potential.cosine_amplitude()) {
    throw ModelError("scaling by the critical force needs a single-cosine potential");
  }
  if (mode == SweepMode::EinsteinCheck && range.variable != SweepVariable::Force) {
    throw ModelError("einstein-check sweeps the force");
  }
  if (mode == SweepMode::Expand) {
    if (order < 2) throw ModelError("expansion order must be at least 2");
    for (int k : orders) {
      if (k < 0 || k > order) throw ModelError("partial-sum order outside 0..K");
    }
  }
  const auto pts = range.points();
  for (double x : {pts.front(), pts.back()}) at_point(*this, x).validate();
  if (mode == SweepMode::MonteCarlo) {
    McConfig c = mc;
    for (double x : {pts.front(), pts.back()}) {
      c.params = at_point(*this, x);
      c.validate();
    }
  }
}

int count_errors(const CsvTable& table) {
  const auto col = table.column("error");
  return static_cast<int>(
      std::count_if(table.rows.begin(), table.rows.end(), [&](const auto& r) { return !r[col].empty(); }));
}

CsvTable run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const auto xs = cfg.range.points();
  const int n = static_cast<int>(xs.size());

  std::vector<std::string> cols;
  PointFn fn;
  int threads = cfg.threads;
  std::shared_ptr<const Series> shared;
  std::exception_ptr series_error;
  switch (cfg.mode) {
    case SweepMode::Transport:
      cols = transport_columns();
      fn = [&](const ModelParams& p) { return transport_point(p, cfg.transport); };
      break;
    case SweepMode::Expand:
      cols = expand_columns(cfg);
      if (cfg.range.variable == SweepVariable::Force) {
        // The coefficients do not depend on F; a failure here fails every point alike.
        try {
          shared = build_series(cfg.params, cfg);
        } catch (const std::exception&) {
          series_error = std::current_exception();
        }
      }
      fn = [&](const ModelParams& p) {
        if (series_error) std::rethrow_exception(series_error);
        const auto s = shared ? shared : build_series(p, cfg);
        return expand_point(p, cfg, *s);
      };
      break;
    case SweepMode::Overdamped:
      cols = overdamped_columns();
      fn = [&](const ModelParams& p) { return overdamped_point(p, cfg); };
      break;
    case SweepMode::MonteCarlo:
      cols = mc_columns();
      fn = [&](const ModelParams& p) { return mc_point(p, cfg); };
      threads = 1;  // the ensemble already spreads over the cores
      break;
    case SweepMode::EinsteinCheck: {
      cols = einstein_columns();
      const double h = einstein_step(cfg.range);
      fn = [&cfg, h](const ModelParams& p) { return einstein_point(p, cfg.transport, h); };
      break;
    }
  }

  CsvTable table;
  table.header.push_back(cfg.range.variable == SweepVariable::Force ? "F" : "gamma");
  table.header.insert(table.header.end(), cols.begin(), cols.end());
  if (cfg.scale.force) table.header.push_back("F_over_Fc");
  if (cfg.scale.drift) table.header.push_back("U_over_UL");
  if (cfg.scale.diffusion) table.header.push_back("D_over_DL");
  table.header.push_back("error");
  table.rows.resize(static_cast<std::size_t>(n));

  parallel_for(n, threads, [&](int i) {
    const double x = xs[static_cast<std::size_t>(i)];
    const ModelParams p = at_point(cfg, x);
    PointValues v;
    std::string error;
    try {
      v = fn(p);
    } catch (const std::exception& e) {
      error = e.what();
      v = PointValues{};
    }
    v.values.resize(cols.size(), kNaN);
    auto& row = table.rows[static_cast<std::size_t>(i)];
    row.push_back(format_number(x));
    for (double y : v.values) row.push_back(format_number(y));
    const auto ref = reference_scales(p);
    if (cfg.scale.force) row.push_back(format_number(p.force / *ref.critical_force));
    if (cfg.scale.drift) row.push_back(format_number(v.drift / ref.free_drift));
    if (cfg.scale.diffusion) row.push_back(format_number(v.diffusion / ref.free_diffusion));
    row.push_back(error);
  });
  return table;
}

namespace {

ModelParams cosine_params(double gamma, double v0, double beta, double period) {
  return {gamma, beta, 0.0, PeriodicPotential::cosine(v0, period)};
}

SweepConfig force_sweep(SweepMode mode, const ModelParams& p, double fmin, double fmax, int points) {
  SweepConfig c;
  c.mode = mode;
  c.params = p;
  c.range = {SweepVariable::Force, fmin, fmax, points};
  c.transport.truncation = {64, 16};
  c.transport.adaptive = true;
  c.transport.tolerance = 1e-7;
  c.transport.compute_ibp = false;
  return c;
}

std::string gamma_label(double g) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "gamma=%g", g);
  return buf;
}

}  // namespace

std::vector<FigureSeries> figure_preset(int figure, int points) {
  if (points < 1) throw ModelError("a figure needs at least one point per curve");
  std::vector<FigureSeries> out;
  switch (figure) {
    case 1:
    case 2: {
      // Underdamped regime, forces scaled by F_c, drift and diffusion by their free values.
      const double v0 = std::numbers::pi * std::numbers::pi / 16.0;
      for (double g : {0.01, 0.1, 1.0}) {
        const auto p = cosine_params(g, v0, 1.2 / v0, 2.0 * std::numbers::pi);
        const double fc = *reference_scales(p).critical_force;
        auto c = force_sweep(SweepMode::Transport, p, 0.1 * fc, 2.0 * fc, points);
        c.scale = {true, true, true};
        out.push_back({gamma_label(g), c});
      }
      break;
    }
    case 3:
      for (double g : {0.5, 5.0, 10.0}) {
        const auto p = cosine_params(g, 1.0, 5.0, 1.0);
        const double fc = *reference_scales(p).critical_force;
        out.push_back({gamma_label(g), force_sweep(SweepMode::Transport, p, 0.0, 1.5 * fc, points)});
      }
      break;
    case 4:
    case 5:
    case 6:
      // Force windows reach a little past where the series stops converging.
      for (auto [g, fmax] : {std::pair{1.0, 2.0}, std::pair{50.0, 25.0}}) {
        const auto p = cosine_params(g, 1.0, 5.0, 1.0);
        const auto mode = figure == 6 ? SweepMode::EinsteinCheck : SweepMode::Expand;
        auto c = force_sweep(mode, p, 0.0, fmax, points);
        c.orders = figure == 4 ? std::vector<int>{1, 3, 5, 9} : std::vector<int>{0, 2, 4, 6, 8};
        out.push_back({gamma_label(g), c});
      }
      break;
    case 7:
      for (double g : {10.0, 20.0, 50.0}) {
        out.push_back({gamma_label(g), force_sweep(SweepMode::Overdamped, cosine_params(g, 1.0, 5.0, 1.0), 0.0, 15.0,
                                                   points)});
      }
      break;
    default:
      throw ModelError("no preset for figure " + std::to_string(figure) + " (1..7)");
  }
  return out;
}

CsvTable run_figure(const std::vector<FigureSeries>& series) {
  CsvTable all;
  for (const auto& s : series) {
    const auto t = run_sweep(s.config);
    if (all.header.empty()) {
      all.header.push_back("series");
      all.header.insert(all.header.end(), t.header.begin(), t.header.end());
    }
    for (const auto& r : t.rows) {
      std::vector<std::string> row{s.label};
      row.insert(row.end(), r.begin(), r.end());
      all.rows.push_back(std::move(row));
    }
  }
  return all;
}

}  // namespace washboard
