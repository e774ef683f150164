// washboard: batch front-end for the transport, expansion, overdamped and Monte Carlo
// solvers. Writes CSV to --out (or stdout).
//
// Exit status: 0 success, 1 bad configuration or I/O, 2 numerical failure (the CSV still
// gets written, with the failing points marked in its error column).

#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "config.hpp"
#include "washboard/expansion.hpp"

using namespace washboard;

namespace {

struct Overrides {
  std::string config;
  std::string out;
  std::optional<int> n_hermite;
  std::optional<int> n_fourier;
  std::optional<int> order;
  std::optional<std::uint64_t> seed;
  bool scale = false;
  std::optional<int> points;
  std::optional<int> threads;
};

void apply(const Overrides& o, SweepConfig& c) {
  if (o.n_hermite) {
    c.transport.truncation.n_hermite = *o.n_hermite;
    c.expansion_truncation.n_hermite = *o.n_hermite;
  }
  if (o.n_fourier) {
    c.transport.truncation.n_fourier = *o.n_fourier;
    c.expansion_truncation.n_fourier = *o.n_fourier;
  }
  if (o.order) c.order = *o.order;
  if (o.seed) c.mc.seed = *o.seed;
  if (o.scale) c.scale = {true, true, true};
  if (o.points) c.range.count = *o.points;
  if (o.threads) {
    c.threads = *o.threads;
    c.mc.threads = *o.threads;
  }
}

void emit(const CsvTable& t, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << to_csv(t);
  } else {
    write_csv(t, path);
  }
}

int finish(const CsvTable& t, const std::string& path) {
  emit(t, path);
  const int bad = count_errors(t);
  if (bad > 0) {
    std::cerr << "washboard: " << bad << " of " << t.rows.size() << " points failed (see the error column)\n";
    return 2;
  }
  return 0;
}

int run_mode(SweepMode mode, const Overrides& o, const std::string& coefficients) {
  cli::LoadedConfig cfg{cli::default_config(), ""};
  if (!o.config.empty()) cfg = cli::load_config(o.config, cfg);
  cfg.sweep.mode = mode;
  apply(o, cfg.sweep);
  const std::string out = o.out.empty() ? cfg.out : o.out;
  try {
    cfg.sweep.validate();
  } catch (const ModelError& e) {
    throw cli::ConfigError(e.what());
  }
  if (mode == SweepMode::Expand && !coefficients.empty()) {
    const EquilibriumSolver solver(cfg.sweep.params, cfg.sweep.expansion_truncation);
    const auto table = diffusion_coefficients(solver, build_chain(solver, cfg.sweep.order));
    std::ofstream f(coefficients);
    if (!f) throw std::runtime_error("cannot open '" + coefficients + "' for writing");
    write_expansion_csv(f, table);
  }
  return finish(run_sweep(cfg.sweep), out);
}

int run_fig(int figure, const Overrides& o) {
  auto series = figure_preset(figure, o.points.value_or(21));
  for (auto& s : series) {
    Overrides keep = o;
    keep.points.reset();  // already applied per curve
    keep.scale = false;
    apply(keep, s.config);
  }
  return finish(run_figure(series), o.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drift and diffusion of an underdamped particle in a tilted periodic potential"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "washboard 1.0");

  Overrides o;
  std::string coefficients;
  int figure = 0;

  auto common = [&](CLI::App* sub, bool with_config) {
    if (with_config) sub->add_option("--config", o.config, "JSON sweep configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output CSV (default stdout)");
    sub->add_option("--n-hermite", o.n_hermite, "Hermite levels (starting value when adaptive)")->check(CLI::PositiveNumber);
    sub->add_option("--n-fourier", o.n_fourier, "Fourier harmonics (starting value when adaptive)")->check(CLI::PositiveNumber);
    sub->add_option("--order", o.order, "Highest series coefficient K")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "Monte Carlo seed");
    sub->add_flag("--scale", o.scale, "Add F/F_c, U/U_L and D/D_L columns");
    sub->add_option("--points", o.points, "Points per sweep")->check(CLI::PositiveNumber);
    sub->add_option("--threads", o.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  };

  std::vector<std::pair<CLI::App*, SweepMode>> modes;
  for (auto [name, mode, help] :
       {std::tuple{"transport", SweepMode::Transport, "Spectral U and D over a sweep"},
        std::tuple{"expand", SweepMode::Expand, "Power-series partial sums next to the spectral values"},
        std::tuple{"overdamped", SweepMode::Overdamped, "Large-friction limit next to the spectral values"},
        std::tuple{"mc", SweepMode::MonteCarlo, "Euler-Maruyama ensemble estimates"},
        std::tuple{"einstein-check", SweepMode::EinsteinCheck, "D against beta^-1 dU/dF by centered differences"}}) {
    auto* sub = app.add_subcommand(name, help);
    common(sub, true);
    if (mode == SweepMode::Expand) {
      sub->add_option("--coefficients", coefficients, "Also write the coefficient table (ell, V_ell, ...)");
    }
    modes.emplace_back(sub, mode);
  }
  auto* fig = app.add_subcommand("fig", "Preset sweeps behind figures 1-7");
  fig->add_option("figure", figure, "Figure number")->required()->check(CLI::Range(1, 7));
  common(fig, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (fig->parsed()) return run_fig(figure, o);
    for (auto [sub, mode] : modes) {
      if (sub->parsed()) return run_mode(mode, o, coefficients);
    }
  } catch (const cli::ConfigError& e) {
    std::cerr << "washboard: " << e.what() << '\n';
    return 1;
  } catch (const ModelError& e) {
    std::cerr << "washboard: " << e.what() << '\n';
    return 1;
  } catch (const SolverError& e) {
    std::cerr << "washboard: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "washboard: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
