#pragma once

// Parameter sweeps over F or gamma producing CSV tables, plus the presets that
// regenerate the data behind the standard washboard figures.

#include <string>
#include <vector>

#include "washboard/csv.hpp"
#include "washboard/model.hpp"
#include "washboard/montecarlo.hpp"
#include "washboard/spectral_transport.hpp"

namespace washboard {

enum class SweepMode { Transport, Expand, Overdamped, MonteCarlo, EinsteinCheck };
enum class SweepVariable { Force, Gamma };

const char* mode_name(SweepMode mode);

struct SweepRange {
  SweepVariable variable = SweepVariable::Force;
  double min = 0.0;
  double max = 1.0;
  int count = 11;

  /// Evenly spaced, endpoints included; a single point sits at min.
  std::vector<double> points() const;
};

/// Extra columns divided by the free-particle and critical-force scales.
struct ScaleFlags {
  bool force = false;      // F / F_c, F_c = 3.36 gamma sqrt(V0)
  bool drift = false;      // U / U_L, U_L = F / gamma
  bool diffusion = false;  // D / D_L, D_L = 1 / (beta gamma)

  bool any() const { return force || drift || diffusion; }
};

struct SweepConfig {
  SweepMode mode = SweepMode::Transport;
  SweepRange range;
  ModelParams params;  // the swept field is overwritten point by point
  TransportOptions transport;
  TruncationSpec expansion_truncation{128, 32};
  int order = 9;                  // K, highest coefficient of the series
  std::vector<int> orders{1, 5, 9};  // partial sums reported in expand mode
  McConfig mc;                    // mc.params is ignored
  bool mc_compare = true;         // spectral U, D next to the Monte Carlo estimates
  int overdamped_fourier = 64;
  ScaleFlags scale;
  int threads = 0;  // 0: hardware concurrency

  /// Throws ModelError.
  void validate() const;
};

/// One row per point, in point order. A point that throws gets NaNs and its message in
/// the trailing `error` column; the sweep carries on.
CsvTable run_sweep(const SweepConfig& config);

/// Rows whose `error` cell is non-empty.
int count_errors(const CsvTable& table);

/// Step of the centered difference used for dU/dF.
double einstein_step(const SweepRange& range);

struct FigureSeries {
  std::string label;
  SweepConfig config;
};

/// Sweeps for figures 1..7; `points` per curve. Throws ModelError for other numbers.
std::vector<FigureSeries> figure_preset(int figure, int points = 21);

/// Runs every series and stacks the tables under a leading `series` column.
CsvTable run_figure(const std::vector<FigureSeries>& series);

}  // namespace washboard
