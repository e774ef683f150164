#pragma once

// JSON sweep configuration. Every key is optional; unknown keys are rejected so a typo
// does not silently fall back to a default.
//
//   {
//     "mode": "transport",               // expand | overdamped | mc | einstein-check
//     "sweep": {"variable": "F", "min": 0, "max": 2, "count": 21},   // variable F or gamma
//     "model": {"gamma": 1, "beta": 5, "force": 0,
//               "potential": {"period": 1, "cos": [1], "sin": [], "offset": 0}},
//     "truncation": {"n_hermite": 64, "n_fourier": 16, "adaptive": true, "tolerance": 1e-8,
//                    "max_hermite": 4096, "max_fourier": 256, "ibp": true,
//                    "comoving": true},
//     "expansion": {"order": 9, "orders": [1, 5, 9], "n_hermite": 128, "n_fourier": 32},
//     "mc": {"dt": 0.01, "n_steps": 100000, "n_burnin": -1, "n_traj": 500, "seed": 1,
//            "threads": 0, "compare": true},
//     "overdamped": {"n_fourier": 64},
//     "scale": {"force": false, "drift": false, "diffusion": false},   // or true for all
//     "threads": 0,
//     "out": "result.csv"
//   }

#include <stdexcept>
#include <string>

#include "washboard/sweep.hpp"

namespace washboard::cli {

/// Malformed or inconsistent configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// V0 = 1, beta = 5, L = 1, gamma = 1, forces 0..2.
SweepConfig default_config();

SweepMode parse_mode(const std::string& name);

struct LoadedConfig {
  SweepConfig sweep;
  std::string out;
};

/// Overlays the JSON text on `base`.
LoadedConfig parse_config(const std::string& json_text, LoadedConfig base);
LoadedConfig load_config(const std::string& path, LoadedConfig base);

}  // namespace washboard::cli
