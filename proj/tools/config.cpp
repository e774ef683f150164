#include "config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

namespace washboard::cli {

using nlohmann::json;

namespace {

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

template <class T>
void read(const json& obj, const char* key, T& into) {
  if (!obj.contains(key)) return;
  try {
    into = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

PeriodicPotential read_potential(const json& j, const PeriodicPotential& base) {
  allow_keys(j, "potential", {"period", "cos", "sin", "offset"});
  double period = base.period();
  std::vector<double> c(base.cos_coeffs().begin(), base.cos_coeffs().end());
  std::vector<double> s(base.sin_coeffs().begin(), base.sin_coeffs().end());
  double offset = base.offset();
  read(j, "period", period);
  read(j, "cos", c);
  read(j, "sin", s);
  read(j, "offset", offset);
  return PeriodicPotential(period, c, s, offset);
}

}  // namespace

SweepConfig default_config() {
  SweepConfig c;
  c.params = {1.0, 5.0, 0.0, PeriodicPotential::cosine(1.0, 1.0)};
  c.range = {SweepVariable::Force, 0.0, 2.0, 21};
  c.transport.truncation = {64, 16};
  c.transport.adaptive = true;
  return c;
}

SweepMode parse_mode(const std::string& name) {
  for (auto m : {SweepMode::Transport, SweepMode::Expand, SweepMode::Overdamped, SweepMode::MonteCarlo,
                 SweepMode::EinsteinCheck}) {
    if (name == mode_name(m)) return m;
  }
  if (name == "einstein_check") return SweepMode::EinsteinCheck;
  throw ConfigError("unknown mode '" + name + "'");
}

LoadedConfig parse_config(const std::string& json_text, LoadedConfig base) {
  json j;
  try {
    j = json::parse(json_text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  allow_keys(j, "config",
             {"mode", "sweep", "model", "truncation", "expansion", "mc", "overdamped", "scale", "threads", "out"});
  SweepConfig& c = base.sweep;

  if (j.contains("mode")) {
    std::string m;
    read(j, "mode", m);
    c.mode = parse_mode(m);
  }
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    allow_keys(s, "sweep", {"variable", "min", "max", "count"});
    if (s.contains("variable")) {
      std::string v;
      read(s, "variable", v);
      if (v == "F" || v == "force") {
        c.range.variable = SweepVariable::Force;
      } else if (v == "gamma") {
        c.range.variable = SweepVariable::Gamma;
      } else {
        throw ConfigError("sweep variable must be F or gamma, not '" + v + "'");
      }
    }
    read(s, "min", c.range.min);
    read(s, "max", c.range.max);
    read(s, "count", c.range.count);
  }
  if (j.contains("model")) {
    const auto& m = j["model"];
    allow_keys(m, "model", {"gamma", "beta", "force", "potential"});
    read(m, "gamma", c.params.gamma);
    read(m, "beta", c.params.beta);
    read(m, "force", c.params.force);
    if (m.contains("potential")) {
      try {
        c.params.potential = read_potential(m["potential"], c.params.potential);
      } catch (const ModelError& e) {
        throw ConfigError(e.what());
      }
    }
  }
  if (j.contains("truncation")) {
    const auto& t = j["truncation"];
    allow_keys(t, "truncation", {"n_hermite", "n_fourier", "adaptive", "tolerance", "max_hermite", "max_fourier", "ibp",
                                   "comoving"});
    read(t, "n_hermite", c.transport.truncation.n_hermite);
    read(t, "n_fourier", c.transport.truncation.n_fourier);
    read(t, "adaptive", c.transport.adaptive);
    read(t, "tolerance", c.transport.tolerance);
    read(t, "max_hermite", c.transport.max_hermite);
    read(t, "max_fourier", c.transport.max_fourier);
    read(t, "ibp", c.transport.compute_ibp);
    read(t, "comoving", c.transport.comoving);
  }
  if (j.contains("expansion")) {
    const auto& e = j["expansion"];
    allow_keys(e, "expansion", {"order", "orders", "n_hermite", "n_fourier"});
    read(e, "order", c.order);
    read(e, "orders", c.orders);
    read(e, "n_hermite", c.expansion_truncation.n_hermite);
    read(e, "n_fourier", c.expansion_truncation.n_fourier);
  }
  if (j.contains("mc")) {
    const auto& m = j["mc"];
    allow_keys(m, "mc", {"dt", "n_steps", "n_burnin", "n_traj", "seed", "threads", "compare"});
    read(m, "dt", c.mc.dt);
    read(m, "n_steps", c.mc.n_steps);
    read(m, "n_burnin", c.mc.n_burnin);
    read(m, "n_traj", c.mc.n_traj);
    read(m, "seed", c.mc.seed);
    read(m, "threads", c.mc.threads);
    read(m, "compare", c.mc_compare);
  }
  if (j.contains("overdamped")) {
    allow_keys(j["overdamped"], "overdamped", {"n_fourier"});
    read(j["overdamped"], "n_fourier", c.overdamped_fourier);
  }
  if (j.contains("scale")) {
    const auto& s = j["scale"];
    if (s.is_boolean()) {
      const bool all = s.get<bool>();
      c.scale = {all, all, all};
    } else {
      allow_keys(s, "scale", {"force", "drift", "diffusion"});
      read(s, "force", c.scale.force);
      read(s, "drift", c.scale.drift);
      read(s, "diffusion", c.scale.diffusion);
    }
  }
  read(j, "threads", c.threads);
  read(j, "out", base.out);
  return base;
}

LoadedConfig load_config(const std::string& path, LoadedConfig base) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

}  // namespace washboard::cli
