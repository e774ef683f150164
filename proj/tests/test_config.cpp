#include "config.hpp"
#include "doctest.h"

using namespace washboard;
using namespace washboard::cli;

namespace {

LoadedConfig base() { return {default_config(), ""}; }

}  // namespace

TEST_CASE("empty config keeps the defaults") {
  const auto c = parse_config("{}", base());
  CHECK(c.sweep.params.gamma == 1.0);
  CHECK(c.sweep.params.beta == 5.0);
  CHECK(c.sweep.range.count == 21);
  CHECK(c.out.empty());
}

TEST_CASE("full config") {
  const auto c = parse_config(R"({
    // comments are allowed
    "mode": "einstein-check",
    "sweep": {"variable": "gamma", "min": 1, "max": 10, "count": 4},
    "model": {"beta": 2, "force": 0.5, "potential": {"period": 6.283185307179586, "cos": [0.5, 0.1]}},
    "truncation": {"n_hermite": 96, "adaptive": false},
    "expansion": {"order": 5, "orders": [1, 3]},
    "mc": {"seed": 9, "n_traj": 10},
    "scale": true,
    "out": "x.csv"
  })",
                              base());
  CHECK(c.sweep.mode == SweepMode::EinsteinCheck);
  CHECK(c.sweep.range.variable == SweepVariable::Gamma);
  CHECK(c.sweep.range.max == 10.0);
  CHECK(c.sweep.params.force == 0.5);
  CHECK(c.sweep.params.potential.cos_coeffs().size() == 2);
  CHECK(c.sweep.transport.truncation.n_hermite == 96);
  CHECK_FALSE(c.sweep.transport.adaptive);
  CHECK(c.sweep.orders == std::vector<int>{1, 3});
  CHECK(c.sweep.mc.seed == 9);
  CHECK(c.sweep.scale.force);
  CHECK(c.sweep.scale.diffusion);
  CHECK(c.out == "x.csv");
}

TEST_CASE("scale object") {
  const auto c = parse_config(R"({"scale": {"drift": true}})", base());
  CHECK_FALSE(c.sweep.scale.force);
  CHECK(c.sweep.scale.drift);
}

TEST_CASE("bad configs") {
  CHECK_THROWS_AS(parse_config(R"({"gama": 1})", base()), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"model": {"gama": 1}})", base()), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"mode": "fast"})", base()), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"sweep": {"variable": "beta"}})", base()), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"model": {"gamma": "one"}})", base()), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"model": {"potential": {"period": -1}}})", base()), ConfigError);
  CHECK_THROWS_AS(parse_config("{", base()), ConfigError);
  CHECK_THROWS_AS(load_config("missing.json", base()), ConfigError);
}
