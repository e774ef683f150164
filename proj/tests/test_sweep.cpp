#include <cmath>

#include "doctest.h"
#include "washboard/sweep.hpp"

using namespace washboard;

namespace {

SweepConfig flat_sweep(SweepMode mode) {
  SweepConfig c;
  c.mode = mode;
  c.params = {2.0, 1.5, 0.0, PeriodicPotential::cosine(0.0, 1.0)};
  c.range = {SweepVariable::Force, 0.0, 1.0, 5};
  c.transport.truncation = {16, 4};
  c.threads = 2;
  return c;
}

}  // namespace

TEST_CASE("sweep points") {
  const auto p = SweepRange{SweepVariable::Force, -1.0, 1.0, 5}.points();
  REQUIRE(p.size() == 5);
  CHECK(p.front() == -1.0);
  CHECK(p.back() == 1.0);
  CHECK(p[2] == doctest::Approx(0.0));
  CHECK(SweepRange{SweepVariable::Gamma, 3.0, 9.0, 1}.points() == std::vector<double>{3.0});
}

TEST_CASE("free particle transport sweep") {
  const auto t = run_sweep(flat_sweep(SweepMode::Transport));
  REQUIRE(t.rows.size() == 5);
  CHECK(count_errors(t) == 0);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double f = t.number(i, "F");
    CHECK(t.number(i, "U") == doctest::Approx(f / 2.0).epsilon(1e-12));
    CHECK(t.number(i, "D") == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("scaled columns divide by the free-particle scales") {
  auto c = flat_sweep(SweepMode::Transport);
  c.params.potential = PeriodicPotential::cosine(1.0, 1.0);
  c.params.beta = 3.0;
  c.range = {SweepVariable::Force, 0.5, 2.0, 4};
  c.scale = {true, true, true};
  const auto t = run_sweep(c);
  CHECK(count_errors(t) == 0);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double f = t.number(i, "F");
    CHECK(t.number(i, "F_over_Fc") == doctest::Approx(f / (3.36 * 2.0)).epsilon(1e-12));
    CHECK(t.number(i, "U_over_UL") == doctest::Approx(t.number(i, "U") / (f / 2.0)).epsilon(1e-12));
    CHECK(t.number(i, "D_over_DL") == doctest::Approx(t.number(i, "D") * 6.0).epsilon(1e-12));
  }
  CHECK(t.header.back() == "error");
}

TEST_CASE("einstein check on a free particle") {
  auto c = flat_sweep(SweepMode::EinsteinCheck);
  const auto t = run_sweep(c);
  CHECK(count_errors(t) == 0);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    CHECK(t.number(i, "dU_dF") == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(std::fabs(t.number(i, "gap")) < 1e-9);
  }
  CHECK(einstein_step({SweepVariable::Force, 0.0, 2.0, 21}) == doctest::Approx(0.01));
  CHECK(einstein_step({SweepVariable::Force, 3.0, 3.0, 1}) == doctest::Approx(3e-3));
  c.range.variable = SweepVariable::Gamma;
  CHECK_THROWS_AS(c.validate(), ModelError);
}

TEST_CASE("gamma sweep") {
  auto c = flat_sweep(SweepMode::Transport);
  c.params.force = 0.3;
  c.range = {SweepVariable::Gamma, 1.0, 4.0, 4};
  const auto t = run_sweep(c);
  CHECK(t.header.front() == "gamma");
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double g = t.number(i, "gamma");
    CHECK(t.number(i, "U") == doctest::Approx(0.3 / g).epsilon(1e-12));
    CHECK(t.number(i, "D") == doctest::Approx(1.0 / (1.5 * g)).epsilon(1e-12));
  }
}

TEST_CASE("failing points are reported, not fatal") {
  auto c = flat_sweep(SweepMode::Transport);
  c.params.potential = PeriodicPotential::cosine(1.0, 1.0);
  c.range = {SweepVariable::Gamma, 1.0, 2.0, 2};
  c.transport.adaptive = false;
  c.transport.truncation = {1, 1};  // too small to run
  const auto t = run_sweep(c);
  CHECK(count_errors(t) == 2);
  CHECK(std::isnan(t.number(0, "U")));
  CHECK_FALSE(t.rows[0].back().empty());
}

TEST_CASE("threaded sweeps are deterministic") {
  auto c = flat_sweep(SweepMode::MonteCarlo);
  c.params.potential = PeriodicPotential::cosine(1.0, 1.0);
  c.mc.dt = 0.02;
  c.mc.n_steps = 500;
  c.mc.n_traj = 8;
  c.mc.seed = 17;
  const auto a = run_sweep(c);
  c.threads = 1;
  CHECK(run_sweep(c) == a);
  CHECK(count_errors(a) == 0);
}

TEST_CASE("presets") {
  for (int fig = 1; fig <= 7; ++fig) {
    const auto s = figure_preset(fig, 5);
    REQUIRE_FALSE(s.empty());
    for (const auto& series : s) CHECK_NOTHROW(series.config.validate());
  }
  CHECK_THROWS_AS(figure_preset(8), ModelError);
  CHECK(figure_preset(7).front().config.mode == SweepMode::Overdamped);
}
