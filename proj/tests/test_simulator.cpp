#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "wellescape/action_angle.hpp"
#include "wellescape/errors.hpp"
#include "wellescape/simulator.hpp"

using namespace wellescape;
using Catch::Approx;

namespace {
const QuarticWell case1(-0.5, 0.05);

SimConfig forced(double F, double Omega) {
  SimConfig c;
  c.params.F = F;
  c.params.Omega = Omega;
  return c;
}
}  // namespace

TEST_CASE("rest state stays at rest") {
  auto c = forced(0.0, 0.9);
  c.trace = true;
  const auto r = integrate_orbit(case1, c);
  CHECK_FALSE(r.escaped);
  CHECK_FALSE(r.t_escape);
  CHECK(r.max_energy == 0.0);
  REQUIRE(r.trace.size() > 1000);
  for (const auto& s : r.trace) {
    CHECK(std::abs(s.q) < 1e-9);
    CHECK(s.E == 0.0);
  }
}

TEST_CASE("unforced energy conservation over 1000 natural periods") {
  const QuarticAA aa(case1);
  for (double frac : {0.1, 0.5, 0.9}) {
    const double E0 = frac * well_geometry(case1).E_max;
    // start at the lower turning point
    const auto roots = turning_roots(case1, E0);
    SimConfig c = forced(0.0, 1.0);
    c.q_init = roots.lower();
    c.t_end = 1000.0 * 2.0 * std::numbers::pi / aa.frequency(E0);
    c.trace = true;
    c.trace_dt = 0.37;
    const auto r = integrate_orbit(case1, c);
    CHECK_FALSE(r.escaped);
    double worst = 0.0;
    for (const auto& s : r.trace) worst = std::max(worst, std::abs(s.E - E0));
    INFO("E0=" << E0 << " drift=" << worst);
    CHECK(worst < 1e-8 * E0);
  }
}

TEST_CASE("time reversal of an unforced orbit") {
  SimConfig c = forced(0.0, 1.0);
  c.q_init = -1.0;
  c.p_init = 0.3;
  c.t_end = 50.0;
  const auto fwd = integrate_orbit(case1, c);
  REQUIRE_FALSE(fwd.escaped);
  SimConfig back = c;
  back.q_init = fwd.q_final;
  back.p_init = -fwd.p_final;
  const auto bwd = integrate_orbit(case1, back);
  CHECK(bwd.q_final == Approx(-1.0).margin(1e-6));
  CHECK(-bwd.p_final == Approx(0.3).margin(1e-6));
}

TEST_CASE("first-hitting localises the boundary crossing") {
  auto c = forced(0.0711, 0.88);
  c.trace = true;
  const auto r = integrate_orbit(case1, c);
  REQUIRE(r.escaped);
  const auto geo = well_geometry(case1);
  CHECK(*r.t_escape <= 1000 * 2 * std::numbers::pi / 0.88);
  const bool on_edge = std::abs(r.q_final - geo.q_high) < 1e-9 || std::abs(r.q_final - geo.q_low) < 1e-9;
  CHECK(on_edge);
  // no earlier trace sample outside the well
  for (std::size_t i = 0; i + 1 < r.trace.size(); ++i) {
    CHECK(r.trace[i].q <= geo.q_high);
    CHECK(r.trace[i].q >= geo.q_low);
  }
  CHECK(r.max_energy >= r.trace.back().E - 1e-12);
}

TEST_CASE("energy criterion stops at the threshold energy") {
  auto c = forced(0.0711, 0.88);
  c.criterion = EscapeCriterion::Energy;
  const auto r = integrate_orbit(case1, c);
  REQUIRE(r.escaped);
  const double E = 0.5 * r.p_final * r.p_final + case1.value(r.q_final);
  CHECK(E == Approx(well_geometry(case1).E_max).epsilon(1e-9));
}

TEST_CASE("Omega = 0.88 bracket") {
  for (auto crit : {EscapeCriterion::FirstHitting, EscapeCriterion::Energy}) {
    auto c = forced(0.0709, 0.88);
    c.criterion = crit;
    CHECK_FALSE(integrate_orbit(case1, c).escaped);
    c.params.F = 0.0711;
    CHECK(integrate_orbit(case1, c).escaped);
  }
}

TEST_CASE("bisection contract") {
  SimConfig c;
  c.horizon_periods = 100;
  const auto b = critical_force_bisect(case1, 0.88, {0.05, 0.1}, c);
  CHECK(b.high - b.low < 1e-4);
  c.params.Omega = 0.88;
  c.params.F = b.high;
  CHECK(integrate_orbit(case1, c).escaped);
  c.params.F = b.low;
  CHECK_FALSE(integrate_orbit(case1, c).escaped);
  CHECK_THROWS_AS(critical_force_bisect(case1, 0.88, {0.1, 0.2}, c), DomainError);
  CHECK_THROWS_AS(critical_force_bisect(case1, 0.88, {0.01, 0.02}, c), DomainError);
}

TEST_CASE("sweep records rows and failures") {
  SimConfig c;
  c.horizon_periods = 100;
  SweepOptions opt;
  opt.f_step = 0.01;
  opt.f_max = 0.2;
  opt.jobs = 2;
  const auto rows = sweep(case1, {0.81, 0.80, 0.3}, c, opt);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].Omega == 0.81);
  CHECK(rows[0].ok());
  CHECK(rows[1].ok());
  CHECK(rows[0].f_high - rows[0].f_low < 1e-4);
  // far below resonance no escape up to f_max
  CHECK_FALSE(rows[2].ok());
  const auto curve = sweep_curve(rows);
  REQUIRE(curve.points.size() == 2);
  CHECK(curve.points[0].Omega == 0.80);
  CHECK(curve.points[0].mechanism == Mechanism::Simulation);
  // neighbouring points are close away from the dip
  CHECK(std::abs(curve.points[0].F_crit / curve.points[1].F_crit - 1.0) < 0.1);
}

TEST_CASE("psi scan") {
  auto c = forced(0.08, 0.88);
  c.horizon_periods = 100;
  const auto rows = psi_scan(case1, c, 4, 2);
  REQUIRE(rows.size() == 4);
  CHECK(rows[1].psi == Approx(std::numbers::pi / 2));
  for (const auto& r : rows) CHECK(r.escaped == r.t_escape.has_value());
}

TEST_CASE("electrostatic collapse counts as escape") {
  const ElectrostaticWell mems(0.06, 1.0);
  SimConfig c = forced(0.3, 0.9);
  c.horizon_periods = 200;
  const auto r = integrate_orbit(mems, c);
  CHECK(r.escaped);
  CHECK(r.q_final < 1.0);
}

TEST_CASE("config validation") {
  SimConfig c;
  c.horizon_periods = 0;
  CHECK_THROWS_AS(integrate_orbit(case1, c), DomainError);
  c.horizon_periods = 10;
  c.rtol = 0.0;
  CHECK_THROWS_AS(integrate_orbit(case1, c), DomainError);
  CHECK(parse_criterion("energy") == EscapeCriterion::Energy);
  CHECK(to_string(EscapeCriterion::FirstHitting) == "hitting");
  CHECK_THROWS_AS(parse_criterion("bogus"), ConfigError);
}
