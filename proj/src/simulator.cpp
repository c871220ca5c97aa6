#include "wellescape/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "wellescape/errors.hpp"
#include "wellescape/parallel.hpp"

namespace wellescape {

namespace {

using std::numbers::pi;
namespace ode = boost::numeric::odeint;
using State = std::array<double, 2>;

template <class Fn>
double root_in(Fn f, double a, double b) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) return b;
  std::uintmax_t iters = 100;
  auto tol = boost::math::tools::eps_tolerance<double>(48);
  const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
  return 0.5 * (r.first + r.second);
}

// thrown from the right-hand side when the orbit leaves the domain
struct LeftDomain {};

}  // namespace

std::string to_string(EscapeCriterion c) {
  return c == EscapeCriterion::Energy ? "energy" : "hitting";
}

EscapeCriterion parse_criterion(const std::string& s) {
  if (s == "hitting" || s == "first-hitting") return EscapeCriterion::FirstHitting;
  if (s == "energy") return EscapeCriterion::Energy;
  throw ConfigError("unknown escape criterion '" + s + "' (expected hitting|energy)");
}

SimResult integrate_orbit(const Potential& well, const SimConfig& cfg) {
  const auto& fp = cfg.params;
  if (!(fp.Omega > 0.0)) throw DomainError("integrate_orbit: Omega must be positive");
  if (!(fp.F >= 0.0)) throw DomainError("integrate_orbit: F must be non-negative");
  if (cfg.horizon_periods < 1 && !cfg.t_end) throw DomainError("horizon must be at least one period");
  if (!(cfg.rtol > 0.0 && cfg.atol > 0.0)) throw DomainError("tolerances must be positive");

  const auto geo = well_geometry(well, cfg.E_thres);
  const double q_eq = well.equilibrium();
  const double v0 = well.value(q_eq);
  const double upper = well.domain_upper();
  const double period = 2.0 * pi / fp.Omega;
  const double t_end = cfg.t_end.value_or(cfg.horizon_periods * period);

  auto energy = [&](double q, double p) { return 0.5 * p * p + well.value(q) - v0; };
  auto rhs = [&](const State& x, State& dx, double t) {
    if (!(x[0] < upper)) throw LeftDomain{};
    dx[0] = x[1];
    dx[1] = -well.slope(x[0]) + fp.F * std::sin(fp.Omega * t + fp.psi);
  };

  SimResult res;
  State x{cfg.q_init.value_or(q_eq), cfg.p_init};
  res.max_energy = energy(x[0], x[1]);
  auto stepper = ode::make_dense_output(cfg.atol, cfg.rtol, ode::runge_kutta_dopri5<State>());
  stepper.initialize(x, 0.0, period / 200.0);

  const double trace_dt = cfg.trace_dt > 0.0 ? cfg.trace_dt : period / 32.0;
  long trace_k = 0;  // next sample is trace_k * trace_dt
  auto at = [&](double t) {
    State s;
    stepper.calc_state(t, s);
    return s;
  };
  auto record_trace = [&](double upto) {
    if (!cfg.trace) return;
    const double slack = 1e-12 * std::max(1.0, upto);
    for (double tk = trace_k * trace_dt; tk <= upto + slack; tk = ++trace_k * trace_dt) {
      tk = std::min(tk, stepper.current_time());
      const State s = at(tk);
      res.trace.push_back({tk, s[0], s[1], energy(s[0], s[1])});
    }
  };
  auto finish_escape = [&](double t) {
    res.escaped = true;
    res.t_escape = t;
    const State s = at(t);
    res.t_final = t;
    res.q_final = s[0];
    res.p_final = s[1];
    record_trace(t);
    if (cfg.trace) res.trace.push_back({t, s[0], s[1], energy(s[0], s[1])});
    return res;
  };
  auto outside = [&](double q) { return q < geo.q_low || q > geo.q_high; };

  if (cfg.trace) {
    res.trace.push_back({0.0, x[0], x[1], res.max_energy});
    trace_k = 1;
  }

  while (stepper.current_time() < t_end) {
    const double t0 = stepper.current_time();
    const State s0 = stepper.current_state();
    try {
      stepper.do_step(rhs);
    } catch (const LeftDomain&) {
      res.escaped = true;
      res.singular = true;
      res.t_escape = t0;
      res.t_final = t0;
      res.q_final = s0[0];
      res.p_final = s0[1];
      return res;
    } catch (const DomainError&) {
      res.escaped = true;
      res.singular = true;
      res.t_escape = t0;
      res.t_final = t0;
      res.q_final = s0[0];
      res.p_final = s0[1];
      return res;
    }
    const double t1 = stepper.current_time();
    const State s1 = stepper.current_state();

    // energy: samples inside the step catch maxima between step ends
    constexpr int kSamples = 4;
    double tprev = t0, eprev = energy(s0[0], s0[1]);
    for (int i = 1; i <= kSamples + 1; ++i) {
      const double ti = i <= kSamples ? t0 + (t1 - t0) * i / (kSamples + 1) : t1;
      const State si = i <= kSamples ? at(ti) : s1;
      const double ei = energy(si[0], si[1]);
      res.max_energy = std::max(res.max_energy, ei);
      if (cfg.criterion == EscapeCriterion::Energy && ei > geo.E_thres && ti <= t_end) {
        auto f = [&](double t) {
          const State s = at(t);
          return energy(s[0], s[1]) - geo.E_thres;
        };
        (void)eprev;
        return finish_escape(root_in(f, tprev, ti));
      }
      tprev = ti;
      eprev = ei;
    }

    if (cfg.criterion == EscapeCriterion::FirstHitting) {
      // the coordinate's extremum inside the step sits where p changes sign
      double t_check = t1;
      double q_check = s1[0];
      if ((s0[1] > 0.0) != (s1[1] > 0.0) && s0[1] != 0.0) {
        const double te = root_in([&](double t) { return at(t)[1]; }, t0, t1);
        const double qe = at(te)[0];
        if (outside(qe) && !outside(s1[0])) {
          t_check = te;
          q_check = qe;
        }
      }
      if (outside(q_check) && t0 < t_end) {
        const double bound = q_check > geo.q_high ? geo.q_high : geo.q_low;
        const double tc = root_in([&](double t) { return at(t)[0] - bound; }, t0, t_check);
        if (tc <= t_end) return finish_escape(tc);
      }
    }
    record_trace(std::min(t1, t_end));
  }
  const State sf = at(t_end);
  res.t_final = t_end;
  res.q_final = sf[0];
  res.p_final = sf[1];
  return res;
}

ForceBracket critical_force_bisect(const Potential& well, double Omega, ForceBracket b, SimConfig cfg,
                                   double width) {
  if (!(b.low < b.high) || !(width > 0.0)) throw DomainError("invalid force bracket");
  cfg.params.Omega = Omega;
  cfg.trace = false;
  auto escapes = [&](double F) {
    cfg.params.F = F;
    return integrate_orbit(well, cfg).escaped;
  };
  if (escapes(b.low)) throw DomainError("invalid bracket: F=" + std::to_string(b.low) + " escapes");
  if (!escapes(b.high)) throw DomainError("invalid bracket: F=" + std::to_string(b.high) + " stays");
  while (b.high - b.low >= width) {
    const double m = b.mid();
    if (escapes(m)) {
      b.high = m;
    } else {
      b.low = m;
    }
  }
  return b;
}

std::vector<SweepRow> sweep(const Potential& well, const std::vector<double>& omegas, const SimConfig& config,
                            const SweepOptions& opt) {
  std::vector<SweepRow> rows(omegas.size());
  parallel_for(omegas.size(), opt.jobs, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.Omega = omegas[i];
    row.horizon_periods = config.horizon_periods;
    row.criterion = config.criterion;
    try {
      SimConfig cfg = config;
      cfg.params.Omega = omegas[i];
      cfg.trace = false;
      auto escapes = [&](double F) {
        cfg.params.F = F;
        return integrate_orbit(well, cfg).escaped;
      };
      double lo = 0.0, hi = 0.0;
      bool found = false;
      for (int k = 1; k * opt.f_step <= opt.f_max + 1e-15; ++k) {
        const double F = k * opt.f_step;
        if (escapes(F)) {
          hi = F;
          found = true;
          break;
        }
        lo = F;
      }
      if (!found) {
        row.error = "no escape up to F=" + std::to_string(opt.f_max);
        return;
      }
      for (int k = 1; k <= opt.monotone_checks; ++k) {
        if (!escapes(hi + k * opt.f_step)) row.monotone = false;
      }
      const auto b = critical_force_bisect(well, omegas[i], {lo, hi}, cfg, opt.width);
      row.f_low = b.low;
      row.f_high = b.high;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  return rows;
}

EscapeCurve sweep_curve(const std::vector<SweepRow>& rows) {
  EscapeCurve c;
  for (const auto& r : rows) {
    if (r.ok()) c.points.push_back({r.Omega, 0.5 * (r.f_low + r.f_high), Mechanism::Simulation, 0.0});
  }
  std::sort(c.points.begin(), c.points.end(),
            [](const EscapePoint& a, const EscapePoint& b) { return a.Omega < b.Omega; });
  return c;
}

std::vector<PsiScanRow> psi_scan(const Potential& well, const SimConfig& config, int n_psi, int jobs) {
  if (n_psi < 1) throw DomainError("psi_scan needs at least one phase");
  std::vector<PsiScanRow> rows(static_cast<std::size_t>(n_psi));
  parallel_for(rows.size(), jobs, [&](std::size_t i) {
    SimConfig cfg = config;
    cfg.trace = false;
    cfg.params.psi = 2.0 * pi * static_cast<double>(i) / n_psi;
    const auto r = integrate_orbit(well, cfg);
    rows[i] = {cfg.params.psi, r.escaped, r.t_escape};
  });
  return rows;
}

}  // namespace wellescape
