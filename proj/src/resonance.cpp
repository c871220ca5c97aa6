#include "wellescape/resonance.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "wellescape/errors.hpp"
#include "wellescape/parallel.hpp"

namespace wellescape {

namespace {

using std::numbers::pi;

double wrap_2pi(double x) {
  double r = std::fmod(x, 2.0 * pi);
  if (r < 0.0) r += 2.0 * pi;
  return r;
}

double eval_level(const AAProvider& aa, double E_thres, double margin) {
  const double em = aa.E_max();
  const double et = E_thres > 0.0 ? E_thres : em;
  if (et > em) throw EnergyRangeError("E_thres above the separatrix energy");
  return std::min(et, em * (1.0 - margin));
}

// |xi - Omega J| / G: the amplitude the LPT needs to reach xi.
double required_force(const AAProvider& aa, double Omega, double xi) {
  return std::abs(xi - Omega * aa.action(xi)) / aa.fourier(xi);
}

}  // namespace

std::string to_string(Mechanism m) {
  switch (m) {
    case Mechanism::Saddle: return "saddle";
    case Mechanism::Maximum: return "maximum";
    case Mechanism::Simulation: return "simulation";
  }
  return "saddle";
}

double conservation_C(const AAProvider& aa, const ForcingParams& p, const SlowState& s) {
  if (s.xi == 0.0) return 0.0;
  return s.xi - p.F * aa.fourier(s.xi) * std::sin(s.theta) - p.Omega * aa.action(s.xi);
}

SlowFlowResult integrate_slow_flow(const AAProvider& aa, const ForcingParams& p, SlowState initial,
                                   double t_end, const SlowFlowOptions& opt) {
  namespace ode = boost::numeric::odeint;
  const double e_thres = opt.E_thres > 0.0 ? opt.E_thres : aa.E_max();
  if (!(initial.xi > 0.0 && initial.xi < e_thres)) {
    throw EnergyRangeError("slow flow must start inside (0, E_thres)");
  }
  // keep trial stages inside the domain of the closed forms
  const double lo = 1e-12 * aa.E_max();
  const double hi = aa.E_max() * (1.0 - 1e-9);
  using State = std::array<double, 2>;  // theta, xi
  auto rhs = [&](const State& x, State& dx, double) {
    const double xi = std::clamp(x[1], lo, hi);
    const double w = aa.frequency(xi);
    dx[0] = w - p.Omega - p.F * w * aa.fourier_slope(xi) * std::sin(x[0]);
    dx[1] = w * p.F * aa.fourier(xi) * std::cos(x[0]);
  };
  auto stepper = ode::make_dense_output(opt.atol, opt.rtol, ode::runge_kutta_dopri5<State>());
  State x{initial.theta, initial.xi};
  stepper.initialize(x, 0.0, std::min(opt.sample_dt, 0.01));
  SlowFlowResult out;
  out.t.push_back(0.0);
  out.states.push_back(initial);
  double next_sample = opt.sample_dt;
  while (stepper.current_time() < t_end) {
    stepper.do_step(rhs);
    const double t1 = stepper.current_time();
    while (next_sample <= std::min(t1, t_end)) {
      State s;
      stepper.calc_state(next_sample, s);
      out.t.push_back(next_sample);
      out.states.push_back({s[0], s[1]});
      if (s[1] >= e_thres) {
        out.status = SlowFlowStatus::Escaped;
        return out;
      }
      if (s[1] <= 0.0) {
        out.status = SlowFlowStatus::ReachedOrigin;
        return out;
      }
      next_sample += opt.sample_dt;
    }
    const auto& cur = stepper.current_state();
    if (!(cur[1] > 0.0 && cur[1] < e_thres)) {
      out.t.push_back(t1);
      out.states.push_back({cur[0], cur[1]});
      out.status = cur[1] >= e_thres ? SlowFlowStatus::Escaped : SlowFlowStatus::ReachedOrigin;
      return out;
    }
  }
  return out;
}

CriticalAngles critical_angles() { return {pi / 2, 3 * pi / 2}; }

namespace {

struct SaddleSolve {
  bool ok;
  double F, Omega;
  std::string reason;
};

SaddleSolve solve_saddle(const AAProvider& aa, double xi) {
  const double G = aa.fourier(xi);
  const double Gp = aa.fourier_slope(xi);
  const double J = aa.action(xi);
  const double Jp = aa.action_slope(xi);
  const double det = Gp * J - Jp * G;
  if (!(std::abs(det) > 1e-14 * std::abs(Gp * J))) return {false, 0, 0, "singular system"};
  const double F = (J - xi * Jp) / det;
  const double Om = (xi * Gp - G) / det;
  if (!(F > 0.0)) return {false, F, Om, "F <= 0"};
  if (!(Om > 0.0)) return {false, F, Om, "Omega <= 0"};
  return {true, F, Om, ""};
}

}  // namespace

EscapeCurve saddle_curve(const AAProvider& aa, const std::vector<double>& xi_grid,
                         std::vector<SaddleDiagnostic>* dropped) {
  EscapeCurve c;
  for (double xi : xi_grid) {
    if (!(xi > 0.0 && xi < aa.E_max())) {
      if (dropped) dropped->push_back({xi, "energy outside (0, E_max)"});
      continue;
    }
    const auto s = solve_saddle(aa, xi);
    if (!s.ok) {
      if (dropped) dropped->push_back({xi, s.reason});
      continue;
    }
    c.points.push_back({s.Omega, s.F, Mechanism::Saddle, xi});
  }
  std::sort(c.points.begin(), c.points.end(),
            [](const EscapePoint& a, const EscapePoint& b) { return a.Omega < b.Omega; });
  return c;
}

std::vector<EscapePoint> saddle_at_omega(const AAProvider& aa, double Omega, int n_scan) {
  const double em = aa.E_max();
  std::vector<double> xs, om;
  for (int i = 1; i < n_scan; ++i) {
    const double xi = em * i / n_scan;
    const auto s = solve_saddle(aa, xi);
    xs.push_back(xi);
    om.push_back(std::abs(s.F) > 0.0 ? s.Omega - Omega : std::numeric_limits<double>::quiet_NaN());
  }
  std::vector<EscapePoint> out;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (!std::isfinite(om[i]) || !std::isfinite(om[i + 1])) continue;
    if ((om[i] > 0.0) == (om[i + 1] > 0.0) && om[i] != 0.0) continue;
    auto f = [&](double xi) { return solve_saddle(aa, xi).Omega - Omega; };
    std::uintmax_t iters = 100;
    auto tol = boost::math::tools::eps_tolerance<double>(45);
    const auto r = boost::math::tools::toms748_solve(f, xs[i], xs[i + 1], om[i], om[i + 1], tol, iters);
    const double xi = 0.5 * (r.first + r.second);
    const auto s = solve_saddle(aa, xi);
    if (s.ok) out.push_back({s.Omega, s.F, Mechanism::Saddle, xi});
  }
  return out;
}

MaximumLine maximum_line(const AAProvider& aa, double E_thres, double separatrix_margin) {
  MaximumLine m;
  m.E_thres = E_thres > 0.0 ? E_thres : aa.E_max();
  m.E_eval = eval_level(aa, E_thres, separatrix_margin);
  const double G = aa.fourier(m.E_eval);
  m.slope = aa.action(m.E_eval) / G;
  m.intercept = -m.E_eval / G;
  return m;
}

EscapePoint escape_threshold(const AAProvider& aa, double Omega, const EnvelopeOptions& opt) {
  if (!(Omega > 0.0)) throw DomainError("escape_threshold: Omega must be positive");
  const double e_eval = eval_level(aa, opt.E_thres, opt.separatrix_margin);
  const int n = std::max(opt.n_xi, 8);
  std::vector<double> xs(n), rs(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = e_eval * (i + 1) / n;
    rs[i] = required_force(aa, Omega, xs[i]);
  }
  const auto it = std::max_element(rs.begin(), rs.end());
  const int im = static_cast<int>(it - rs.begin());
  const double r_end = rs.back();
  if (im == n - 1) return {Omega, r_end, Mechanism::Maximum, e_eval};
  const double a = im > 0 ? xs[im - 1] : 0.5 * xs[0];
  const double b = xs[im + 1];
  const auto best = boost::math::tools::brent_find_minima(
      [&](double xi) { return -required_force(aa, Omega, xi); }, a, b, 40);
  const double r_in = std::max(-best.second, rs[im]);
  const double xi_in = -best.second >= rs[im] ? best.first : xs[im];
  if (r_in <= r_end) return {Omega, r_end, Mechanism::Maximum, e_eval};
  return {Omega, r_in, Mechanism::Saddle, xi_in};
}

CombinedCurve combined_escape_curve(const AAProvider& aa, const std::vector<double>& omegas,
                                    const EnvelopeOptions& opt, int jobs) {
  CombinedCurve out;
  out.curve.points.resize(omegas.size());
  parallel_for(omegas.size(), jobs,
               [&](std::size_t i) { out.curve.points[i] = escape_threshold(aa, omegas[i], opt); });
  std::sort(out.curve.points.begin(), out.curve.points.end(),
            [](const EscapePoint& a, const EscapePoint& b) { return a.Omega < b.Omega; });
  if (!out.curve.points.empty()) {
    const auto it = std::min_element(
        out.curve.points.begin(), out.curve.points.end(),
        [](const EscapePoint& a, const EscapePoint& b) { return a.F_crit < b.F_crit; });
    out.dip_index = static_cast<std::size_t>(it - out.curve.points.begin());
  }
  return out;
}

RmGrid rm_grid(const AAProvider& aa, const ForcingParams& p, int n_theta, int n_xi, double E_thres) {
  if (n_theta < 2 || n_xi < 2) throw DomainError("rm_grid needs at least 2 points per axis");
  const double e_thres = E_thres > 0.0 ? E_thres : aa.E_max();
  const double e_eval = eval_level(aa, e_thres, 1e-4);
  RmGrid g;
  for (int i = 0; i < n_theta; ++i) g.theta.push_back(2.0 * pi * i / (n_theta - 1));
  for (int j = 0; j < n_xi; ++j) g.xi.push_back(e_eval * (j + 1) / n_xi);
  g.C.resize(static_cast<std::size_t>(n_theta) * n_xi);
  for (int j = 0; j < n_xi; ++j) {
    const double xi = g.xi[j];
    const double G = aa.fourier(xi);
    const double h = xi - p.Omega * aa.action(xi);
    for (int i = 0; i < n_theta; ++i) {
      g.C[static_cast<std::size_t>(j) * n_theta + i] = h - p.F * G * std::sin(g.theta[i]);
    }
    if (j == static_cast<int>(g.lpt.size() / 2) && p.F > 0.0) {
      const double s = h / (p.F * G);
      // tolerate rounding when F sits exactly on a threshold
      if (std::abs(s) <= 1.0 + 1e-12) {
        const double t = std::asin(std::clamp(s, -1.0, 1.0));
        g.lpt.push_back({wrap_2pi(t), xi});
        g.lpt.push_back({wrap_2pi(pi - t), xi});
      }
    }
  }
  g.lpt_reaches_threshold = p.F > 0.0 && g.lpt.size() == 2 * static_cast<std::size_t>(n_xi);
  return g;
}

}  // namespace wellescape
