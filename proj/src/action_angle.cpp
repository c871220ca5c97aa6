#include "wellescape/action_angle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "wellescape/errors.hpp"

namespace wellescape {

namespace {

using std::numbers::pi;

template <class Fn>
double solve_bracket(Fn f, double lo, double hi) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw NumericalError("turning root not bracketed");
  std::uintmax_t iters = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 1);
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  return 0.5 * (r.first + r.second);
}

// Walk away from `from` in direction `dir` until f changes sign, then solve.
template <class Fn>
double solve_outward(Fn f, double from, double dir, double step) {
  const double f0 = f(from);
  double inner = from;
  for (int i = 0; i < 200; ++i) {
    const double outer = from + dir * step;
    if ((f(outer) > 0.0) != (f0 > 0.0)) {
      return solve_bracket(f, std::min(inner, outer), std::max(inner, outer));
    }
    inner = outer;
    step *= 2.0;
  }
  throw NumericalError("outer turning root not found");
}

// Stable sinh(x)/sinh(y) for 0 <= x <= y.
double sinh_ratio(double x, double y) {
  if (x <= 0.0) return 0.0;
  return std::exp(x - y) * std::expm1(-2.0 * x) / std::expm1(-2.0 * y);
}

void check_energy(double xi, double e_max) {
  if (!(xi > 0.0 && xi < e_max)) {
    throw EnergyRangeError("energy out of range: xi=" + std::to_string(xi) + " not in (0, " +
                           std::to_string(e_max) + ")");
  }
}

struct Interval {
  double lo, hi;
};

Interval oscillation_interval(const Potential& well, double xi) {
  const auto g = well_geometry(well);
  check_energy(xi, g.E_max);
  auto [lo, hi] = well_boundaries(well, xi);
  return {lo, hi};
}

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

}  // namespace

TurningRoots turning_roots(const QuarticWell& well, double xi) {
  if (well.kind() == QuarticCase::Unsupported) {
    throw DomainError("turning_roots: unsupported quartic " + well.describe());
  }
  const auto g = well_geometry(well);
  check_energy(xi, g.E_max);
  auto f = [&](double q) { return xi - well.value(q); };
  const double scale = std::sqrt(2.0 * xi);
  TurningRoots r;
  r.kind = well.kind();
  if (well.kind() == QuarticCase::DoubleWell) {
    const double qt = *well.right_barrier();
    // second minimum: the other root of 1 + alpha q + beta q^2
    const double qm = 1.0 / (well.beta() * qt);
    r.d = solve_outward(f, 0.0, -1.0, scale);
    r.c = solve_bracket(f, 0.0, qt);
    r.b = solve_bracket(f, qt, qm);
    r.a = solve_outward(f, qm, 1.0, std::max(scale, qm - qt));
  } else {
    const double ql = *well.left_barrier();
    const double qr = *well.right_barrier();
    r.c = solve_bracket(f, ql, 0.0);
    r.b = solve_bracket(f, 0.0, qr);
    r.d = solve_outward(f, ql, -1.0, std::max(scale, -ql));
    r.a = solve_outward(f, qr, 1.0, std::max(scale, qr));
  }
  if (!(r.a > r.b && r.b > r.c && r.c > r.d)) {
    throw NumericalError("turning roots not strictly ordered at xi=" + std::to_string(xi));
  }
  return r;
}

elliptic::Modulus turning_modulus(const TurningRoots& r) {
  // (a-b)(c-d) + (a-d)(b-c) = (a-c)(b-d): both parameters from exact products.
  const double p1 = (r.a - r.b) * (r.c - r.d);
  const double p2 = (r.a - r.d) * (r.b - r.c);
  const double s = p1 + p2;
  if (r.kind == QuarticCase::DoubleWell) return elliptic::Modulus::from_parameters(p1 / s, p2 / s);
  return elliptic::Modulus::from_parameters(p2 / s, p1 / s);
}

double turning_gamma2(const TurningRoots& r) {
  if (r.kind == QuarticCase::DoubleWell) return (r.d - r.c) / (r.a - r.c);
  return (r.b - r.c) / (r.b - r.d);
}

double action_J(const QuarticWell& well, const TurningRoots& r) {
  const double a = r.a, b = r.b, c = r.c, d = r.d;
  const double al = well.alpha(), be = well.beta();
  const auto k = turning_modulus(r);
  const double g2 = turning_gamma2(r);
  const double K = elliptic::ellip_K(k);
  const double E = elliptic::ellip_E(k);
  const double P = elliptic::ellip_Pi(g2, k);
  const double ac_bd = (a - c) * (b - d);
  if (r.kind == QuarticCase::DoubleWell) {
    const double pre = std::sqrt(2.0 * be / ac_bd) / (48.0 * pi);
    const double t1 = ac_bd * (16.0 * (al * al - 3.0 * be) / (3.0 * be * be)) * E;
    const double t2 = (a - c) * (a - d) *
                      (3 * a * a - 6 * a * b - b * b + 4 * b * (c + d) - 3 * c * c + 2 * c * d - 3 * d * d) * K;
    const double t3 = 3.0 * (a - d) *
                      (-3 * a * a * a + 16 * al * al * a / (9 * be * be) - 4 * a * (a * al + 3) / (3 * be) -
                       b * b * b + (c + d) * (b * b - (c - d) * (c - d)) + b * (c * c + d * d)) *
                      P;
    return pre * (t1 + t2 + t3);
  }
  const double pre = std::sqrt(std::abs(be) / 2.0) / (24.0 * pi * std::sqrt(ac_bd));
  const double cd = c - d;
  const double t1 = E * ac_bd *
                    (3 * a * a - 2 * a * (b + c + d) + 3 * b * b - 2 * b * (c + d) + 3 * c * c - 2 * c * d + 3 * d * d);
  const double tk = K * (d - b) * (a * a + a * (-4 * b - 4 * c + 6 * d) + 3 * b * b - 2 * b * c + 3 * c * c - 3 * d * d);
  const double tp = 3.0 * P *
                    (a * a * a - a * a * (b + c + d) - a * (b * b - 2 * b * (c + d) + cd * cd) + b * b * b -
                     b * b * (c + d) - b * cd * cd + cd * cd * (c + d));
  return pre * (t1 - cd * (tk + tp));
}

double natural_frequency(const QuarticWell& well, const TurningRoots& r) {
  const double K = elliptic::ellip_K(turning_modulus(r));
  return pi / (2.0 * K) * std::sqrt(std::abs(well.beta()) * (r.a - r.c) * (r.b - r.d) / 2.0);
}

namespace {

struct GParts {
  double G, omega, omega0;
};

GParts fourier_parts(const TurningRoots& r) {
  const double a = r.a, b = r.b, c = r.c, d = r.d;
  const auto k = turning_modulus(r);
  const double K = elliptic::ellip_K(k);
  const double Kp = elliptic::ellip_K(k.complement());
  const double x = std::sqrt((c - d) / (a - d));
  const double pre = pi * std::sqrt((a - c) * (b - d)) / (2.0 * K);
  if (r.kind == QuarticCase::DoubleWell) {
    const double nu = elliptic::inv_cn(x, k.complement());
    const double w2 = pi * (Kp - nu) / K;
    const double w02 = pi * Kp / K;
    return {pre * sinh_ratio(w2, w02), 0.5 * w2, 0.5 * w02};
  }
  const double u = elliptic::inv_cn(x, k);
  const double w2 = pi * u / K;
  const double w02 = pi * Kp / K;
  return {pre * std::sin(w2) / std::sinh(w02), 0.5 * w2, 0.5 * w02};
}

}  // namespace

double fourier_G(const QuarticWell&, const TurningRoots& r) { return fourier_parts(r).G; }

double orbit_q(const QuarticWell&, const TurningRoots& r, double theta) {
  const auto k = turning_modulus(r);
  const double K = elliptic::ellip_K(k);
  const double g2 = turning_gamma2(r);
  const double sn = elliptic::jacobi_sn(K * theta / pi, k);
  const double den = 1.0 - g2 * sn * sn;
  if (r.kind == QuarticCase::DoubleWell) return r.a + (r.d - r.a) / den;
  return r.d + (r.c - r.d) / den;
}

AAData aa_data(const QuarticWell& well, double xi) {
  const auto r = turning_roots(well, xi);
  AAData out;
  out.xi = xi;
  out.k = turning_modulus(r);
  out.gamma2 = turning_gamma2(r);
  out.J = action_J(well, r);
  out.Omega_nat = natural_frequency(well, r);
  const auto parts = fourier_parts(r);
  out.G = parts.G;
  out.omega = parts.omega;
  out.omega0 = parts.omega0;
  return out;
}

namespace {

// (V(x) - V(y)) / (x - y) without the cancellation of the plain quotient
// when x and y are close: midpoint slope plus the third-derivative term.
double secant_slope(const Potential& w, double x, double y) {
  const double dlt = x - y;
  if (dlt == 0.0) return w.slope(x);
  if (std::abs(dlt) <= 1e-3 * (1.0 + std::abs(x))) {
    return w.slope(0.5 * (x + y)) + (w.curvature(x) - w.curvature(y)) * dlt / 24.0;
  }
  return (w.value(x) - w.value(y)) / dlt;
}

// With q = m + h sin u on [lo, hi], the gap xi - (V(q) - V0) factors as
// h cos^2 u * g(u), g smooth and positive; the distance to the nearer
// endpoint is formed from cos^2 u / (1 +- sin u) so nothing cancels.
struct GapFactor {
  const Potential& w;
  double lo, hi;
  double operator()(double u) const {
    const double su = std::sin(u);
    const double m = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    const double q = m + h * su;
    if (u >= 0.0) {
      // V(hi) - V(q) = (hi - q) S, hi - q = h cos^2 u / (1 + sin u)
      return secant_slope(w, hi, q) / (1.0 + su);
    }
    // V(lo) - V(q) = -(q - lo) S, q - lo = h cos^2 u / (1 - sin u)
    return -secant_slope(w, q, lo) / (1.0 - su);
  }
};

}  // namespace

double numeric_action(const Potential& well, double xi) {
  const auto iv = oscillation_interval(well, xi);
  const double h = 0.5 * (iv.hi - iv.lo);
  const GapFactor g{well, iv.lo, iv.hi};
  // sqrt(xi - V) h cos u = h^{3/2} cos^2 u sqrt(g)
  auto f = [&](double u) {
    const double cu = std::cos(u);
    return cu * cu * std::sqrt(std::max(g(u), 0.0));
  };
  const double I = h * std::sqrt(h) * GK::integrate(f, -pi / 2, pi / 2, 15, 1e-14);
  return std::numbers::sqrt2 / pi * I;
}

double numeric_frequency(const Potential& well, double xi) {
  const auto iv = oscillation_interval(well, xi);
  const double h = 0.5 * (iv.hi - iv.lo);
  const GapFactor g{well, iv.lo, iv.hi};
  // h cos u / sqrt(xi - V) = sqrt(h) / sqrt(g)
  auto f = [&](double u) { return 1.0 / std::sqrt(g(u)); };
  const double T = std::numbers::sqrt2 * std::sqrt(h) * GK::integrate(f, -pi / 2, pi / 2, 15, 1e-14);
  return 2.0 * pi / T;
}

double numeric_fourier_q1(const Potential& well, double xi) {
  namespace ode = boost::numeric::odeint;
  const auto iv = oscillation_interval(well, xi);
  const double W = numeric_frequency(well, xi);
  const double T = 2.0 * pi / W;
  using State = std::array<double, 3>;
  State s{iv.lo, 0.0, 0.0};
  auto rhs = [&](const State& x, State& dx, double t) {
    dx[0] = x[1];
    dx[1] = -well.slope(x[0]);
    dx[2] = x[0] * std::cos(W * t);
  };
  auto stepper = ode::make_controlled(1e-14, 1e-13, ode::runge_kutta_fehlberg78<State>());
  ode::integrate_adaptive(stepper, rhs, s, 0.0, T, T / 200.0);
  return s[2] / T;
}

double AAProvider::fourier_slope(double xi) const {
  const double em = E_max();
  const double h = std::min({1e-4 * em, xi / 20.0, (em - xi) / 20.0});
  if (!(h > 0.0)) throw EnergyRangeError("fourier_slope: xi outside (0, E_max)");
  return (fourier(xi - 2 * h) - 8.0 * fourier(xi - h) + 8.0 * fourier(xi + h) - fourier(xi + 2 * h)) /
         (12.0 * h);
}

QuarticAA::QuarticAA(QuarticWell well) : well_(well) {
  if (well_.kind() == QuarticCase::Unsupported) {
    throw DomainError("no action-angle closed form for " + well_.describe());
  }
  e_max_ = well_geometry(well_).E_max;
}

double QuarticAA::action(double xi) const { return action_J(well_, turning_roots(well_, xi)); }
double QuarticAA::frequency(double xi) const {
  return natural_frequency(well_, turning_roots(well_, xi));
}
double QuarticAA::fourier(double xi) const { return fourier_G(well_, turning_roots(well_, xi)); }

NumericAA::NumericAA(PotentialPtr well) : well_(std::move(well)) {
  if (!well_) throw DomainError("NumericAA: null well");
  e_max_ = well_geometry(*well_).E_max;
}

double NumericAA::action(double xi) const { return numeric_action(*well_, xi); }
double NumericAA::frequency(double xi) const { return numeric_frequency(*well_, xi); }
double NumericAA::fourier(double xi) const { return -numeric_fourier_q1(*well_, xi); }

std::vector<AATableRow> aa_table(const QuarticWell& well, const std::vector<double>& xi) {
  std::vector<AATableRow> rows;
  rows.reserve(xi.size());
  for (double x : xi) {
    const auto d = aa_data(well, x);
    rows.push_back({d.xi, d.J, d.Omega_nat, d.G, d.k.k(), d.gamma2});
  }
  return rows;
}

}  // namespace wellescape
