#include <catch_amalgamated.hpp>

#include <cmath>
#include <memory>
#include <numbers>

#include <Eigen/Dense>
#include <boost/math/quadrature/trapezoidal.hpp>

#include "wellescape/action_angle.hpp"
#include "wellescape/errors.hpp"

using namespace wellescape;
using std::numbers::pi;

namespace {

const QuarticWell kCase1(-0.5, 0.05);
const QuarticWell kCase2(-3.0 / 50, -17.0 / 250);

// roots of xi - V by companion-matrix eigenvalues, sorted descending
std::array<double, 4> companion_roots(const QuarticWell& w, double xi) {
  // (beta/4) q^4 + (alpha/3) q^3 + q^2/2 - xi = 0
  const double c4 = w.beta() / 4.0;
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  const double coef[4] = {-xi, 0.0, 0.5, w.alpha() / 3.0};
  for (int i = 0; i < 4; ++i) m(0, i) = -coef[3 - i] / c4;
  for (int i = 1; i < 4; ++i) m(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::Matrix4d> es(m);
  std::array<double, 4> r;
  for (int i = 0; i < 4; ++i) r[i] = es.eigenvalues()[i].real();
  std::sort(r.begin(), r.end(), std::greater<>());
  return r;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("turning roots") {
  const auto r = turning_roots(kCase1, 0.5);
  const auto o = companion_roots(kCase1, 0.5);
  CHECK(std::abs(r.a - o[0]) < 1e-9);
  CHECK(std::abs(r.b - o[1]) < 1e-9);
  CHECK(std::abs(r.c - o[2]) < 1e-9);
  CHECK(std::abs(r.d - o[3]) < 1e-9);
  for (double q : {r.a, r.b, r.c, r.d}) CHECK(std::abs(0.5 - kCase1.value(q)) < 1e-10);

  // harmonic limit: inner roots approach +-sqrt(2 xi)
  const QuarticWell soft(0.0, -1e-8);
  const auto h = turning_roots(soft, 0.01);
  CHECK(std::abs(h.b - std::sqrt(0.02)) < 1e-6);
  CHECK(std::abs(h.c + std::sqrt(0.02)) < 1e-6);

  const double emax = well_geometry(kCase1).E_max;
  const auto n = turning_roots(kCase1, emax * (1 - 1e-10));
  CHECK(std::abs(n.c - 2.76393) < 1e-4);
  CHECK(std::abs(n.b - 2.76393) < 1e-4);

  CHECK_THROWS_AS(turning_roots(kCase1, 0.0), EnergyRangeError);
  CHECK_THROWS_AS(turning_roots(kCase1, 1.1), EnergyRangeError);
  CHECK_THROWS_AS(turning_roots(QuarticWell(0.0, 1.0), 0.1), DomainError);
}

TEST_CASE("action: closed form vs quadrature") {
  const auto r = turning_roots(kCase1, 0.3);
  CHECK(rel(action_J(kCase1, r), numeric_action(kCase1, 0.3)) < 1e-8);
  const double em2 = well_geometry(kCase2).E_max;
  const auto r2 = turning_roots(kCase2, em2 / 2);
  CHECK(rel(action_J(kCase2, r2), numeric_action(kCase2, em2 / 2)) < 1e-8);
  // harmonic bottom
  const double xi = 1e-6;
  CHECK(std::abs(action_J(kCase1, turning_roots(kCase1, xi)) / xi - 1.0) < 1e-4);
  CHECK(std::abs(numeric_action(PolynomialWell({0, 0, 0.5, 0, -1e-3}), 0.2) / 0.2 - 1.0) < 1e-3);
}

TEST_CASE("frequency: closed form vs period integral") {
  const auto r = turning_roots(kCase1, 0.5);
  CHECK(rel(natural_frequency(kCase1, r), numeric_frequency(kCase1, 0.5)) < 1e-8);
  CHECK(std::abs(natural_frequency(kCase1, turning_roots(kCase1, 1e-8)) - 1.0) < 1e-4);
  // dJ/dxi * Omega = 1
  for (double x : {0.1, 0.5, 0.9}) {
    const double h = 1e-4;
    const double dJ = (action_J(kCase1, turning_roots(kCase1, x + h)) -
                       action_J(kCase1, turning_roots(kCase1, x - h))) /
                      (2 * h);
    CHECK(std::abs(dJ * natural_frequency(kCase1, turning_roots(kCase1, x)) - 1.0) < 1e-6);
  }
  // Omega decreases monotonically toward the separatrix
  const double em = well_geometry(kCase1).E_max;
  double prev = 1.0;
  for (double f : {0.5, 0.8, 0.9, 0.99, 0.999}) {
    const double w = numeric_frequency(kCase1, f * em);
    CHECK(w < prev);
    prev = w;
  }
}

TEST_CASE("first Fourier coefficient") {
  const auto r = turning_roots(kCase1, 0.3);
  const double G = fourier_G(kCase1, r);
  CHECK(G > 0.0);
  CHECK(rel(G, -numeric_fourier_q1(kCase1, 0.3)) < 1e-7);
  const double xi = 1e-6;
  CHECK(rel(fourier_G(kCase1, turning_roots(kCase1, xi)), std::sqrt(2 * xi) / 2) < 1e-3);
  const double em2 = well_geometry(kCase2).E_max;
  CHECK(rel(fourier_G(kCase2, turning_roots(kCase2, em2 / 2)), -numeric_fourier_q1(kCase2, em2 / 2)) < 1e-7);
  // harmonic well
  PolynomialWell harm({0, 0, 0.5, 0, -1e-12});
  CHECK(std::abs(numeric_fourier_q1(harm, 0.02) + std::sqrt(0.04) / 2) < 1e-6);
}

TEST_CASE("orbit") {
  for (const auto* w : {&kCase1, &kCase2}) {
    const double em = well_geometry(*w).E_max;
    const double xi = 0.6 * em;
    const auto r = turning_roots(*w, xi);
    CHECK(std::abs(orbit_q(*w, r, 0.0) - r.lower()) < 1e-12);
    CHECK(std::abs(orbit_q(*w, r, pi) - r.upper()) < 1e-10);
    CHECK(std::abs(orbit_q(*w, r, 0.3) - orbit_q(*w, r, 0.3 + 2 * pi)) < 1e-10);
    // energy along theta = Omega t
    const double W = natural_frequency(*w, r);
    const double dth = 1e-4;
    for (double th = 0.2; th < 2 * pi; th += 0.7) {
      const double q = orbit_q(*w, r, th);
      const double qd = (orbit_q(*w, r, th + dth) - orbit_q(*w, r, th - dth)) / (2 * dth) * W;
      CHECK(std::abs(0.5 * qd * qd + w->value(q) - xi) < 1e-7);
    }
    // Fourier structure of the double-well orbit
    if (w->kind() == QuarticCase::DoubleWell) {
      const auto k = turning_modulus(r);
      const double K = elliptic::ellip_K(k);
      const double mean = boost::math::quadrature::trapezoidal(
                              [&](double t) { return orbit_q(*w, r, t); }, 0.0, 2 * pi, 1e-13) /
                          (2 * pi);
      const double a1 = boost::math::quadrature::trapezoidal(
                            [&](double t) { return orbit_q(*w, r, t) * std::cos(t); }, 0.0, 2 * pi,
                            1e-13) /
                        pi;
      CHECK(std::abs(mean - (r.a + (r.d - r.a) * elliptic::ellip_Pi(turning_gamma2(r), k) / K)) < 1e-6);
      CHECK(std::abs(std::abs(a1) - 2 * fourier_G(*w, r)) < 1e-6);
    }
  }
}

TEST_CASE("AAData ranges across the well") {
  for (const auto* w : {&kCase1, &kCase2}) {
    const double em = well_geometry(*w).E_max;
    double prevJ = 0.0;
    for (double f = 0.001; f < 0.999; f += 0.0499) {
      const auto d = aa_data(*w, f * em);
      CHECK(std::isfinite(d.J));
      CHECK(d.J > prevJ);
      CHECK(d.Omega_nat > 0.0);
      CHECK(d.Omega_nat < 1.0);
      CHECK(d.G > 0.0);
      CHECK(d.k.k() >= 0.0);
      CHECK(d.k.k() < 1.0);
      prevJ = d.J;
    }
    const auto near = aa_data(*w, em * (1 - 1e-9));
    CHECK(near.k.k() > 0.999);
  }
}

TEST_CASE("providers") {
  QuarticAA qa(kCase1);
  auto poly = std::make_shared<PolynomialWell>(std::vector<double>{0, 0, 0.5, -0.5 / 3, 0.05 / 4});
  NumericAA na(poly);
  CHECK(std::abs(qa.E_max() - na.E_max()) < 1e-12);
  CHECK(rel(qa.action(0.4), na.action(0.4)) < 1e-9);
  CHECK(rel(qa.frequency(0.4), na.frequency(0.4)) < 1e-9);
  CHECK(rel(qa.fourier(0.4), na.fourier(0.4)) < 1e-8);
  // G' by five-point difference vs a wide central difference of the quadrature
  const double h = 1e-3;
  CHECK(rel(qa.fourier_slope(0.4), (na.fourier(0.4 + h) - na.fourier(0.4 - h)) / (2 * h)) < 1e-5);
  CHECK_THROWS_AS(QuarticAA(QuarticWell(0.0, 1.0)), DomainError);
}
