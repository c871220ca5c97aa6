// Elliptic integrals and Jacobi functions against independent oracles:
// AGM, adaptive quadrature of the defining integrals, bisection, and Boost.Math.

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/ellint_2.hpp>
#include <boost/math/special_functions/ellint_3.hpp>
#include <boost/math/special_functions/jacobi_elliptic.hpp>

#include "wellescape/elliptic.hpp"
#include "wellescape/errors.hpp"

using namespace wellescape;
using namespace wellescape::elliptic;
using Catch::Approx;
using std::numbers::pi;

namespace {

double agm_K(double k) {
  double a = 1.0, b = std::sqrt(1.0 - k * k);
  for (int i = 0; i < 60 && std::abs(a - b) > 1e-16 * a; ++i) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return pi / (2.0 * a);
}

template <class F>
double quad(F f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-14);
}

double bisect(auto f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("complete first kind: trivial and AGM values") {
  CHECK(ellip_K(0.0) == Approx(pi / 2).epsilon(1e-15));
  for (double k : {0.1, 0.5, 0.8, 0.95, 0.999}) {
    CHECK(std::abs(ellip_K(k) - agm_K(k)) < 1e-12 * agm_K(k));
  }
  CHECK(std::abs(ellip_K(0.8) - boost::math::ellint_1(0.8)) < 1e-13);
}

TEST_CASE("complete first kind: domain and separatrix") {
  CHECK_THROWS_AS(ellip_K(-0.1), DomainError);
  CHECK_THROWS_AS(ellip_K(1.0), DomainError);
  CHECK_THROWS_AS(ellip_K(1.1), DomainError);
  // k within 1e-12 of one: near-separatrix error, not a huge K
  const auto near = Modulus::from_parameters(1.0 - 1e-13, 1e-13);
  CHECK_THROWS_AS(ellip_K(near), NearSeparatrixError);
  const auto ok = Modulus::from_parameters(1.0 - 1e-9, 1e-9);
  CHECK(std::isfinite(ellip_K(ok)));
}

TEST_CASE("complete second kind") {
  CHECK(ellip_E(0.0) == Approx(pi / 2).epsilon(1e-15));
  CHECK(ellip_E(1.0) == 1.0);
  const double k = 0.5;
  const double ref = quad([&](double t) { return std::sqrt(1.0 - k * k * std::sin(t) * std::sin(t)); },
                          0.0, pi / 2);
  CHECK(std::abs(ellip_E(k) - ref) < 1e-13);
  CHECK(std::abs(ellip_E(0.999999) - boost::math::ellint_2(0.999999)) < 1e-12);
  CHECK_THROWS_AS(ellip_E(1.5), DomainError);
  CHECK_THROWS_AS(ellip_E(-0.5), DomainError);
}

TEST_CASE("complete third kind") {
  for (double k : {0.0, 0.3, 0.9}) CHECK(ellip_Pi(0.0, k) == Approx(ellip_K(k)).epsilon(1e-15));
  CHECK(std::abs(ellip_Pi(-1.0, 0.0) - pi / (2.0 * std::sqrt(2.0))) < 1e-14);
  const double n = -0.3, k = 0.6;
  const double ref = quad(
      [&](double t) {
        const double s2 = std::sin(t) * std::sin(t);
        return 1.0 / ((1.0 - n * s2) * std::sqrt(1.0 - k * k * s2));
      },
      0.0, pi / 2);
  CHECK(std::abs(ellip_Pi(n, k) - ref) < 1e-13);
  // positive characteristic below one (inverted-quartic branch)
  CHECK(std::abs(ellip_Pi(0.7, 0.4) - boost::math::ellint_3(0.4, 0.7)) < 1e-12);
  CHECK_THROWS_AS(ellip_Pi(1.0, 0.5), DomainError);
  CHECK_THROWS_AS(ellip_Pi(0.2, 1.0), DomainError);
}

TEST_CASE("incomplete first kind") {
  CHECK(ellip_F_incomplete(0.0, 0.7) == 0.0);
  for (double k : {0.1, 0.5, 0.9, 0.99}) {
    CHECK(std::abs(ellip_F_incomplete(pi / 2, k) - ellip_K(k)) < 1e-12 * ellip_K(k));
  }
  const double k = 0.9;
  const double ref = quad([&](double t) { return 1.0 / std::sqrt(1.0 - k * k * std::sin(t) * std::sin(t)); },
                          0.0, pi / 4);
  CHECK(std::abs(ellip_F_incomplete(pi / 4, k) - ref) < 1e-13);
  CHECK_THROWS_AS(ellip_F_incomplete(2.0, 0.5), DomainError);
  CHECK_THROWS_AS(ellip_F_incomplete(-0.1, 0.5), DomainError);
}

TEST_CASE("Jacobi functions: examples") {
  CHECK(std::abs(jacobi_sn(0.7, 0.0) - std::sin(0.7)) < 1e-15);
  CHECK(std::abs(jacobi_sn(ellip_K(0.5), 0.5) - 1.0) < 1e-13);
  // sn(0.9, 0.6): solve F(phi, 0.6) = 0.9 by bisection, sn = sin(phi)
  const double phi = bisect([](double p) { return ellip_F_incomplete(p, 0.6) - 0.9; }, 0.0, pi / 2);
  CHECK(std::abs(jacobi_sn(0.9, 0.6) - std::sin(phi)) < 1e-12);
  double cn, dn;
  const double sn = boost::math::jacobi_elliptic(0.6, 0.9, &cn, &dn);
  const auto t = jacobi(0.9, Modulus::from_k(0.6));
  CHECK(std::abs(t.sn - sn) < 1e-13);
  CHECK(std::abs(t.cn - cn) < 1e-13);
  CHECK(std::abs(t.dn - dn) < 1e-13);
}

TEST_CASE("Jacobi functions: identities on random arguments") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> U(-20.0, 20.0), Kd(0.0, 0.999);
  for (int i = 0; i < 500; ++i) {
    const double u = U(rng), k = Kd(rng);
    const auto t = jacobi(u, Modulus::from_k(k));
    CHECK(std::abs(t.sn * t.sn + t.cn * t.cn - 1.0) < 1e-10);
    CHECK(std::abs(t.dn * t.dn + k * k * t.sn * t.sn - 1.0) < 1e-10);
  }
}

TEST_CASE("Jacobi sine inverts F and has period 4K") {
  for (double k : {0.2, 0.7, 0.95}) {
    const double K = ellip_K(k);
    for (double phi : {0.1, 0.6, 1.2, 1.5}) {
      CHECK(std::abs(jacobi_sn(ellip_F_incomplete(phi, k), k) - std::sin(phi)) < 1e-12);
    }
    for (double u : {0.3, 1.1, 2.9}) {
      CHECK(std::abs(jacobi_sn(u + 4.0 * K, k) - jacobi_sn(u, k)) < 1e-12);
      CHECK(std::abs(jacobi_cn(u + 4.0 * K, k) - jacobi_cn(u, k)) < 1e-12);
    }
  }
}

TEST_CASE("inverse cn") {
  CHECK(inv_cn(1.0, 0.4) == 0.0);
  CHECK(std::abs(inv_cn(0.0, 0.4) - ellip_K(0.4)) < 1e-13);
  const double ref = bisect([](double u) { return jacobi_cn(u, 0.3) - 0.5; }, 0.0, ellip_K(0.3));
  CHECK(std::abs(inv_cn(0.5, 0.3) - ref) < 1e-12);
  for (double k : {0.0, 0.3, 0.9, 0.999999}) {
    for (double x : {0.01, 0.2, 0.5, 0.77, 0.99}) {
      CHECK(std::abs(jacobi_cn(inv_cn(x, k), k) - x) < 1e-10);
    }
  }
  CHECK_THROWS_AS(inv_cn(1.2, 0.3), DomainError);
  CHECK_THROWS_AS(inv_cn(-0.2, 0.3), DomainError);
}

TEST_CASE("Legendre relation and monotonicity") {
  for (int i = 1; i <= 9; ++i) {
    const auto k = Modulus::from_k(0.1 * i);
    const auto kp = k.complement();
    const double lhs = ellip_E(k) * ellip_K(kp) + ellip_E(kp) * ellip_K(k) - ellip_K(k) * ellip_K(kp);
    CHECK(std::abs(lhs - pi / 2) < 1e-10);
    CHECK(std::abs(k.m() + kp.m() - 1.0) < 1e-15);
  }
  double kprev = ellip_K(0.0), eprev = ellip_E(0.0);
  for (int i = 1; i <= 99; ++i) {
    const double k = 0.01 * i;
    CHECK(ellip_K(k) > kprev);
    CHECK(ellip_E(k) < eprev);
    kprev = ellip_K(k);
    eprev = ellip_E(k);
  }
}

TEST_CASE("Carlson forms: special values") {
  CHECK(std::abs(carlson_rf(1.0, 2.0, 0.0) - 1.3110287771461) < 1e-12);
  CHECK(std::abs(carlson_rc(0.0, 0.25) - pi) < 1e-14);
  CHECK(std::abs(carlson_rd(0.0, 2.0, 1.0) - 1.7972103521034) < 1e-12);
  CHECK(std::abs(carlson_rj(0.0, 1.0, 2.0, 3.0) - 0.77688623778582) < 1e-12);
  CHECK_THROWS_AS(carlson_rf(0.0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(carlson_rj(1.0, 1.0, 1.0, 0.0), DomainError);
}
