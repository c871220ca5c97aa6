#include "wellescape/elliptic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "wellescape/errors.hpp"

namespace wellescape::elliptic {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Duplication stopping tolerances (Carlson 1995, eqs. 2.2 and 2.7): the
// truncated series then carries relative error below machine epsilon.
const double kTolRF = std::pow(3.0 * kEps * 0.01, 1.0 / 8.0);
const double kTolRD = std::pow(0.2 * kEps * 0.01, 1.0 / 8.0);

// 1 - kMaxModulus^2: smallest complementary parameter accepted by K and Pi.
constexpr double kMinMc = (1.0 - kMaxModulus) * (1.0 + kMaxModulus);

void require_complete_range(const Modulus& k, const char* what) {
  if (k.mc() < kMinMc) {
    throw NearSeparatrixError(std::string(what) + ": modulus too close to 1 (mc=" +
                              std::to_string(k.mc()) + ")");
  }
}

}  // namespace

Modulus Modulus::from_k(double k) {
  if (!(k >= 0.0 && k <= 1.0)) {
    throw DomainError("elliptic modulus must satisfy 0 <= k <= 1, got " + std::to_string(k));
  }
  return Modulus(k * k, (1.0 - k) * (1.0 + k));
}

Modulus Modulus::from_parameters(double m, double mc) {
  if (!(m >= 0.0 && mc >= 0.0) || std::abs(m + mc - 1.0) > 1e-12) {
    throw DomainError("inconsistent elliptic parameters m=" + std::to_string(m) +
                      " mc=" + std::to_string(mc));
  }
  return Modulus(m, mc);
}

double Modulus::k() const { return std::sqrt(m_); }
double Modulus::k_complement() const { return std::sqrt(mc_); }

double carlson_rc(double x, double y) {
  if (!(x >= 0.0 && y > 0.0)) throw DomainError("carlson_rc: need x >= 0, y > 0");
  if (x < y) return std::atan(std::sqrt((y - x) / x)) / std::sqrt(y - x);
  if (x == y) return 1.0 / std::sqrt(y);
  return std::asinh(std::sqrt((x - y) / y)) / std::sqrt(x - y);
}

double carlson_rf(double x, double y, double z) {
  const int zeros = (x == 0.0) + (y == 0.0) + (z == 0.0);
  if (x < 0.0 || y < 0.0 || z < 0.0 || zeros > 1) {
    throw DomainError("carlson_rf: arguments must be >= 0 with at most one zero");
  }
  const double a0 = (x + y + z) / 3.0;
  double an = a0;
  const double q = std::max({std::abs(a0 - x), std::abs(a0 - y), std::abs(a0 - z)}) / kTolRF;
  double x0 = x, y0 = y, z0 = z, mul = 1.0;
  while (q >= mul * std::abs(an)) {
    const double lam = std::sqrt(x0) * std::sqrt(y0) + std::sqrt(y0) * std::sqrt(z0) +
                       std::sqrt(z0) * std::sqrt(x0);
    an = (an + lam) / 4.0;
    x0 = (x0 + lam) / 4.0;
    y0 = (y0 + lam) / 4.0;
    z0 = (z0 + lam) / 4.0;
    mul *= 4.0;
  }
  const double xx = (a0 - x) / (mul * an);
  const double yy = (a0 - y) / (mul * an);
  const double zz = -(xx + yy);
  const double e2 = xx * yy - zz * zz;
  const double e3 = xx * yy * zz;
  return (e3 * (6930.0 * e3 + e2 * (15015.0 * e2 - 16380.0) + 17160.0) +
          e2 * ((10010.0 - 5775.0 * e2) * e2 - 24024.0) + 240240.0) /
         (240240.0 * std::sqrt(an));
}

double carlson_rd(double x, double y, double z) {
  if (x < 0.0 || y < 0.0 || !(z > 0.0) || (x == 0.0 && y == 0.0)) {
    throw DomainError("carlson_rd: need x, y >= 0 (not both zero), z > 0");
  }
  const double a0 = (x + y + 3.0 * z) / 5.0;
  double an = a0;
  const double q = std::max({std::abs(a0 - x), std::abs(a0 - y), std::abs(a0 - z)}) / kTolRD;
  double x0 = x, y0 = y, z0 = z, mul = 1.0, s = 0.0;
  while (q >= mul * std::abs(an)) {
    const double lam = std::sqrt(x0) * std::sqrt(y0) + std::sqrt(y0) * std::sqrt(z0) +
                       std::sqrt(z0) * std::sqrt(x0);
    s += 1.0 / (mul * std::sqrt(z0) * (z0 + lam));
    an = (an + lam) / 4.0;
    x0 = (x0 + lam) / 4.0;
    y0 = (y0 + lam) / 4.0;
    z0 = (z0 + lam) / 4.0;
    mul *= 4.0;
  }
  const double xx = (a0 - x) / (mul * an);
  const double yy = (a0 - y) / (mul * an);
  const double zz = -(xx + yy) / 3.0;
  const double e2 = xx * yy - 6.0 * zz * zz;
  const double e3 = (3.0 * xx * yy - 8.0 * zz * zz) * zz;
  const double e4 = 3.0 * (xx * yy - zz * zz) * zz * zz;
  const double e5 = xx * yy * zz * zz * zz;
  return ((471240.0 - 540540.0 * e2) * e5 + (612612.0 * e2 - 540540.0 * e3 - 556920.0) * e4 +
          e3 * (306306.0 * e3 + e2 * (675675.0 * e2 - 706860.0) + 680680.0) +
          e2 * ((417690.0 - 255255.0 * e2) * e2 - 875160.0) + 4084080.0) /
             (4084080.0 * mul * an * std::sqrt(an)) +
         3.0 * s;
}

double carlson_rj(double x, double y, double z, double p) {
  const int zeros = (x == 0.0) + (y == 0.0) + (z == 0.0);
  if (x < 0.0 || y < 0.0 || z < 0.0 || zeros > 1 || !(p > 0.0)) {
    throw DomainError("carlson_rj: need x, y, z >= 0 (at most one zero) and p > 0");
  }
  const double a0 = (x + y + z + 2.0 * p) / 5.0;
  double an = a0;
  const double delta = (p - x) * (p - y) * (p - z);
  const double q =
      std::max({std::abs(a0 - x), std::abs(a0 - y), std::abs(a0 - z), std::abs(a0 - p)}) /
      kTolRD;
  double x0 = x, y0 = y, z0 = z, p0 = p, mul = 1.0, mul3 = 1.0, s = 0.0;
  while (q >= mul * std::abs(an)) {
    const double lam = std::sqrt(x0) * std::sqrt(y0) + std::sqrt(y0) * std::sqrt(z0) +
                       std::sqrt(z0) * std::sqrt(x0);
    const double d0 =
        (std::sqrt(p0) + std::sqrt(x0)) * (std::sqrt(p0) + std::sqrt(y0)) *
        (std::sqrt(p0) + std::sqrt(z0));
    const double e0 = delta / (mul3 * d0 * d0);
    s += carlson_rc(1.0, 1.0 + e0) / (mul * d0);
    an = (an + lam) / 4.0;
    x0 = (x0 + lam) / 4.0;
    y0 = (y0 + lam) / 4.0;
    z0 = (z0 + lam) / 4.0;
    p0 = (p0 + lam) / 4.0;
    mul *= 4.0;
    mul3 *= 64.0;
  }
  const double xx = (a0 - x) / (mul * an);
  const double yy = (a0 - y) / (mul * an);
  const double zz = (a0 - z) / (mul * an);
  const double pp = -(xx + yy + zz) / 2.0;
  const double e2 = xx * yy + xx * zz + yy * zz - 3.0 * pp * pp;
  const double e3 = xx * yy * zz + 2.0 * pp * (e2 + 2.0 * pp * pp);
  const double e4 = (2.0 * xx * yy * zz + pp * (e2 + 3.0 * pp * pp)) * pp;
  const double e5 = xx * yy * zz * pp * pp;
  return ((471240.0 - 540540.0 * e2) * e5 + (612612.0 * e2 - 540540.0 * e3 - 556920.0) * e4 +
          e3 * (306306.0 * e3 + e2 * (675675.0 * e2 - 706860.0) + 680680.0) +
          e2 * ((417690.0 - 255255.0 * e2) * e2 - 875160.0) + 4084080.0) /
             (4084080.0 * mul * an * std::sqrt(an)) +
         6.0 * s;
}

double ellip_K(const Modulus& k) {
  if (k.mc() <= 0.0) throw DomainError("ellip_K: k >= 1");
  require_complete_range(k, "ellip_K");
  return carlson_rf(0.0, k.mc(), 1.0);
}

double ellip_E(const Modulus& k) {
  if (k.mc() == 0.0) return 1.0;
  // 3 E = mc (R_D(0, mc, 1) + R_D(0, 1, mc)), free of the K - D cancellation.
  return k.mc() * (carlson_rd(0.0, k.mc(), 1.0) + carlson_rd(0.0, 1.0, k.mc())) / 3.0;
}

double ellip_Pi(double n, const Modulus& k) {
  if (!(n < 1.0)) {
    throw DomainError("ellip_Pi: characteristic must be < 1, got " + std::to_string(n));
  }
  if (k.mc() <= 0.0) throw DomainError("ellip_Pi: k >= 1");
  require_complete_range(k, "ellip_Pi");
  return carlson_rf(0.0, k.mc(), 1.0) + n / 3.0 * carlson_rj(0.0, k.mc(), 1.0, 1.0 - n);
}

double ellip_F_incomplete(double phi, const Modulus& k) {
  constexpr double kHalfPi = 1.5707963267948966;
  if (!(phi >= 0.0 && phi <= kHalfPi + 4.0 * kEps)) {
    throw DomainError("ellip_F_incomplete: need 0 <= phi <= pi/2");
  }
  if (k.mc() <= 0.0) throw DomainError("ellip_F_incomplete: k >= 1");
  if (phi == 0.0) return 0.0;
  const double s = std::sin(phi);
  const double c = std::cos(phi);
  return s * carlson_rf(c * c, k.mc() + k.m() * c * c, 1.0);
}

JacobiTriple jacobi(double u, const Modulus& k) {
  // Descending Landen transformation driven by the AGM of (1, k').
  const double mc = k.mc();
  if (mc == 0.0) {
    const double sech = 1.0 / std::cosh(u);
    return {std::tanh(u), sech, sech};
  }
  constexpr int kMaxLevels = 16;
  constexpr double kTol = 1e-8;  // quadratic convergence squares this
  std::array<double, kMaxLevels> em{};
  std::array<double, kMaxLevels> en{};
  double a = 1.0;
  double emc = mc;
  double c = 1.0;
  int levels = 0;
  for (int i = 0; i < kMaxLevels; ++i) {
    levels = i;
    em[i] = a;
    emc = std::sqrt(emc);
    en[i] = emc;
    c = 0.5 * (a + emc);
    if (std::abs(a - emc) <= kTol * a) break;
    emc *= a;
    a = c;
  }
  const double v = u * c;
  double sn = std::sin(v);
  double cn = std::cos(v);
  double dn = 1.0;
  if (sn != 0.0) {
    double ratio = cn / sn;
    c *= ratio;
    for (int ii = levels; ii >= 0; --ii) {
      const double b = em[ii];
      ratio *= c;
      c *= dn;
      dn = (en[ii] + ratio) / (b + ratio);
      ratio = c / b;
    }
    const double inv = 1.0 / std::sqrt(c * c + 1.0);
    sn = (sn >= 0.0) ? inv : -inv;
    cn = c * sn;
  }
  return {sn, cn, dn};
}

double inv_cn(double x, const Modulus& k) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("inv_cn: argument must lie in [0, 1], got " + std::to_string(x));
  }
  if (k.mc() <= 0.0) throw DomainError("inv_cn: k >= 1");
  if (x == 1.0) return 0.0;
  // u = F(arccos x, k) written without forming the angle.
  const double s = std::sqrt((1.0 - x) * (1.0 + x));
  return s * carlson_rf(x * x, k.mc() + k.m() * x * x, 1.0);
}

}  // namespace wellescape::elliptic
