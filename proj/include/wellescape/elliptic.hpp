#pragma once

// Complete and incomplete elliptic integrals (Carlson symmetric forms) and
// Jacobi elliptic functions (descending Landen / AGM).
//
// Conventions: modulus k, parameter m = k^2, complementary parameter
// mc = 1 - k^2. The third-kind characteristic n enters as
//   Pi(n, k) = int_0^{pi/2} dphi / ((1 - n sin^2 phi) sqrt(1 - k^2 sin^2 phi)).

namespace wellescape::elliptic {

// Largest modulus accepted by the complete integrals of the first and third
// kind; beyond it a NearSeparatrixError is thrown.
inline constexpr double kMaxModulus = 1.0 - 1e-12;

// Elliptic modulus carrying both m and mc so that callers who know 1 - k^2
// to full relative precision (near the separatrix it is a small difference
// of roots) do not lose it to cancellation.
class Modulus {
 public:
  Modulus() = default;

  // Throws DomainError unless 0 <= k <= 1.
  static Modulus from_k(double k);
  // Throws DomainError unless m, mc >= 0 and |m + mc - 1| is rounding-small.
  static Modulus from_parameters(double m, double mc);

  double k() const;
  double m() const { return m_; }
  double mc() const { return mc_; }
  double k_complement() const;

  Modulus complement() const { return Modulus(mc_, m_); }

 private:
  Modulus(double m, double mc) : m_(m), mc_(mc) {}
  double m_ = 0.0;
  double mc_ = 1.0;
};

/// Carlson's R_F(x, y, z); at most one argument may be zero.
double carlson_rf(double x, double y, double z);
/// Carlson's R_D(x, y, z); z > 0.
double carlson_rd(double x, double y, double z);
/// Carlson's R_J(x, y, z, p) for p > 0.
double carlson_rj(double x, double y, double z, double p);
/// Carlson's R_C(x, y) for y > 0.
double carlson_rc(double x, double y);

double ellip_K(const Modulus& k);
double ellip_E(const Modulus& k);
/// Complete integral of the third kind; `n` must be < 1.
double ellip_Pi(double n, const Modulus& k);
/// Incomplete integral of the first kind for 0 <= phi <= pi/2.
double ellip_F_incomplete(double phi, const Modulus& k);

inline double ellip_K(double k) { return ellip_K(Modulus::from_k(k)); }
inline double ellip_E(double k) { return ellip_E(Modulus::from_k(k)); }
inline double ellip_Pi(double n, double k) { return ellip_Pi(n, Modulus::from_k(k)); }
inline double ellip_F_incomplete(double phi, double k) {
  return ellip_F_incomplete(phi, Modulus::from_k(k));
}

struct JacobiTriple {
  double sn;
  double cn;
  double dn;
};

/// sn, cn, dn for any real u and 0 <= k < 1.
JacobiTriple jacobi(double u, const Modulus& k);

inline double jacobi_sn(double u, const Modulus& k) { return jacobi(u, k).sn; }
inline double jacobi_cn(double u, const Modulus& k) { return jacobi(u, k).cn; }
inline double jacobi_dn(double u, const Modulus& k) { return jacobi(u, k).dn; }
inline double jacobi_sn(double u, double k) { return jacobi(u, Modulus::from_k(k)).sn; }
inline double jacobi_cn(double u, double k) { return jacobi(u, Modulus::from_k(k)).cn; }
inline double jacobi_dn(double u, double k) { return jacobi(u, Modulus::from_k(k)).dn; }

/// The u in [0, K(k)] with cn(u, k) = x, for 0 <= x <= 1.
double inv_cn(double x, const Modulus& k);
inline double inv_cn(double x, double k) { return inv_cn(x, Modulus::from_k(k)); }

}  // namespace wellescape::elliptic
