#pragma once

// Action-angle data for the quartic well in closed form (complete elliptic
// integrals), plus generic quadrature counterparts for any Potential.
//
// Energies xi are measured from the bottom of the well.

#include <memory>
#include <string>
#include <vector>

#include "wellescape/elliptic.hpp"
#include "wellescape/potentials.hpp"

namespace wellescape {

/// Real roots a > b > c > d of xi - V(q) = 0. The particle oscillates on
/// [d, c] for the double well and on [c, b] for the inverted quartic.
struct TurningRoots {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  QuarticCase kind = QuarticCase::DoubleWell;

  double lower() const { return kind == QuarticCase::DoubleWell ? d : c; }
  double upper() const { return kind == QuarticCase::DoubleWell ? c : b; }
};

struct AAData {
  double xi = 0.0;
  double J = 0.0;
  double Omega_nat = 0.0;
  double G = 0.0;
  elliptic::Modulus k;
  double gamma2 = 0.0;
  // Double well: G carries sinh(2 omega)/sinh(2 omega0). Inverted quartic:
  // sin(2 omega)/sinh(2 omega0), with 2 omega = pi cn^-1(sqrt((c-d)/(a-d)), k)/K.
  double omega = 0.0;
  double omega0 = 0.0;
};

/// Throws EnergyRangeError unless 0 < xi < E_max, DomainError for an Unsupported well.
TurningRoots turning_roots(const QuarticWell& well, double xi);

elliptic::Modulus turning_modulus(const TurningRoots& r);
double turning_gamma2(const TurningRoots& r);

double action_J(const QuarticWell& well, const TurningRoots& r);
double natural_frequency(const QuarticWell& well, const TurningRoots& r);
double fourier_G(const QuarticWell& well, const TurningRoots& r);
/// Orbit started at the lower turning point at theta = 0; 2 pi periodic.
double orbit_q(const QuarticWell& well, const TurningRoots& r, double theta);

AAData aa_data(const QuarticWell& well, double xi);

/// (sqrt 2 / pi) int sqrt(xi - V) dq over the oscillation interval.
double numeric_action(const Potential& well, double xi);
/// 2 pi / T with T = sqrt 2 closed-loop int dq / sqrt(xi - V).
double numeric_frequency(const Potential& well, double xi);
/// q_1 = (1/T) int_0^T q(t) cos(Omega t) dt along the orbit started at the
/// lower turning point; q_1 <= 0.
double numeric_fourier_q1(const Potential& well, double xi);

/// Source of J, Omega_nat and G as functions of the energy.
class AAProvider {
 public:
  virtual ~AAProvider() = default;

  /// Separatrix (barrier) energy; evaluations need 0 < xi < E_max.
  virtual double E_max() const = 0;
  virtual double action(double xi) const = 0;
  virtual double frequency(double xi) const = 0;
  virtual double fourier(double xi) const = 0;

  /// dJ/dxi = 1 / Omega_nat.
  double action_slope(double xi) const { return 1.0 / frequency(xi); }
  /// dG/dxi by a five-point central difference.
  double fourier_slope(double xi) const;
};

class QuarticAA final : public AAProvider {
 public:
  explicit QuarticAA(QuarticWell well);

  const QuarticWell& well() const { return well_; }

  double E_max() const override { return e_max_; }
  double action(double xi) const override;
  double frequency(double xi) const override;
  double fourier(double xi) const override;

 private:
  QuarticWell well_;
  double e_max_;
};

/// Quadrature-based provider for wells without a closed form.
class NumericAA final : public AAProvider {
 public:
  explicit NumericAA(PotentialPtr well);

  double E_max() const override { return e_max_; }
  double action(double xi) const override;
  double frequency(double xi) const override;
  double fourier(double xi) const override;

 private:
  PotentialPtr well_;
  double e_max_;
};

struct AATableRow {
  double xi, J, Omega, G, k, gamma2;
};

/// Closed-form table on the given energies.
std::vector<AATableRow> aa_table(const QuarticWell& well, const std::vector<double>& xi);

}  // namespace wellescape
