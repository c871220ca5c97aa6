#pragma once

// One-dimensional potential wells: the quartic normal form, the
// parallel-plate electrostatic well, translated wells and general
// polynomial wells (fits), together with their barrier geometry.
//
// Energies in WellGeometry are measured from the bottom of the well,
// i.e. E = V(q) - V(q_equilibrium).

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace wellescape {

class Potential {
 public:
  virtual ~Potential() = default;

  virtual double value(double q) const = 0;
  virtual double slope(double q) const = 0;
  virtual double curvature(double q) const = 0;

  /// Stable minimum the particle starts from.
  virtual double equilibrium() const = 0;
  /// Nearest local maximum to the right / left of the minimum, if any.
  virtual std::optional<double> right_barrier() const = 0;
  virtual std::optional<double> left_barrier() const = 0;
  /// The potential is defined for q strictly below this value.
  virtual double domain_upper() const;

  /// Coefficients c_0..c_order of V(q0 + x) - V(q0) = sum c_n x^n, or an
  /// empty vector if no closed form is known (callers fall back to
  /// finite differences).
  virtual std::vector<double> taylor_coefficients(int order) const;

  virtual std::string describe() const = 0;
};

using PotentialPtr = std::shared_ptr<const Potential>;

enum class QuarticCase { DoubleWell, InvertedQuartic, Unsupported };

std::string to_string(QuarticCase c);

/// DoubleWell iff alpha < 0 and 0 < beta < 2 alpha^2 / 9; InvertedQuartic iff beta < 0.
QuarticCase classify_quartic(double alpha, double beta);

/// V(q) = q^2/2 + (alpha/3) q^3 + (beta/4) q^4.
class QuarticWell final : public Potential {
 public:
  QuarticWell(double alpha, double beta);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  QuarticCase kind() const { return kind_; }

  double value(double q) const override;
  double slope(double q) const override;
  double curvature(double q) const override;
  double equilibrium() const override { return 0.0; }
  std::optional<double> right_barrier() const override { return right_; }
  std::optional<double> left_barrier() const override { return left_; }
  std::vector<double> taylor_coefficients(int order) const override;
  std::string describe() const override;

 private:
  double alpha_;
  double beta_;
  QuarticCase kind_;
  std::optional<double> right_;
  std::optional<double> left_;
};

struct Barrier {
  double q_thres;
  double E_max;
};

/// Escape-side barrier of a supported quartic. For the inverted quartic
/// this is the lower of the two maxima (the right one on a tie).
/// Throws DomainError when the classification is Unsupported.
Barrier quartic_barrier(double alpha, double beta);

/// W(q) = q^2/2 - nu/(d - q), defined for q < d.
class ElectrostaticWell final : public Potential {
 public:
  /// Throws StaticPullInError when nu >= 4 d^3 / 27 (no equilibrium).
  ElectrostaticWell(double nu, double d);

  double nu() const { return nu_; }
  double gap() const { return d_; }

  double value(double q) const override;
  double slope(double q) const override;
  double curvature(double q) const override;
  double equilibrium() const override { return q0_; }
  std::optional<double> right_barrier() const override { return q_barrier_; }
  std::optional<double> left_barrier() const override { return std::nullopt; }
  double domain_upper() const override { return d_; }
  std::vector<double> taylor_coefficients(int order) const override;
  std::string describe() const override;

 private:
  double nu_;
  double d_;
  double q0_;
  double q_barrier_;
};

struct Equilibria {
  double q0;
  double q_barrier;
};

/// Roots of q (d - q)^2 = nu in (0, d): the stable minimum and the barrier.
Equilibria electrostatic_equilibrium(double nu, double d);

/// p(x) = sum_{n>=2} c_n x^n; coefficients indexed by degree (c[0], c[1] ignored, must be 0).
class PolynomialWell final : public Potential {
 public:
  explicit PolynomialWell(std::vector<double> coeffs);

  const std::vector<double>& coefficients() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }

  double value(double q) const override;
  double slope(double q) const override;
  double curvature(double q) const override;
  double equilibrium() const override { return 0.0; }
  std::optional<double> right_barrier() const override { return right_; }
  std::optional<double> left_barrier() const override { return left_; }
  std::vector<double> taylor_coefficients(int order) const override;
  std::string describe() const override;

 private:
  std::vector<double> c_;
  std::optional<double> right_;
  std::optional<double> left_;
};

/// W^(x) = W(x + shift) - offset with shift = q0 and offset = W(q0).
class TranslatedWell final : public Potential {
 public:
  explicit TranslatedWell(PotentialPtr base);

  const Potential& base() const { return *base_; }
  double shift() const { return shift_; }
  double offset() const { return offset_; }

  double value(double q) const override;
  double slope(double q) const override;
  double curvature(double q) const override;
  double equilibrium() const override { return 0.0; }
  std::optional<double> right_barrier() const override;
  std::optional<double> left_barrier() const override;
  double domain_upper() const override;
  std::vector<double> taylor_coefficients(int order) const override;
  std::string describe() const override;

 private:
  PotentialPtr base_;
  double shift_;
  double offset_;
};

std::shared_ptr<const TranslatedWell> translate_well(PotentialPtr base);

enum class EscapeSide { Right, Left, Both };

struct WellGeometry {
  double q_equilibrium = 0.0;
  double q_thres = 0.0;  // barrier on the escape side
  double E_max = 0.0;
  double E_thres = 0.0;
  double q_low = 0.0;
  double q_high = 0.0;
  EscapeSide side = EscapeSide::Right;
};

/// Barrier geometry; E_thres defaults to E_max. Throws DomainError when the
/// well has no barrier and EnergyRangeError for E_thres outside (0, E_max].
WellGeometry well_geometry(const Potential& well, std::optional<double> E_thres = std::nullopt);

/// Nearest solutions of V(q) - V(q0) = E_thres on either side of the minimum.
std::pair<double, double> well_boundaries(const Potential& well, double E_thres);

struct Dimensionless {
  double nu;
  double F;
  double Omega;
};

/// m x'' + k x = eps A V_dc^2 / (2 (d - x)^2) + f sin(omega t) in the time
/// tau = sqrt(k/m) t: q'' + q = nu/(d - q)^2 + F sin(Omega tau).
Dimensionless nondimensionalize(double m, double k_spring, double d, double eps, double area,
                                double V_dc, double f, double omega);

}  // namespace wellescape
