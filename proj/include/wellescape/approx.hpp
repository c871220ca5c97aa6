#pragma once

// Quartic (and higher Taylor) polynomial fits p(x) = sum_{n>=2} c_n x^n of a
// translated well W^(x) (minimum at x = 0, W^(0) = 0), plus the bridge to
// the unit-curvature quartic normal form used by the analytic machinery.

#include <optional>
#include <string>
#include <vector>

#include "wellescape/potentials.hpp"

namespace wellescape {

enum class FitScheme { GlobalBarrier, GlobalInflection, GlobalThreePoint, L2, Taylor };

std::string to_string(FitScheme s);

enum class ConstraintKind { Value, Curvature };

struct FitConstraint {
  ConstraintKind kind;
  double x;
};

struct FitPolynomial {
  std::vector<double> coeffs;  // by degree; coeffs[0] = coeffs[1] = 0
  FitScheme scheme = FitScheme::L2;
  int order = 4;
  std::vector<FitConstraint> constraints;  // interpolation schemes only
  std::optional<double> threshold_q;       // Taylor: truncate at the source barrier

  double value(double x) const;
  double slope(double x) const;
  double curvature(double x) const;
  std::string tag() const;  // "barrier", "inflection", "three-point", "l2", "taylor:N"
  std::shared_ptr<const PolynomialWell> well() const;
};

/// Fit interval of a translated well: q_max is the escape barrier, q_min the
/// opposite point at the same energy, q_infl the inflection in (0, q_max).
struct FitInterval {
  double q_min;
  double q_max;
  double q_infl;
};

FitInterval fit_interval(const Potential& w_hat);

/// Root of W^'' in (0, barrier). Throws DomainError if there is none.
double inflection_point(const Potential& w_hat);

/// p(q_max) = W^(q_max), p(q_min) = W^(q_min), p''(0) = W^''(0).
FitPolynomial fit_global_barrier(const Potential& w_hat, double q_min, double q_max);
/// Same system with q_max replaced by the inflection point.
FitPolynomial fit_global_inflection(const Potential& w_hat, double q_min);
/// Interpolation through q_min, q_infl and q_max (no curvature condition).
FitPolynomial fit_global_three_point(const Potential& w_hat, double q_min, double q_infl, double q_max);
/// Least-squares projection onto span{x^2, x^3, x^4} over [q_min, q_max].
FitPolynomial fit_l2(const Potential& w_hat, double q_min, double q_max);
/// Taylor polynomial of order 4, 6, 8 or 10 of W about its minimum.
FitPolynomial fit_taylor(const Potential& well, int order);

/// c_0..c_order of W(x0 + x) - W(x0) from Richardson-extrapolated central
/// differences (fallback for wells without closed-form coefficients).
std::vector<double> numeric_taylor_coefficients(const Potential& well, double x0, int order);

/// Integral of (W^ - p)^2 over [a, b].
double l2_residual(const Potential& w_hat, const FitPolynomial& fit, double a, double b);
/// Defining-constraint residuals |p - W^| (or |p'' - W^''|), in constraint order.
std::vector<double> constraint_residuals(const Potential& w_hat, const FitPolynomial& fit);

/// Barrier geometry of the fitted well. Taylor fits are truncated at
/// E = p(threshold_q). Throws DomainError if the fit has no barrier.
WellGeometry fit_geometry(const FitPolynomial& fit);

/// x'' + p'(x) = F^ sin(w t) with p = c2 x^2 + c3 x^3 + c4 x^4 becomes the
/// quartic normal form in tau = mu t (lambda = 1, mu = sqrt(2 c2)):
/// alpha = 3 c3 / (2 c2), beta = 2 c4 / c2, F = F^ / (2 c2), Omega = w / mu,
/// E = E^ / (2 c2).
struct NormalForm {
  double alpha;
  double beta;
  double lambda = 1.0;
  double mu;

  double curvature() const { return mu * mu; }  // 2 c2
  QuarticWell well() const { return QuarticWell(alpha, beta); }
  double to_normal_omega(double w) const { return w / mu; }
  double to_fit_omega(double Omega) const { return Omega * mu; }
  double to_normal_force(double F) const { return F / curvature(); }
  double to_fit_force(double F) const { return F * curvature(); }
  double to_normal_energy(double E) const { return E / curvature(); }
};

/// Throws DomainError for non-quartic fits or c2 <= 0.
NormalForm normal_form(const FitPolynomial& fit);

struct FitReport {
  FitPolynomial fit;
  std::vector<double> residuals;
  double l2 = 0.0;
  std::optional<WellGeometry> geometry;
  std::string geometry_error;
  double barrier_discrepancy = 0.0;  // relative, fitted vs source barrier energy
  std::optional<NormalForm> normal;
};

FitReport fit_report(const Potential& w_hat, const FitPolynomial& fit, const FitInterval& interval);

}  // namespace wellescape
