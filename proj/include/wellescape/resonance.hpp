#pragma once

// 1:1 resonance manifolds of the averaged (slow) dynamics:
//   C(theta, xi) = xi - F G(xi) sin(theta) - Omega J(xi),
// escape thresholds by the saddle and the maximum mechanisms, slow-flow
// integration and phase-cylinder grids.

#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "wellescape/action_angle.hpp"

namespace wellescape {

struct ForcingParams {
  double F = 0.0;
  double Omega = 1.0;
  double psi = std::numbers::pi / 2;  // only the simulator uses the phase
};

struct SlowState {
  double theta = 0.0;
  double xi = 0.0;
};

enum class Mechanism { Saddle, Maximum, Simulation };

std::string to_string(Mechanism m);

struct EscapePoint {
  double Omega = 0.0;
  double F_crit = 0.0;
  Mechanism mechanism = Mechanism::Saddle;
  double xi = 0.0;  // energy where the threshold is attained (analytic branches)
};

struct EscapeCurve {
  std::vector<EscapePoint> points;  // sorted by Omega
};

double conservation_C(const AAProvider& aa, const ForcingParams& p, const SlowState& s);

struct SlowFlowOptions {
  double E_thres = 0.0;     // 0: the provider's E_max
  double sample_dt = 0.1;   // spacing of the returned samples
  double rtol = 1e-11;
  double atol = 1e-12;
};

enum class SlowFlowStatus {
  Completed,      // reached t_end inside the well
  Escaped,        // xi reached E_thres
  ReachedOrigin,  // xi fell to 0 (the polar origin of the cylinder)
};

struct SlowFlowResult {
  std::vector<double> t;
  std::vector<SlowState> states;
  SlowFlowStatus status = SlowFlowStatus::Completed;

  bool escaped() const { return status == SlowFlowStatus::Escaped; }
};

/// Integrates  xi' = Omega_nat F G cos(theta),
///             theta' = Omega_nat - Omega - F Omega_nat G'(xi) sin(theta),
/// for which C is an exact first integral.
SlowFlowResult integrate_slow_flow(const AAProvider& aa, const ForcingParams& p, SlowState initial,
                                   double t_end, const SlowFlowOptions& opt = {});

struct CriticalAngles {
  double theta_saddle;
  double theta_max;
};

/// Stationary slow phases of C in theta: pi/2 and 3 pi/2.
CriticalAngles critical_angles();

struct SaddleDiagnostic {
  double xi;
  std::string reason;
};

/// Solves F G' + Omega J' = 1, F G + Omega J = xi at each energy; points
/// with F <= 0, Omega <= 0 or a singular system are dropped (and reported).
EscapeCurve saddle_curve(const AAProvider& aa, const std::vector<double>& xi_grid,
                         std::vector<SaddleDiagnostic>* dropped = nullptr);

/// The saddle-branch point(s) with the given forcing frequency.
std::vector<EscapePoint> saddle_at_omega(const AAProvider& aa, double Omega, int n_scan = 400);

/// F = slope * Omega + intercept with slope J/G and intercept -E/G evaluated
/// at E_eval = E_thres (1 - separatrix_margin).
struct MaximumLine {
  double E_thres = 0.0;
  double E_eval = 0.0;
  double slope = 0.0;
  double intercept = 0.0;

  double at(double Omega) const { return slope * Omega + intercept; }
  /// Omega where the line crosses F = 0.
  double root() const { return -intercept / slope; }
};

MaximumLine maximum_line(const AAProvider& aa, double E_thres, double separatrix_margin = 1e-4);

struct EnvelopeOptions {
  double E_thres = 0.0;  // 0: E_max
  double separatrix_margin = 1e-4;
  int n_xi = 400;
};

/// Zero-initial-condition escape threshold: the LPT C = 0 reaches xi only if
/// |xi - Omega J(xi)| <= F G(xi) on the way, so
///   F_crit(Omega) = sup_{0 < xi <= E_eval} |xi - Omega J(xi)| / G(xi).
/// An interior supremum is a saddle-branch point, one at E_eval lies on the
/// maximum line.
EscapePoint escape_threshold(const AAProvider& aa, double Omega, const EnvelopeOptions& opt = {});

struct CombinedCurve {
  EscapeCurve curve;
  std::size_t dip_index = 0;
};

CombinedCurve combined_escape_curve(const AAProvider& aa, const std::vector<double>& omegas,
                                    const EnvelopeOptions& opt = {}, int jobs = 1);

struct LptPoint {
  double theta;
  double xi;
};

struct RmGrid {
  std::vector<double> theta;    // n_theta values on [0, 2 pi]
  std::vector<double> xi;       // n_xi values on (0, E_thres)
  std::vector<double> C;        // row-major [i_xi * n_theta + i_theta]
  std::vector<LptPoint> lpt;    // C = 0 contour grown from xi = 0
  bool lpt_reaches_threshold = false;
};

RmGrid rm_grid(const AAProvider& aa, const ForcingParams& p, int n_theta, int n_xi,
               double E_thres = 0.0);

}  // namespace wellescape
