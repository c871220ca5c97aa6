#pragma once

// Brute-force oracle: q'' + V'(q) = F sin(Omega t + psi) from rest at the
// bottom of the well, with first-hitting or energy escape detection, and
// bisection in F for the critical forcing.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wellescape/potentials.hpp"
#include "wellescape/resonance.hpp"

namespace wellescape {

enum class EscapeCriterion { FirstHitting, Energy };

std::string to_string(EscapeCriterion c);
EscapeCriterion parse_criterion(const std::string& s);  // "hitting" | "energy"

struct SimConfig {
  ForcingParams params;
  int horizon_periods = 1000;  // forcing periods
  EscapeCriterion criterion = EscapeCriterion::FirstHitting;
  double rtol = 1e-12;
  double atol = 1e-14;
  bool trace = false;
  double trace_dt = 0.0;                // 0: 32 samples per forcing period
  std::optional<double> E_thres;        // default: barrier energy
  std::optional<double> q_init;         // default: the equilibrium
  double p_init = 0.0;
  std::optional<double> t_end;          // overrides horizon_periods
};

struct TracePoint {
  double t, q, p, E;
};

struct SimResult {
  bool escaped = false;
  std::optional<double> t_escape;
  double max_energy = 0.0;
  bool singular = false;  // stopped at the domain edge (electrostatic collapse)
  double t_final = 0.0;
  double q_final = 0.0;
  double p_final = 0.0;
  std::vector<TracePoint> trace;
};

SimResult integrate_orbit(const Potential& well, const SimConfig& config);

struct ForceBracket {
  double low;   // stays
  double high;  // escapes
  double mid() const { return 0.5 * (low + high); }
};

/// Bisection on F at fixed Omega until high - low < width. Throws
/// DomainError unless `low` stays and `high` escapes.
ForceBracket critical_force_bisect(const Potential& well, double Omega, ForceBracket bracket,
                                   SimConfig config, double width = 1e-4);

struct SweepOptions {
  double f_step = 0.005;  // upward scan from F = 0
  double f_max = 1.0;
  double width = 1e-4;
  int monotone_checks = 3;  // extra scan points above the bracket
  int jobs = 1;
};

struct SweepRow {
  double Omega = 0.0;
  double f_low = 0.0;
  double f_high = 0.0;
  int horizon_periods = 0;
  EscapeCriterion criterion = EscapeCriterion::FirstHitting;
  bool monotone = true;
  std::string error;  // non-empty: point failed, bracket invalid

  bool ok() const { return error.empty(); }
};

std::vector<SweepRow> sweep(const Potential& well, const std::vector<double>& omegas,
                            const SimConfig& config, const SweepOptions& options = {});

/// Successful rows as a Simulation-tagged curve (F_crit = bracket midpoint).
EscapeCurve sweep_curve(const std::vector<SweepRow>& rows);

struct PsiScanRow {
  double psi;
  bool escaped;
  std::optional<double> t_escape;
};

std::vector<PsiScanRow> psi_scan(const Potential& well, const SimConfig& config, int n_psi,
                                 int jobs = 1);

}  // namespace wellescape
