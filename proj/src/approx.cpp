#include "wellescape/approx.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "wellescape/errors.hpp"

namespace wellescape {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_translated(const Potential& w) {
  if (std::abs(w.equilibrium()) > 1e-12 || std::abs(w.value(0.0)) > 1e-12) {
    throw DomainError("fit needs a translated well (minimum at 0 with value 0): " + w.describe());
  }
}

double basis(int n, double x) { return std::pow(x, n); }

FitPolynomial solve_system(const Potential& w, std::vector<FitConstraint> cons, FitScheme scheme) {
  Eigen::Matrix3d A;
  Eigen::Vector3d rhs;
  for (int i = 0; i < 3; ++i) {
    const auto& c = cons[static_cast<std::size_t>(i)];
    for (int n = 2; n <= 4; ++n) {
      A(i, n - 2) = c.kind == ConstraintKind::Value ? basis(n, c.x)
                                                   : n * (n - 1) * (n > 2 ? basis(n - 2, c.x) : 1.0);
    }
    rhs(i) = c.kind == ConstraintKind::Value ? w.value(c.x) : w.curvature(c.x);
  }
  Eigen::FullPivLU<Eigen::Matrix3d> lu(A);
  if (lu.rank() < 3 || lu.rcond() < 1e-14) throw NumericalError("singular fit system (degenerate constraint points)");
  const Eigen::Vector3d c = lu.solve(rhs);
  FitPolynomial p;
  p.coeffs = {0.0, 0.0, c(0), c(1), c(2)};
  p.scheme = scheme;
  p.constraints = std::move(cons);
  return p;
}

template <class Fn>
double integrate(Fn f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-12);
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double binom(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

// central difference for the n-th derivative with nodes x0 + (n/2 - k) h
double central_difference(const Potential& w, double x0, int n, double h) {
  double s = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    s += sign * binom(n, k) * w.value(x0 + (0.5 * n - k) * h);
  }
  return s / std::pow(h, n);
}

// Richardson/Neville tableau over h, h/2, h/4, ... (error series in h^2)
double derivative(const Potential& w, double x0, int n, double h0) {
  constexpr int kLevels = 6;
  double T[kLevels][kLevels];
  double best = 0.0, best_err = kInf;
  double h = h0;
  for (int i = 0; i < kLevels; ++i, h *= 0.5) {
    T[i][0] = central_difference(w, x0, n, h);
    double f = 4.0;
    for (int j = 1; j <= i; ++j, f *= 4.0) {
      T[i][j] = T[i][j - 1] + (T[i][j - 1] - T[i - 1][j - 1]) / (f - 1.0);
    }
    if (i > 0) {
      const double err = std::max(std::abs(T[i][i] - T[i][i - 1]), std::abs(T[i][i] - T[i - 1][i - 1]));
      if (err < best_err) {
        best_err = err;
        best = T[i][i];
      }
    }
  }
  return best;
}

}  // namespace

std::string to_string(FitScheme s) {
  switch (s) {
    case FitScheme::GlobalBarrier: return "barrier";
    case FitScheme::GlobalInflection: return "inflection";
    case FitScheme::GlobalThreePoint: return "three-point";
    case FitScheme::L2: return "l2";
    case FitScheme::Taylor: return "taylor";
  }
  return "unknown";
}

double FitPolynomial::value(double x) const {
  double s = 0.0;
  for (std::size_t n = coeffs.size(); n-- > 0;) s = s * x + coeffs[n];
  return s;
}

double FitPolynomial::slope(double x) const {
  double s = 0.0;
  for (std::size_t n = coeffs.size(); n-- > 1;) s = s * x + static_cast<double>(n) * coeffs[n];
  return s;
}

double FitPolynomial::curvature(double x) const {
  double s = 0.0;
  for (std::size_t n = coeffs.size(); n-- > 2;) s = s * x + static_cast<double>(n * (n - 1)) * coeffs[n];
  return s;
}

std::string FitPolynomial::tag() const {
  if (scheme == FitScheme::Taylor) return "taylor:" + std::to_string(order);
  return to_string(scheme);
}

std::shared_ptr<const PolynomialWell> FitPolynomial::well() const {
  return std::make_shared<const PolynomialWell>(coeffs);
}

double inflection_point(const Potential& w) {
  const auto b = w.right_barrier();
  const double x0 = w.equilibrium();
  if (!b || !(w.curvature(x0) > 0.0) || !(w.curvature(*b) < 0.0)) {
    throw DomainError("no inflection point between the minimum and the barrier");
  }
  std::uintmax_t it = 200;
  const auto r = boost::math::tools::toms748_solve([&](double x) { return w.curvature(x); }, x0, *b,
                                                   boost::math::tools::eps_tolerance<double>(52), it);
  return 0.5 * (r.first + r.second);
}

FitInterval fit_interval(const Potential& w) {
  require_translated(w);
  const auto geo = well_geometry(w);
  if (geo.side != EscapeSide::Right) throw DomainError("fit interval expects a right-side barrier");
  const auto [lo, hi] = well_boundaries(w, geo.E_max);
  (void)hi;
  return {lo, geo.q_thres, inflection_point(w)};
}

FitPolynomial fit_global_barrier(const Potential& w, double q_min, double q_max) {
  require_translated(w);
  if (!(q_min < 0.0 && 0.0 < q_max)) throw DomainError("fit_global_barrier needs q_min < 0 < q_max");
  return solve_system(w,
                      {{ConstraintKind::Value, q_max}, {ConstraintKind::Value, q_min},
                       {ConstraintKind::Curvature, 0.0}},
                      FitScheme::GlobalBarrier);
}

FitPolynomial fit_global_inflection(const Potential& w, double q_min) {
  require_translated(w);
  const double q_infl = inflection_point(w);
  if (!(q_min < 0.0)) throw DomainError("fit_global_inflection needs q_min < 0");
  return solve_system(w,
                      {{ConstraintKind::Value, q_infl}, {ConstraintKind::Value, q_min},
                       {ConstraintKind::Curvature, 0.0}},
                      FitScheme::GlobalInflection);
}

FitPolynomial fit_global_three_point(const Potential& w, double q_min, double q_infl, double q_max) {
  require_translated(w);
  if (!(q_min < 0.0 && 0.0 < q_infl && q_infl < q_max)) {
    throw DomainError("fit_global_three_point needs q_min < 0 < q_infl < q_max");
  }
  return solve_system(w,
                      {{ConstraintKind::Value, q_min}, {ConstraintKind::Value, q_infl},
                       {ConstraintKind::Value, q_max}},
                      FitScheme::GlobalThreePoint);
}

FitPolynomial fit_l2(const Potential& w, double a, double b) {
  require_translated(w);
  if (!(a < b)) throw DomainError("fit_l2 needs q_min < q_max");
  Eigen::Matrix3d G;
  Eigen::Vector3d m;
  for (int i = 2; i <= 4; ++i) {
    for (int j = 2; j <= 4; ++j) {
      const int n = i + j + 1;
      G(i - 2, j - 2) = (std::pow(b, n) - std::pow(a, n)) / n;
    }
    m(i - 2) = integrate([&](double x) { return w.value(x) * basis(i, x); }, a, b);
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(G);
  const auto sv = svd.singularValues();
  if (!(sv(2) > 1e-13 * sv(0))) throw NumericalError("ill-conditioned Gram matrix (degenerate interval)");
  const Eigen::Vector3d c = G.ldlt().solve(m);
  FitPolynomial p;
  p.coeffs = {0.0, 0.0, c(0), c(1), c(2)};
  p.scheme = FitScheme::L2;
  return p;
}

std::vector<double> numeric_taylor_coefficients(const Potential& w, double x0, int order) {
  if (order < 2) throw DomainError("Taylor order must be at least 2");
  std::vector<double> c(static_cast<std::size_t>(order) + 1, 0.0);
  // the step shrinks with the order's growing stencil but stays inside the domain
  const double room = std::min(1.0, 0.5 * (w.domain_upper() - x0));
  for (int n = 1; n <= order; ++n) {
    const double h0 = std::min(0.4, room / (0.5 * n + 1.0));
    c[n] = derivative(w, x0, n, h0) / factorial(n);
  }
  return c;
}

FitPolynomial fit_taylor(const Potential& well, int order) {
  if (order != 4 && order != 6 && order != 8 && order != 10) {
    throw DomainError("Taylor order must be one of 4, 6, 8, 10 (got " + std::to_string(order) + ")");
  }
  const double x0 = well.equilibrium();
  auto c = well.taylor_coefficients(order);
  if (c.size() != static_cast<std::size_t>(order) + 1) c = numeric_taylor_coefficients(well, x0, order);
  c[0] = 0.0;
  c[1] = 0.0;  // zero at a minimum
  FitPolynomial p;
  p.coeffs = std::move(c);
  p.scheme = FitScheme::Taylor;
  p.order = order;
  if (auto b = well.right_barrier()) p.threshold_q = *b - x0;
  return p;
}

double l2_residual(const Potential& w, const FitPolynomial& fit, double a, double b) {
  return integrate(
      [&](double x) {
        const double r = w.value(x) - fit.value(x);
        return r * r;
      },
      a, b);
}

std::vector<double> constraint_residuals(const Potential& w, const FitPolynomial& fit) {
  std::vector<double> r;
  for (const auto& c : fit.constraints) {
    r.push_back(c.kind == ConstraintKind::Value ? std::abs(fit.value(c.x) - w.value(c.x))
                                                : std::abs(fit.curvature(c.x) - w.curvature(c.x)));
  }
  return r;
}

WellGeometry fit_geometry(const FitPolynomial& fit) {
  const auto w = fit.well();
  if (!w->right_barrier() && !w->left_barrier()) {
    throw DomainError("fitted polynomial " + fit.tag() + " has no barrier");
  }
  if (fit.threshold_q) return well_geometry(*w, fit.value(*fit.threshold_q));
  return well_geometry(*w);
}

NormalForm normal_form(const FitPolynomial& fit) {
  const auto& c = fit.coeffs;
  for (std::size_t n = 5; n < c.size(); ++n) {
    if (c[n] != 0.0) throw DomainError("normal form needs a quartic fit, got " + fit.tag());
  }
  const double c2 = c.size() > 2 ? c[2] : 0.0;
  const double c3 = c.size() > 3 ? c[3] : 0.0;
  const double c4 = c.size() > 4 ? c[4] : 0.0;
  if (!(c2 > 0.0)) throw DomainError("normal form needs positive curvature at the minimum");
  NormalForm nf;
  nf.alpha = 1.5 * c3 / c2;
  nf.beta = 2.0 * c4 / c2;
  nf.mu = std::sqrt(2.0 * c2);
  return nf;
}

FitReport fit_report(const Potential& w, const FitPolynomial& fit, const FitInterval& iv) {
  FitReport r;
  r.fit = fit;
  r.residuals = constraint_residuals(w, fit);
  r.l2 = l2_residual(w, fit, iv.q_min, iv.q_max);
  try {
    r.geometry = fit_geometry(fit);
    const double source = w.value(iv.q_max);
    r.barrier_discrepancy = (r.geometry->E_max - source) / source;
  } catch (const DomainError& e) {
    r.geometry_error = e.what();
  }
  if (fit.order == 4) {
    try {
      r.normal = normal_form(fit);
    } catch (const DomainError&) {
    }
  }
  return r;
}

}  // namespace wellescape
