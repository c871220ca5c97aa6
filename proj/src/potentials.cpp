#include "wellescape/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include "wellescape/errors.hpp"

namespace wellescape {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// Root of f on [lo, hi] to full double precision; f(lo), f(hi) must differ in sign.
template <class Fn>
double bracketed_root(Fn f, double lo, double hi) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw NumericalError("root not bracketed on [" + fmt(lo) + ", " + fmt(hi) + "]");
  }
  std::uintmax_t iters = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 2);
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  return 0.5 * (r.first + r.second);
}

// Local maxima of a polynomial well among the real critical points, nearest
// to the origin on each side. `dc` holds coefficients of p'(x)/x by degree.
std::pair<std::optional<double>, std::optional<double>> polynomial_barriers(
    const std::vector<double>& c) {
  // p'(x)/x = sum_{n>=2} n c_n x^{n-2}
  std::vector<double> r;
  for (std::size_t n = 2; n < c.size(); ++n) r.push_back(static_cast<double>(n) * c[n]);
  while (r.size() > 1 && r.back() == 0.0) r.pop_back();
  std::vector<double> crit;
  const int deg = static_cast<int>(r.size()) - 1;
  if (deg >= 1) {
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 0; i < deg; ++i) comp(0, i) = -r[deg - 1 - i] / r[deg];
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    for (int i = 0; i < deg; ++i) {
      const auto z = es.eigenvalues()[i];
      if (std::abs(z.imag()) <= 1e-9 * std::max(1.0, std::abs(z))) crit.push_back(z.real());
    }
  }
  auto curv = [&](double x) {
    double s = 0.0;
    for (std::size_t n = 2; n < c.size(); ++n) {
      s += static_cast<double>(n * (n - 1)) * c[n] * std::pow(x, static_cast<double>(n - 2));
    }
    return s;
  };
  auto dpx = [&](double x) {  // p'(x)/x
    double s = 0.0;
    for (std::size_t i = r.size(); i-- > 0;) s = s * x + r[i];
    return s;
  };
  std::optional<double> right, left;
  for (double x : crit) {
    // one Newton polish on p'(x)/x
    const double h = 1e-7 * std::max(1.0, std::abs(x));
    const double d = (dpx(x + h) - dpx(x - h)) / (2.0 * h);
    if (d != 0.0) x -= dpx(x) / d;
    if (!(curv(x) < 0.0)) continue;
    if (x > 0.0 && (!right || x < *right)) right = x;
    if (x < 0.0 && (!left || x > *left)) left = x;
  }
  return {left, right};
}

}  // namespace

double Potential::domain_upper() const { return kInf; }

std::vector<double> Potential::taylor_coefficients(int) const { return {}; }

std::string to_string(QuarticCase c) {
  switch (c) {
    case QuarticCase::DoubleWell: return "double_well";
    case QuarticCase::InvertedQuartic: return "inverted_quartic";
    case QuarticCase::Unsupported: return "unsupported";
  }
  return "unsupported";
}

QuarticCase classify_quartic(double alpha, double beta) {
  if (alpha < 0.0 && beta > 0.0 && beta < 2.0 * alpha * alpha / 9.0) return QuarticCase::DoubleWell;
  if (beta < 0.0) return QuarticCase::InvertedQuartic;
  return QuarticCase::Unsupported;
}

// ---- QuarticWell -----------------------------------------------------------

QuarticWell::QuarticWell(double alpha, double beta)
    : alpha_(alpha), beta_(beta), kind_(classify_quartic(alpha, beta)) {
  if (!std::isfinite(alpha) || !std::isfinite(beta)) {
    throw DomainError("quartic coefficients must be finite");
  }
  // Critical points besides the origin: 1 + alpha q + beta q^2 = 0.
  std::vector<double> crit;
  if (beta == 0.0) {
    if (alpha != 0.0) crit.push_back(-1.0 / alpha);
  } else {
    const double disc = alpha * alpha - 4.0 * beta;
    if (disc >= 0.0) {
      // numerically stable pair
      const double s = std::sqrt(disc);
      const double t = -0.5 * (alpha + std::copysign(s, alpha == 0.0 ? 1.0 : alpha));
      if (t != 0.0) {
        crit.push_back(t / beta);
        crit.push_back(1.0 / t);
      } else {
        crit.push_back(std::sqrt(-1.0 / beta));
        crit.push_back(-std::sqrt(-1.0 / beta));
      }
    }
  }
  for (double x : crit) {
    if (!(curvature(x) < 0.0)) continue;
    if (x > 0.0 && (!right_ || x < *right_)) right_ = x;
    if (x < 0.0 && (!left_ || x > *left_)) left_ = x;
  }
}

double QuarticWell::value(double q) const {
  return q * q * (0.5 + q * (alpha_ / 3.0 + q * beta_ / 4.0));
}

double QuarticWell::slope(double q) const { return q * (1.0 + q * (alpha_ + q * beta_)); }

double QuarticWell::curvature(double q) const { return 1.0 + q * (2.0 * alpha_ + 3.0 * beta_ * q); }

std::vector<double> QuarticWell::taylor_coefficients(int order) const {
  std::vector<double> c(static_cast<std::size_t>(std::max(order, 0)) + 1, 0.0);
  const double all[5] = {0.0, 0.0, 0.5, alpha_ / 3.0, beta_ / 4.0};
  for (int n = 0; n <= order && n <= 4; ++n) c[n] = all[n];
  return c;
}

std::string QuarticWell::describe() const {
  return "quartic(alpha=" + fmt(alpha_) + ", beta=" + fmt(beta_) + ", " + to_string(kind_) + ")";
}

Barrier quartic_barrier(double alpha, double beta) {
  const QuarticWell w(alpha, beta);
  if (w.kind() == QuarticCase::Unsupported) {
    throw DomainError("quartic (alpha=" + fmt(alpha) + ", beta=" + fmt(beta) +
                      ") is neither a double well nor an inverted quartic");
  }
  const auto g = well_geometry(w);
  return {g.q_thres, g.E_max};
}

// ---- ElectrostaticWell -----------------------------------------------------

Equilibria electrostatic_equilibrium(double nu, double d) {
  if (!(nu > 0.0) || !(d > 0.0)) throw DomainError("electrostatic well needs nu > 0 and d > 0");
  if (nu >= 4.0 * d * d * d / 27.0) {
    throw StaticPullInError("static pull-in: nu=" + fmt(nu) + " >= 4 d^3/27=" +
                            fmt(4.0 * d * d * d / 27.0) + ", no equilibrium");
  }
  // q^3 - 2d q^2 + d^2 q - nu = 0; q = t + 2d/3 gives t^3 + p t + r = 0.
  const double p = -d * d / 3.0;
  const double r = 2.0 * d * d * d / 27.0 - nu;
  const double m = 2.0 * std::sqrt(-p / 3.0);
  const double arg = std::clamp(3.0 * r / (p * m), -1.0, 1.0);
  const double phi = std::acos(arg) / 3.0;
  double roots[3];
  for (int k = 0; k < 3; ++k) {
    roots[k] = m * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0) + 2.0 * d / 3.0;
  }
  std::sort(roots, roots + 3);
  auto f = [&](double q) { return q * (d - q) * (d - q) - nu; };
  auto df = [&](double q) { return (d - q) * (d - 3.0 * q); };
  for (double& q : roots) {
    for (int it = 0; it < 2; ++it) {
      const double s = df(q);
      if (s != 0.0) q -= f(q) / s;
    }
  }
  return {roots[0], roots[1]};
}

ElectrostaticWell::ElectrostaticWell(double nu, double d) : nu_(nu), d_(d) {
  const auto eq = electrostatic_equilibrium(nu, d);
  q0_ = eq.q0;
  q_barrier_ = eq.q_barrier;
}

double ElectrostaticWell::value(double q) const {
  if (!(q < d_)) throw DomainError("electrostatic well evaluated at q >= d");
  return 0.5 * q * q - nu_ / (d_ - q);
}

double ElectrostaticWell::slope(double q) const {
  if (!(q < d_)) throw DomainError("electrostatic well evaluated at q >= d");
  const double g = d_ - q;
  return q - nu_ / (g * g);
}

double ElectrostaticWell::curvature(double q) const {
  if (!(q < d_)) throw DomainError("electrostatic well evaluated at q >= d");
  const double g = d_ - q;
  return 1.0 - 2.0 * nu_ / (g * g * g);
}

std::vector<double> ElectrostaticWell::taylor_coefficients(int order) const {
  // W(q0 + x) - W(q0): the spring contributes q0 x + x^2/2 and
  // -nu/(g - x) = -(nu/g) sum (x/g)^n with g = d - q0.
  std::vector<double> c(static_cast<std::size_t>(std::max(order, 0)) + 1, 0.0);
  const double g = d_ - q0_;
  double pw = nu_ / g;
  for (int n = 1; n <= order; ++n) {
    pw /= g;
    c[n] = -pw;
  }
  if (order >= 1) c[1] += q0_;
  if (order >= 2) c[2] += 0.5;
  return c;
}

std::string ElectrostaticWell::describe() const {
  return "electrostatic(nu=" + fmt(nu_) + ", d=" + fmt(d_) + ")";
}

// ---- PolynomialWell --------------------------------------------------------

PolynomialWell::PolynomialWell(std::vector<double> coeffs) : c_(std::move(coeffs)) {
  if (c_.size() < 3) c_.resize(3, 0.0);
  if (c_[0] != 0.0 || c_[1] != 0.0) {
    throw DomainError("polynomial well must have no constant or linear term");
  }
  if (!(c_[2] > 0.0)) throw DomainError("polynomial well needs a positive quadratic coefficient");
  auto [l, r] = polynomial_barriers(c_);
  left_ = l;
  right_ = r;
}

double PolynomialWell::value(double q) const {
  double s = 0.0;
  for (std::size_t i = c_.size(); i-- > 0;) s = s * q + c_[i];
  return s;
}

double PolynomialWell::slope(double q) const {
  double s = 0.0;
  for (std::size_t i = c_.size(); i-- > 1;) s = s * q + static_cast<double>(i) * c_[i];
  return s;
}

double PolynomialWell::curvature(double q) const {
  double s = 0.0;
  for (std::size_t i = c_.size(); i-- > 2;) s = s * q + static_cast<double>(i * (i - 1)) * c_[i];
  return s;
}

std::vector<double> PolynomialWell::taylor_coefficients(int order) const {
  std::vector<double> c(static_cast<std::size_t>(std::max(order, 0)) + 1, 0.0);
  for (std::size_t n = 0; n < c.size() && n < c_.size(); ++n) c[n] = c_[n];
  return c;
}

std::string PolynomialWell::describe() const {
  std::string s = "polynomial(";
  for (std::size_t n = 2; n < c_.size(); ++n) {
    if (n > 2) s += ", ";
    s += "c" + std::to_string(n) + "=" + fmt(c_[n]);
  }
  return s + ")";
}

// ---- TranslatedWell --------------------------------------------------------

TranslatedWell::TranslatedWell(PotentialPtr base) : base_(std::move(base)) {
  if (!base_) throw DomainError("translate_well: null base well");
  shift_ = base_->equilibrium();
  offset_ = base_->value(shift_);
}

double TranslatedWell::value(double q) const { return base_->value(q + shift_) - offset_; }
double TranslatedWell::slope(double q) const { return base_->slope(q + shift_); }
double TranslatedWell::curvature(double q) const { return base_->curvature(q + shift_); }

std::optional<double> TranslatedWell::right_barrier() const {
  auto b = base_->right_barrier();
  if (b) return *b - shift_;
  return std::nullopt;
}

std::optional<double> TranslatedWell::left_barrier() const {
  auto b = base_->left_barrier();
  if (b) return *b - shift_;
  return std::nullopt;
}

double TranslatedWell::domain_upper() const { return base_->domain_upper() - shift_; }

std::vector<double> TranslatedWell::taylor_coefficients(int order) const {
  auto c = base_->taylor_coefficients(order);
  if (!c.empty()) c[0] = 0.0;
  return c;
}

std::string TranslatedWell::describe() const {
  return "translated(" + base_->describe() + ", shift=" + fmt(shift_) + ")";
}

std::shared_ptr<const TranslatedWell> translate_well(PotentialPtr base) {
  return std::make_shared<const TranslatedWell>(std::move(base));
}

// ---- geometry --------------------------------------------------------------

std::pair<double, double> well_boundaries(const Potential& well, double E_thres) {
  const double q0 = well.equilibrium();
  const double v0 = well.value(q0);
  if (!(E_thres > 0.0)) throw EnergyRangeError("E_thres must be positive, got " + fmt(E_thres));
  auto f = [&](double q) { return well.value(q) - v0 - E_thres; };

  auto side = [&](std::optional<double> barrier, double dir) {
    if (barrier) {
      const double eb = well.value(*barrier) - v0;
      if (E_thres > eb) {
        throw EnergyRangeError("E_thres=" + fmt(E_thres) + " exceeds the barrier energy " +
                               fmt(eb));
      }
      if (E_thres == eb) return *barrier;
      return bracketed_root(f, std::min(q0, *barrier), std::max(q0, *barrier));
    }
    // Unbounded side: march outward until V exceeds the level.
    double step = std::sqrt(2.0 * E_thres / std::max(well.curvature(q0), 1e-300));
    double inner = q0;
    for (int i = 0; i < 200; ++i) {
      double outer = q0 + dir * step;
      if (dir > 0.0 && outer >= well.domain_upper()) break;
      if (f(outer) >= 0.0) return bracketed_root(f, std::min(inner, outer), std::max(inner, outer));
      inner = outer;
      step *= 2.0;
    }
    throw EnergyRangeError("no boundary for E_thres=" + fmt(E_thres) + " on the " +
                           (dir > 0.0 ? "right" : "left") + " side");
  };
  const double lo = side(well.left_barrier(), -1.0);
  const double hi = side(well.right_barrier(), 1.0);
  return {lo, hi};
}

WellGeometry well_geometry(const Potential& well, std::optional<double> E_thres) {
  WellGeometry g;
  g.q_equilibrium = well.equilibrium();
  const double v0 = well.value(g.q_equilibrium);
  const auto r = well.right_barrier();
  const auto l = well.left_barrier();
  if (!r && !l) throw DomainError("well has no barrier: " + well.describe());
  const double er = r ? well.value(*r) - v0 : kInf;
  const double el = l ? well.value(*l) - v0 : kInf;
  if (er < el) {
    g.side = EscapeSide::Right;
    g.q_thres = *r;
    g.E_max = er;
  } else if (el < er) {
    g.side = EscapeSide::Left;
    g.q_thres = *l;
    g.E_max = el;
  } else {
    g.side = EscapeSide::Both;
    g.q_thres = *r;
    g.E_max = er;
  }
  g.E_thres = E_thres.value_or(g.E_max);
  if (!(g.E_thres > 0.0 && g.E_thres <= g.E_max)) {
    throw EnergyRangeError("E_thres=" + fmt(g.E_thres) + " outside (0, E_max=" + fmt(g.E_max) + "]");
  }
  // the side that does not escape only needs a boundary below its own barrier
  const auto [lo, hi] = well_boundaries(well, g.E_thres);
  g.q_low = lo;
  g.q_high = hi;
  return g;
}

Dimensionless nondimensionalize(double m, double k_spring, double d, double eps, double area,
                                double V_dc, double f, double omega) {
  for (double x : {m, k_spring, d, eps, area, V_dc, f, omega}) {
    if (!(x > 0.0)) throw DomainError("nondimensionalize: all physical parameters must be positive");
  }
  // Dividing by k and rescaling time leaves the displacement unscaled.
  return {eps * area * V_dc * V_dc / (2.0 * k_spring), f / k_spring, omega * std::sqrt(m / k_spring)};
}

}  // namespace wellescape
