#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace rkam {

// x'' + x^(2n+1) + g(x, t) + f(x, t) x' = 0, period 1 in t.
struct LienardProblem {
  int n = 1;
  std::function<double(double, double)> f, g;  // (x, t); empty means zero
  double p = 0.0;       // claimed growth exponent of f
  double q = 0.0;       // claimed growth exponent of g
  int derivatives = 2;  // x-derivative order used by the growth check
  std::string name;

  double eval_f(double x, double t) const { return f ? f(x, t) : 0.0; }
  double eval_g(double x, double t) const { return g ? g(x, t) : 0.0; }
  // Plane system x' = y, y' = -x^(2n+1) - g - f y.
  void rhs(double t, const double* z, double* dz) const;
  double energy(double x, double y) const;  // y^2/2 + x^(2n+2)/(2n+2)
};

// Built-in perturbations of amplitude a:
//   none           f = g = 0
//   compliant      g = a x^3 cos(2 pi t) / (1 + x^2)
//   mixed          compliant g plus f = a x cos(2 pi t) / (1 + x^2)
//   nonreversible  f = a x^2 cos(2 pi t) / (1 + x^2)  (even in x)
LienardProblem make_problem(const std::string& kind, int n, double amplitude);

struct StructureReport {
  double parity_f = 0.0, parity_g = 0.0;  // relative defects of the x/t symmetries
  double growth_f = 0.0, growth_g = 0.0;  // fitted exponents of |x^k d_x^k d_t^l h|
  bool reversible = true;
  bool growth_ok = true;
  std::vector<std::string> warnings;
};

StructureReport check_structure(const LienardProblem& problem);

// Solution of x' = y, y' = -x^(2n+1) through (0, 1) with its scaling constants.
// Stored as Fourier series in time: x0 odd (sines), y0 even (cosines).
class ReferenceOrbit {
 public:
  int n() const { return n_; }
  double period() const { return T0_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double c() const { return c_; }
  double c0() const { return c0_; }

  void eval(double s, double& x, double& y) const;  // time s
  void at_angle(double theta, double& x, double& y) const { eval(theta * T0_ / kTwoPi, x, y); }
  // Angle theta in [0, 2 pi) of the point (X, Y) on the unit level curve.
  double angle_of(double X, double Y) const;

  // Measured from the integrations used to build the orbit.
  double energy_residual() const { return energy_res_; }
  double symmetry_residual() const { return symmetry_res_; }
  double periodicity_residual() const { return period_res_; }
  double series_residual() const { return series_res_; }
  int harmonics() const { return static_cast<int>(xs_.size()); }

  friend ReferenceOrbit compute_reference_orbit(int n, double tol);

 private:
  static constexpr double kTwoPi = 6.283185307179586476925286766559;
  int n_ = 1;
  double T0_ = 0.0, alpha_ = 0.0, beta_ = 0.0, c_ = 0.0, c0_ = 0.0;
  std::vector<double> xs_, yc_;   // x0 = sum xs_[k] sin(k nu s); y0 = sum yc_[k] cos(k nu s)
  std::vector<double> phase_;     // unwrapped atan2(x0, y0) on the sample grid
  double energy_res_ = 0.0, symmetry_res_ = 0.0, period_res_ = 0.0, series_res_ = 0.0;
};

// T0 by adaptive root finding on the section {x = 0, y > 0} with tolerance tol.
ReferenceOrbit compute_reference_orbit(int n, double tol = 1e-13);

// Plane system in the action-angle coordinates (theta, rho) of the orbit:
// x = c^a rho^a x0(theta T0 / 2 pi), y = c^b rho^b y0(theta T0 / 2 pi),
// rho' = F1, theta' = c0 rho^(2b - 1) + F2.
class TwistSystem {
 public:
  TwistSystem(const LienardProblem& problem, const ReferenceOrbit& orbit, double rho_star = 0.0);

  const LienardProblem& problem() const { return problem_; }
  const ReferenceOrbit& orbit() const { return orbit_; }
  double rho_star() const { return rho_star_; }

  double twist(double rho) const;
  double F1(double theta, double rho, double t) const;
  double F2(double theta, double rho, double t) const;

  void to_plane(double theta, double rho, double& x, double& y) const;
  void from_plane(double x, double y, double& theta, double& rho) const;

  // Frequency variable lambda = c0 rho^(2b - 1) and back.
  double lambda_of(double rho) const;
  double rho_of(double lambda) const;

 private:
  void check_domain(double rho) const;
  LienardProblem problem_;
  ReferenceOrbit orbit_;
  double rho_star_;
};

// Smallest rho = 2^j at which consecutive growth exponents of sup |F1| agree
// to 0.05 (factor-two plateau).
double default_rho_star(const LienardProblem& problem, const ReferenceOrbit& orbit);

using ActionField = std::function<double(double theta, double rho, double t)>;

struct GrowthClassReport {
  std::vector<double> rho;
  std::vector<double> sup;  // max over k + l <= q of rho^(l - gamma) |d_theta^k d_rho^l d_t^p y|
  double exponent = 0.0;    // log-log slope of sup against rho
  double fitted_gamma = 0.0;
  double constant = 0.0;
  bool bounded = false;     // exponent <= 0.1
};

// Finite-difference estimate of membership in the decay class with order q,
// time derivative p_t and exponent gamma.
GrowthClassReport growth_class_estimate(const ActionField& y, int q, int p_t, double gamma,
                                        const std::vector<double>& rho_samples,
                                        int angle_samples = 16);

struct SectionSettings {
  double steps_per_radian = 50.0;  // integrator steps per radian of rotation
  int min_steps = 64;              // per unit time
  double lambda_min = 0.0;
  double lambda_max = std::numeric_limits<double>::infinity();
};

struct SectionPoint {
  double theta = 0.0;   // unwrapped relative to the starting angle
  double lambda = 0.0;
  bool escaped = false;
};

// Time-one map of the plane system read in (theta, lambda), computed with the
// symmetric integrator.
class PoincareMap {
 public:
  PoincareMap(const TwistSystem& system, SectionSettings settings = {});

  SectionPoint apply(double theta, double lambda) const;
  // sup |P G P z - G z| with G(theta, lambda) = (-theta, lambda); angles mod 2 pi.
  double reversibility_residual(const std::vector<SectionPoint>& samples) const;

  const TwistSystem& system() const { return sys_; }

 private:
  const TwistSystem& sys_;
  SectionSettings set_;
};

struct StabilitySettings {
  double t_max = 1e4;
  std::vector<double> levels{4.0, 6.0, 8.0, 10.0, 12.0};  // lambda of the starting curve
  int per_level = 4;
  double threshold = 3.0;
  double steps_per_radian = 20.0;
  int min_steps = 64;
  double escape_norm = 1e8;
};

struct OrbitRecord {
  double level = 0.0, theta = 0.0;
  double x0 = 0.0, y0 = 0.0;
  double reference_norm = 0.0;  // max |x| + |y| on the unperturbed level curve
  double max_norm = 0.0;        // max over time of |x| + |x'|
  double ratio = 0.0;
  double energy_drift = 0.0;    // max |h - h0| / h0
  long steps = 0;
  bool failed = false;
  std::string failure;
};

struct StabilityReport {
  std::vector<OrbitRecord> orbits;
  double max_ratio = 0.0;
  int flagged = 0;  // ratio above threshold or failed
  std::vector<std::string> warnings;
};

// Integrates every starting point to t_max; initial conditions are
// psi(2 pi j / per_level + 0.1, rho(lambda)) for each level.
StabilityReport lagrange_stability(const LienardProblem& problem, const ReferenceOrbit& orbit,
                                   const StabilitySettings& settings);

// max |x| + |y| over {h(x, y) = h}.
double level_norm(int n, double h);

}  // namespace rkam
