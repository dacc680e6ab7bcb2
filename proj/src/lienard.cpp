#include "rkam/lienard.hpp"

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <complex>
#include <numbers>

#include "rkam/errors.hpp"
#include "rkam/integrator.hpp"
#include "rkam/numerics.hpp"

namespace rkam {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMinSamples = 256;
constexpr int kMaxSamples = 8192;
constexpr int kSubsteps = 4;

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

double binomial(int k, int j) {
  double r = 1.0;
  for (int i = 1; i <= j; ++i) r = r * (k - j + i) / i;
  return r;
}

// k-th central difference of fn at x with step h.
double central_diff(const std::function<double(double)>& fn, double x, int k, double h) {
  if (k == 0) return fn(x);
  double acc = 0.0;
  for (int j = 0; j <= k; ++j) {
    const double w = ((j % 2) ? -1.0 : 1.0) * binomial(k, j);
    acc += w * fn(x + (0.5 * k - j) * h);
  }
  return acc / ipow(h, k);
}

double rel_defect(double defect, double scale) { return scale > 0.0 ? defect / scale : 0.0; }

// Largest sampled |x^k d_x^k d_t^l h| at |x| = a.
double growth_sample(const std::function<double(double, double)>& h, double a, int kmax) {
  double best = 0.0;
  for (double sx : {-1.0, 1.0}) {
    const double x = sx * a;
    for (int it = 0; it < 8; ++it) {
      const double t = it / 8.0;
      for (int l = 0; l <= 2; ++l) {
        for (int k = 0; k <= kmax; ++k) {
          auto in_x = [&](double xx) {
            return central_diff([&](double tt) { return h(xx, tt); }, t, l, 1e-3);
          };
          const double v = ipow(a, k) * central_diff(in_x, x, k, 1e-2 * a);
          best = std::max(best, std::abs(v));
        }
      }
    }
  }
  return best;
}

double growth_exponent(const std::function<double(double, double)>& h, int kmax) {
  if (!h) return -INFINITY;
  std::vector<double> xs{10.0, 100.0, 1000.0}, ms;
  for (double a : xs) ms.push_back(growth_sample(h, a, kmax));
  if (ms[0] == 0.0 && ms[1] == 0.0 && ms[2] == 0.0) return -INFINITY;
  return loglog_slope(xs, ms);
}

// F1 without the domain check.
double f1_raw(const LienardProblem& pr, const ReferenceOrbit& orb, double theta, double rho,
              double t) {
  double x0, y0;
  orb.at_angle(theta, x0, y0);
  const double ca = std::pow(orb.c() * rho, orb.alpha());
  const double x = ca * x0;
  const double T0 = orb.period();
  return -(orb.c() * rho * T0 * y0 * y0 * pr.eval_f(x, t) + ca * y0 * T0 * pr.eval_g(x, t)) /
         kTwoPi;
}

}  // namespace

void LienardProblem::rhs(double t, const double* z, double* dz) const {
  const double x = z[0], y = z[1];
  dz[0] = y;
  dz[1] = -ipow(x, 2 * n + 1) - eval_g(x, t) - eval_f(x, t) * y;
}

double LienardProblem::energy(double x, double y) const {
  return 0.5 * y * y + ipow(x, 2 * n + 2) / (2.0 * n + 2.0);
}

LienardProblem make_problem(const std::string& kind, int n, double a) {
  if (n < 1) throw ParameterError("Lienard degree n must be >= 1");
  LienardProblem pr;
  pr.n = n;
  pr.name = kind;
  auto damped = [a](double x, double t) { return a * x * std::cos(kTwoPi * t) / (1.0 + x * x); };
  auto forced = [a](double x, double t) {
    return a * x * x * x * std::cos(kTwoPi * t) / (1.0 + x * x);
  };
  if (kind == "none") {
  } else if (kind == "compliant") {
    pr.g = forced;
    pr.q = 1.0;
  } else if (kind == "mixed") {
    pr.f = damped;
    pr.g = forced;
    pr.q = 1.0;
  } else if (kind == "nonreversible") {
    pr.f = [a](double x, double t) { return a * x * x * std::cos(kTwoPi * t) / (1.0 + x * x); };
  } else {
    throw ParameterError("unknown Lienard perturbation '" + kind + "'");
  }
  return pr;
}

StructureReport check_structure(const LienardProblem& pr) {
  StructureReport rep;
  auto parity = [](const std::function<double(double, double)>& h) {
    if (!h) return 0.0;
    double defect = 0.0, scale = 0.0;
    for (double x : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      for (int it = 0; it < 10; ++it) {
        const double t = 0.1 * it + 0.03;
        const double v = h(x, t);
        scale = std::max(scale, std::abs(v));
        defect = std::max(defect, std::abs(h(-x, t) + v));
        defect = std::max(defect, std::abs(h(x, -t) - v));
        defect = std::max(defect, std::abs(h(x, t + 1.0) - v));
      }
    }
    return rel_defect(defect, scale);
  };
  rep.parity_f = parity(pr.f);
  rep.parity_g = parity(pr.g);
  rep.reversible = rep.parity_f <= 1e-10 && rep.parity_g <= 1e-10;
  if (rep.parity_f > 1e-10) {
    rep.warnings.push_back("f is not odd in x, even and 1-periodic in t (defect " +
                           std::to_string(rep.parity_f) + ")");
  }
  if (rep.parity_g > 1e-10) {
    rep.warnings.push_back("g is not odd in x, even and 1-periodic in t (defect " +
                           std::to_string(rep.parity_g) + ")");
  }
  rep.growth_f = growth_exponent(pr.f, pr.derivatives);
  rep.growth_g = growth_exponent(pr.g, pr.derivatives);
  if (pr.p < 0.0 || pr.p > pr.n - 1 || rep.growth_f > pr.p + 0.2) {
    rep.growth_ok = false;
    rep.warnings.push_back("f grows like |x|^" + std::to_string(rep.growth_f) + ", claimed p = " +
                           std::to_string(pr.p) + " (need p <= n - 1)");
  }
  if (pr.q < 0.0 || pr.q > 2 * pr.n - 1 || rep.growth_g > pr.q + 0.2) {
    rep.growth_ok = false;
    rep.warnings.push_back("g grows like |x|^" + std::to_string(rep.growth_g) + ", claimed q = " +
                           std::to_string(pr.q) + " (need q <= 2n - 1)");
  }
  return rep;
}

void ReferenceOrbit::eval(double s, double& x, double& y) const {
  const double nu = kTwoPi / T0_;
  const std::complex<double> z = std::polar(1.0, nu * s);
  std::complex<double> zk = 1.0;
  x = 0.0;
  y = yc_.empty() ? 0.0 : yc_[0];
  for (size_t k = 1; k < xs_.size(); ++k) {
    zk = (k % 16 == 0) ? std::polar(1.0, nu * s * static_cast<double>(k)) : zk * z;
    x += xs_[k] * zk.imag();
    y += yc_[k] * zk.real();
  }
}

double ReferenceOrbit::angle_of(double X, double Y) const {
  double a = std::atan2(X, Y);
  if (a < 0.0) a += kTwoPi;
  const int K = static_cast<int>(phase_.size()) - 1;
  auto it = std::upper_bound(phase_.begin(), phase_.end(), a);
  int j = std::clamp(static_cast<int>(it - phase_.begin()) - 1, 0, K - 1);
  const double frac = (a - phase_[j]) / (phase_[j + 1] - phase_[j]);
  double s = (j + frac) * T0_ / K;
  for (int iter = 0; iter < 20; ++iter) {
    double x, y;
    eval(s, x, y);
    const double g = std::remainder(std::atan2(x, y) - a, kTwoPi);
    const double dg = (y * y + ipow(x, 2 * n_ + 2)) / (x * x + y * y);
    s -= g / dg;
    if (std::abs(g) < 1e-16) break;
  }
  double theta = std::fmod(kTwoPi * s / T0_, kTwoPi);
  if (theta < 0.0) theta += kTwoPi;
  return theta;
}

ReferenceOrbit compute_reference_orbit(int n, double tol) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 2>;
  if (n < 1) throw ParameterError("Lienard degree n must be >= 1");
  if (!(tol > 0.0)) throw ParameterError("orbit tolerance must be positive");
  ReferenceOrbit orb;
  orb.n_ = n;
  orb.alpha_ = 1.0 / (n + 2);
  orb.beta_ = 1.0 - orb.alpha_;

  auto rhs = [n](const State& z, State& dz, double) {
    dz[0] = z[1];
    dz[1] = -ipow(z[0], 2 * n + 1);
  };
  // Return time to {x = 0, y > 0}.
  auto stepper = ode::make_controlled(tol, tol, ode::runge_kutta_fehlberg78<State>());
  State z{0.0, 1.0};
  double t = 0.0, dt = 1e-2;
  bool left = false;
  State prev = z;
  double tp = t;
  for (;;) {
    prev = z;
    tp = t;
    if (stepper.try_step(rhs, z, t, dt) != ode::success) continue;
    if (z[0] < 0.0) left = true;
    if (left && prev[0] < 0.0 && z[0] >= 0.0) break;
    if (t > 1e4) throw IntegrationFailure("reference orbit did not return to its section");
  }
  ode::runge_kutta_fehlberg78<State> rk;
  double delta = -prev[0] / prev[1];
  for (int iter = 0; iter < 50; ++iter) {
    State w = prev;
    rk.do_step(rhs, w, tp, delta);
    const double corr = w[0] / w[1];
    delta -= corr;
    if (std::abs(corr) <= 1e-17 * (tp + delta)) break;
  }
  orb.T0_ = tp + delta;

  // Polish on the section with the symmetric integrator.
  LienardProblem free;
  free.n = n;
  OdeRhs grhs = [&free](double tt, const double* y, double* dy) { free.rhs(tt, y, dy); };
  GaussLegendre gl(2);
  for (int iter = 0; iter < 3; ++iter) {
    const int steps = kMinSamples * kSubsteps;
    const double h = orb.T0_ / steps;
    double w[2] = {0.0, 1.0};
    gl.advance(grhs, 0.0, h, steps, w);
    orb.T0_ -= w[0] / w[1];
  }
  orb.c_ = kTwoPi / (orb.beta_ * orb.T0_);
  orb.c0_ = orb.beta_ * std::pow(orb.c_, 2.0 * orb.beta_);

  // Samples from the symmetric integrator, then a Fourier series in time.
  for (int K = kMinSamples;; K *= 2) {
    const int steps = K * kSubsteps;
    const double h = orb.T0_ / steps;
    std::vector<std::array<double, 2>> fwd(steps + 1), bwd(steps / 2 + 1);
    double w[2] = {0.0, 1.0};
    fwd[0] = {w[0], w[1]};
    double energy = 0.0;
    for (int i = 1; i <= steps; ++i) {
      gl.step(grhs, (i - 1) * h, h, w);
      fwd[i] = {w[0], w[1]};
      energy = std::max(energy, std::abs((n + 1) * w[1] * w[1] + ipow(w[0], 2 * n + 2) - (n + 1)));
    }
    orb.energy_res_ = energy;
    orb.period_res_ = std::hypot(w[0], w[1] - 1.0);
    w[0] = 0.0;
    w[1] = 1.0;
    bwd[0] = {w[0], w[1]};
    double sym = 0.0;
    for (int i = 1; i <= steps / 2; ++i) {
      gl.step(grhs, -(i - 1) * h, -h, w);
      sym = std::max({sym, std::abs(w[0] + fwd[i][0]), std::abs(w[1] - fwd[i][1])});
    }
    orb.symmetry_res_ = sym;

    const int H = K / 2;
    std::vector<double> sn(K), cs(K);
    for (int j = 0; j < K; ++j) {
      sn[j] = std::sin(kTwoPi * j / K);
      cs[j] = std::cos(kTwoPi * j / K);
    }
    orb.xs_.assign(H, 0.0);
    orb.yc_.assign(H, 0.0);
    for (int k = 0; k < H; ++k) {
      double sx = 0.0, cy = 0.0;
      for (int j = 0; j < K; ++j) {
        const long m = (static_cast<long>(k) * j) % K;
        sx += fwd[j * kSubsteps][0] * sn[m];
        cy += fwd[j * kSubsteps][1] * cs[m];
      }
      orb.xs_[k] = 2.0 * sx / K;
      orb.yc_[k] = (k == 0 ? 1.0 : 2.0) * cy / K;
    }
    orb.xs_[0] = 0.0;
    double top = 0.0, tail = 0.0;
    for (int k = 0; k < H; ++k) {
      const double m = std::max(std::abs(orb.xs_[k]), std::abs(orb.yc_[k]));
      top = std::max(top, m);
      if (k >= 3 * H / 4) tail = std::max(tail, m);
    }
    if (tail > 1e-15 * top && K < kMaxSamples) continue;
    int last = H - 1;
    while (last > 1 && std::max(std::abs(orb.xs_[last]), std::abs(orb.yc_[last])) < 1e-19 * top) {
      --last;
    }
    orb.xs_.resize(last + 1);
    orb.yc_.resize(last + 1);

    double series = 0.0;
    for (int j = 0; j < K; ++j) {
      const int i = j * kSubsteps + kSubsteps / 2;
      double x, y;
      orb.eval(i * h, x, y);
      series = std::max({series, std::abs(x - fwd[i][0]), std::abs(y - fwd[i][1])});
    }
    orb.series_res_ = series;

    orb.phase_.assign(K + 1, 0.0);
    for (int j = 1; j <= K; ++j) {
      const auto& p = fwd[j * kSubsteps];
      const double a = std::atan2(p[0], p[1]);
      orb.phase_[j] = orb.phase_[j - 1] + std::remainder(a - orb.phase_[j - 1], kTwoPi);
    }
    orb.phase_[K] = kTwoPi;
    break;
  }
  return orb;
}

TwistSystem::TwistSystem(const LienardProblem& problem, const ReferenceOrbit& orbit,
                         double rho_star)
    : problem_(problem), orbit_(orbit), rho_star_(rho_star) {
  if (problem.n != orbit.n()) throw ShapeError("problem and reference orbit degrees differ");
  if (!(rho_star_ > 0.0)) rho_star_ = default_rho_star(problem, orbit);
}

void TwistSystem::check_domain(double rho) const {
  if (!(rho >= rho_star_)) {
    throw DomainError("rho = " + std::to_string(rho) + " below rho_* = " +
                      std::to_string(rho_star_));
  }
}

double TwistSystem::twist(double rho) const {
  return orbit_.c0() * std::pow(rho, 2.0 * orbit_.beta() - 1.0);
}

double TwistSystem::F1(double theta, double rho, double t) const {
  check_domain(rho);
  return f1_raw(problem_, orbit_, theta, rho, t);
}

double TwistSystem::F2(double theta, double rho, double t) const {
  check_domain(rho);
  double x0, y0;
  orbit_.at_angle(theta, x0, y0);
  const double a = orbit_.alpha(), c = orbit_.c();
  const double ca = std::pow(c * rho, a);
  const double x = ca * x0;
  return c * a * x0 * y0 * problem_.eval_f(x, t) + ca / rho * a * x0 * problem_.eval_g(x, t);
}

void TwistSystem::to_plane(double theta, double rho, double& x, double& y) const {
  double x0, y0;
  orbit_.at_angle(theta, x0, y0);
  const double cr = orbit_.c() * rho;
  x = std::pow(cr, orbit_.alpha()) * x0;
  y = std::pow(cr, orbit_.beta()) * y0;
}

void TwistSystem::from_plane(double x, double y, double& theta, double& rho) const {
  const double h = problem_.energy(x, y);
  rho = std::pow(2.0 * h, 0.5 / orbit_.beta()) / orbit_.c();
  const double cr = orbit_.c() * rho;
  theta = orbit_.angle_of(x / std::pow(cr, orbit_.alpha()), y / std::pow(cr, orbit_.beta()));
}

double TwistSystem::lambda_of(double rho) const { return twist(rho); }

double TwistSystem::rho_of(double lambda) const {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  return std::pow(lambda / orbit_.c0(), 1.0 / (2.0 * orbit_.beta() - 1.0));
}

double default_rho_star(const LienardProblem& problem, const ReferenceOrbit& orbit) {
  constexpr int kLevels = 25;
  std::vector<double> sup(kLevels, 0.0);
  for (int j = 0; j < kLevels; ++j) {
    const double rho = std::ldexp(1.0, j);
    for (int i = 0; i < 16; ++i) {
      for (int it = 0; it < 8; ++it) {
        const double v = f1_raw(problem, orbit, kTwoPi * (i + 0.5) / 16, rho, it / 8.0);
        sup[j] = std::max(sup[j], std::abs(v));
      }
    }
  }
  if (sup[0] == 0.0) return 1.0;
  std::vector<double> e(kLevels - 1);
  for (int j = 0; j + 1 < kLevels; ++j) e[j] = std::log2(sup[j + 1] / sup[j]);
  for (int j = 0; j + 1 < kLevels - 1; ++j) {
    if (std::abs(e[j + 1] - e[j]) <= 0.05) return std::ldexp(1.0, j);
  }
  return std::ldexp(1.0, kLevels - 1);
}

GrowthClassReport growth_class_estimate(const ActionField& y, int q, int p_t, double gamma,
                                        const std::vector<double>& rho_samples,
                                        int angle_samples) {
  if (q < 0 || p_t < 0 || angle_samples < 1) throw ParameterError("bad growth class orders");
  GrowthClassReport rep;
  rep.rho = rho_samples;
  constexpr double kAngleStep = 0.05, kTimeStep = 0.01, kRelRhoStep = 0.05;
  for (double rho : rho_samples) {
    if (!(rho > 0.0)) throw DomainError("rho samples must be positive");
    const double hr = kRelRhoStep * rho;
    double best = 0.0;
    for (int i = 0; i < angle_samples; ++i) {
      const double th = kTwoPi * (i + 0.5) / angle_samples;
      for (int it = 0; it < 8; ++it) {
        const double t = (it + 0.25) / 8.0;
        for (int k = 0; k <= q; ++k) {
          for (int l = 0; k + l <= q; ++l) {
            auto in_t = [&](double th2, double r2) {
              return central_diff([&](double tt) { return y(th2, r2, tt); }, t, p_t, kTimeStep);
            };
            auto in_rho = [&](double th2) {
              return central_diff([&](double r2) { return in_t(th2, r2); }, rho, l, hr);
            };
            const double v = central_diff(in_rho, th, k, kAngleStep);
            best = std::max(best, std::pow(rho, l - gamma) * std::abs(v));
          }
        }
      }
    }
    rep.sup.push_back(best);
  }
  rep.exponent = loglog_slope(rep.rho, rep.sup);
  rep.fitted_gamma = gamma + rep.exponent;
  rep.constant = rep.sup.empty() ? 0.0 : *std::max_element(rep.sup.begin(), rep.sup.end());
  rep.bounded = rep.exponent <= 0.1;
  return rep;
}

namespace {

// Unwrapped-angle bookkeeping: atan2 of the point rescaled to the unit curve.
double plane_phase(const TwistSystem& sys, double x, double y) {
  const auto& orb = sys.orbit();
  const double h = sys.problem().energy(x, y);
  const double cr = std::pow(2.0 * h, 0.5 / orb.beta());
  return std::atan2(x / std::pow(cr, orb.alpha()), y / std::pow(cr, orb.beta()));
}

int steps_per_unit(double lambda, double per_radian, int min_steps) {
  return std::max(min_steps, static_cast<int>(std::ceil(per_radian * lambda * 1.25)));
}

}  // namespace

PoincareMap::PoincareMap(const TwistSystem& system, SectionSettings settings)
    : sys_(system), set_(settings) {
  if (!(set_.steps_per_radian > 0.0) || set_.min_steps < 1) {
    throw ParameterError("bad section integrator settings");
  }
}

SectionPoint PoincareMap::apply(double theta, double lambda) const {
  if (lambda < set_.lambda_min || lambda > set_.lambda_max) {
    throw DomainError("lambda outside the admissible annulus");
  }
  const LienardProblem& pr = sys_.problem();
  double z[2];
  sys_.to_plane(theta, sys_.rho_of(lambda), z[0], z[1]);
  const int K = steps_per_unit(lambda, set_.steps_per_radian, set_.min_steps);
  const double h = 1.0 / K;
  GaussLegendre gl(2);
  OdeRhs rhs = [&pr](double t, const double* y, double* dy) { pr.rhs(t, y, dy); };
  const double a0 = plane_phase(sys_, z[0], z[1]);
  double a = a0, total = 0.0;
  SectionPoint out;
  for (int i = 0; i < K; ++i) {
    gl.step(rhs, i * h, h, z);
    const double an = plane_phase(sys_, z[0], z[1]);
    total += std::remainder(an - a, kTwoPi);
    a = an;
    double th, rho;
    if (i + 1 == K) {
      sys_.from_plane(z[0], z[1], th, rho);
      out.lambda = sys_.lambda_of(rho);
      const double a1 = theta + std::remainder(a0 - theta, kTwoPi) + total;
      out.theta = a1 + std::remainder(th - a1, kTwoPi);
    } else {
      const double hh = pr.energy(z[0], z[1]);
      out.lambda = sys_.lambda_of(std::pow(2.0 * hh, 0.5 / sys_.orbit().beta()) / sys_.orbit().c());
    }
    if (out.lambda < set_.lambda_min || out.lambda > set_.lambda_max || !std::isfinite(out.lambda)) {
      out.escaped = true;
      out.theta = theta + total;
      return out;
    }
  }
  return out;
}

double PoincareMap::reversibility_residual(const std::vector<SectionPoint>& samples) const {
  double worst = 0.0;
  for (const auto& s : samples) {
    const SectionPoint p1 = apply(s.theta, s.lambda);
    const SectionPoint p2 = apply(-p1.theta, p1.lambda);
    worst = std::max({worst, std::abs(std::remainder(p2.theta + s.theta, kTwoPi)),
                      std::abs(p2.lambda - s.lambda)});
  }
  return worst;
}

double level_norm(int n, double h) {
  if (!(h > 0.0)) return 0.0;
  // The maximum of x + y on the level curve sits where y = x^(2n+1).
  auto lhs = [n](double x) { return ipow(x, 4 * n + 2) + ipow(x, 2 * n + 2) / (n + 1.0); };
  double lo = 0.0, hi = std::pow(2.0 * h * (n + 1.0), 1.0 / (2 * n + 2));
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (lhs(mid) < 2.0 * h ? lo : hi) = mid;
  }
  const double x = 0.5 * (lo + hi);
  return x + ipow(x, 2 * n + 1);
}

StabilityReport lagrange_stability(const LienardProblem& problem, const ReferenceOrbit& orbit,
                                   const StabilitySettings& set) {
  if (!(set.t_max > 0.0) || set.per_level < 1 || set.levels.empty()) {
    throw ParameterError("bad stability experiment settings");
  }
  StabilityReport rep;
  StructureReport st = check_structure(problem);
  for (const auto& w : st.warnings) rep.warnings.push_back("structure: " + w);
  TwistSystem sys(problem, orbit, std::numeric_limits<double>::min());
  for (double level : set.levels) {
    for (int j = 0; j < set.per_level; ++j) {
      OrbitRecord r;
      r.level = level;
      r.theta = kTwoPi * j / set.per_level + 0.1;
      sys.to_plane(r.theta, sys.rho_of(level), r.x0, r.y0);
      rep.orbits.push_back(r);
    }
  }
  OdeRhs rhs = [&problem](double t, const double* y, double* dy) { problem.rhs(t, y, dy); };
  parallel_for(rep.orbits.size(), [&](size_t begin, size_t end) {
    GaussLegendre gl(2);
    for (size_t o = begin; o < end; ++o) {
      OrbitRecord& r = rep.orbits[o];
      const int K = steps_per_unit(r.level, set.steps_per_radian, set.min_steps);
      const double h = 1.0 / K;
      const long total = std::lround(set.t_max * K);
      const double h0 = problem.energy(r.x0, r.y0);
      r.reference_norm = level_norm(problem.n, h0);
      double z[2] = {r.x0, r.y0};
      r.max_norm = std::abs(z[0]) + std::abs(z[1]);
      try {
        for (long i = 0; i < total; ++i) {
          gl.step(rhs, i * h, h, z);
          const double nrm = std::abs(z[0]) + std::abs(z[1]);
          r.max_norm = std::max(r.max_norm, nrm);
          r.energy_drift = std::max(r.energy_drift, std::abs(problem.energy(z[0], z[1]) - h0) / h0);
          r.steps = i + 1;
          if (!(nrm <= set.escape_norm)) {
            r.failed = true;
            r.failure = "escaped at t = " + std::to_string((i + 1) * h);
            break;
          }
        }
      } catch (const IntegrationFailure& e) {
        r.failed = true;
        r.failure = e.what();
      }
      r.ratio = r.max_norm / r.reference_norm;
    }
  });
  for (const auto& r : rep.orbits) {
    rep.max_ratio = std::max(rep.max_ratio, r.ratio);
    if (r.failed || r.ratio > set.threshold) ++rep.flagged;
  }
  return rep;
}

}  // namespace rkam
