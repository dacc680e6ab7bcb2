#include "rkam/schedule.hpp"

#include <cmath>

#include "rkam/errors.hpp"

namespace rkam {

int Schedule::cutoff(int nu, double a) const {
  if (nu < 0 || nu >= static_cast<int>(s.size())) throw DomainError("schedule index out of range");
  return static_cast<int>(std::ceil(a / s[nu] - 1e-12));
}

Schedule make_schedule(int d, double mu, double eps0, int M, double ell) {
  if (d < 1) throw ParameterError("schedule needs d >= 1");
  if (!(mu > 0.0 && mu <= 0.5)) throw ParameterError("mu must lie in (0, 0.5]");
  if (!(eps0 > 0.0 && eps0 < 1.0)) throw ParameterError("eps0 must lie in (0, 1)");
  if (M < 1) throw ParameterError("schedule needs M >= 1");
  Schedule sc;
  sc.d = d;
  sc.mu = mu;
  sc.ell = ell > 0.0 ? ell : 2.0 * d + 1.0 + mu;
  sc.tau = d + mu / 100.0;
  sc.mu_tilde = mu / (100.0 * (2.0 * sc.tau + 1.0 + mu));
  sc.eps0 = eps0;
  sc.M = M;
  const double log_eps0 = std::log(eps0);
  const double r_exp = d + 1.0 + mu / 10.0;
  for (int nu = 0; nu <= M; ++nu) {
    const double log_eps = log_eps0 * std::pow(1.0 + sc.mu_tilde, nu);
    const double log_s = log_eps / sc.ell;
    sc.eps.push_back(std::exp(log_eps));
    sc.s.push_back(std::exp(log_s));
    sc.r.push_back(std::exp(log_s * r_exp));
  }
  if (sc.s[0] > 0.5) {
    throw ParameterError("eps0 too large: initial strip width s0 = " + std::to_string(sc.s[0]) +
                         " exceeds 1/2");
  }
  return sc;
}

}  // namespace rkam
