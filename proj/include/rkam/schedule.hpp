#pragma once

#include <vector>

namespace rkam {

// Iteration constants: eps[nu] = eps0^{(1+mu_tilde)^nu}, s[nu] = eps[nu]^{1/ell},
// r[nu] = s[nu]^{d+1+mu/10}, for nu = 0..M.
struct Schedule {
  int d = 1;
  double mu = 0.0;
  double ell = 0.0;
  double tau = 0.0;
  double mu_tilde = 0.0;
  double eps0 = 0.0;
  int M = 0;
  std::vector<double> eps;
  std::vector<double> s;
  std::vector<double> r;

  // Mode cutoff ceil(a / s[nu]) of the smoothed data at step nu.
  int cutoff(int nu, double a = 1.0) const;
};

// ell <= 0 selects the default 2d + 1 + mu.
Schedule make_schedule(int d, double mu, double eps0, int M, double ell = 0.0);

}  // namespace rkam
