#pragma once

#include <vector>

#include "rkam/fourier_field.hpp"

namespace rkam {

// x' = omega + y + f(x, y, t), y' = g(x, y, t).
struct FlowSystem {
  std::vector<double> omega;
  FourierField f, g;

  int d() const { return static_cast<int>(omega.size()); }
  // state = (x, y), out = (x', y').
  void rhs(double t, const double* state, double* out) const;
};

// Reversible test perturbation f_i = eps cos(|x| + t), g_i = eps sin(|x| + t)
// with |x| = x_1 + ... + x_d.
FlowSystem standard_flow(const std::vector<double>& omega, double eps, int q_y, double r);

// Symmetric (leapfrog) standard map on T^d x R^d with potential force
// p(z) = sum_k b_k sin(k z) acting on each angle:
//   x_h = x + (2 pi omega + y) / 2,  y1 = y - eps p(x_h),  x1 = x_h + (2 pi omega + y1) / 2.
// Reversible under (x, y) -> (-x, y).
struct LeapfrogMap {
  std::vector<double> omega;
  double eps = 0.0;
  std::vector<double> b{1.0, 0.5};  // b[k - 1]

  int d() const { return static_cast<int>(omega.size()); }
  void apply(double* x, double* y) const;
  void apply_inverse(double* x, double* y) const;
  double force(double z) const;

  // The same map written as x1 = x + 2 pi omega + y + f, y1 = y + g with f, g
  // Taylor expanded to degree q_y in the action.
  void perturbation(int q_y, double r, FourierField& f, FourierField& g) const;
};

// x1 = x + 2 pi omega + y + f(x, y), y1 = y + g(x, y).
struct FieldMap {
  std::vector<double> omega;
  FourierField f, g;

  int d() const { return static_cast<int>(omega.size()); }
  void apply(double* x, double* y) const;
};

}  // namespace rkam
