#pragma once

#include <functional>
#include <vector>

namespace rkam {

// Right-hand side dy/dt = rhs(t, y) written into dy.
using OdeRhs = std::function<void(double t, const double* y, double* dy)>;

// Fixed-step Gauss-Legendre collocation: symmetric, symplectic, order 2s.
// Stages are solved by fixed-point iteration to round-off.
class GaussLegendre {
 public:
  explicit GaussLegendre(int dim, int stages = 4);

  int dim() const { return dim_; }
  int stages() const { return s_; }
  int order() const { return 2 * s_; }

  // Advances (t, y) by h in place; returns the stage iterations used.
  // Throws IntegrationFailure when the stage equations do not converge.
  int step(const OdeRhs& rhs, double t, double h, double* y);

  // n steps of size h from t.
  void advance(const OdeRhs& rhs, double t, double h, long n, double* y);

  const std::vector<double>& nodes() const { return c_; }
  const std::vector<double>& weights() const { return b_; }

 private:
  int dim_, s_;
  std::vector<double> a_, b_, c_;  // a_ row-major s x s
  std::vector<double> k_, knew_, stage_;
};

}  // namespace rkam
