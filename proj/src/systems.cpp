#include "rkam/systems.hpp"

#include <cmath>
#include <numbers>

#include "rkam/errors.hpp"

namespace rkam {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

void FlowSystem::rhs(double t, const double* state, double* out) const {
  const int n = d();
  std::vector<double> x(state, state + n), y(state + n, state + 2 * n);
  auto fv = f.evaluate(x, y, t);
  auto gv = g.evaluate(x, y, t);
  for (int a = 0; a < n; ++a) {
    out[a] = omega[a] + y[a] + fv[a];
    out[n + a] = gv[a];
  }
}

FlowSystem standard_flow(const std::vector<double>& omega, double eps, int q_y, double r) {
  const int d = static_cast<int>(omega.size());
  if (d < 1) throw ParameterError("frequency vector is empty");
  FlowSystem sys;
  sys.omega = omega;
  sys.f = FourierField(d, d, d + 1, q_y, r, Parity::kEven);
  sys.g = FourierField(d, d, d + 1, q_y, r, Parity::kOdd);
  TorusIndex idx{std::vector<int>(d, 1), 1};
  for (int c = 0; c < d; ++c) {
    sys.f.set_coeff(idx, 0, c, 0.5 * eps);
    sys.g.set_coeff(idx, 0, c, cdouble(0.0, -0.5 * eps));
  }
  return sys;
}

double LeapfrogMap::force(double z) const {
  double s = 0.0;
  for (size_t k = 0; k < b.size(); ++k) s += b[k] * std::sin((k + 1.0) * z);
  return s;
}

void LeapfrogMap::apply(double* x, double* y) const {
  for (int a = 0; a < d(); ++a) {
    const double xh = x[a] + 0.5 * (kTwoPi * omega[a] + y[a]);
    y[a] -= eps * force(xh);
    x[a] = xh + 0.5 * (kTwoPi * omega[a] + y[a]);
  }
}

void LeapfrogMap::apply_inverse(double* x, double* y) const {
  for (int a = 0; a < d(); ++a) {
    const double xh = x[a] - 0.5 * (kTwoPi * omega[a] + y[a]);
    y[a] += eps * force(xh);
    x[a] = xh - 0.5 * (kTwoPi * omega[a] + y[a]);
  }
}

void LeapfrogMap::perturbation(int q_y, double r, FourierField& f, FourierField& g) const {
  const int n = d();
  if (n < 1) throw ParameterError("frequency vector is empty");
  const int K = static_cast<int>(b.size());
  g = FourierField(n, n, K, q_y, r, Parity::kNone, true);
  const MonomialBasis& pw = g.powers();
  // g_a = -eps sum_k b_k sin(k (x_a + pi omega_a + y_a / 2)), expanded in y_a.
  for (int a = 0; a < n; ++a) {
    for (int k = 1; k <= K; ++k) {
      TorusIndex idx{std::vector<int>(n, 0), 0};
      idx.k[a] = k;
      const cdouble phase = std::polar(1.0, k * std::numbers::pi * omega[a]);
      for (int p = 0; p < pw.size(); ++p) {
        const int* e = pw.exponent(p);
        bool only_a = true;
        for (int v = 0; v < n; ++v) {
          if (v != a && e[v] != 0) only_a = false;
        }
        if (!only_a) continue;
        cdouble taylor = 1.0;
        for (int j = 1; j <= e[a]; ++j) taylor *= cdouble(0.0, 0.5 * k) / static_cast<double>(j);
        // sin z = (e^{iz} - e^{-iz}) / 2i
        const cdouble c = -eps * b[k - 1] * phase * taylor / cdouble(0.0, 2.0);
        g.set_coeff(idx, p, a, c);
      }
    }
  }
  f = scale(g, 0.5);
}

void FieldMap::apply(double* x, double* y) const {
  const int n = d();
  std::vector<double> xv(x, x + n), yv(y, y + n);
  auto fv = f.evaluate(xv, yv, 0.0);
  auto gv = g.evaluate(xv, yv, 0.0);
  for (int a = 0; a < n; ++a) {
    x[a] += kTwoPi * omega[a] + y[a] + fv[a];
    y[a] += gv[a];
  }
}

}  // namespace rkam
