#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "rkam/diophantine.hpp"
#include "rkam/errors.hpp"
#include "rkam/newton.hpp"
#include "rkam/systems.hpp"

using namespace rkam;

namespace {

const double kGolden = 0.5 * (std::sqrt(5.0) - 1.0);
const double kTwoPi = 2.0 * std::numbers::pi;

Frequency golden() { return certify({kGolden}, 1.01, 1000); }

double eval1(const FourierField& f, double x, double y, double t) {
  return f.evaluate({x}, {y}, t)[0];
}

// Plain Newton solve of x + u(x, y, t) = xi, y + v(x, y, t) = eta using
// separately differentiated fields.
void invert_plain(const NearIdentityTransform& tr, double xi, double eta, double t, double& x,
                  double& y) {
  auto ux = differentiate_x(tr.u, 0), uy = differentiate_y(tr.u, 0);
  auto vx = differentiate_x(tr.v, 0), vy = differentiate_y(tr.v, 0);
  x = xi;
  y = eta;
  for (int it = 0; it < 30; ++it) {
    const double r1 = x + eval1(tr.u, x, y, t) - xi;
    const double r2 = y + eval1(tr.v, x, y, t) - eta;
    const double a = 1.0 + eval1(ux, x, y, t), b = eval1(uy, x, y, t);
    const double c = eval1(vx, x, y, t), d = 1.0 + eval1(vy, x, y, t);
    const double det = a * d - b * c;
    x -= (d * r1 - b * r2) / det;
    y -= (a * r2 - c * r1) / det;
  }
}

}  // namespace

TEST_CASE("zero perturbation gives the identity step") {
  FourierField f(1, 1, 6, 2, 0.01, Parity::kEven);
  FourierField g(1, 1, 6, 2, 0.01, Parity::kOdd);
  auto res = newton_step(f, g, golden(), {8, 0.005, 2}, false);
  CHECK(res.transform.u.is_zero());
  CHECK(res.transform.v.is_zero());
  CHECK(res.transform.U.is_zero());
  CHECK(res.f_next.is_zero());
  CHECK(res.g_next.is_zero());
  CHECK(res.f_next.cutoff() == 8);
  CHECK(res.diag.composition_residual == 0.0);
}

TEST_CASE("flow step matches the transformed vector field") {
  const double eps = 1e-4;
  auto sys = standard_flow({kGolden}, eps, 2, 0.01);
  auto freq = golden();
  auto res = newton_step(sys.f, sys.g, freq, {20, 0.005, 2}, false);
  const auto& tr = res.transform;
  CHECK(res.diag.composition_residual <= 1e-10);
  CHECK(res.diag.parity_defect_f <= 1e-10);
  CHECK(res.f_next.parity() == Parity::kEven);
  CHECK(res.g_next.parity() == Parity::kOdd);

  auto ut = differentiate_t(tr.u), ux = differentiate_x(tr.u, 0), uy = differentiate_y(tr.u, 0);
  auto vt = differentiate_t(tr.v), vx = differentiate_x(tr.v, 0), vy = differentiate_y(tr.v, 0);
  double worst_f = 0.0, worst_g = 0.0, scale_f = 0.0, scale_g = 0.0;
  for (double xi : {0.0, 0.7, 2.9, 5.1}) {
    for (double t : {0.0, 1.3, 4.0}) {
      for (double eta : {0.0, 1e-3}) {
        double x, y;
        invert_plain(tr, xi, eta, t, x, y);
        const double fx = eval1(sys.f, x, y, t), gx = eval1(sys.g, x, y, t);
        const double xdot = kGolden + y + fx;
        // d/dt of xi and eta along the flow.
        const double xi_dot = xdot + eval1(ux, x, y, t) * xdot + eval1(uy, x, y, t) * gx +
                              eval1(ut, x, y, t);
        const double eta_dot = gx + eval1(vx, x, y, t) * xdot + eval1(vy, x, y, t) * gx +
                               eval1(vt, x, y, t);
        const double f_ref = xi_dot - kGolden - eta;
        worst_f = std::max(worst_f, std::abs(eval1(res.f_next, xi, eta, t) - f_ref));
        worst_g = std::max(worst_g, std::abs(eval1(res.g_next, xi, eta, t) - eta_dot));
        scale_f = std::max(scale_f, std::abs(f_ref));
        scale_g = std::max(scale_g, std::abs(eta_dot));
      }
    }
  }
  // eta-Taylor truncation at degree 2 leaves O(eps eta^3).
  CHECK(worst_f <= 1e-6 * scale_f + 1e-15);
  CHECK(worst_g <= 1e-6 * scale_g + 1e-15);
}

TEST_CASE("flow step contracts superlinearly") {
  const double eps = 1e-5;
  auto sys = standard_flow({kGolden}, eps, 2, 0.01);
  auto res = newton_step(sys.f, sys.g, golden(), {20, 0.005, 2}, false);
  const double before = sup_norm(sys.f, 0.0, 0.0).value;
  const double after = sup_norm(res.f_next, 0.0, 0.0).value;
  CHECK(after <= std::pow(before, 1.5));
  CHECK(grid_parity_residual(res.f_next, Parity::kEven) <= 1e-11 * sup_norm(res.f_next, 0.0, 0.005).value);
  CHECK(grid_parity_residual(res.g_next, Parity::kOdd) <= 1e-11 * sup_norm(res.g_next, 0.0, 0.005).value);
}

TEST_CASE("map step matches the conjugated map") {
  LeapfrogMap A{{kGolden}, 1e-4, {1.0, 0.5}};
  FourierField f, g;
  A.perturbation(4, 0.01, f, g);
  auto freq = golden();
  auto res = newton_step(f, g, freq, {20, 0.005, 2}, true);
  const auto& tr = res.transform;
  CHECK(res.diag.composition_residual <= 1e-10);
  FieldMap M{{kGolden}, f, g};
  double worst_f = 0.0, worst_g = 0.0, scale = 0.0;
  for (double xi : {0.0, 0.7, 2.9, 5.1}) {
    for (double eta : {0.0, 5e-4}) {
      double x, y;
      invert_plain(tr, xi, eta, 0.0, x, y);
      M.apply(&x, &y);
      const double xi1 = x + eval1(tr.u, x, y, 0.0);
      const double eta1 = y + eval1(tr.v, x, y, 0.0);
      const double f_ref = xi1 - xi - kTwoPi * kGolden - eta;
      const double g_ref = eta1 - eta;
      worst_f = std::max(worst_f, std::abs(eval1(res.f_next, xi, eta, 0.0) - f_ref));
      worst_g = std::max(worst_g, std::abs(eval1(res.g_next, xi, eta, 0.0) - g_ref));
      scale = std::max(scale, std::abs(g_ref));
    }
  }
  CHECK(worst_f <= 1e-5 * scale + 1e-15);
  CHECK(worst_g <= 1e-5 * scale + 1e-15);
  CHECK(sup_norm(res.g_next, 0.0, 0.0).value <= std::pow(sup_norm(g, 0.0, 0.0).value, 1.5));
}

TEST_CASE("leapfrog perturbation reproduces the closed-form map") {
  LeapfrogMap A{{kGolden}, 1e-3, {1.0, 0.5}};
  FourierField f, g;
  A.perturbation(6, 0.05, f, g);
  FieldMap M{{kGolden}, f, g};
  for (double x0 : {0.1, 2.0, 4.4}) {
    for (double y0 : {-0.01, 0.0, 0.02}) {
      double xa = x0, ya = y0, xb = x0, yb = y0;
      A.apply(&xa, &ya);
      M.apply(&xb, &yb);
      CHECK(std::abs(xa - xb) <= 1e-14);
      CHECK(std::abs(ya - yb) <= 1e-14);
      A.apply_inverse(&xa, &ya);
      CHECK(std::abs(xa - x0) <= 1e-14);
      CHECK(std::abs(ya - y0) <= 1e-14);
    }
  }
}

TEST_CASE("shape checks") {
  FourierField f(1, 1, 3, 2, 0.01, Parity::kEven, true);
  FourierField g(1, 1, 3, 2, 0.01, Parity::kOdd);
  CHECK_THROWS_AS(newton_step(f, g, golden(), {4, 0.005, 2}, false), ShapeError);
}
