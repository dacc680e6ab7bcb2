#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rkam/diophantine.hpp"
#include "rkam/errors.hpp"
#include "rkam/grid.hpp"
#include "rkam/homological.hpp"
#include "rkam/numerics.hpp"
#include "rkam/smoothing.hpp"
#include "support.hpp"

using namespace rkam;
using rkam::testing::random_field;

namespace {

const double kGolden = 0.5 * (std::sqrt(5.0) - 1.0);

Frequency golden() { return certify({kGolden}, 1.01, 1000); }

// Values of one action-power coefficient function on the n x n grid.
Eigen::VectorXd grid_values(const FourierField& f, int n, int power) {
  auto s = synthesize(f, n);
  const int stride = f.num_powers() * f.m();
  Eigen::VectorXd out(s.size() / stride);
  for (int i = 0; i < out.size(); ++i) out(i) = s[i * stride + power * f.m()];
  return out;
}

double rel_err(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), 1e-300);
}

}  // namespace

TEST_CASE("zero forcing gives zero solutions") {
  auto freq = golden();
  FourierField g(1, 1, 5, 2, 0.1, Parity::kOdd);
  FourierField f(1, 1, 5, 2, 0.1, Parity::kEven);
  auto v = solve_v(g, freq);
  CHECK(v.is_zero());
  auto u = solve_u(f, v, freq);
  CHECK(u.is_zero());
  CHECK(v.is_zero());
  auto m = solve_map(FourierField(1, 1, 5, 2, 0.1, Parity::kEven, true),
                     FourierField(1, 1, 5, 2, 0.1, Parity::kOdd, true), freq);
  CHECK(m.u.is_zero());
  CHECK(m.v.is_zero());
}

TEST_CASE("single-mode closed forms") {
  auto freq = golden();
  const double eps = 1e-3;
  FourierField g(1, 1, 3, 0, 0.0, Parity::kOdd);
  g.set_coeff({{1}, 1}, 0, 0, cdouble(0.0, -0.5 * eps));  // eps sin(x + t)
  auto v = solve_v(g, freq);
  FourierField f(1, 1, 3, 0, 0.0, Parity::kEven);
  f.set_coeff({{1}, 1}, 0, 0, 0.5);  // cos(x + t)
  FourierField v0(1, 1, 3, 0, 0.0, Parity::kEven);
  auto u = solve_u(f, v0, freq);
  for (double x : {0.0, 0.4, 2.0}) {
    for (double t : {0.0, 1.1, -0.7}) {
      CHECK(v.evaluate({x}, {0.0}, t)[0] ==
            doctest::Approx(eps * std::cos(x + t) / (kGolden + 1.0)).epsilon(1e-14));
      CHECK(u.evaluate({x}, {0.0}, t)[0] ==
            doctest::Approx(-std::sin(x + t) / (kGolden + 1.0)).epsilon(1e-14).scale(1.0));
    }
  }
  CHECK(v.parity() == Parity::kEven);
  CHECK(u.parity() == Parity::kOdd);
}

TEST_CASE("dense collocation oracle, flow case") {
  auto freq = golden();
  std::mt19937_64 rng(42);
  const int N = 8, n = 2 * N + 1;
  Eigen::MatrixXd L = rkam::testing::flow_matrix(n, kGolden);
  for (int trial = 0; trial < 3; ++trial) {
    auto g = random_field(1, 1, N, 2, 0.1, Parity::kOdd, rng);
    auto f = random_field(1, 1, N, 2, 0.1, Parity::kEven, rng);
    auto sol = solve_flow(f, g, freq);
    CHECK(flow_coefficient_residual(sol.v, scale(g, -1.0), freq) <= 1e-13);
    CHECK(flow_coefficient_residual(sol.u, subtract(sol.v, f), freq) <= 1e-13);
    CHECK(sol.residual_u <= 1e-10);
    CHECK(sol.residual_v <= 1e-10);
    for (int p = 0; p < 3; ++p) {
      Eigen::VectorXd gv = grid_values(g, n, p), fv = grid_values(f, n, p);
      Eigen::VectorXd v_ref = rkam::testing::solve_with_mean(L, -gv, fv.mean());
      CHECK(rel_err(grid_values(sol.v, n, p), v_ref) <= 1e-10);
      Eigen::VectorXd u_ref = rkam::testing::solve_with_mean(L, v_ref - fv, 0.0);
      CHECK(rel_err(grid_values(sol.u, n, p), u_ref) <= 1e-10);
    }
  }
}

TEST_CASE("flow solutions carry the reversible parities") {
  auto freq = golden();
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    auto g = random_field(1, 1, 7, 2, 0.1, Parity::kOdd, rng);
    auto f = random_field(1, 1, 7, 2, 0.1, Parity::kEven, rng);
    auto sol = solve_flow(f, g, freq);
    CHECK(sol.u.parity() == Parity::kOdd);
    CHECK(sol.v.parity() == Parity::kEven);
    CHECK(sol.u.parity_defect(Parity::kOdd) == 0.0);
    CHECK(sol.v.parity_defect(Parity::kEven) == 0.0);
    const double su = sup_norm(sol.u, 0.0, sol.u.r()).value;
    CHECK(grid_parity_residual(sol.u, Parity::kOdd) <= 1e-12 * su);
    // The opposite parity fails, so the check has teeth.
    CHECK(grid_parity_residual(sol.u, Parity::kEven) > 1e-3 * su);
  }
}

TEST_CASE("two-dimensional flow case") {
  auto freq = certify(make_frequency(2, FrequencyKind::kSqrtPrime), 2.01, 200);
  std::mt19937_64 rng(4);
  auto g = random_field(2, 2, 5, 1, 0.1, Parity::kOdd, rng);
  auto f = random_field(2, 2, 5, 1, 0.1, Parity::kEven, rng);
  auto sol = solve_flow(f, g, freq);
  CHECK(flow_coefficient_residual(sol.v, scale(g, -1.0), freq) <= 1e-13);
  CHECK(flow_coefficient_residual(sol.u, subtract(sol.v, f), freq) <= 1e-13);
  CHECK(sol.residual_u <= 1e-10);
}

TEST_CASE("nonzero mean of g is a structure error") {
  FourierField g(1, 1, 3, 0, 0.0);
  g.set_coeff({{0}, 0}, 0, 0, 1e-3);
  CHECK_THROWS_AS(solve_v(g, golden()), StructureError);
}

TEST_CASE("divisor below the floor aborts") {
  // A frequency certified on a short range, then used on longer modes.
  auto freq = certify({kGolden}, 1.01, 3);
  FourierField g(1, 1, 34, 0, 0.0, Parity::kOdd);
  g.set_coeff({{21}, -13}, 0, 0, cdouble(0.0, 1.0));
  try {
    solve_v(g, freq);
    FAIL("expected a small divisor error");
  } catch (const SmallDivisorError& e) {
    CHECK(std::abs(e.divisor()) < divisor_floor(freq));
  }
}

TEST_CASE("deterministic coefficients") {
  auto freq = golden();
  std::mt19937_64 rng(1);
  auto g = random_field(1, 1, 8, 2, 0.1, Parity::kOdd, rng);
  auto f = random_field(1, 1, 8, 2, 0.1, Parity::kEven, rng);
  auto a = solve_flow(f, g, freq);
  auto b = solve_flow(f, g, freq);
  CHECK(a.u.data() == b.u.data());
  CHECK(a.v.data() == b.v.data());
}

TEST_CASE("map case: Birkhoff-sum oracle for a single mode") {
  auto freq = golden();
  const double shift = 2.0 * std::numbers::pi * kGolden;
  FourierField g(1, 1, 2, 0, 0.0, Parity::kOdd, true);
  g.set_coeff({{1}, 0}, 0, 0, cdouble(0.0, -0.5));  // sin x
  FourierField f(1, 1, 2, 0, 0.0, Parity::kEven, true);
  auto sol = solve_map(f, g, freq);
  // v(x) is the smoothly weighted average of the partial sums sum_{j<n} g(x + j shift).
  const int M = 10000;
  for (double x : {0.0, 0.9, 2.5}) {
    long double num = 0.0L, den = 0.0L, partial = 0.0L;
    for (int n = 1; n < M; ++n) {
      partial += std::sin(x + (n - 1) * shift);
      const double s = static_cast<double>(n) / M;
      const double w = std::exp(-1.0 / (s * (1.0 - s)));
      num += w * partial;
      den += w;
    }
    const double oracle = static_cast<double>(num / den);
    CHECK(sol.v.evaluate({x}, {0.0}, 0.0)[0] == doctest::Approx(oracle).epsilon(1e-10).scale(1.0));
  }
  CHECK(sol.unsolved_mean == 0.0);
}

TEST_CASE("dense collocation oracle, map case") {
  auto freq = golden();
  const double shift = 2.0 * std::numbers::pi * kGolden;
  std::mt19937_64 rng(17);
  const int N = 8, n = 2 * N + 1;
  Eigen::MatrixXd T = rkam::testing::shift_matrix(n, shift);
  Eigen::MatrixXd L = T - Eigen::MatrixXd::Identity(n, n);
  for (int trial = 0; trial < 3; ++trial) {
    auto g = random_field(1, 1, N, 2, 0.1, Parity::kOdd, rng, true);
    auto f = random_field(1, 1, N, 2, 0.1, Parity::kEven, rng, true);
    auto sol = solve_map(f, g, freq);
    CHECK(sol.residual_u <= 1e-10);
    CHECK(sol.residual_v <= 1e-10);
    for (int p = 0; p < 3; ++p) {
      Eigen::VectorXd gv = grid_values(g, n, p), fv = grid_values(f, n, p);
      Eigen::VectorXd v_ref = rkam::testing::solve_with_mean(L, -gv, fv.mean());
      CHECK(rel_err(grid_values(sol.v, n, p), v_ref) <= 1e-10);
      Eigen::VectorXd u_ref = rkam::testing::solve_with_mean(L, v_ref - fv, 0.0);
      CHECK(rel_err(grid_values(sol.u, n, p), u_ref) <= 1e-10);
    }
  }
}

TEST_CASE("small-divisor amplification stays within the expected exponent") {
  auto freq = certify({kGolden}, 1.001, 1000);
  auto rough = synthetic_input(1, 3.1, 120, false, Parity::kOdd);
  std::vector<double> widths, ratios;
  for (double s = 0.25; s >= 0.0099; s *= 0.5) {
    auto g = smooth(rough, s);
    auto v = solve_v(g, freq);
    widths.push_back(s);
    ratios.push_back(sup_norm(v, 0.0, 0.0).value / sup_norm(g, 0.0, 0.0).value);
  }
  const double tau_eff = -loglog_slope(widths, ratios);
  CHECK(tau_eff <= freq.tau + 0.3);
}
