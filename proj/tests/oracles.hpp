#pragma once

// Independent reference solvers used by the tests: dense collocation systems
// built from explicit trigonometric interpolation, solved with Eigen.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

namespace rkam::testing {

// Fourier differentiation matrix on n (odd) equispaced points.
inline Eigen::MatrixXd diff_matrix(int n) {
  const int M = (n - 1) / 2;
  const double h = 2.0 * std::numbers::pi / n;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int m = 1; m <= M; ++m) s += m * std::sin(m * (j - k) * h);
      D(j, k) = -2.0 * s / n;
    }
  }
  return D;
}

// Matrix of the shift v(x) -> v(x + a) on n (odd) equispaced points, through
// the trigonometric interpolant.
inline Eigen::MatrixXd shift_matrix(int n, double a) {
  const int M = (n - 1) / 2;
  const double h = 2.0 * std::numbers::pi / n;
  Eigen::MatrixXd T(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      double s = 1.0;
      for (int m = 1; m <= M; ++m) s += 2.0 * std::cos(m * (j * h + a - k * h));
      T(j, k) = s / n;
    }
  }
  return T;
}

// Solves L w = rhs together with mean(w) = mean_value by least squares on the
// augmented (consistent) system.
inline Eigen::VectorXd solve_with_mean(const Eigen::MatrixXd& L, const Eigen::VectorXd& rhs,
                                       double mean_value) {
  const int n = static_cast<int>(L.rows());
  Eigen::MatrixXd A(n + 1, n);
  A.topRows(n) = L;
  A.row(n).setConstant(1.0 / n);
  Eigen::VectorXd b(n + 1);
  b.head(n) = rhs;
  b(n) = mean_value;
  return A.colPivHouseholderQr().solve(b);
}

// Flow operator omega d_x + d_t on an n x n grid with t-major ordering.
inline Eigen::MatrixXd flow_matrix(int n, double omega) {
  Eigen::MatrixXd D = diff_matrix(n);
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd L(n * n, n * n);
  // index = it * n + ix
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      L.block(a * n, b * n, n, n) = omega * I(a, b) * D + D(a, b) * I;
    }
  }
  return L;
}

}  // namespace rkam::testing
