#include "rkam/integrator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "rkam/errors.hpp"

namespace rkam {

namespace {

constexpr int kMaxStageIters = 100;

}  // namespace

GaussLegendre::GaussLegendre(int dim, int stages) : dim_(dim), s_(stages) {
  if (dim < 1 || stages < 1 || stages > 8) throw ParameterError("bad integrator shape");
  // Golub-Welsch: nodes on [-1, 1] are the eigenvalues of the Jacobi matrix.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(s_, s_);
  for (int i = 1; i < s_; ++i) {
    const double off = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = off;
    J(i - 1, i) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  std::vector<double> x(es.eigenvalues().data(), es.eigenvalues().data() + s_);
  std::sort(x.begin(), x.end());
  // Symmetrize so c_i + c_{s-1-i} = 1 holds exactly.
  for (int i = 0; i < s_ / 2; ++i) {
    const double m = 0.5 * (x[s_ - 1 - i] - x[i]);
    x[i] = -m;
    x[s_ - 1 - i] = m;
  }
  if (s_ % 2 == 1) x[s_ / 2] = 0.0;
  c_.resize(s_);
  for (int i = 0; i < s_; ++i) c_[i] = 0.5 * (1.0 + x[i]);

  // sum_j a_ij c_j^(k-1) = c_i^k / k and sum_j b_j c_j^(k-1) = 1 / k.
  Eigen::MatrixXd V(s_, s_);
  for (int k = 0; k < s_; ++k) {
    for (int j = 0; j < s_; ++j) V(k, j) = std::pow(c_[j], k);
  }
  auto lu = V.fullPivLu();
  Eigen::VectorXd rhs(s_);
  for (int k = 0; k < s_; ++k) rhs(k) = 1.0 / (k + 1);
  Eigen::VectorXd bw = lu.solve(rhs);
  b_.assign(bw.data(), bw.data() + s_);
  for (int i = 0; i < s_ / 2; ++i) {
    const double m = 0.5 * (b_[i] + b_[s_ - 1 - i]);
    b_[i] = b_[s_ - 1 - i] = m;
  }
  a_.resize(s_ * s_);
  for (int i = 0; i < s_; ++i) {
    for (int k = 0; k < s_; ++k) rhs(k) = std::pow(c_[i], k + 1) / (k + 1);
    Eigen::VectorXd row = lu.solve(rhs);
    for (int j = 0; j < s_; ++j) a_[i * s_ + j] = row(j);
  }
  k_.resize(s_ * dim_);
  knew_.resize(s_ * dim_);
  stage_.resize(dim_);
}

int GaussLegendre::step(const OdeRhs& rhs, double t, double h, double* y) {
  rhs(t + c_[0] * h, y, k_.data());
  for (int i = 1; i < s_; ++i) std::copy(k_.begin(), k_.begin() + dim_, k_.begin() + i * dim_);
  double scale = 0.0;
  for (int a = 0; a < dim_; ++a) scale = std::max(scale, std::abs(y[a]));
  scale = std::max(scale, 1e-300);
  double prev = INFINITY;
  int stall = 0;
  for (int it = 1; it <= kMaxStageIters; ++it) {
    for (int i = 0; i < s_; ++i) {
      for (int a = 0; a < dim_; ++a) {
        double acc = 0.0;
        for (int j = 0; j < s_; ++j) acc += a_[i * s_ + j] * k_[j * dim_ + a];
        stage_[a] = y[a] + h * acc;
      }
      rhs(t + c_[i] * h, stage_.data(), &knew_[i * dim_]);
    }
    double change = 0.0;
    for (size_t q = 0; q < k_.size(); ++q) change = std::max(change, std::abs(knew_[q] - k_[q]));
    k_.swap(knew_);
    change *= std::abs(h);
    // Converged once the update is at round-off and has stopped shrinking.
    if (change <= 1e-15 * scale) {
      if (change == 0.0 || change >= 0.5 * prev || ++stall >= 2) {
        prev = change;
        for (int a = 0; a < dim_; ++a) {
          double acc = 0.0;
          for (int j = 0; j < s_; ++j) acc += b_[j] * k_[j * dim_ + a];
          y[a] += h * acc;
        }
        return it;
      }
    }
    prev = change;
  }
  if (prev > 1e-10 * scale) throw IntegrationFailure("implicit stages did not converge; step too large");
  for (int a = 0; a < dim_; ++a) {
    double acc = 0.0;
    for (int j = 0; j < s_; ++j) acc += b_[j] * k_[j * dim_ + a];
    y[a] += h * acc;
  }
  return kMaxStageIters;
}

void GaussLegendre::advance(const OdeRhs& rhs, double t, double h, long n, double* y) {
  for (long i = 0; i < n; ++i) step(rhs, t + i * h, h, y);
}

}  // namespace rkam
