#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "rkam/monomials.hpp"

namespace rkam {

inline constexpr int kMaxJet = 35;

// Truncated multivariate Taylor polynomial with real coefficients. The basis
// is shared and not owned; all jets in an expression must use the same one.
class Jet {
 public:
  Jet() = default;
  explicit Jet(const MonomialBasis* basis, double value = 0.0) : basis_(basis) {
    c_.fill(0.0);
    c_[0] = value;
  }
  static Jet variable(const MonomialBasis* basis, int v, double value) {
    Jet j(basis, value);
    int idx = basis->raised(0, v);
    if (idx >= 0) j.c_[idx] = 1.0;
    return j;
  }

  const MonomialBasis* basis() const { return basis_; }
  int size() const { return basis_->size(); }
  double value() const { return c_[0]; }
  double& operator[](int i) { return c_[i]; }
  double operator[](int i) const { return c_[i]; }

  Jet& operator+=(const Jet& o) {
    for (int i = 0; i < size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int i = 0; i < size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Jet& operator*=(double a) {
    for (int i = 0; i < size(); ++i) c_[i] *= a;
    return *this;
  }
  Jet& operator+=(double a) {
    c_[0] += a;
    return *this;
  }
  // this += a * o
  void axpy(double a, const Jet& o) {
    for (int i = 0; i < size(); ++i) c_[i] += a * o.c_[i];
  }
  // this += a * x * y (truncated)
  void add_product(double a, const Jet& x, const Jet& y) {
    const int n = size();
    for (int i = 0; i < n; ++i) {
      if (x.c_[i] == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        int k = basis_->product(i, j);
        if (k >= 0) c_[k] += a * x.c_[i] * y.c_[j];
      }
    }
  }

  // Jet with the constant term removed.
  Jet nilpotent() const {
    Jet r = *this;
    r.c_[0] = 0.0;
    return r;
  }

  double max_abs() const {
    double m = 0.0;
    for (int i = 0; i < size(); ++i) m = std::max(m, std::abs(c_[i]));
    return m;
  }

 private:
  const MonomialBasis* basis_ = nullptr;
  std::array<double, kMaxJet> c_{};
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator*(double s, Jet a) { return a *= s; }
inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r(a.basis(), 0.0);
  r.add_product(1.0, a, b);
  return r;
}

}  // namespace rkam
