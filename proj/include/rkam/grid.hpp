#pragma once

#include <vector>

#include "rkam/fourier_field.hpp"

namespace rkam {

// Uniform product grid with n points per axis, theta_j = 2 pi j / n. Axes are
// ordered (t, x_1, ..., x_d) with t outermost; autonomous grids drop t.
class UniformGrid {
 public:
  UniformGrid(int d, int n, bool autonomous);

  int d() const { return d_; }
  int n() const { return n_; }
  bool autonomous() const { return autonomous_; }
  int axes() const { return d_ + (autonomous_ ? 0 : 1); }
  size_t points() const { return points_; }
  // Points per t-row (the x sub-grid).
  size_t row_points() const { return row_; }

  void point(size_t idx, double* x, double* t) const;
  // Index of the point (-x, -t).
  size_t reflected(size_t idx) const;

 private:
  int d_;
  int n_;
  bool autonomous_;
  size_t points_;
  size_t row_;
};

// Real values of every action-coefficient function on the grid, laid out as
// [point][power][component].
std::vector<double> synthesize(const FourierField& f, int n);

// Discrete Fourier analysis of grid samples in the synthesize() layout. The
// grid must resolve the cutoff (n >= 2N + 1).
FourierField analyze(const std::vector<double>& samples, int d, int m, int n,
                     int N, int q_y, double r, bool autonomous);

}  // namespace rkam
