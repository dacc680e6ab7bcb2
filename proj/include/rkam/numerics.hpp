#pragma once

#include <vector>

namespace rkam {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Least-squares line through (x_i, y_i).
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Slope of log y against log x; nonpositive entries are skipped.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Number of worker threads used by data-parallel loops (default 1).
void set_num_threads(int n);
int num_threads();

// Runs fn(begin, end) over [0, count) split into contiguous chunks, one per
// worker. Chunks write disjoint output ranges, so results do not depend on
// the thread count.
template <class Fn>
void parallel_for(size_t count, Fn&& fn);

}  // namespace rkam

#include "rkam/numerics_inl.hpp"
