#include "rkam/grid.hpp"

#include <cmath>
#include <numbers>

#include "rkam/errors.hpp"

namespace rkam {

UniformGrid::UniformGrid(int d, int n, bool autonomous)
    : d_(d), n_(n), autonomous_(autonomous) {
  if (d < 1 || n < 1) throw ParameterError("grid needs d >= 1 and n >= 1");
  row_ = 1;
  for (int v = 0; v < d; ++v) row_ *= n;
  points_ = autonomous ? row_ : row_ * n;
}

void UniformGrid::point(size_t idx, double* x, double* t) const {
  const double h = 2.0 * std::numbers::pi / n_;
  size_t rem = idx % row_;
  for (int v = d_ - 1; v >= 0; --v) {
    x[v] = h * static_cast<double>(rem % n_);
    rem /= n_;
  }
  if (t) *t = autonomous_ ? 0.0 : h * static_cast<double>(idx / row_);
}

size_t UniformGrid::reflected(size_t idx) const {
  size_t rem = idx;
  size_t out = 0;
  size_t mul = 1;
  for (int a = 0; a < axes(); ++a) {
    size_t j = rem % n_;
    rem /= n_;
    out += ((n_ - j) % n_) * mul;
    mul *= n_;
  }
  return out;
}

std::vector<double> synthesize(const FourierField& f, int n) {
  const UniformGrid g(f.d(), n, f.autonomous());
  const size_t stride = static_cast<size_t>(f.num_powers()) * f.m();
  std::vector<double> out(g.points() * stride);
  std::vector<double> x(f.d());
  const size_t rows = f.autonomous() ? 1 : static_cast<size_t>(n);
  for (size_t row = 0; row < rows; ++row) {
    double t = 0.0;
    g.point(row * g.row_points(), x.data(), &t);
    SliceEvaluator ev(f, t, 0);
    for (size_t j = 0; j < g.row_points(); ++j) {
      const size_t idx = row * g.row_points() + j;
      g.point(idx, x.data(), nullptr);
      ev.table(x.data(), &out[idx * stride]);
    }
  }
  return out;
}

FourierField analyze(const std::vector<double>& samples, int d, int m, int n,
                     int N, int q_y, double r, bool autonomous) {
  if (n < 2 * N + 1) {
    throw ParameterError("grid of " + std::to_string(n) + " points cannot resolve cutoff " +
                         std::to_string(N));
  }
  FourierField out(d, m, N, q_y, r, Parity::kNone, autonomous);
  const UniformGrid g(d, n, autonomous);
  const size_t payload = static_cast<size_t>(out.num_powers()) * m;
  if (samples.size() != g.points() * payload) throw ShapeError("sample array has wrong size");

  const int w = 2 * N + 1;
  std::vector<cdouble> tw(static_cast<size_t>(w) * n);
  for (int f = -N; f <= N; ++f) {
    for (int j = 0; j < n; ++j) {
      tw[(f + N) * n + j] =
          std::polar(1.0 / n, -2.0 * std::numbers::pi * f * j / static_cast<double>(n));
    }
  }
  // Transform one axis at a time; the array shape is [a_0]...[a_{A-1}][payload].
  const int A = g.axes();
  std::vector<size_t> shape(A, static_cast<size_t>(n));
  std::vector<cdouble> cur(samples.begin(), samples.end());
  for (int ax = 0; ax < A; ++ax) {
    size_t outer = 1, inner = payload;
    for (int a = 0; a < ax; ++a) outer *= shape[a];
    for (int a = ax + 1; a < A; ++a) inner *= shape[a];
    std::vector<cdouble> next(outer * w * inner, cdouble(0.0));
    for (size_t o = 0; o < outer; ++o) {
      const cdouble* src = &cur[o * n * inner];
      cdouble* dst = &next[o * w * inner];
      for (int f = 0; f < w; ++f) {
        const cdouble* t = &tw[static_cast<size_t>(f) * n];
        cdouble* row = dst + f * inner;
        for (int j = 0; j < n; ++j) {
          const cdouble* s = src + j * inner;
          const cdouble z = t[j];
          for (size_t i = 0; i < inner; ++i) row[i] += z * s[i];
        }
      }
    }
    shape[ax] = w;
    cur.swap(next);
  }
  const ModeSet& ms = out.modes();
  for (size_t i = 0; i < ms.size(); ++i) {
    size_t b = autonomous ? 0 : static_cast<size_t>(ms.l(i) + N);
    for (int v = 0; v < d; ++v) b = b * w + (ms.k(i)[v] + N);
    for (int p = 0; p < out.num_powers(); ++p) {
      for (int c = 0; c < m; ++c) out.at(p, i, c) = cur[b * payload + p * m + c];
    }
  }
  out.enforce_reality();
  return out;
}

}  // namespace rkam
