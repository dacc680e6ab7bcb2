#include "rkam/smoothing.hpp"

#include <algorithm>
#include <cmath>

#include "rkam/errors.hpp"
#include "rkam/grid.hpp"

namespace rkam {

double Kernel::symbol(double xi) const {
  xi = std::abs(xi);
  const double lo = plateau * a;
  if (xi <= lo) return 1.0;
  if (xi >= a) return 0.0;
  const double u = (xi - lo) / (a - lo);
  return 1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

FourierField smooth(const FourierField& input, double s, const Kernel& kernel) {
  if (!(s > 0.0)) throw DomainError("smoothing width must be positive");
  if (s > 1.0) throw DomainError("smoothing width must not exceed 1");
  if (!(kernel.a > 0.0) || kernel.plateau < 0.0 || kernel.plateau >= 1.0) {
    throw ParameterError("kernel needs a > 0 and plateau in [0, 1)");
  }
  const int N = static_cast<int>(std::ceil(kernel.a / s - 1e-12));
  FourierField out = input.with_cutoff(N);
  const ModeSet& ms = out.modes();
  for (size_t i = 0; i < ms.size(); ++i) {
    const double w = kernel.symbol(s * ms.order(i));
    if (w == 1.0) continue;
    for (int p = 0; p < out.num_powers(); ++p) {
      for (int c = 0; c < out.m(); ++c) out.at(p, i, c) *= w;
    }
  }
  return out;
}

Decomposition decompose(const FourierField& input, const Schedule& schedule,
                        const Kernel& kernel) {
  Decomposition dec;
  dec.source_norm = majorant(input, 0.0, 0.0);
  FourierField prev;
  for (int nu = 0; nu <= schedule.M; ++nu) {
    FourierField cur = smooth(input, schedule.s[nu], kernel);
    FourierField piece = nu == 0 ? cur : subtract(cur, prev);
    piece.set_parity(input.parity());
    piece.set_r(schedule.r[nu]);
    dec.majorants.push_back(majorant(piece, schedule.s[nu], schedule.r[nu]));
    dec.widths.push_back(schedule.s[nu]);
    dec.pieces.push_back(std::move(piece));
    prev = std::move(cur);
  }
  return dec;
}

FourierField synthetic_input(int d, double ell_star, int N, bool autonomous, Parity parity) {
  FourierField f(d, 1, N, 0, 0.0, parity, autonomous);
  const ModeSet& ms = f.modes();
  // Modes per order in one half space, so every shell carries weight n^{-ell-1}.
  std::vector<double> count(N + 1, 0.0);
  auto positive = [&](size_t i) {
    if (ms.l(i) != 0) return ms.l(i) > 0;
    for (int v = 0; v < d; ++v) {
      if (ms.k(i)[v] != 0) return ms.k(i)[v] > 0;
    }
    return false;
  };
  for (size_t i = 0; i < ms.size(); ++i) {
    if (positive(i)) count[ms.order(i)] += 1.0;
  }
  for (size_t i = 0; i < ms.size(); ++i) {
    if (!positive(i)) continue;
    const int n = ms.order(i);
    const double w = 0.5 * std::pow(static_cast<double>(n), -ell_star - 1.0) / count[n];
    const cdouble c = parity == Parity::kOdd ? cdouble(0.0, -w) : cdouble(w, 0.0);
    f.at(0, i, 0) = c;
    f.at(0, ms.negated(i), 0) = std::conj(c);
  }
  return f;
}

double smoothing_error(const FourierField& input, double s, const Kernel& kernel) {
  FourierField diff = subtract(smooth(input, s, kernel), input);
  return sup_norm(diff, 0.0, 0.0).value;
}

}  // namespace rkam
