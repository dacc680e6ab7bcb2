#pragma once

#include <random>

#include "rkam/fourier_field.hpp"

namespace rkam::testing {

// Random real field with the requested parity; coefficients decay like
// decay^{|k|+|l|} so grid sups stay O(1).
inline FourierField random_field(int d, int m, int N, int q_y, double r, Parity parity,
                                 std::mt19937_64& rng, bool autonomous = false,
                                 double decay = 0.7) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FourierField f(d, m, N, q_y, r, Parity::kNone, autonomous);
  const ModeSet& ms = f.modes();
  for (int p = 0; p < f.num_powers(); ++p) {
    for (size_t i = 0; i < ms.size(); ++i) {
      const double w = std::pow(decay, ms.order(i));
      for (int c = 0; c < m; ++c) f.at(p, i, c) = cdouble(u(rng), u(rng)) * w;
    }
  }
  f.enforce_reality();
  f.project_parity(parity);
  return f;
}

}  // namespace rkam::testing
