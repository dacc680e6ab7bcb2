#pragma once

#include <vector>

#include "rkam/fourier_field.hpp"
#include "rkam/schedule.hpp"

namespace rkam {

// Radial Fourier multiplier: 1 on |xi| <= plateau * a, 0 on |xi| >= a, with a
// quintic smoothstep in between. |xi| is the l1 norm of the scaled mode.
struct Kernel {
  double a = 1.0;
  double plateau = 0.5;

  double symbol(double xi) const;
};

// Output coefficient (k, l) = symbol(s (|k| + |l|)) * input coefficient, with
// output cutoff ceil(a / s). The action dependence is left untouched.
FourierField smooth(const FourierField& input, double s, const Kernel& kernel = {});

struct Decomposition {
  std::vector<FourierField> pieces;  // F_0 = S_{s_0} F, F_{nu+1} = S_{s_{nu+1}} F - S_{s_nu} F
  std::vector<double> widths;        // s_nu
  std::vector<double> majorants;     // majorant of F_nu on the strip s_nu, radius r_nu
  double source_norm = 0.0;          // coefficient majorant of the input at s = 0
};

// Telescoping analytic decomposition along the schedule's strip widths.
Decomposition decompose(const FourierField& input, const Schedule& schedule,
                        const Kernel& kernel = {});

// Synthetic finite-smoothness data: coefficients (|k| + |l|)^{-ell_star - 1}
// on every mode with a positive first index sign pattern, even or odd.
FourierField synthetic_input(int d, double ell_star, int N, bool autonomous,
                             Parity parity = Parity::kEven);

// sup |S_s F - F| on a grid fine enough for F's cutoff.
double smoothing_error(const FourierField& input, double s, const Kernel& kernel = {});

}  // namespace rkam
