#pragma once

#include "rkam/diophantine.hpp"
#include "rkam/fourier_field.hpp"

namespace rkam {

struct HomologicalSolution {
  FourierField u;  // odd under (x, t) -> (-x, -t) for reversible input
  FourierField v;  // even
  double min_divisor = 0.0;
  double residual_u = 0.0;  // grid sup of the u-equation, relative to the input scale
  double residual_v = 0.0;
  // Map case: largest per-power mean of g, which no difference equation can
  // absorb; it is left in the residual of the v-equation.
  double unsolved_mean = 0.0;
  // Map case: what the difference equations leave over, as fields:
  // f + u(x + omega) - u - v and g + v(x + omega) - v.
  FourierField rest_u, rest_v;
};

// Flow case, omega . d_x v + d_t v = -g. The (0, 0) coefficient is left zero.
// Throws StructureError if g has a mean beyond 1e-12 of its scale, and
// SmallDivisorError if a retained mode's divisor is below the floor.
FourierField solve_v(const FourierField& g, const Frequency& freq);

// Flow case, omega . d_x u + d_t u = v - f after setting v's mean to f's mean
// (v is updated in place). u has zero mean.
FourierField solve_u(const FourierField& f, FourierField& v, const Frequency& freq);

// Both flow equations with residual diagnostics.
HomologicalSolution solve_flow(const FourierField& f, const FourierField& g,
                               const Frequency& freq);

// Map case, u(x + omega) - u(x) = v - f and v(x + omega) - v(x) = -g, per
// action power, with divisors e^{i<k,omega>} - 1. Inputs must be autonomous.
HomologicalSolution solve_map(const FourierField& f, const FourierField& g,
                              const Frequency& freq);

// Coefficient-level residual max |L(sol) - rhs| / max|rhs| for the flow
// equations (L = i(<k,omega> + l)).
double flow_coefficient_residual(const FourierField& sol, const FourierField& rhs,
                                 const Frequency& freq);

}  // namespace rkam
