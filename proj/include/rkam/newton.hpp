#pragma once

#include "rkam/diophantine.hpp"
#include "rkam/fourier_field.hpp"
#include "rkam/homological.hpp"
#include "rkam/transform.hpp"

namespace rkam {

// Shape of the perturbation handed to the next step.
struct StepTarget {
  int cutoff = 0;  // mode cutoff of f_next, g_next
  double r = 0.0;  // action radius of the next domain
  int q_y = 2;     // action degree kept in the new perturbation
};

struct StepDiagnostics {
  int step = 0;
  double min_divisor = 0.0;
  double residual_u = 0.0;
  double residual_v = 0.0;
  double unsolved_mean = 0.0;
  int inversion_iters = 0;
  double composition_residual = 0.0;
  // Relative coefficient parity defects of f_next, g_next before projection
  // (flow case only).
  double parity_defect_f = 0.0;
  double parity_defect_g = 0.0;
  // Largest |y| of the preimage of the eta = 0 slice, for the domain check.
  double max_preimage_y = 0.0;
};

struct StepResult {
  NearIdentityTransform transform;
  FourierField f_next, g_next;
  StepDiagnostics diag;
};

// One Newton step. The flow case conjugates x' = omega + y + f, y' = g with
// t-periodic f, g; the map case conjugates x1 = x + 2 pi omega + y + f,
// y1 = y + g with autonomous f, g. Components are m = d.
StepResult newton_step(const FourierField& f, const FourierField& g, const Frequency& freq,
                       const StepTarget& target, bool map_case, int step = 0);

// Largest relative parity defect tolerated before projection.
inline constexpr double kParityTolerance = 1e-10;

}  // namespace rkam
