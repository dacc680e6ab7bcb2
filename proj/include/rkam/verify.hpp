#pragma once

#include <functional>
#include <vector>

#include "rkam/kam.hpp"
#include "rkam/systems.hpp"

namespace rkam {

struct InvarianceReport {
  double residual = 0.0;  // max of the two below
  double angle_error = 0.0;
  double action_error = 0.0;
  int samples = 0;
};

using PlaneMap = std::function<void(double* x, double* y)>;

// Flow case: integrates from K(theta, t0) over dt (embedded Runge-Kutta
// 7(8), absolute and relative tolerance tol) and compares with
// K(theta + omega dt, t0 + dt). Samples form a samples^(d+1) grid.
InvarianceReport verify_flow_invariance(const TorusEmbedding& emb, const FlowSystem& sys,
                                        int samples, double dt, double tol = 1e-12);

// Map case: sup over theta of |A(K(theta)) - K(theta + 2 pi omega)|, angles
// mod 2 pi.
InvarianceReport verify_map_invariance(const TorusEmbedding& emb, const PlaneMap& map,
                                       int samples);

// Rotation number (turns per iterate) of each angle along the orbit of
// (x0, y0), from a smoothly weighted Birkhoff average of the angle increments.
std::vector<double> rotation_number(const PlaneMap& map, std::vector<double> x0,
                                    std::vector<double> y0, long iterations);

}  // namespace rkam
