#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rkam/diophantine.hpp"
#include "rkam/fourier_field.hpp"
#include "rkam/newton.hpp"
#include "rkam/schedule.hpp"
#include "rkam/smoothing.hpp"
#include "rkam/transform.hpp"

namespace rkam {

// The invariant torus in original coordinates: theta -> (theta + X, Y) with
// X, Y stored as one Fourier interpolant with 2d components.
struct TorusEmbedding {
  int d = 1;
  bool map_case = false;
  std::vector<double> omega;
  int grid = 0;                // points per axis used for the interpolant
  FourierField displacement;   // components (X_1..X_d, Y_1..Y_d), no action dependence

  void evaluate(const double* theta, double t, double* x, double* y) const;
  double max_action() const;   // grid sup of |Y|
};

// Samples the chain on {eta = 0} and interpolates with the given cutoff.
TorusEmbedding embed(const TransformChain& chain, const std::vector<double>& omega, int cutoff);

struct StepRecord {
  int m = 0;
  int cutoff = 0;
  double eps = 0.0, s = 0.0, r = 0.0;  // schedule values at this step
  double sup_f = 0.0, sup_g = 0.0;     // majorants of the carried perturbation on (s, r)
  double grid_sup_f = 0.0, grid_sup_g = 0.0;
  double fresh_f = 0.0, fresh_g = 0.0; // majorants of this step's decomposition pieces
  double min_divisor = 0.0;
  int inversion_iters = 0;
  double composition_residual = 0.0;
  double unsolved_mean = 0.0;
  double parity_defect = 0.0;
  double max_preimage_y = 0.0;
  double invariance_residual = -1.0;   // negative when not measured
};

struct ConvergenceReport {
  std::vector<StepRecord> steps;  // one per carried perturbation; Newton steps = size - 1
  int newton_steps = 0;
  bool converged = false;         // carried majorant fell below tol
  bool failed = false;
  std::string failure;
  bool monotone = true;           // sup_f and sup_g strictly decrease
  double order = 0.0;             // fitted p in sup_{m+1} ~ sup_m^p
  std::vector<double> implied_constants;  // sup_f / eps per step
  std::vector<std::string> warnings;
};

struct KamOptions {
  double tol = 0.0;   // stop when max(sup_f, sup_g) < tol
  int q_y = 2;        // action degree of carried perturbations
  Kernel kernel;
  int embedding_cutoff = 0;  // 0: twice the first step's cutoff
  // Called after each Newton step with the chain so far; the returned value
  // is stored as that step's invariance residual.
  std::function<double(const TransformChain&)> step_check;
};

struct KamResult {
  TransformChain chain;
  TorusEmbedding embedding;
  ConvergenceReport report;
  FourierField f_final, g_final;
};

// Flow case: x' = omega + y + f, y' = g with f even, g odd under
// (x, t) -> (-x, -t).
KamResult run_kam_flow(const FourierField& f, const FourierField& g, const Frequency& freq,
                       const Schedule& schedule, const KamOptions& options = {});

// Map case: x1 = x + 2 pi omega + y + f, y1 = y + g with autonomous f, g.
KamResult run_kam_map(const FourierField& f, const FourierField& g, const Frequency& freq,
                      const Schedule& schedule, const KamOptions& options = {});

// Fresh decomposition pieces (df, dg), given in original coordinates, seen
// from the coordinates after the chain, sampled to cutoff N and action degree
// q. Flow: pushforward of the added vector field by the chain's Jacobian.
// Map: Psi(A_old + dA) - Psi(A_old) at the preimage, with A_old the map built
// from (f_acc, g_acc).
std::pair<FourierField, FourierField> push_pieces(const TransformChain& chain,
                                                  const FourierField& df, const FourierField& dg,
                                                  const FourierField& f_acc,
                                                  const FourierField& g_acc,
                                                  const std::vector<double>& omega, int N,
                                                  double r, int q);

// Fits p in log b = p log a + c over consecutive pairs of a sequence.
double contraction_order(const std::vector<double>& sizes);

}  // namespace rkam
