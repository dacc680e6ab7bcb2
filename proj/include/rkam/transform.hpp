#pragma once

#include <vector>

#include "rkam/fourier_field.hpp"
#include "rkam/jet.hpp"

namespace rkam {

// Values and first derivatives of a field at a jet point.
struct PointJets {
  std::vector<Jet> value;  // [comp]
  std::vector<Jet> dx;     // [comp * d + axis]
  std::vector<Jet> dy;     // [comp * d + axis]
};

// Evaluates one field at jet points for a fixed time. Keeps a reference to
// the field.
class JetSampler {
 public:
  JetSampler(const FourierField& f, double t, const MonomialBasis* basis, bool derivatives);

  void eval(const Jet* x, const Jet* y, PointJets& out);

 private:
  SliceEvaluator ev_;
  std::vector<double> S_;
  const MonomialBasis* basis_;
  bool derivatives_;
};

// One Newton coordinate change xi = x + u(x, y, t), eta = y + v(x, y, t) and
// its inverse x = xi + U(xi, eta, t), y = eta + V(xi, eta, t).
struct NearIdentityTransform {
  FourierField u, v;
  FourierField U, V;
  int step = 0;
  bool map_case = false;
  // Grid sup of |u + U o (id + (u, v))| and the analogue for v.
  double composition_residual_u = 0.0;
  double composition_residual_v = 0.0;
  int inversion_iters = 0;
};

inline constexpr int kInversionMaxIters = 50;
inline constexpr double kInversionTol = 1e-13;

// A transform restricted to one time slice, working on jets.
class StepSlice {
 public:
  StepSlice(const NearIdentityTransform& tr, double t, const MonomialBasis* basis,
            bool derivatives);

  // Solves x + u(x, y) = xi, y + v(x, y) = eta by fixed-point iteration.
  // Returns the iteration count; throws StepFailure when it does not settle.
  int invert(const Jet* xi, const Jet* eta, Jet* x, Jet* y);
  void forward(const Jet* x, const Jet* y, Jet* xi, Jet* eta);
  // Requires a slice built with derivatives.
  void jacobian_terms(const Jet* x, const Jet* y, PointJets& du, PointJets& dv);

 private:
  int d_;
  JetSampler u_, v_;
  PointJets pu_, pv_;
};

// Phi_0 o ... o Phi_m in the inverse direction: maps coordinates after the
// last step back to the original ones.
class TransformChain {
 public:
  TransformChain() = default;
  TransformChain(int d, bool map_case) : d_(d), map_case_(map_case) {}

  int d() const { return d_; }
  bool map_case() const { return map_case_; }
  size_t size() const { return steps_.size(); }
  bool empty() const { return steps_.empty(); }
  const NearIdentityTransform& step(size_t i) const { return steps_[i]; }
  void push(NearIdentityTransform tr) { steps_.push_back(std::move(tr)); }

 private:
  int d_ = 1;
  bool map_case_ = false;
  std::vector<NearIdentityTransform> steps_;
};

// The chain at one time slice. pull_back stores the intermediate points
// z_j (original coordinates at j = 0) when `trail` is given.
class ChainSlice {
 public:
  ChainSlice(const TransformChain& chain, double t, const MonomialBasis* basis, bool derivatives);

  size_t size() const { return slices_.size(); }
  StepSlice& slice(size_t j) { return slices_[j]; }

  // trail (optional) receives (size() + 1) * 2d jets: point j at [j * 2d].
  int pull_back(const Jet* xi, const Jet* eta, Jet* x, Jet* y, std::vector<Jet>* trail = nullptr);
  void push_forward(const Jet* x, const Jet* y, Jet* xi, Jet* eta);

 private:
  int d_;
  std::vector<StepSlice> slices_;
};

}  // namespace rkam
