#include "rkam/transform.hpp"

#include <cmath>

#include "rkam/errors.hpp"

namespace rkam {

JetSampler::JetSampler(const FourierField& f, double t, const MonomialBasis* basis,
                       bool derivatives)
    : ev_(f, t, basis->degree() + (derivatives ? 1 : 0)),
      S_(ev_.table_size()),
      basis_(basis),
      derivatives_(derivatives) {}

void JetSampler::eval(const Jet* x, const Jet* y, PointJets& out) {
  const FourierField& f = ev_.field();
  const int d = f.d();
  const int m = f.m();
  JetPoint pt(f, basis_, x, y);
  ev_.table(pt.x0(), S_.data());
  out.value.resize(m);
  for (int c = 0; c < m; ++c) out.value[c] = pt.combine(ev_, S_.data(), c);
  if (!derivatives_) return;
  out.dx.resize(static_cast<size_t>(m) * d);
  out.dy.resize(static_cast<size_t>(m) * d);
  for (int c = 0; c < m; ++c) {
    for (int a = 0; a < d; ++a) {
      out.dx[c * d + a] = pt.combine(ev_, S_.data(), c, a, -1);
      out.dy[c * d + a] = pt.combine(ev_, S_.data(), c, -1, a);
    }
  }
}

StepSlice::StepSlice(const NearIdentityTransform& tr, double t, const MonomialBasis* basis,
                     bool derivatives)
    : d_(tr.u.d()), u_(tr.u, t, basis, derivatives), v_(tr.v, t, basis, derivatives) {}

int StepSlice::invert(const Jet* xi, const Jet* eta, Jet* x, Jet* y) {
  for (int a = 0; a < d_; ++a) {
    x[a] = xi[a];
    y[a] = eta[a];
  }
  double delta = INFINITY;
  int extra = 0;
  for (int it = 1; it <= kInversionMaxIters; ++it) {
    u_.eval(x, y, pu_);
    v_.eval(x, y, pv_);
    delta = 0.0;
    for (int a = 0; a < d_; ++a) {
      Jet nx = xi[a] - pu_.value[a];
      Jet ny = eta[a] - pv_.value[a];
      delta = std::max(delta, (nx - x[a]).max_abs());
      delta = std::max(delta, (ny - y[a]).max_abs());
      x[a] = nx;
      y[a] = ny;
    }
    if (!std::isfinite(delta)) break;
    // A couple of sweeps past the tolerance push the error to rounding level.
    if (delta <= kInversionTol && ++extra > 2) return it;
  }
  if (std::isfinite(delta) && delta <= kInversionTol) return kInversionMaxIters;
  throw StepFailure("transform inversion did not converge (last update " +
                    std::to_string(delta) + ")");
}

void StepSlice::forward(const Jet* x, const Jet* y, Jet* xi, Jet* eta) {
  u_.eval(x, y, pu_);
  v_.eval(x, y, pv_);
  for (int a = 0; a < d_; ++a) {
    xi[a] = x[a] + pu_.value[a];
    eta[a] = y[a] + pv_.value[a];
  }
}

void StepSlice::jacobian_terms(const Jet* x, const Jet* y, PointJets& du, PointJets& dv) {
  u_.eval(x, y, du);
  v_.eval(x, y, dv);
}

ChainSlice::ChainSlice(const TransformChain& chain, double t, const MonomialBasis* basis,
                       bool derivatives)
    : d_(chain.d()) {
  slices_.reserve(chain.size());
  for (size_t j = 0; j < chain.size(); ++j) slices_.emplace_back(chain.step(j), t, basis, derivatives);
}

int ChainSlice::pull_back(const Jet* xi, const Jet* eta, Jet* x, Jet* y, std::vector<Jet>* trail) {
  std::vector<Jet> cur(2 * d_), nxt(2 * d_);
  for (int a = 0; a < d_; ++a) {
    cur[a] = xi[a];
    cur[d_ + a] = eta[a];
  }
  const size_t n = slices_.size();
  if (trail) {
    trail->resize((n + 1) * 2 * d_);
    std::copy(cur.begin(), cur.end(), trail->begin() + n * 2 * d_);
  }
  int iters = 0;
  for (size_t j = n; j-- > 0;) {
    iters = std::max(iters, slices_[j].invert(&cur[0], &cur[d_], &nxt[0], &nxt[d_]));
    cur.swap(nxt);
    if (trail) std::copy(cur.begin(), cur.end(), trail->begin() + j * 2 * d_);
  }
  for (int a = 0; a < d_; ++a) {
    x[a] = cur[a];
    y[a] = cur[d_ + a];
  }
  return iters;
}

void ChainSlice::push_forward(const Jet* x, const Jet* y, Jet* xi, Jet* eta) {
  std::vector<Jet> cur(2 * d_), nxt(2 * d_);
  for (int a = 0; a < d_; ++a) {
    cur[a] = x[a];
    cur[d_ + a] = y[a];
  }
  for (auto& s : slices_) {
    s.forward(&cur[0], &cur[d_], &nxt[0], &nxt[d_]);
    cur.swap(nxt);
  }
  for (int a = 0; a < d_; ++a) {
    xi[a] = cur[a];
    eta[a] = cur[d_ + a];
  }
}

}  // namespace rkam
