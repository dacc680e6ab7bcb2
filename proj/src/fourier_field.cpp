#include "rkam/fourier_field.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "rkam/errors.hpp"
#include "rkam/grid.hpp"

namespace rkam {

std::string to_string(Parity p) {
  switch (p) {
    case Parity::kEven:
      return "even";
    case Parity::kOdd:
      return "odd";
    case Parity::kNone:
      return "none";
  }
  return "none";
}

Parity parity_from_string(const std::string& s) {
  if (s == "even") return Parity::kEven;
  if (s == "odd") return Parity::kOdd;
  if (s == "none") return Parity::kNone;
  throw ParameterError("unknown parity tag '" + s + "'");
}

Parity product_parity(Parity a, Parity b) {
  if (a == Parity::kNone || b == Parity::kNone) return Parity::kNone;
  return a == b ? Parity::kEven : Parity::kOdd;
}

Parity flipped(Parity p) {
  if (p == Parity::kEven) return Parity::kOdd;
  if (p == Parity::kOdd) return Parity::kEven;
  return Parity::kNone;
}

// ---------------------------------------------------------------- ModeSet

ModeSet::ModeSet(int d, int N, bool autonomous)
    : d_(d), N_(N), autonomous_(autonomous) {
  if (d < 1 || N < 0) throw ParameterError("mode set needs d >= 1, N >= 0");
  const int w = 2 * N + 1;
  long box = w;
  for (int i = 0; i < d; ++i) box *= w;
  box_.assign(box, -1);
  std::vector<int> k(d, -N);
  const int lmin = autonomous ? 0 : -N;
  const int lmax = autonomous ? 0 : N;
  for (int l = lmin; l <= lmax; ++l) {
    std::fill(k.begin(), k.end(), -N);
    while (true) {
      int order = std::abs(l);
      for (int v : k) order += std::abs(v);
      if (order <= N) {
        box_[box_index(k.data(), l)] = static_cast<long>(l_.size());
        k_.insert(k_.end(), k.begin(), k.end());
        l_.push_back(l);
        order_.push_back(order);
      }
      int pos = d - 1;
      while (pos >= 0 && k[pos] == N) {
        k[pos] = -N;
        --pos;
      }
      if (pos < 0) break;
      ++k[pos];
    }
  }
  neg_.resize(size());
  std::vector<int> nk(d);
  for (size_t i = 0; i < size(); ++i) {
    for (int v = 0; v < d; ++v) nk[v] = -k_[i * d + v];
    neg_[i] = static_cast<size_t>(find(nk.data(), -l_[i]));
    if (order_[i] == 0) zero_ = i;
  }
}

long ModeSet::box_index(const int* k, int l) const {
  const int w = 2 * N_ + 1;
  long idx = l + N_;
  for (int v = 0; v < d_; ++v) idx = idx * w + (k[v] + N_);
  return idx;
}

long ModeSet::find(const int* k, int l) const {
  if (autonomous_ && l != 0) return -1;
  int order = std::abs(l);
  for (int v = 0; v < d_; ++v) order += std::abs(k[v]);
  if (order > N_) return -1;
  return box_[box_index(k, l)];
}

std::shared_ptr<const ModeSet> ModeSet::get(int d, int N, bool autonomous) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, bool>, std::shared_ptr<const ModeSet>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(d, N, autonomous);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto set = std::make_shared<const ModeSet>(d, N, autonomous);
  cache.emplace(key, set);
  return set;
}

// ------------------------------------------------------------ FourierField

FourierField::FourierField(int d, int m, int N, int q_y, double r, Parity parity,
                           bool autonomous)
    : d_(d), m_(m), N_(N), q_(q_y), r_(r), parity_(parity), autonomous_(autonomous) {
  if (d < 1 || m < 1 || N < 0 || q_y < 0) {
    throw ParameterError("field needs d >= 1, m >= 1, N >= 0, q_y >= 0");
  }
  if (!(r >= 0.0)) throw DomainError("action radius must be nonnegative");
  modes_ = ModeSet::get(d, N, autonomous);
  powers_ = MonomialBasis::get(d, q_y);
  c_.assign(static_cast<size_t>(powers_->size()) * modes_->size() * m, cdouble(0.0));
}

void FourierField::set_r(double r) {
  if (!(r >= 0.0)) throw DomainError("action radius must be nonnegative");
  r_ = r;
}

cdouble FourierField::coeff(const TorusIndex& idx, int power, int comp) const {
  if (static_cast<int>(idx.k.size()) != d_) throw ShapeError("index has wrong dimension");
  long i = modes_->find(idx.k.data(), idx.l);
  if (i < 0 || power < 0 || power >= num_powers()) return 0.0;
  return at(power, static_cast<size_t>(i), comp);
}

void FourierField::set_coeff(const TorusIndex& idx, int power, int comp, cdouble value) {
  if (static_cast<int>(idx.k.size()) != d_) throw ShapeError("index has wrong dimension");
  if (comp < 0 || comp >= m_ || power < 0 || power >= num_powers()) {
    throw ShapeError("component or power out of range");
  }
  long i = modes_->find(idx.k.data(), idx.l);
  if (i < 0) throw DomainError("mode outside the cutoff");
  size_t j = modes_->negated(static_cast<size_t>(i));
  if (j == static_cast<size_t>(i)) {
    at(power, j, comp) = value.real();
  } else {
    at(power, static_cast<size_t>(i), comp) = value;
    at(power, j, comp) = std::conj(value);
  }
}

std::vector<cdouble> FourierField::evaluate_complex(const std::vector<double>& x,
                                                    const std::vector<double>& y,
                                                    double t) const {
  if (static_cast<int>(x.size()) != d_ || static_cast<int>(y.size()) != d_) {
    throw ShapeError("evaluation point has wrong dimension");
  }
  double ny = 0.0;
  for (double v : y) ny += v * v;
  if (std::sqrt(ny) > r_ * (1.0 + 1e-12)) {
    throw DomainError("action outside the field radius");
  }
  std::vector<double> yp(num_powers());
  powers_->powers(y.data(), yp.data());
  std::vector<cdouble> out(m_, 0.0);
  const ModeSet& ms = *modes_;
  for (size_t i = 0; i < ms.size(); ++i) {
    double phase = ms.l(i) * t;
    for (int v = 0; v < d_; ++v) phase += ms.k(i)[v] * x[v];
    cdouble e = std::polar(1.0, phase);
    for (int p = 0; p < num_powers(); ++p) {
      for (int c = 0; c < m_; ++c) out[c] += at(p, i, c) * e * yp[p];
    }
  }
  return out;
}

std::vector<double> FourierField::evaluate(const std::vector<double>& x,
                                           const std::vector<double>& y,
                                           double t) const {
  auto z = evaluate_complex(x, y, t);
  std::vector<double> out(m_);
  for (int c = 0; c < m_; ++c) out[c] = z[c].real();
  return out;
}

double FourierField::reality_defect() const {
  double worst = 0.0;
  for (int p = 0; p < num_powers(); ++p) {
    for (size_t i = 0; i < modes_->size(); ++i) {
      size_t j = modes_->negated(i);
      for (int c = 0; c < m_; ++c) {
        worst = std::max(worst, std::abs(at(p, j, c) - std::conj(at(p, i, c))));
      }
    }
  }
  return worst;
}

double FourierField::parity_defect(Parity par) const {
  if (par == Parity::kNone) return 0.0;
  const double sign = par == Parity::kEven ? 1.0 : -1.0;
  double worst = 0.0;
  for (int p = 0; p < num_powers(); ++p) {
    for (size_t i = 0; i < modes_->size(); ++i) {
      size_t j = modes_->negated(i);
      for (int c = 0; c < m_; ++c) {
        worst = std::max(worst, std::abs(at(p, j, c) - sign * at(p, i, c)));
      }
    }
  }
  return worst;
}

double FourierField::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& z : c_) m = std::max(m, std::abs(z));
  return m;
}

bool FourierField::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](const cdouble& z) { return z == 0.0; });
}

void FourierField::enforce_reality() {
  for (int p = 0; p < num_powers(); ++p) {
    for (size_t i = 0; i < modes_->size(); ++i) {
      size_t j = modes_->negated(i);
      if (j < i) continue;
      for (int c = 0; c < m_; ++c) {
        cdouble a = 0.5 * (at(p, i, c) + std::conj(at(p, j, c)));
        at(p, i, c) = a;
        at(p, j, c) = std::conj(a);
      }
    }
  }
}

void FourierField::project_parity(Parity par) {
  parity_ = par;
  if (par == Parity::kNone) return;
  const double sign = par == Parity::kEven ? 1.0 : -1.0;
  for (int p = 0; p < num_powers(); ++p) {
    for (size_t i = 0; i < modes_->size(); ++i) {
      size_t j = modes_->negated(i);
      if (j < i) continue;
      for (int c = 0; c < m_; ++c) {
        cdouble a = 0.5 * (at(p, i, c) + sign * at(p, j, c));
        at(p, i, c) = a;
        at(p, j, c) = sign * a;
      }
    }
  }
}

FourierField FourierField::with_cutoff(int N) const {
  FourierField out(d_, m_, N, q_, r_, parity_, autonomous_);
  const ModeSet& dst = out.modes();
  for (size_t i = 0; i < dst.size(); ++i) {
    long src = modes_->find(dst.k(i), dst.l(i));
    if (src < 0) continue;
    for (int p = 0; p < num_powers(); ++p) {
      for (int c = 0; c < m_; ++c) out.at(p, i, c) = at(p, static_cast<size_t>(src), c);
    }
  }
  return out;
}

FourierField FourierField::with_degree(int q_y) const {
  FourierField out(d_, m_, N_, q_y, r_, parity_, autonomous_);
  for (int p = 0; p < out.num_powers(); ++p) {
    int src = powers_->index(out.powers().exponent(p));
    if (src < 0) continue;
    for (size_t i = 0; i < modes_->size(); ++i) {
      for (int c = 0; c < m_; ++c) out.at(p, i, c) = at(src, i, c);
    }
  }
  return out;
}

// ------------------------------------------------------------------ norms

double majorant(const FourierField& f, double s, double r) {
  if (s < 0.0 || r < 0.0) throw DomainError("strip parameters must be nonnegative");
  const ModeSet& ms = f.modes();
  std::vector<double> per(f.m(), 0.0);
  for (int p = 0; p < f.num_powers(); ++p) {
    double rp = std::pow(r, f.powers().total_degree(p));
    if (rp == 0.0 && f.powers().total_degree(p) > 0) continue;
    for (size_t i = 0; i < ms.size(); ++i) {
      double w = std::exp(ms.order(i) * s) * rp;
      for (int c = 0; c < f.m(); ++c) per[c] += std::abs(f.at(p, i, c)) * w;
    }
  }
  double sum = 0.0;
  for (double v : per) sum += v * v;
  return std::sqrt(sum);
}

namespace {

// Action sample points {0, +-r/2, +-r}^d, flattened.
std::vector<double> action_samples(int d, double r) {
  const double levels[5] = {0.0, 0.5 * r, -0.5 * r, r, -r};
  const int count = r > 0.0 ? 5 : 1;
  size_t total = 1;
  for (int i = 0; i < d; ++i) total *= count;
  std::vector<double> out;
  out.reserve(total * d);
  for (size_t idx = 0; idx < total; ++idx) {
    size_t rem = idx;
    for (int v = 0; v < d; ++v) {
      out.push_back(levels[rem % count]);
      rem /= count;
    }
  }
  return out;
}

}  // namespace

SupNormReport sup_norm(const FourierField& f, double s, double r, int grid) {
  if (s < 0.0 || r < 0.0) throw DomainError("strip parameters must be nonnegative");
  SupNormReport rep;
  rep.s_eff = s;
  rep.r_eff = r;
  rep.majorant = majorant(f, s, r);
  const int n = grid > 0 ? grid : 4 * f.cutoff() + 4;
  const int d = f.d();
  rep.grid_size.assign(d + (f.autonomous() ? 0 : 1), n);

  const std::vector<double> ys = action_samples(d, r);
  const size_t ny = ys.size() / d;
  const int P = f.num_powers();
  std::vector<double> ypow(ny * P);
  for (size_t j = 0; j < ny; ++j) f.powers().powers(&ys[j * d], &ypow[j * P]);

  const std::vector<double> samples = synthesize(f, n);
  const size_t stride = static_cast<size_t>(P) * f.m();
  const size_t points = samples.size() / stride;
  double best = 0.0;
  for (size_t pt = 0; pt < points; ++pt) {
    const double* a = &samples[pt * stride];
    for (size_t j = 0; j < ny; ++j) {
      double norm2 = 0.0;
      for (int c = 0; c < f.m(); ++c) {
        double v = 0.0;
        for (int p = 0; p < P; ++p) v += a[p * f.m() + c] * ypow[j * P + p];
        norm2 += v * v;
      }
      best = std::max(best, norm2);
    }
  }
  rep.value = std::sqrt(best);
  return rep;
}

double grid_parity_residual(const FourierField& f, Parity par, int grid) {
  if (par == Parity::kNone) return 0.0;
  const double sign = par == Parity::kEven ? 1.0 : -1.0;
  const int n = grid > 0 ? grid : 4 * f.cutoff() + 4;
  const int d = f.d();
  const std::vector<double> ys = action_samples(d, f.r());
  const size_t ny = ys.size() / d;
  const int P = f.num_powers();
  std::vector<double> ypow(ny * P);
  for (size_t j = 0; j < ny; ++j) f.powers().powers(&ys[j * d], &ypow[j * P]);

  const UniformGrid g(d, n, f.autonomous());
  const std::vector<double> samples = synthesize(f, n);
  const size_t stride = static_cast<size_t>(P) * f.m();
  double worst = 0.0;
  for (size_t pt = 0; pt < g.points(); ++pt) {
    const double* a = &samples[pt * stride];
    const double* b = &samples[g.reflected(pt) * stride];
    for (size_t j = 0; j < ny; ++j) {
      for (int c = 0; c < f.m(); ++c) {
        double v = 0.0;
        for (int p = 0; p < P; ++p) v += (b[p * f.m() + c] - sign * a[p * f.m() + c]) * ypow[j * P + p];
        worst = std::max(worst, std::abs(v));
      }
    }
  }
  return worst;
}

// ---------------------------------------------------------------- algebra

namespace {

void check_compatible(const FourierField& a, const FourierField& b) {
  if (a.d() != b.d() || a.autonomous() != b.autonomous()) {
    throw ShapeError("fields live on different tori");
  }
}

Parity sum_parity(Parity a, Parity b) { return a == b ? a : Parity::kNone; }

FourierField combine(const FourierField& a, const FourierField& b, double sb) {
  check_compatible(a, b);
  if (a.m() != b.m()) throw ShapeError("fields have different codomain dimension");
  const int N = std::max(a.cutoff(), b.cutoff());
  const int q = std::max(a.q_y(), b.q_y());
  FourierField out(a.d(), a.m(), N, q, std::min(a.r(), b.r()),
                   sum_parity(a.parity(), b.parity()), a.autonomous());
  for (const FourierField* src : {&a, &b}) {
    const double w = src == &a ? 1.0 : sb;
    for (size_t i = 0; i < src->modes().size(); ++i) {
      size_t dst = static_cast<size_t>(out.modes().find(src->modes().k(i), src->modes().l(i)));
      for (int p = 0; p < src->num_powers(); ++p) {
        int dp = out.powers().index(src->powers().exponent(p));
        for (int c = 0; c < a.m(); ++c) out.at(dp, dst, c) += w * src->at(p, i, c);
      }
    }
  }
  return out;
}

}  // namespace

FourierField add(const FourierField& a, const FourierField& b) { return combine(a, b, 1.0); }
FourierField subtract(const FourierField& a, const FourierField& b) { return combine(a, b, -1.0); }

FourierField scale(const FourierField& a, double s) {
  FourierField out = a;
  for (auto& z : out.data()) z *= s;
  return out;
}

FourierField multiply_truncated(const FourierField& a, const FourierField& b, int N) {
  check_compatible(a, b);
  if (a.m() != b.m() && a.m() != 1 && b.m() != 1) {
    throw ShapeError("product needs equal codomains or a scalar factor");
  }
  const int m = std::max(a.m(), b.m());
  if (N < 0) N = std::max(a.cutoff(), b.cutoff());
  const int q = std::max(a.q_y(), b.q_y());
  FourierField out(a.d(), m, N, q, std::min(a.r(), b.r()),
                   product_parity(a.parity(), b.parity()), a.autonomous());
  const int d = a.d();
  const ModeSet& ma = a.modes();
  const ModeSet& mb = b.modes();
  std::vector<int> k(d);
  // Map the powers of both factors into the output basis once.
  std::vector<int> pa(a.num_powers()), pb(b.num_powers());
  for (int p = 0; p < a.num_powers(); ++p) pa[p] = out.powers().index(a.powers().exponent(p));
  for (int p = 0; p < b.num_powers(); ++p) pb[p] = out.powers().index(b.powers().exponent(p));
  for (size_t i = 0; i < ma.size(); ++i) {
    for (size_t j = 0; j < mb.size(); ++j) {
      if (ma.order(i) + mb.order(j) > N) {
        // Only modes whose sum may still fit are worth a lookup.
        int order = std::abs(ma.l(i) + mb.l(j));
        for (int v = 0; v < d; ++v) order += std::abs(ma.k(i)[v] + mb.k(j)[v]);
        if (order > N) continue;
      }
      for (int v = 0; v < d; ++v) k[v] = ma.k(i)[v] + mb.k(j)[v];
      long dst = out.modes().find(k.data(), ma.l(i) + mb.l(j));
      if (dst < 0) continue;
      for (int p = 0; p < a.num_powers(); ++p) {
        for (int s = 0; s < b.num_powers(); ++s) {
          int dp = out.powers().product(pa[p], pb[s]);
          if (dp < 0) continue;
          for (int c = 0; c < m; ++c) {
            const cdouble& x = a.at(p, i, a.m() == 1 ? 0 : c);
            const cdouble& y = b.at(s, j, b.m() == 1 ? 0 : c);
            out.at(dp, static_cast<size_t>(dst), c) += x * y;
          }
        }
      }
    }
  }
  return out;
}

FourierField differentiate_x(const FourierField& a, int axis) {
  if (axis < 0 || axis >= a.d()) throw ShapeError("derivative axis out of range");
  FourierField out = a;
  out.set_parity(flipped(a.parity()));
  for (size_t i = 0; i < a.modes().size(); ++i) {
    cdouble w(0.0, a.modes().k(i)[axis]);
    for (int p = 0; p < a.num_powers(); ++p) {
      for (int c = 0; c < a.m(); ++c) out.at(p, i, c) *= w;
    }
  }
  return out;
}

FourierField differentiate_t(const FourierField& a) {
  FourierField out = a;
  out.set_parity(flipped(a.parity()));
  for (size_t i = 0; i < a.modes().size(); ++i) {
    cdouble w(0.0, a.modes().l(i));
    for (int p = 0; p < a.num_powers(); ++p) {
      for (int c = 0; c < a.m(); ++c) out.at(p, i, c) *= w;
    }
  }
  return out;
}

FourierField differentiate_y(const FourierField& a, int axis) {
  if (axis < 0 || axis >= a.d()) throw ShapeError("derivative axis out of range");
  FourierField out(a.d(), a.m(), a.cutoff(), a.q_y(), a.r(), a.parity(), a.autonomous());
  for (int p = 0; p < a.num_powers(); ++p) {
    int up = a.powers().raised(p, axis);
    if (up < 0) continue;
    double factor = a.powers().exponent(up)[axis];
    for (size_t i = 0; i < a.modes().size(); ++i) {
      for (int c = 0; c < a.m(); ++c) out.at(p, i, c) = factor * a.at(up, i, c);
    }
  }
  return out;
}

// ------------------------------------------------------------- evaluators

SliceEvaluator::SliceEvaluator(const FourierField& f, double t, int deriv_order)
    : f_(&f), derivs_(MonomialBasis::get(f.d(), deriv_order)), N_(f.cutoff()) {
  const int d = f.d();
  const ModeSet& ms = f.modes();
  const int P = f.num_powers();
  const int m = f.m();
  const int w = 2 * N_ + 1;
  long box = 1;
  for (int v = 0; v < d; ++v) box *= w;
  std::vector<long> slot(box, -1);
  for (size_t i = 0; i < ms.size(); ++i) {
    long b = 0;
    for (int v = 0; v < d; ++v) b = b * w + (ms.k(i)[v] + N_);
    if (slot[b] < 0) {
      slot[b] = static_cast<long>(kvec_.size() / d);
      kvec_.insert(kvec_.end(), ms.k(i), ms.k(i) + d);
      partial_.resize(partial_.size() + static_cast<size_t>(P) * m, cdouble(0.0));
    }
    const size_t base = static_cast<size_t>(slot[b]) * P * m;
    const cdouble e = ms.l(i) == 0 ? cdouble(1.0) : std::polar(1.0, ms.l(i) * t);
    for (int p = 0; p < P; ++p) {
      for (int c = 0; c < m; ++c) partial_[base + p * m + c] += f.at(p, i, c) * e;
    }
  }
  const size_t nk = kvec_.size() / d;
  kpow_.assign(derivs_->size(), std::vector<double>(nk, 1.0));
  for (int a = 0; a < derivs_->size(); ++a) {
    const int* e = derivs_->exponent(a);
    for (size_t j = 0; j < nk; ++j) {
      double v = 1.0;
      for (int ax = 0; ax < d; ++ax) {
        for (int r = 0; r < e[ax]; ++r) v *= kvec_[j * d + ax];
      }
      kpow_[a][j] = v;
    }
  }
}

void SliceEvaluator::table(const double* x, double* S) const {
  const int d = f_->d();
  const int P = f_->num_powers();
  const int m = f_->m();
  const int na = derivs_->size();
  const size_t nk = kvec_.size() / d;
  const int w = 2 * N_ + 1;
  std::vector<cdouble> ex(static_cast<size_t>(d) * w);
  for (int v = 0; v < d; ++v) {
    for (int j = -N_; j <= N_; ++j) ex[v * w + j + N_] = std::polar(1.0, j * x[v]);
  }
  std::fill(S, S + static_cast<size_t>(na) * P * m, 0.0);
  static const cdouble kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (size_t j = 0; j < nk; ++j) {
    cdouble e = ex[kvec_[j * d] + N_];
    for (int v = 1; v < d; ++v) e *= ex[v * w + kvec_[j * d + v] + N_];
    const cdouble* A = &partial_[j * P * m];
    for (int a = 0; a < na; ++a) {
      const double kp = kpow_[a][j];
      if (kp == 0.0) continue;
      const cdouble z = kIPow[derivs_->total_degree(a) % 4] * kp * e;
      double* out = S + static_cast<size_t>(a) * P * m;
      for (int pc = 0; pc < P * m; ++pc) {
        out[pc] += A[pc].real() * z.real() - A[pc].imag() * z.imag();
      }
    }
  }
}

JetPoint::JetPoint(const FourierField& f, const MonomialBasis* jet_basis,
                   const Jet* x, const Jet* y)
    : jet_basis_(jet_basis), powers_(&f.powers()) {
  const int d = f.d();
  auto ab = MonomialBasis::get(d, jet_basis->degree());
  alpha_basis_ = ab.get();
  n_alpha_ = alpha_basis_->size();
  n_pow_ = powers_->size();
  x0_.resize(d);
  std::vector<Jet> delta(d);
  for (int v = 0; v < d; ++v) {
    x0_[v] = x[v].value();
    delta[v] = x[v].nilpotent();
  }
  std::vector<Jet> D(n_alpha_, Jet(jet_basis, 0.0));
  D[0] = Jet(jet_basis, 1.0);
  for (int a = 1; a < n_alpha_; ++a) {
    for (int v = 0; v < d; ++v) {
      int lo = alpha_basis_->lowered(a, v);
      if (lo < 0) continue;
      D[a] = (1.0 / alpha_basis_->exponent(a)[v]) * (D[lo] * delta[v]);
      break;
    }
  }
  std::vector<Jet> Y(n_pow_, Jet(jet_basis, 0.0));
  Y[0] = Jet(jet_basis, 1.0);
  for (int p = 1; p < n_pow_; ++p) {
    for (int v = 0; v < d; ++v) {
      int lo = powers_->lowered(p, v);
      if (lo < 0) continue;
      Y[p] = Y[lo] * y[v];
      break;
    }
  }
  prod_.reserve(static_cast<size_t>(n_alpha_) * n_pow_);
  for (int a = 0; a < n_alpha_; ++a) {
    for (int p = 0; p < n_pow_; ++p) prod_.push_back(D[a] * Y[p]);
  }
}

Jet JetPoint::combine(const SliceEvaluator& ev, const double* S, int comp,
                      int x_axis, int y_axis) const {
  const int m = ev.field().m();
  Jet out(jet_basis_, 0.0);
  for (int a = 0; a < n_alpha_; ++a) {
    if (a >= ev.derivs().size()) {
      throw DomainError("slice table does not hold enough derivatives");
    }
    const int row = x_axis >= 0 ? ev.derivs().raised(a, x_axis) : a;
    if (row < 0) throw DomainError("slice table does not hold enough derivatives");
    for (int p = 0; p < n_pow_; ++p) {
      double coef = 1.0;
      int pp = p;
      if (y_axis >= 0) {
        coef = powers_->exponent(p)[y_axis];
        if (coef == 0.0) continue;
        pp = powers_->lowered(p, y_axis);
      }
      const double s = S[(static_cast<size_t>(row) * n_pow_ + p) * m + comp];
      if (s == 0.0) continue;
      out.axpy(coef * s, prod_[static_cast<size_t>(a) * n_pow_ + pp]);
    }
  }
  return out;
}

}  // namespace rkam
