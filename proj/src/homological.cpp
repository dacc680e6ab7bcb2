#include "rkam/homological.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rkam/errors.hpp"

namespace rkam {

namespace {

double flow_divisor(const ModeSet& ms, size_t i, const Frequency& freq) {
  long double s = ms.l(i);
  for (int v = 0; v < ms.d(); ++v) s += static_cast<long double>(ms.k(i)[v]) * freq.omega[v];
  return static_cast<double>(s);
}

// e^{2 pi i <k, omega>} - 1 computed without cancellation.
cdouble map_divisor(const ModeSet& ms, size_t i, const Frequency& freq) {
  long double s = 0.0L;
  for (int v = 0; v < ms.d(); ++v) s += static_cast<long double>(ms.k(i)[v]) * freq.omega[v];
  // Reduce the turn count before scaling by 2 pi.
  s -= std::nearbyint(static_cast<double>(s));
  const double half = std::numbers::pi * static_cast<double>(s);
  return cdouble(0.0, 2.0 * std::sin(half)) * std::polar(1.0, half);
}

std::string mode_text(const ModeSet& ms, size_t i) {
  std::ostringstream os;
  os << "k=(";
  for (int v = 0; v < ms.d(); ++v) os << (v ? "," : "") << ms.k(i)[v];
  os << "), l=" << ms.l(i);
  return os.str();
}

[[noreturn]] void small_divisor(const ModeSet& ms, size_t i, double div, double floor) {
  std::ostringstream os;
  os << "small divisor " << div << " below floor " << floor << " at " << mode_text(ms, i);
  throw SmallDivisorError(std::vector<int>(ms.k(i), ms.k(i) + ms.d()), ms.l(i), div, os.str());
}

void check_frequency(const FourierField& f, const Frequency& freq) {
  if (freq.d() != f.d()) throw ShapeError("frequency dimension does not match the field");
}

double scale_of(const FourierField& f) { return std::max(f.max_abs_coeff(), 1e-300); }

// Grid sup of a residual field relative to the sup of the reference.
double relative_sup(const FourierField& residual, const FourierField& reference) {
  const double ref = sup_norm(reference, 0.0, reference.r()).value;
  const double res = sup_norm(residual, 0.0, residual.r()).value;
  if (ref == 0.0) return res;
  return res / ref;
}

FourierField flow_operator(const FourierField& w, const Frequency& freq) {
  FourierField out = w;
  const ModeSet& ms = w.modes();
  for (size_t i = 0; i < ms.size(); ++i) {
    const cdouble f(0.0, flow_divisor(ms, i, freq));
    for (int p = 0; p < w.num_powers(); ++p) {
      for (int c = 0; c < w.m(); ++c) out.at(p, i, c) *= f;
    }
  }
  out.set_parity(flipped(w.parity()));
  return out;
}

}  // namespace

FourierField solve_v(const FourierField& g, const Frequency& freq) {
  check_frequency(g, freq);
  const ModeSet& ms = g.modes();
  const size_t z = ms.zero();
  const double scale = scale_of(g);
  for (int p = 0; p < g.num_powers(); ++p) {
    for (int c = 0; c < g.m(); ++c) {
      if (std::abs(g.at(p, z, c)) > 1e-12 * scale) {
        throw StructureError("g has a nonzero mean; the input is not reversible");
      }
    }
  }
  const double floor = divisor_floor(freq);
  FourierField v(g.d(), g.m(), g.cutoff(), g.q_y(), g.r(), flipped(g.parity()), g.autonomous());
  for (size_t i = 0; i < ms.size(); ++i) {
    if (i == z) continue;
    const double div = flow_divisor(ms, i, freq);
    if (std::abs(div) < floor) small_divisor(ms, i, div, floor);
    const cdouble w(0.0, 1.0 / div);
    for (int p = 0; p < g.num_powers(); ++p) {
      for (int c = 0; c < g.m(); ++c) v.at(p, i, c) = w * g.at(p, i, c);
    }
  }
  return v;
}

FourierField solve_u(const FourierField& f, FourierField& v, const Frequency& freq) {
  check_frequency(f, freq);
  if (f.d() != v.d() || f.m() != v.m()) throw ShapeError("f and v have different shapes");
  const int N = std::max(f.cutoff(), v.cutoff());
  const int q = std::max(f.q_y(), v.q_y());
  FourierField fe = f.with_cutoff(N).with_degree(q);
  Parity vp = v.parity();
  v = v.with_cutoff(N).with_degree(q);
  v.set_parity(vp);
  const ModeSet& ms = fe.modes();
  const size_t z = ms.zero();
  for (int p = 0; p < fe.num_powers(); ++p) {
    for (int c = 0; c < fe.m(); ++c) v.at(p, z, c) = fe.at(p, z, c);
  }
  if (fe.parity() != v.parity()) v.set_parity(Parity::kNone);
  const double floor = divisor_floor(freq);
  FourierField u(fe.d(), fe.m(), N, q, fe.r(), flipped(v.parity()), fe.autonomous());
  for (size_t i = 0; i < ms.size(); ++i) {
    if (i == z) continue;
    const double div = flow_divisor(ms, i, freq);
    if (std::abs(div) < floor) small_divisor(ms, i, div, floor);
    const cdouble w(0.0, 1.0 / div);
    for (int p = 0; p < fe.num_powers(); ++p) {
      for (int c = 0; c < fe.m(); ++c) u.at(p, i, c) = w * (fe.at(p, i, c) - v.at(p, i, c));
    }
  }
  return u;
}

double flow_coefficient_residual(const FourierField& sol, const FourierField& rhs,
                                 const Frequency& freq) {
  const int N = std::max(sol.cutoff(), rhs.cutoff());
  const int q = std::max(sol.q_y(), rhs.q_y());
  FourierField a = sol.with_cutoff(N).with_degree(q);
  FourierField b = rhs.with_cutoff(N).with_degree(q);
  const ModeSet& ms = a.modes();
  const double scale = scale_of(b);
  double worst = 0.0;
  for (size_t i = 0; i < ms.size(); ++i) {
    if (i == ms.zero()) continue;
    const cdouble L(0.0, flow_divisor(ms, i, freq));
    for (int p = 0; p < a.num_powers(); ++p) {
      for (int c = 0; c < a.m(); ++c) {
        const double err = std::abs(L * a.at(p, i, c) - b.at(p, i, c));
        const double den = std::abs(b.at(p, i, c)) > 0.0 ? std::abs(b.at(p, i, c)) : scale;
        worst = std::max(worst, err / den);
      }
    }
  }
  return worst;
}

HomologicalSolution solve_flow(const FourierField& f, const FourierField& g,
                               const Frequency& freq) {
  HomologicalSolution sol;
  sol.v = solve_v(g, freq);
  sol.u = solve_u(f, sol.v, freq);
  const ModeSet& ms = sol.u.modes();
  sol.min_divisor = INFINITY;
  for (size_t i = 0; i < ms.size(); ++i) {
    if (i != ms.zero()) sol.min_divisor = std::min(sol.min_divisor, std::abs(flow_divisor(ms, i, freq)));
  }
  // omega . d_x v + d_t v + g and omega . d_x u + d_t u - v + f, as fields.
  FourierField rv = add(flow_operator(sol.v, freq), g);
  FourierField ru = add(subtract(flow_operator(sol.u, freq), sol.v), f);
  sol.residual_v = relative_sup(rv, g);
  sol.residual_u = relative_sup(ru, add(f, sol.v));
  return sol;
}

HomologicalSolution solve_map(const FourierField& f, const FourierField& g,
                              const Frequency& freq) {
  check_frequency(f, freq);
  check_frequency(g, freq);
  if (!f.autonomous() || !g.autonomous()) throw ShapeError("map fields must be autonomous");
  if (f.m() != g.m()) throw ShapeError("f and g have different shapes");
  const int N = std::max(f.cutoff(), g.cutoff());
  const int q = std::max(f.q_y(), g.q_y());
  FourierField fe = f.with_cutoff(N).with_degree(q);
  FourierField ge = g.with_cutoff(N).with_degree(q);
  const ModeSet& ms = fe.modes();
  const size_t z = ms.zero();
  // |e^{2 pi i x} - 1| >= 4 dist(x, Z); half of the certified bound.
  const double floor = 4.0 * divisor_floor(freq);

  HomologicalSolution sol;
  sol.v = FourierField(fe.d(), fe.m(), N, q, fe.r(), Parity::kNone, true);
  sol.u = FourierField(fe.d(), fe.m(), N, q, fe.r(), Parity::kNone, true);
  sol.min_divisor = INFINITY;
  for (int p = 0; p < fe.num_powers(); ++p) {
    for (int c = 0; c < fe.m(); ++c) {
      sol.unsolved_mean = std::max(sol.unsolved_mean, std::abs(ge.at(p, z, c)));
      sol.v.at(p, z, c) = fe.at(p, z, c);
    }
  }
  for (size_t i = 0; i < ms.size(); ++i) {
    if (i == z) continue;
    const cdouble div = map_divisor(ms, i, freq);
    const double mag = std::abs(div);
    sol.min_divisor = std::min(sol.min_divisor, mag);
    if (mag < floor) small_divisor(ms, i, mag, floor);
    for (int p = 0; p < fe.num_powers(); ++p) {
      for (int c = 0; c < fe.m(); ++c) {
        const cdouble v = -ge.at(p, i, c) / div;
        sol.v.at(p, i, c) = v;
        sol.u.at(p, i, c) = (v - fe.at(p, i, c)) / div;
      }
    }
  }
  sol.v.enforce_reality();
  sol.u.enforce_reality();

  // Residuals of the difference equations with the unsolvable mean removed.
  FourierField rv = ge, ru = fe;
  for (size_t i = 0; i < ms.size(); ++i) {
    const cdouble div = i == z ? cdouble(0.0) : map_divisor(ms, i, freq);
    for (int p = 0; p < fe.num_powers(); ++p) {
      for (int c = 0; c < fe.m(); ++c) {
        rv.at(p, i, c) = i == z ? cdouble(0.0) : div * sol.v.at(p, i, c) + ge.at(p, i, c);
        ru.at(p, i, c) = div * sol.u.at(p, i, c) - sol.v.at(p, i, c) + fe.at(p, i, c);
      }
    }
  }
  sol.residual_v = relative_sup(rv, ge);
  sol.residual_u = relative_sup(ru, add(fe, sol.v));
  for (int p = 0; p < fe.num_powers(); ++p) {
    for (int c = 0; c < fe.m(); ++c) rv.at(p, z, c) = ge.at(p, z, c);
  }
  rv.enforce_reality();
  ru.enforce_reality();
  rv.set_parity(Parity::kNone);
  ru.set_parity(Parity::kNone);
  sol.rest_u = std::move(ru);
  sol.rest_v = std::move(rv);
  return sol;
}

}  // namespace rkam
