#include "rkam/newton.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "rkam/errors.hpp"
#include "rkam/grid.hpp"
#include "rkam/numerics.hpp"

namespace rkam {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_inputs(const FourierField& f, const FourierField& g, const Frequency& freq,
                  bool map_case) {
  if (f.d() != g.d() || f.m() != g.m()) throw ShapeError("f and g have different shapes");
  if (f.m() != f.d()) throw ShapeError("perturbations must have d components");
  if (freq.d() != f.d()) throw ShapeError("frequency dimension does not match the field");
  if (f.autonomous() != map_case || g.autonomous() != map_case) {
    throw ShapeError(map_case ? "map perturbations must be autonomous"
                              : "flow perturbations must depend on time");
  }
}

double relative_defect(const FourierField& f, Parity p) {
  const double scale = f.max_abs_coeff();
  return scale > 0.0 ? f.parity_defect(p) / scale : 0.0;
}

void store(const std::vector<Jet>& jets, size_t idx, int P, int m, std::vector<double>& out) {
  double* dst = &out[idx * P * m];
  for (int p = 0; p < P; ++p) {
    for (int c = 0; c < m; ++c) dst[p * m + c] = jets[c][p];
  }
}

// sup |u + U(x + u, y + v)| and the analogue for v over a test grid in the
// next domain.
std::pair<double, double> composition_residual(const NearIdentityTransform& tr, double r_next) {
  const int d = tr.u.d();
  const bool autonomous = tr.u.autonomous();
  const int n = 2 * tr.u.cutoff() + 2;
  const UniformGrid grid(d, n, autonomous);
  auto basis = MonomialBasis::get(d, 0);
  int ny = 1;
  for (int a = 0; a < d; ++a) ny *= 3;
  double worst_u = 0.0, worst_v = 0.0;
  std::mutex mu;
  parallel_for(grid.points(), [&](size_t begin, size_t end) {
    double cur_t = NAN;
    std::unique_ptr<JetSampler> su, sv, sU, sV;
    PointJets pu, pv, pU, pV;
    std::vector<double> x(d);
    std::vector<Jet> xj(d), yj(d), xi(d), eta(d);
    double wu = 0.0, wv = 0.0;
    for (size_t idx = begin; idx < end; ++idx) {
      double t = 0.0;
      grid.point(idx, x.data(), &t);
      if (t != cur_t) {
        cur_t = t;
        su = std::make_unique<JetSampler>(tr.u, t, basis.get(), false);
        sv = std::make_unique<JetSampler>(tr.v, t, basis.get(), false);
        sU = std::make_unique<JetSampler>(tr.U, t, basis.get(), false);
        sV = std::make_unique<JetSampler>(tr.V, t, basis.get(), false);
      }
      for (int s = 0; s < ny; ++s) {
        int rem = s;
        for (int a = 0; a < d; ++a) {
          xj[a] = Jet(basis.get(), x[a]);
          yj[a] = Jet(basis.get(), r_next * (rem % 3 - 1));
          rem /= 3;
        }
        su->eval(xj.data(), yj.data(), pu);
        sv->eval(xj.data(), yj.data(), pv);
        for (int a = 0; a < d; ++a) {
          xi[a] = xj[a] + pu.value[a];
          eta[a] = yj[a] + pv.value[a];
        }
        sU->eval(xi.data(), eta.data(), pU);
        sV->eval(xi.data(), eta.data(), pV);
        for (int a = 0; a < d; ++a) {
          wu = std::max(wu, std::abs(pu.value[a].value() + pU.value[a].value()));
          wv = std::max(wv, std::abs(pv.value[a].value() + pV.value[a].value()));
        }
      }
    }
    std::lock_guard<std::mutex> lock(mu);
    worst_u = std::max(worst_u, wu);
    worst_v = std::max(worst_v, wv);
  });
  return {worst_u, worst_v};
}

}  // namespace

StepResult newton_step(const FourierField& f_in, const FourierField& g_in, const Frequency& freq,
                       const StepTarget& target, bool map_case, int step) {
  check_inputs(f_in, g_in, freq, map_case);
  if (target.cutoff < 0 || !(target.r >= 0.0) || target.q_y < 0) {
    throw ParameterError("invalid step target");
  }
  const int d = f_in.d();
  const int q = target.q_y;
  // Work at a common shape so the homological fields line up.
  const int N = std::max(f_in.cutoff(), g_in.cutoff());
  const int qin = std::max({f_in.q_y(), g_in.q_y(), q});
  FourierField f = f_in.with_cutoff(N).with_degree(qin);
  FourierField g = g_in.with_cutoff(N).with_degree(qin);
  f.set_parity(f_in.parity());
  g.set_parity(g_in.parity());

  StepResult res;
  HomologicalSolution sol = map_case ? solve_map(f, g, freq) : solve_flow(f, g, freq);
  res.diag.step = step;
  res.diag.min_divisor = sol.min_divisor;
  res.diag.residual_u = sol.residual_u;
  res.diag.residual_v = sol.residual_v;
  res.diag.unsolved_mean = sol.unsolved_mean;

  NearIdentityTransform& tr = res.transform;
  tr.u = sol.u;
  tr.v = sol.v;
  tr.step = step;
  tr.map_case = map_case;

  const int N_next = target.cutoff;
  const int N_inv = 2 * N;
  const int n = 4 * std::max(N, N_next) + 4;
  const UniformGrid grid(d, n, map_case);
  auto basis = MonomialBasis::get(d, q);
  const int P = basis->size();
  std::vector<double> sf(grid.points() * P * d), sg(sf.size()), sU(sf.size()), sV(sf.size());
  std::vector<double> shift(d);
  for (int a = 0; a < d; ++a) shift[a] = kTwoPi * freq.omega[a];

  int max_iters = 0;
  double max_y = 0.0;
  std::mutex mu;
  parallel_for(grid.points(), [&](size_t begin, size_t end) {
    double cur_t = NAN;
    std::unique_ptr<StepSlice> slice;
    std::unique_ptr<JetSampler> fs, gs, us, vs, rus, rvs;
    PointJets pf, pg, du, dv, a1, a2, b1, b2, ru, rv;
    std::vector<double> xv(d);
    std::vector<Jet> xi(d), eta(d), x(d), y(d), x1(d), y1(d), xs(d);
    std::vector<Jet> fn(d, Jet(basis.get())), gn(d, Jet(basis.get())), Uj(d), Vj(d);
    int iters = 0;
    double ymax = 0.0;
    for (size_t idx = begin; idx < end; ++idx) {
      double t = 0.0;
      grid.point(idx, xv.data(), &t);
      if (t != cur_t) {
        cur_t = t;
        slice = std::make_unique<StepSlice>(tr, t, basis.get(), !map_case);
        fs = std::make_unique<JetSampler>(f, t, basis.get(), false);
        gs = std::make_unique<JetSampler>(g, t, basis.get(), false);
        if (map_case) {
          us = std::make_unique<JetSampler>(tr.u, t, basis.get(), false);
          vs = std::make_unique<JetSampler>(tr.v, t, basis.get(), false);
          rus = std::make_unique<JetSampler>(sol.rest_u, t, basis.get(), false);
          rvs = std::make_unique<JetSampler>(sol.rest_v, t, basis.get(), false);
        }
      }
      for (int a = 0; a < d; ++a) {
        xi[a] = Jet(basis.get(), xv[a]);
        eta[a] = Jet::variable(basis.get(), a, 0.0);
      }
      iters = std::max(iters, slice->invert(xi.data(), eta.data(), x.data(), y.data()));
      for (int a = 0; a < d; ++a) {
        ymax = std::max(ymax, std::abs(y[a].value()));
        Uj[a] = x[a] - xi[a];
        Vj[a] = y[a] - eta[a];
      }
      fs->eval(x.data(), y.data(), pf);
      gs->eval(x.data(), y.data(), pg);
      if (!map_case) {
        // u_x (y + f) + u_y g and v_x (y + f) + v_y g at the preimage.
        slice->jacobian_terms(x.data(), y.data(), du, dv);
        for (int i = 0; i < d; ++i) {
          fn[i] = Jet(basis.get());
          gn[i] = Jet(basis.get());
          for (int j = 0; j < d; ++j) {
            const Jet drift = y[j] + pf.value[j];
            fn[i].add_product(1.0, du.dx[i * d + j], drift);
            fn[i].add_product(1.0, du.dy[i * d + j], pg.value[j]);
            gn[i].add_product(1.0, dv.dx[i * d + j], drift);
            gn[i].add_product(1.0, dv.dy[i * d + j], pg.value[j]);
          }
        }
      } else {
        // [u(x1, y1) - u(x + 2 pi omega, y)] plus the equations' leftover.
        for (int a = 0; a < d; ++a) {
          x1[a] = x[a] + y[a] + pf.value[a];
          x1[a] += shift[a];
          y1[a] = y[a] + pg.value[a];
          xs[a] = x[a];
          xs[a] += shift[a];
        }
        us->eval(x1.data(), y1.data(), a1);
        us->eval(xs.data(), y.data(), a2);
        vs->eval(x1.data(), y1.data(), b1);
        vs->eval(xs.data(), y.data(), b2);
        rus->eval(x.data(), y.data(), ru);
        rvs->eval(x.data(), y.data(), rv);
        for (int i = 0; i < d; ++i) {
          fn[i] = (a1.value[i] - a2.value[i]) + ru.value[i];
          gn[i] = (b1.value[i] - b2.value[i]) + rv.value[i];
        }
      }
      store(fn, idx, P, d, sf);
      store(gn, idx, P, d, sg);
      store(Uj, idx, P, d, sU);
      store(Vj, idx, P, d, sV);
    }
    std::lock_guard<std::mutex> lock(mu);
    max_iters = std::max(max_iters, iters);
    max_y = std::max(max_y, ymax);
  });
  res.diag.inversion_iters = max_iters;
  res.diag.max_preimage_y = max_y;
  tr.inversion_iters = max_iters;

  res.f_next = analyze(sf, d, d, n, N_next, q, target.r, map_case);
  res.g_next = analyze(sg, d, d, n, N_next, q, target.r, map_case);
  tr.U = analyze(sU, d, d, n, N_inv, q, target.r, map_case);
  tr.V = analyze(sV, d, d, n, N_inv, q, target.r, map_case);

  const bool tagged = !map_case && f.parity() == Parity::kEven && g.parity() == Parity::kOdd;
  if (tagged) {
    res.diag.parity_defect_f = relative_defect(res.f_next, Parity::kEven);
    res.diag.parity_defect_g = relative_defect(res.g_next, Parity::kOdd);
    if (res.diag.parity_defect_f > kParityTolerance ||
        res.diag.parity_defect_g > kParityTolerance) {
      throw StructureError("new perturbation lost its reversible parity (defects " +
                           std::to_string(res.diag.parity_defect_f) + ", " +
                           std::to_string(res.diag.parity_defect_g) + ")");
    }
    res.f_next.project_parity(Parity::kEven);
    res.g_next.project_parity(Parity::kOdd);
    tr.U.project_parity(Parity::kOdd);
    tr.V.project_parity(Parity::kEven);
  }

  auto [cu, cv] = composition_residual(tr, target.r);
  tr.composition_residual_u = cu;
  tr.composition_residual_v = cv;
  res.diag.composition_residual = std::max(cu, cv);
  return res;
}

}  // namespace rkam
