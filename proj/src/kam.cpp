#include "rkam/kam.hpp"

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

void store(const std::vector<Jet>& jets, size_t idx, int P, int m, std::vector<double>& out) {
  double* dst = &out[idx * P * m];
  for (int p = 0; p < P; ++p) {
    for (int c = 0; c < m; ++c) dst[p * m + c] = jets[c][p];
  }
}

}  // namespace

std::pair<FourierField, FourierField> push_pieces(const TransformChain& chain,
                                                  const FourierField& df, const FourierField& dg,
                                                  const FourierField& f_acc,
                                                  const FourierField& g_acc,
                                                  const std::vector<double>& omega, int N,
                                                  double r, int q) {
  const int d = chain.d();
  const bool map_case = chain.map_case();
  const int n = 4 * std::max(N, std::max(df.cutoff(), dg.cutoff())) + 4;
  const UniformGrid grid(d, n, map_case);
  auto basis = MonomialBasis::get(d, q);
  const int P = basis->size();
  std::vector<double> sf(grid.points() * P * d), sg(sf.size());
  parallel_for(grid.points(), [&](size_t begin, size_t end) {
    double cur_t = NAN;
    std::unique_ptr<ChainSlice> cs;
    std::unique_ptr<JetSampler> fs, gs, fa, ga;
    PointJets pf, pg, pa, pb, du, dv;
    std::vector<double> xv(d);
    std::vector<Jet> xi(d), eta(d), x(d), y(d), trail;
    std::vector<Jet> wx(d), wy(d), nx(d), ny(d), ax(d), ay(d), bx(d), by(d);
    for (size_t idx = begin; idx < end; ++idx) {
      double t = 0.0;
      grid.point(idx, xv.data(), &t);
      if (t != cur_t) {
        cur_t = t;
        cs = std::make_unique<ChainSlice>(chain, t, basis.get(), !map_case);
        fs = std::make_unique<JetSampler>(df, t, basis.get(), false);
        gs = std::make_unique<JetSampler>(dg, t, basis.get(), false);
        if (map_case) {
          fa = std::make_unique<JetSampler>(f_acc, t, basis.get(), false);
          ga = std::make_unique<JetSampler>(g_acc, t, basis.get(), false);
        }
      }
      for (int a = 0; a < d; ++a) {
        xi[a] = Jet(basis.get(), xv[a]);
        eta[a] = Jet::variable(basis.get(), a, 0.0);
      }
      cs->pull_back(xi.data(), eta.data(), x.data(), y.data(), map_case ? nullptr : &trail);
      fs->eval(x.data(), y.data(), pf);
      gs->eval(x.data(), y.data(), pg);
      if (!map_case) {
        for (int a = 0; a < d; ++a) {
          wx[a] = pf.value[a];
          wy[a] = pg.value[a];
        }
        for (size_t j = 0; j < cs->size(); ++j) {
          const Jet* z = &trail[j * 2 * d];
          cs->slice(j).jacobian_terms(z, z + d, du, dv);
          for (int i = 0; i < d; ++i) {
            nx[i] = wx[i];
            ny[i] = wy[i];
            for (int k = 0; k < d; ++k) {
              nx[i].add_product(1.0, du.dx[i * d + k], wx[k]);
              nx[i].add_product(1.0, du.dy[i * d + k], wy[k]);
              ny[i].add_product(1.0, dv.dx[i * d + k], wx[k]);
              ny[i].add_product(1.0, dv.dy[i * d + k], wy[k]);
            }
          }
          wx.swap(nx);
          wy.swap(ny);
        }
      } else {
        fa->eval(x.data(), y.data(), pa);
        ga->eval(x.data(), y.data(), pb);
        for (int a = 0; a < d; ++a) {
          ax[a] = x[a] + y[a] + pa.value[a];
          ax[a] += kTwoPi * omega[a];
          ay[a] = y[a] + pb.value[a];
          bx[a] = ax[a] + pf.value[a];
          by[a] = ay[a] + pg.value[a];
        }
        cs->push_forward(ax.data(), ay.data(), nx.data(), ny.data());
        cs->push_forward(bx.data(), by.data(), wx.data(), wy.data());
        for (int a = 0; a < d; ++a) {
          wx[a] -= nx[a];
          wy[a] -= ny[a];
        }
      }
      store(wx, idx, P, d, sf);
      store(wy, idx, P, d, sg);
    }
  });
  return {analyze(sf, d, d, n, N, q, r, map_case), analyze(sg, d, d, n, N, q, r, map_case)};
}

namespace {

// Brings a field to the step's shape.
FourierField shaped(const FourierField& f, int N, int q, double r, Parity p) {
  FourierField out = f.with_cutoff(N).with_degree(q);
  out.set_r(r);
  out.set_parity(p);
  return out;
}

void check_reversible(const FourierField& f, Parity p, const char* name) {
  if (f.parity() == p) return;
  const double scale = f.max_abs_coeff();
  if (scale > 0.0 && f.parity_defect(p) > 1e-12 * scale) {
    throw StructureError(std::string(name) + " is not " + to_string(p) +
                         " under (x, t) -> (-x, -t)");
  }
}

KamResult run_kam(const FourierField& f_in, const FourierField& g_in, const Frequency& freq,
                  const Schedule& sc, const KamOptions& opt, bool map_case) {
  const int d = f_in.d();
  if (g_in.d() != d || f_in.m() != d || g_in.m() != d) {
    throw ShapeError("perturbations must be d-dimensional with d components");
  }
  if (freq.d() != d || sc.d != d) throw ShapeError("frequency or schedule dimension mismatch");
  if (f_in.autonomous() != map_case || g_in.autonomous() != map_case) {
    throw ShapeError(map_case ? "map perturbations must be autonomous"
                              : "flow perturbations must depend on time");
  }
  const Parity pf = map_case ? Parity::kNone : Parity::kEven;
  const Parity pg = map_case ? Parity::kNone : Parity::kOdd;
  FourierField f0 = f_in, g0 = g_in;
  if (!map_case) {
    check_reversible(f_in, pf, "f");
    check_reversible(g_in, pg, "g");
    f0.project_parity(pf);
    g0.project_parity(pg);
  }
  const int q = opt.q_y;
  Decomposition dec_f = decompose(f0, sc, opt.kernel);
  Decomposition dec_g = decompose(g0, sc, opt.kernel);

  KamResult res;
  res.chain = TransformChain(d, map_case);
  ConvergenceReport& rep = res.report;

  // Extra smoothness of g: its pieces should decay like eps_nu s_nu^d.
  double c0 = 0.0;
  for (int nu = 0; nu <= sc.M; ++nu) {
    const double target = sc.eps[nu] * std::pow(sc.s[nu], d);
    const double ratio = dec_g.majorants[nu] / target;
    if (nu == 0) {
      c0 = ratio;
    } else if (ratio > 10.0 * c0 && dec_g.majorants[nu] > 0.0) {
      rep.warnings.push_back("g piece " + std::to_string(nu) +
                             " decays slower than eps s^d (ratio " + std::to_string(ratio) + ")");
    }
  }

  FourierField F, G, f_acc, g_acc;
  for (int m = 0; m <= sc.M; ++m) {
    const int N = sc.cutoff(m, opt.kernel.a);
    FourierField df = dec_f.pieces[m], dg = dec_g.pieces[m];
    StepRecord rec;
    rec.m = m;
    rec.cutoff = N;
    rec.eps = sc.eps[m];
    rec.s = sc.s[m];
    rec.r = sc.r[m];
    rec.fresh_f = dec_f.majorants[m];
    rec.fresh_g = dec_g.majorants[m];
    try {
      if (res.chain.empty()) {
        F = shaped(F.empty() ? df : add(F, df), N, std::max(q, df.q_y()), sc.r[m], pf);
        G = shaped(G.empty() ? dg : add(G, dg), N, std::max(q, dg.q_y()), sc.r[m], pg);
      } else {
        if (!df.is_zero() || !dg.is_zero()) {
          auto [pf_m, pg_m] = push_pieces(res.chain, df, dg, f_acc, g_acc, freq.omega, N,
                                          sc.r[m], q);
          F = add(F, pf_m);
          G = add(G, pg_m);
        }
        F = shaped(F, N, q, sc.r[m], pf);
        G = shaped(G, N, q, sc.r[m], pg);
      }
    } catch (const Error& e) {
      rep.failed = true;
      rep.failure = std::string("step ") + std::to_string(m) + ": " + e.what();
      break;
    }
    f_acc = f_acc.empty() ? df : add(f_acc, df);
    g_acc = g_acc.empty() ? dg : add(g_acc, dg);
    rec.sup_f = majorant(F, sc.s[m], sc.r[m]);
    rec.sup_g = majorant(G, sc.s[m], sc.r[m]);
    rec.grid_sup_f = sup_norm(F, 0.0, sc.r[m]).value;
    rec.grid_sup_g = sup_norm(G, 0.0, sc.r[m]).value;
    rep.steps.push_back(rec);
    if (std::max(rec.sup_f, rec.sup_g) < opt.tol) {
      rep.converged = true;
      break;
    }
    if (m == sc.M) break;
    StepResult step;
    try {
      step = newton_step(F, G, freq, {sc.cutoff(m + 1, opt.kernel.a), sc.r[m + 1], q}, map_case, m);
    } catch (const Error& e) {
      rep.failed = true;
      rep.failure = std::string("step ") + std::to_string(m) + ": " + e.what();
      break;
    }
    StepRecord& cur = rep.steps.back();
    cur.min_divisor = step.diag.min_divisor;
    cur.inversion_iters = step.diag.inversion_iters;
    cur.composition_residual = step.diag.composition_residual;
    cur.unsolved_mean = step.diag.unsolved_mean;
    cur.parity_defect = std::max(step.diag.parity_defect_f, step.diag.parity_defect_g);
    cur.max_preimage_y = step.diag.max_preimage_y;
    if (cur.max_preimage_y > sc.r[m]) {
      rep.warnings.push_back("step " + std::to_string(m) + ": torus preimage leaves |y| <= r");
    }
    res.chain.push(std::move(step.transform));
    if (opt.step_check) cur.invariance_residual = opt.step_check(res.chain);
    F = std::move(step.f_next);
    G = std::move(step.g_next);
  }
  rep.newton_steps = static_cast<int>(res.chain.size());
  res.f_final = F;
  res.g_final = G;

  std::vector<double> sizes;
  for (size_t i = 0; i < rep.steps.size(); ++i) {
    const auto& s = rep.steps[i];
    sizes.push_back(std::max(s.sup_f, s.sup_g));
    rep.implied_constants.push_back(s.sup_f / s.eps);
    if (i > 0) {
      const auto& p = rep.steps[i - 1];
      if (!(s.sup_f < p.sup_f) || !(s.sup_g < p.sup_g)) rep.monotone = false;
    }
  }
  rep.order = contraction_order(sizes);

  const int cutoff = opt.embedding_cutoff > 0 ? opt.embedding_cutoff : 2 * sc.cutoff(0, opt.kernel.a);
  res.embedding = embed(res.chain, freq.omega, cutoff);
  return res;
}

}  // namespace

void TorusEmbedding::evaluate(const double* theta, double t, double* x, double* y) const {
  std::vector<double> th(theta, theta + d), zero(d, 0.0);
  auto v = displacement.evaluate(th, zero, map_case ? 0.0 : t);
  for (int a = 0; a < d; ++a) {
    x[a] = theta[a] + v[a];
    y[a] = v[d + a];
  }
}

double TorusEmbedding::max_action() const {
  auto s = synthesize(displacement, std::max(grid, 1));
  double worst = 0.0;
  const size_t stride = 2 * static_cast<size_t>(d);
  for (size_t i = 0; i < s.size(); i += stride) {
    double n2 = 0.0;
    for (int a = 0; a < d; ++a) n2 += s[i + d + a] * s[i + d + a];
    worst = std::max(worst, std::sqrt(n2));
  }
  return worst;
}

TorusEmbedding embed(const TransformChain& chain, const std::vector<double>& omega, int cutoff) {
  const int d = chain.d();
  const bool map_case = chain.map_case();
  TorusEmbedding emb;
  emb.d = d;
  emb.map_case = map_case;
  emb.omega = omega;
  emb.grid = 2 * cutoff + 2;
  const UniformGrid grid(d, emb.grid, map_case);
  auto basis = MonomialBasis::get(d, 0);
  std::vector<double> samples(grid.points() * 2 * d);
  parallel_for(grid.points(), [&](size_t begin, size_t end) {
    double cur_t = NAN;
    std::unique_ptr<ChainSlice> cs;
    std::vector<double> xv(d);
    std::vector<Jet> xi(d), eta(d), x(d), y(d);
    for (size_t idx = begin; idx < end; ++idx) {
      double t = 0.0;
      grid.point(idx, xv.data(), &t);
      if (t != cur_t) {
        cur_t = t;
        cs = std::make_unique<ChainSlice>(chain, t, basis.get(), false);
      }
      for (int a = 0; a < d; ++a) {
        xi[a] = Jet(basis.get(), xv[a]);
        eta[a] = Jet(basis.get(), 0.0);
      }
      cs->pull_back(xi.data(), eta.data(), x.data(), y.data());
      for (int a = 0; a < d; ++a) {
        samples[idx * 2 * d + a] = x[a].value() - xv[a];
        samples[idx * 2 * d + d + a] = y[a].value();
      }
    }
  });
  emb.displacement = analyze(samples, d, 2 * d, emb.grid, cutoff, 0, 0.0, map_case);
  return emb;
}

double contraction_order(const std::vector<double>& sizes) {
  std::vector<double> a, b;
  for (size_t i = 0; i + 1 < sizes.size(); ++i) {
    if (sizes[i] > 0.0 && sizes[i + 1] > 0.0) {
      a.push_back(std::log(sizes[i]));
      b.push_back(std::log(sizes[i + 1]));
    }
  }
  if (a.size() < 2) return 0.0;
  return fit_line(a, b).slope;
}

KamResult run_kam_flow(const FourierField& f, const FourierField& g, const Frequency& freq,
                       const Schedule& schedule, const KamOptions& options) {
  return run_kam(f, g, freq, schedule, options, false);
}

KamResult run_kam_map(const FourierField& f, const FourierField& g, const Frequency& freq,
                      const Schedule& schedule, const KamOptions& options) {
  return run_kam(f, g, freq, schedule, options, true);
}

}  // namespace rkam
