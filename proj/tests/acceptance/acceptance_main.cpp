// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "oracles.hpp"
#include "rkam/diophantine.hpp"
#include "rkam/grid.hpp"
#include "rkam/homological.hpp"
#include "rkam/kam.hpp"
#include "rkam/lienard.hpp"
#include "rkam/newton.hpp"
#include "rkam/numerics.hpp"
#include "rkam/persistence.hpp"
#include "rkam/schedule.hpp"
#include "rkam/smoothing.hpp"
#include "rkam/systems.hpp"
#include "rkam/verify.hpp"
#include "support.hpp"

using namespace rkam;
namespace fs = std::filesystem;

namespace {

const double kGolden = 0.5 * (std::sqrt(5.0) - 1.0);
const double kTwoPi = 2.0 * std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

Frequency golden() { return certify({kGolden}, 1.01, 1000); }

Eigen::VectorXd grid_values(const FourierField& f, int n, int power) {
  auto s = synthesize(f, n);
  const int stride = f.num_powers() * f.m();
  Eigen::VectorXd out(s.size() / stride);
  for (int i = 0; i < out.size(); ++i) out(i) = s[i * stride + power * f.m()];
  return out;
}

double rel_err(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), 1e-300);
}

// Grid parity residual relative to the field's grid sup; 0 for a zero field.
double rel_parity(const FourierField& f, Parity p) {
  const double s = sup_norm(f, 0.0, f.r()).value;
  return s > 0.0 ? grid_parity_residual(f, p) / s : 0.0;
}

Outcome homological_exactness() {
  auto freq = golden();
  std::mt19937_64 rng(101);
  const int N = 8, n = 2 * N + 1;
  Eigen::MatrixXd L = testing::flow_matrix(n, kGolden);
  double grid = 0.0, coeff = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    auto g = testing::random_field(1, 1, N, 2, 0.1, Parity::kOdd, rng);
    auto f = testing::random_field(1, 1, N, 2, 0.1, Parity::kEven, rng);
    auto v = solve_v(g, freq);
    auto u = solve_u(f, v, freq);
    coeff = std::max(coeff, flow_coefficient_residual(v, scale(g, -1.0), freq));
    coeff = std::max(coeff, flow_coefficient_residual(u, subtract(v, f), freq));
    for (int p = 0; p < f.num_powers(); ++p) {
      Eigen::VectorXd gv = grid_values(g, n, p), fv = grid_values(f, n, p);
      Eigen::VectorXd v_ref = testing::solve_with_mean(L, -gv, fv.mean());
      Eigen::VectorXd u_ref = testing::solve_with_mean(L, v_ref - fv, 0.0);
      grid = std::max(grid, rel_err(grid_values(v, n, p), v_ref));
      grid = std::max(grid, rel_err(grid_values(u, n, p), u_ref));
    }
  }
  return {grid <= 1e-10 && coeff <= 1e-13,
          "collocation rel " + fmt(grid) + ", coefficient residual " + fmt(coeff)};
}

Outcome parity_suite() {
  auto freq = golden();
  auto sc = make_schedule(1, 0.1, 1e-4, 3);
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> width(0.02, 0.3);
  double worst = 0.0;
  int cases = 0;
  for (; cases < 100; ++cases) {
    const double eps = 1e-5;
    auto f = scale(testing::random_field(1, 1, 6, 2, 0.01, Parity::kEven, rng), eps);
    auto g = scale(testing::random_field(1, 1, 6, 2, 0.01, Parity::kOdd, rng), eps);
    g.at(0, g.modes().zero(), 0) = 0.0;
    const double s = width(rng);
    worst = std::max(worst, rel_parity(smooth(f, s), Parity::kEven));
    worst = std::max(worst, rel_parity(smooth(g, s), Parity::kOdd));
    for (const auto& piece : decompose(g, sc).pieces) {
      worst = std::max(worst, rel_parity(piece, Parity::kOdd));
    }
    auto sol = solve_flow(f, g, freq);
    worst = std::max(worst, rel_parity(sol.u, Parity::kOdd));
    worst = std::max(worst, rel_parity(sol.v, Parity::kEven));
    auto step = newton_step(f, g, freq, {8, 0.005, 2}, false);
    worst = std::max({worst, step.diag.parity_defect_f, step.diag.parity_defect_g});
    worst = std::max(worst, rel_parity(step.f_next, Parity::kEven));
    worst = std::max(worst, rel_parity(step.g_next, Parity::kOdd));
  }
  return {worst <= 1e-10, std::to_string(cases) + " cases, worst relative residual " + fmt(worst)};
}

Outcome russmann_scaling() {
  auto freq = certify({kGolden}, 1.01, 1024);
  std::vector<double> ns, sums;
  for (long n = 16; n <= 1024; n *= 2) {
    ns.push_back(static_cast<double>(n));
    sums.push_back(russmann_sum(freq, n));
  }
  const double p = loglog_slope(ns, sums), hi = 2.0 * freq.tau + 0.2;
  return {p >= 0.0 && p <= hi, "exponent " + fmt(p) + " in [0, " + fmt(hi) + "]"};
}

Outcome jackson_rate() {
  bool ok = true;
  std::string detail;
  for (double ell : {2.5, 3.1, 4.0}) {
    auto f = synthetic_input(1, ell, 2048, true, Parity::kEven);
    std::vector<double> widths, errs;
    for (int e = 2; e <= 7; ++e) {
      const double s = std::ldexp(1.0, -e);
      widths.push_back(s);
      errs.push_back(smoothing_error(f, s));
    }
    const double slope = loglog_slope(widths, errs);
    ok = ok && std::abs(slope - ell) <= 0.25 * ell;
    detail += (detail.empty() ? "" : ", ") + fmt(ell) + " -> " + fmt(slope);
  }
  return {ok, "fitted exponents " + detail};
}

Outcome kam_flow() {
  auto sc = make_schedule(1, 0.1, 1e-4, 6);
  auto sys = standard_flow({kGolden}, 1e-4, 2, sc.r[0]);
  auto res = run_kam_flow(sys.f, sys.g, golden(), sc);
  const auto& rep = res.report;
  if (rep.failed) return {false, "run failed: " + rep.failure};
  const double need = 1.0 + sc.mu_tilde / 2.0;
  const double inv = verify_flow_invariance(res.embedding, sys, 12, 1.0, 1e-12).residual;
  const bool ok = rep.newton_steps >= 5 && rep.monotone && rep.order >= need && inv <= 1e-8;
  return {ok, std::to_string(rep.newton_steps) + " steps, monotone " +
                  (rep.monotone ? "yes" : "no") + ", order " + fmt(rep.order) + " (need " +
                  format_double(need) + "), invariance " + fmt(inv)};
}

Outcome kam_map() {
  auto sc = make_schedule(1, 0.1, 1e-4, 6);
  LeapfrogMap A{{kGolden}, 1e-4, {1.0, 0.5}};
  FourierField f, g;
  A.perturbation(4, sc.r[0], f, g);
  auto res = run_kam_map(f, g, golden(), sc);
  if (res.report.failed) return {false, "run failed: " + res.report.failure};
  auto map = [&](double* x, double* y) { A.apply(x, y); };
  const double inv = verify_map_invariance(res.embedding, map, 64).residual;
  double th = 0.3, x, y;
  res.embedding.evaluate(&th, 0.0, &x, &y);
  const double rot = std::abs(rotation_number(map, {x}, {y}, 20000)[0] - kGolden);
  return {inv <= 1e-8 && rot <= 1e-8, "invariance " + fmt(inv) + ", rotation error " + fmt(rot)};
}

Outcome reference_orbits() {
  double worst = 0.0;
  for (int n : {1, 2, 3}) {
    auto orb = compute_reference_orbit(n);
    worst = std::max({worst, orb.energy_residual(), orb.symmetry_residual(),
                      orb.periodicity_residual()});
  }
  return {worst <= 1e-10, "worst residual " + fmt(worst)};
}

// Fourth-order central difference Jacobian of the action-angle map.
void psi_jacobian(const TwistSystem& sys, double th, double rho, double J[2][2]) {
  const double sh[4] = {2.0, 1.0, -1.0, -2.0};
  for (int c = 0; c < 2; ++c) {
    const double h = c == 0 ? 1e-3 : 1e-3 * rho;
    double xs[4], ys[4];
    for (int m = 0; m < 4; ++m) {
      if (c == 0) {
        sys.to_plane(th + sh[m] * h, rho, xs[m], ys[m]);
      } else {
        sys.to_plane(th, rho + sh[m] * h, xs[m], ys[m]);
      }
    }
    J[0][c] = (-xs[0] + 8.0 * xs[1] - 8.0 * xs[2] + xs[3]) / (12.0 * h);
    J[1][c] = (-ys[0] + 8.0 * ys[1] - 8.0 * ys[2] + ys[3]) / (12.0 * h);
  }
}

Outcome transformed_consistency() {
  auto orb = compute_reference_orbit(2);
  auto pr = make_problem("mixed", 2, 0.1);
  TwistSystem sys(pr, orb);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      for (int k = 0; k < 10; ++k) {
        const double th = kTwoPi * (i + 0.3) / 10, rho = sys.rho_star() * (1.0 + 3.0 * j);
        const double t = (k + 0.1) / 10;
        double J[2][2], z[2], dz[2];
        psi_jacobian(sys, th, rho, J);
        sys.to_plane(th, rho, z[0], z[1]);
        pr.rhs(t, z, dz);
        const double thd = sys.twist(rho) + sys.F2(th, rho, t), rd = sys.F1(th, rho, t);
        const double px = J[0][0] * thd + J[0][1] * rd, py = J[1][0] * thd + J[1][1] * rd;
        worst = std::max(worst, std::hypot(px - dz[0], py - dz[1]) / std::hypot(dz[0], dz[1]));
      }
    }
  }
  return {worst <= 1e-8, "1000 points, worst relative residual " + fmt(worst)};
}

Outcome poincare_and_stability() {
  auto orb = compute_reference_orbit(2);
  auto pr = make_problem("compliant", 2, 0.1);
  TwistSystem sys(pr, orb);
  PoincareMap P(sys);
  std::vector<SectionPoint> samples;
  for (int i = 0; i < 6; ++i) samples.push_back({0.4 + i, 3.0 + 1.5 * i});
  const double rev = P.reversibility_residual(samples);

  StabilitySettings set;
  set.t_max = 1e4;
  set.levels = {4.0, 6.0, 8.0, 10.0, 12.0};
  set.per_level = 4;
  auto rep = lagrange_stability(pr, orb, set);
  bool ran = rep.orbits.size() == 20;
  double ratio = 0.0;
  for (const auto& r : rep.orbits) {
    ran = ran && !r.failed;
    ratio = std::max(ratio, r.ratio);
  }
  auto ctl = lagrange_stability(make_problem("none", 2, 0.0), orb, set);
  double drift = 0.0;
  for (const auto& r : ctl.orbits) {
    ran = ran && !r.failed;
    drift = std::max(drift, r.energy_drift);
  }
  const bool ok = rev <= 1e-9 && ran && ratio <= 1.5 && drift <= 1e-6;
  return {ok, "reversibility " + fmt(rev) + ", " + std::to_string(rep.orbits.size()) +
                  " orbits, max ratio " + fmt(ratio) + ", control energy drift " + fmt(drift)};
}

int cli_run(std::vector<std::string> args) {
  args.insert(args.begin(), "rkam");
  std::ostringstream out, err;
  return cli::run(args, out, err);
}

Outcome determinism() {
  struct Run {
    std::string dir;
    std::vector<std::string> path, extra;
  };
  const std::vector<Run> runs{
      {"flow", {"kam", "run"}, {"--name", "flow"}},
      {"map", {"kam", "run"}, {"--mode", "map", "--name", "map"}},
      {"homsolve", {"homsolve"}, {"--seed", "7"}},
      {"lienard-orbit", {"lienard", "orbit"}, {"--n", "2"}},
      {"lienard-poincare", {"lienard", "poincare"}, {"--iterations", "50"}}};
  const fs::path root = fs::temp_directory_path() / "rkam_acceptance_determinism";
  fs::remove_all(root);
  const std::string first = (root / "first").string(), second = (root / "second").string();
  int files = 0;
  for (const auto& r : runs) {
    std::vector<std::string> args = r.path;
    args.insert(args.end(), r.extra.begin(), r.extra.end());
    args.insert(args.end(), {"--out", first});
    if (cli_run(args) != cli::kOk) return {false, "first run failed: " + r.dir};
    // Replay from the manifest alone.
    const std::string manifest = (fs::path(first) / r.dir / "manifest.json").string();
    auto m = manifest_from_json(parse_json(read_text_file(manifest), manifest));
    std::vector<std::string> replay = r.path;
    replay.insert(replay.end(), {"--config", manifest, "--seed", std::to_string(m.seed), "--out",
                                 second});
    if (cli_run(replay) != cli::kOk) return {false, "replay failed: " + r.dir};
    for (const auto& entry : m.digests) {
      const std::string a = read_text_file((fs::path(first) / r.dir / entry.first).string());
      const std::string b = read_text_file((fs::path(second) / r.dir / entry.first).string());
      if (a != b) return {false, r.dir + "/" + entry.first + " differs between runs"};
      ++files;
    }
  }
  return {files > 0, std::to_string(files) + " output files byte-identical across replays"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget;  // seconds
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"homological solver exactness", 1.0, homological_exactness},
      {"parity suite", 30.0, parity_suite},
      {"small-divisor sum scaling", 10.0, russmann_scaling},
      {"smoothing rate", 30.0, jackson_rate},
      {"KAM convergence, flow", 300.0, kam_flow},
      {"KAM convergence, map", 300.0, kam_map},
      {"reference orbit residuals", 10.0, reference_orbits},
      {"transformed system consistency", 30.0, transformed_consistency},
      {"Poincare reversibility and stability", 600.0, poincare_and_stability},
      {"determinism", 600.0, determinism},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::cout << (pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << c.name << ": " << o.detail
              << " [" << fmt(secs) << " s" << (in_time ? "" : ", over budget " + fmt(c.budget))
              << "]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
