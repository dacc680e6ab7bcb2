#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "rkam/diophantine.hpp"
#include "rkam/errors.hpp"
#include "rkam/homological.hpp"
#include "rkam/kam.hpp"
#include "rkam/lienard.hpp"
#include "rkam/numerics.hpp"
#include "rkam/persistence.hpp"
#include "rkam/smoothing.hpp"
#include "rkam/systems.hpp"
#include "rkam/schedule.hpp"
#include "rkam/verify.hpp"

namespace rkam::cli {

namespace {

namespace fs = std::filesystem;

struct Common {
  std::string config;
  std::string out = "runs";
  int threads = 1;
  std::uint64_t seed = 0;
  std::string json_summary;
  int verbose = 0;
  std::vector<std::string> sets;
};

// Flag value waiting to be written into the config under `key`.
struct Override {
  std::string key;
  CLI::Option* opt = nullptr;
  std::function<Json()> value;
};

struct Command {
  std::vector<std::string> path;
  CLI::App* app = nullptr;
  Common common;
  Json defaults;
  std::vector<Override> overrides;
  std::function<Json(const Json& cfg, Command& cmd, std::ostream& out, std::ostream& err)> body;
};

template <class T>
void flag(Command& c, const std::string& name, const std::string& key, const std::string& help) {
  auto holder = std::make_shared<T>();
  CLI::Option* opt = c.app->add_option(name, *holder, help);
  c.overrides.push_back({key, opt, [holder] { return Json(*holder); }});
}

void add_common(Command& c) {
  CLI::App* a = c.app;
  a->add_option("--config", c.common.config, "JSON config file or run manifest");
  a->add_option("--out", c.common.out, "Output root directory")->capture_default_str();
  a->add_option("--threads", c.common.threads, "Worker threads")->capture_default_str();
  a->add_option("--seed", c.common.seed, "Seed for synthetic data")->capture_default_str();
  a->add_option("--json-summary", c.common.json_summary, "Write a JSON summary to FILE (- for stdout)");
  a->add_option("--set", c.common.sets, "Override a config key, KEY=VALUE")->take_all();
  a->add_flag("-v,--verbose", c.common.verbose, "More diagnostics on stderr");
}

// ---- configuration ---------------------------------------------------------

Json parse_value(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    return Json(text);
  }
}

Json resolve_config(Command& c) {
  Json cfg = c.defaults;
  if (!c.common.config.empty()) {
    Json file = parse_json(read_text_file(c.common.config), c.common.config);
    if (file.is_object() && file.contains("digests") && file.contains("config")) {
      file = file["config"];
    }
    if (!file.is_object()) throw ParseError(c.common.config + ": expected a JSON object");
    for (auto it = file.begin(); it != file.end(); ++it) {
      if (!cfg.contains(it.key())) throw ParseError("config." + it.key() + ": unknown key");
      cfg[it.key()] = it.value();
    }
  }
  for (const auto& s : c.common.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParameterError("--set expects KEY=VALUE, got '" + s + "'");
    const std::string key = s.substr(0, eq);
    if (!cfg.contains(key)) throw ParseError("config." + key + ": unknown key");
    cfg[key] = parse_value(s.substr(eq + 1));
  }
  for (const auto& o : c.overrides) {
    if (o.opt->count() > 0) cfg[o.key] = o.value();
  }
  return cfg;
}

std::vector<double> frequency_from(const Json& v, int d, const std::string& ctx) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "golden" || s == "sqrt_prime") return make_frequency(d, frequency_kind_from_string(s));
    throw ParseError(ctx + ": expected \"golden\", \"sqrt_prime\" or a list of numbers");
  }
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw ParseError(ctx + ": expected a frequency");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ParseError(ctx + ": expected numbers");
    out.push_back(e.get<double>());
  }
  if (static_cast<int>(out.size()) != d) throw ParameterError(ctx + ": length differs from d");
  return out;
}

std::string run_dir(const Command& c, const std::string& name) {
  return (fs::path(c.common.out) / name).string();
}

// Writes files into dir and a manifest with their digests.
void write_run(const Command& c, const std::string& dir, const Json& cfg,
               const std::vector<std::pair<std::string, std::string>>& files, double seconds) {
  RunManifest m;
  m.config = cfg;
  m.seed = c.common.seed;
  m.seconds = seconds;
  for (const auto& [name, content] : files) {
    write_text_file((fs::path(dir) / name).string(), content);
    m.digests[name] = sha256_hex(content);
  }
  write_text_file((fs::path(dir) / "manifest.json").string(), dump_json(manifest_to_json(m)));
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

FourierField random_field(int d, int m, int N, int q, double r, Parity parity, double scale,
                          double decay, bool autonomous, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FourierField f(d, m, N, q, r, Parity::kNone, autonomous);
  const ModeSet& ms = f.modes();
  for (int p = 0; p < f.num_powers(); ++p) {
    for (size_t i = 0; i < ms.size(); ++i) {
      const double w = scale * std::pow(decay, ms.order(i));
      for (int c = 0; c < m; ++c) f.at(p, i, c) = cdouble(u(rng), u(rng)) * w;
    }
  }
  for (int p = 0; p < f.num_powers(); ++p) {
    for (int c = 0; c < m; ++c) f.at(p, ms.zero(), c) = 0.0;
  }
  f.enforce_reality();
  f.project_parity(parity);
  return f;
}

// ---- subcommands -----------------------------------------------------------

Json run_dioph(const Json& cfg, Command& c, std::ostream&, std::ostream&) {
  StrictObject o(cfg, "config");
  const std::string name = o.string("name");
  const int d = o.integer("d");
  const auto omega = frequency_from(o.at("omega"), d, "config.omega");
  const double tau = o.number("tau");
  const long kmax = o.integer("kmax");
  const bool russ = o.boolean("russmann", false);
  const int nmin = o.integer("russmann_min"), nmax = o.integer("russmann_max");
  o.finish();
  auto t0 = std::chrono::steady_clock::now();
  Frequency f = certify(omega, tau, kmax);
  Json s;
  s["omega"] = f.omega;
  s["tau"] = f.tau;
  s["kappa"] = f.kappa;
  s["K_max"] = f.K_max;
  s["argmin_k"] = f.argmin_k;
  s["argmin_j"] = f.argmin_j;
  s["divisor_floor"] = divisor_floor(f);
  if (russ) {
    if (nmin < 1 || nmax <= nmin) throw ParameterError("need 1 <= russmann_min < russmann_max");
    std::vector<double> ns, sums;
    for (long n = nmin; n <= nmax; n *= 2) {
      ns.push_back(static_cast<double>(n));
      sums.push_back(russmann_sum(f, n));
    }
    s["russmann_n"] = ns;
    s["russmann_sum"] = sums;
    s["russmann_exponent"] = loglog_slope(ns, sums);
    s["russmann_bound"] = 2.0 * f.tau + 0.2;
  }
  if (!c.common.out.empty()) {
    write_run(c, run_dir(c, name), cfg, {{"dioph.json", dump_json(s)}}, elapsed(t0));
  }
  return s;
}

Json run_smooth_test(const Json& cfg, Command& c, std::ostream&, std::ostream&) {
  StrictObject o(cfg, "config");
  const std::string name = o.string("name");
  const auto ells = o.numbers("ell_star");
  const int N = o.integer("N");
  const int e0 = o.integer("s_min_exp"), e1 = o.integer("s_max_exp");
  const double tol = o.number("tolerance");
  o.finish();
  if (N < 8 || e0 < 1 || e1 <= e0) throw ParameterError("need N >= 8 and 1 <= s_min_exp < s_max_exp");
  auto t0 = std::chrono::steady_clock::now();
  std::string csv = "ell_star,s,sup_error\n";
  Json fits = Json::array();
  bool pass = true;
  for (double ell : ells) {
    auto f = synthetic_input(1, ell, N, true, Parity::kEven);
    std::vector<double> ws, es;
    for (int e = e0; e <= e1; ++e) {
      const double s = std::ldexp(1.0, -e);
      ws.push_back(s);
      es.push_back(smoothing_error(f, s));
      csv += format_double(ell) + "," + format_double(s) + "," + format_double(es.back()) + "\n";
    }
    const double slope = loglog_slope(ws, es);
    const bool ok = std::abs(slope - ell) <= tol * ell;
    pass = pass && ok;
    fits.push_back({{"ell_star", ell}, {"exponent", slope}, {"within_tolerance", ok}});
  }
  Json s;
  s["fits"] = fits;
  s["pass"] = pass;
  write_run(c, run_dir(c, name), cfg, {{"smoothing.csv", csv}}, elapsed(t0));
  return s;
}

Json run_homsolve(const Json& cfg, Command& c, std::ostream&, std::ostream&) {
  StrictObject o(cfg, "config");
  const std::string name = o.string("name");
  const int d = o.integer("d"), N = o.integer("N"), q = o.integer("q_y");
  const double r = o.number("r"), eps = o.number("eps"), decay = o.number("decay");
  const bool map_case = o.boolean("map", false);
  const auto omega = frequency_from(o.at("omega"), d, "config.omega");
  const double tau = o.number("tau");
  const long kmax = o.integer("kmax");
  const std::string fpath = o.string("f"), gpath = o.string("g");
  o.finish();
  auto t0 = std::chrono::steady_clock::now();
  Frequency freq = certify(omega, tau, kmax);
  FourierField f, g;
  if (!fpath.empty() || !gpath.empty()) {
    if (fpath.empty() || gpath.empty()) throw ParameterError("give both f and g field files");
    f = field_from_json(parse_json(read_text_file(fpath), fpath), fpath);
    g = field_from_json(parse_json(read_text_file(gpath), gpath), gpath);
  } else {
    std::mt19937_64 rng(c.common.seed);
    const Parity pf = map_case ? Parity::kNone : Parity::kEven;
    const Parity pg = map_case ? Parity::kNone : Parity::kOdd;
    f = random_field(d, d, N, q, r, pf, eps, decay, map_case, rng);
    g = random_field(d, d, N, q, r, pg, eps, decay, map_case, rng);
  }
  HomologicalSolution sol = map_case ? solve_map(f, g, freq) : solve_flow(f, g, freq);
  Json s;
  s["case"] = map_case ? "map" : "flow";
  s["min_divisor"] = sol.min_divisor;
  s["residual_u"] = sol.residual_u;
  s["residual_v"] = sol.residual_v;
  if (map_case) s["unsolved_mean"] = sol.unsolved_mean;
  s["u_parity"] = to_string(sol.u.parity());
  s["v_parity"] = to_string(sol.v.parity());
  write_run(c, run_dir(c, name), cfg,
            {{"f.json", dump_json(field_to_json(f))},
             {"g.json", dump_json(field_to_json(g))},
             {"u.json", dump_json(field_to_json(sol.u))},
             {"v.json", dump_json(field_to_json(sol.v))}},
            elapsed(t0));
  return s;
}

struct KamSetup {
  std::string name, mode;
  int d = 1, M = 6, q_y = 2, map_degree = 4, samples = 0;
  double mu = 0.1, eps0 = 1e-4, ell = 0.0, tau = 1.01, tol = 0.0, dt = 1.0;
  double integrator_tol = 1e-12, threshold = 1e-8;
  long kmax = 1000, rotation_iterations = 20000;
  std::vector<double> omega, force;
  std::string f_path, g_path;  // empty: built-in perturbation
};

KamSetup read_kam(const Json& cfg) {
  StrictObject o(cfg, "config");
  KamSetup k;
  k.name = o.string("name");
  k.mode = o.string("mode");
  k.d = o.integer("d");
  k.mu = o.number("mu");
  k.eps0 = o.number("eps0");
  k.M = o.integer("M");
  k.ell = o.number("ell");
  k.tol = o.number("tol");
  const std::string kind = o.string("omega_kind");
  k.omega = make_frequency(k.d, frequency_kind_from_string(kind), o.numbers("omega"));
  k.tau = o.number("tau");
  k.kmax = o.integer("kmax");
  k.q_y = o.integer("q_y");
  const Json& pert = o.at("perturbation");
  if (pert.is_object()) {
    StrictObject p(pert, "config.perturbation");
    k.f_path = p.string("f");
    k.g_path = p.string("g");
    p.finish();
  } else if (!pert.is_string() || pert.get<std::string>() != "standard") {
    throw ParseError("config.perturbation: expected \"standard\" or {\"f\": FILE, \"g\": FILE}");
  }
  k.map_degree = o.integer("map_degree");
  k.force = o.numbers("force");
  k.samples = o.integer("verify_samples");
  k.dt = o.number("verify_dt");
  k.integrator_tol = o.number("integrator_tol");
  k.rotation_iterations = o.integer("rotation_iterations");
  k.threshold = o.number("threshold");
  o.finish();
  if (k.mode != "flow" && k.mode != "map") {
    throw ParameterError("config.mode must be \"flow\" or \"map\"");
  }
  return k;
}

// The dynamics a KAM run works on, in the form the verifiers take.
struct KamProblem {
  FlowSystem flow;
  PlaneMap map;
  FourierField f, g;
};

KamProblem build_problem(const KamSetup& k, const Schedule& sc) {
  KamProblem p;
  if (!k.f_path.empty()) {
    p.f = field_from_json(parse_json(read_text_file(k.f_path), k.f_path), k.f_path);
    p.g = field_from_json(parse_json(read_text_file(k.g_path), k.g_path), k.g_path);
    if (p.f.d() != k.d || p.g.d() != k.d) throw ShapeError("perturbation fields differ from d");
    if (k.mode == "flow") {
      p.flow = FlowSystem{k.omega, p.f, p.g};
    } else {
      auto fm = std::make_shared<FieldMap>(FieldMap{k.omega, p.f, p.g});
      p.map = [fm](double* x, double* y) { fm->apply(x, y); };
    }
  } else if (k.mode == "flow") {
    p.flow = standard_flow(k.omega, k.eps0, k.q_y, sc.r[0]);
    p.f = p.flow.f;
    p.g = p.flow.g;
  } else {
    auto A = std::make_shared<LeapfrogMap>(LeapfrogMap{k.omega, k.eps0, k.force});
    A->perturbation(k.map_degree, sc.r[0], p.f, p.g);
    p.map = [A](double* x, double* y) { A->apply(x, y); };
  }
  return p;
}

struct Verification {
  double residual = 0.0;
  double rotation_error = -1.0;
};

Verification verify_setup(const KamSetup& k, const KamProblem& p, const TorusEmbedding& emb) {
  Verification v;
  if (k.mode == "flow") {
    const int n = k.samples > 0 ? k.samples : 12;
    v.residual = verify_flow_invariance(emb, p.flow, n, k.dt, k.integrator_tol).residual;
    return v;
  }
  const int n = k.samples > 0 ? k.samples : 64;
  v.residual = verify_map_invariance(emb, p.map, n).residual;
  std::vector<double> th(k.d, 0.3), x(k.d), y(k.d);
  emb.evaluate(th.data(), 0.0, x.data(), y.data());
  auto rho = rotation_number(p.map, x, y, k.rotation_iterations);
  v.rotation_error = 0.0;
  for (int a = 0; a < k.d; ++a) {
    v.rotation_error = std::max(v.rotation_error, std::abs(rho[a] - k.omega[a]));
  }
  return v;
}

Json run_kam(const Json& cfg, Command& c, std::ostream&, std::ostream& err) {
  KamSetup k = read_kam(cfg);
  auto t0 = std::chrono::steady_clock::now();
  Schedule sc = make_schedule(k.d, k.mu, k.eps0, k.M, k.ell);
  Frequency freq = certify(k.omega, k.tau, k.kmax);
  KamProblem prob = build_problem(k, sc);
  KamOptions opt;
  opt.tol = k.tol;
  opt.q_y = k.q_y;
  KamResult res = k.mode == "flow" ? run_kam_flow(prob.f, prob.g, freq, sc, opt)
                                   : run_kam_map(prob.f, prob.g, freq, sc, opt);
  const auto& rep = res.report;
  Json s;
  s["mode"] = k.mode;
  s["newton_steps"] = rep.newton_steps;
  s["converged"] = rep.converged;
  s["monotone"] = rep.monotone;
  s["order"] = rep.order;
  s["order_threshold"] = 1.0 + sc.mu_tilde / 2.0;
  s["failed"] = rep.failed;
  if (rep.failed) s["failure"] = rep.failure;
  s["warnings"] = rep.warnings;
  ConvergenceReport written = rep;
  if (!rep.failed) {
    Verification v = verify_setup(k, prob, res.embedding);
    s["invariance_residual"] = v.residual;
    if (v.rotation_error >= 0.0) s["rotation_error"] = v.rotation_error;
    s["max_action"] = res.embedding.max_action();
    s["pass"] = v.residual <= k.threshold;
    if (!written.steps.empty()) written.steps.back().invariance_residual = v.residual;
  }
  for (const auto& w : rep.warnings) err << "warning: " << w << "\n";
  write_run(c, run_dir(c, k.name), cfg,
            {{"embedding.json", dump_json(embedding_to_json(res.embedding))},
             {"convergence.csv", convergence_csv(written)}},
            elapsed(t0));
  if (rep.failed) throw StepFailure(rep.failure);
  return s;
}

LienardProblem read_problem(StrictObject& o) {
  const int n = o.integer("n");
  const std::string kind = o.string("perturbation");
  const double a = o.number("amplitude");
  return make_problem(kind, n, a);
}

Json run_lienard_orbit(const Json& cfg, Command& c, std::ostream&, std::ostream&) {
  StrictObject o(cfg, "config");
  const std::string name = o.string("name");
  const int n = o.integer("n");
  const double tol = o.number("tol");
  const int samples = o.integer("samples");
  o.finish();
  if (samples < 2) throw ParameterError("config.samples must be at least 2");
  auto t0 = std::chrono::steady_clock::now();
  ReferenceOrbit orb = compute_reference_orbit(n, tol);
  std::string csv = "t,x,xdot\n";
  for (int i = 0; i <= samples; ++i) {
    const double t = orb.period() * i / samples;
    double x, y;
    orb.eval(t, x, y);
    csv += format_double(t) + "," + format_double(x) + "," + format_double(y) + "\n";
  }
  Json s;
  s["n"] = n;
  s["period"] = orb.period();
  s["alpha"] = orb.alpha();
  s["beta"] = orb.beta();
  s["c"] = orb.c();
  s["c0"] = orb.c0();
  s["energy_residual"] = orb.energy_residual();
  s["symmetry_residual"] = orb.symmetry_residual();
  s["periodicity_residual"] = orb.periodicity_residual();
  s["harmonics"] = orb.harmonics();
  write_run(c, run_dir(c, name), cfg, {{"orbit.csv", csv}}, elapsed(t0));
  return s;
}

Json run_lienard_poincare(const Json& cfg, Command& c, std::ostream&, std::ostream&) {
  StrictObject o(cfg, "config");
  const std::string name = o.string("name");
  LienardProblem pr = read_problem(o);
  const double theta = o.number("theta"), lambda = o.number("lambda");
  const int iters = o.integer("iterations");
  SectionSettings set;
  set.steps_per_radian = o.number("steps_per_radian");
  set.lambda_min = o.number("lambda_min");
  set.lambda_max = o.number("lambda_max");
  const int rev = o.integer("reversibility_samples");
  o.finish();
  if (iters < 0 || rev < 0) throw ParameterError("iteration counts must be nonnegative");
  auto t0 = std::chrono::steady_clock::now();
  ReferenceOrbit orb = compute_reference_orbit(pr.n);
  TwistSystem sys(pr, orb);
  PoincareMap P(sys, set);
  std::string csv = "iterate,theta,lambda\n";
  SectionPoint z{theta, lambda, false};
  csv += "0," + format_double(z.theta) + "," + format_double(z.lambda) + "\n";
  int done = 0;
  for (int i = 1; i <= iters; ++i) {
    z = P.apply(z.theta, z.lambda);
    if (z.escaped) break;
    csv += std::to_string(i) + "," + format_double(z.theta) + "," + format_double(z.lambda) + "\n";
    done = i;
  }
  std::vector<SectionPoint> samples;
  for (int i = 0; i < rev; ++i) {
    samples.push_back({theta + 1.0 * i, lambda * (1.0 + 0.25 * i), false});
  }
  Json s;
  s["iterations"] = done;
  s["escaped"] = z.escaped;
  s["rho_star"] = sys.rho_star();
  s["mean_rotation"] = done > 0 ? (z.theta - theta) / done : 0.0;
  if (rev > 0) s["reversibility_residual"] = P.reversibility_residual(samples);
  write_run(c, run_dir(c, name), cfg, {{"section.csv", csv}}, elapsed(t0));
  return s;
}

Json run_lienard_stability(const Json& cfg, Command& c, std::ostream&, std::ostream& err) {
  StrictObject o(cfg, "config");
  const std::string name = o.string("name");
  LienardProblem pr = read_problem(o);
  StabilitySettings set;
  set.t_max = o.number("t_max");
  set.levels = o.numbers("levels");
  set.per_level = o.integer("per_level");
  set.threshold = o.number("threshold");
  set.steps_per_radian = o.number("steps_per_radian");
  const bool control = o.boolean("control", true);
  o.finish();
  auto t0 = std::chrono::steady_clock::now();
  ReferenceOrbit orb = compute_reference_orbit(pr.n);
  StabilityReport rep = lagrange_stability(pr, orb, set);
  Json s;
  s["orbits"] = rep.orbits.size();
  s["max_ratio"] = rep.max_ratio;
  s["flagged"] = rep.flagged;
  s["warnings"] = rep.warnings;
  for (const auto& w : rep.warnings) err << "warning: " << w << "\n";
  std::vector<std::pair<std::string, std::string>> files{{"stability.csv", stability_csv(rep)}};
  if (control) {
    StabilityReport ctl = lagrange_stability(make_problem("none", pr.n, 0.0), orb, set);
    double drift = 0.0, dev = 0.0;
    for (const auto& r : ctl.orbits) {
      drift = std::max(drift, r.energy_drift);
      dev = std::max(dev, std::abs(r.ratio - 1.0));
    }
    s["control_energy_drift"] = drift;
    s["control_ratio_deviation"] = dev;
    files.push_back({"control.csv", stability_csv(ctl)});
  }
  write_run(c, run_dir(c, name), cfg, files, elapsed(t0));
  return s;
}

Json run_verify(const Json& cfg, Command& c, std::ostream&, std::ostream&) {
  StrictObject o(cfg, "config");
  const std::string dir = o.string("run");
  const double threshold = o.number("threshold");
  o.finish();
  (void)c;
  if (dir.empty()) throw ParameterError("config.run: give the run directory to verify");
  const std::string mpath = (fs::path(dir) / "manifest.json").string();
  RunManifest m = manifest_from_json(parse_json(read_text_file(mpath), mpath));
  Json s;
  auto bad = check_digests(m, dir);
  s["digests_ok"] = bad.empty();
  if (!bad.empty()) {
    std::string names;
    for (const auto& b : bad) names += (names.empty() ? "" : ", ") + b;
    throw IoError("digest mismatch in " + dir + ": " + names);
  }
  if (m.digests.count("embedding.json")) {
    KamSetup k = read_kam(m.config);
    KamProblem prob = build_problem(k, make_schedule(k.d, k.mu, k.eps0, k.M, k.ell));
    TorusEmbedding emb = load_embedding((fs::path(dir) / "embedding.json").string());
    Verification v = verify_setup(k, prob, emb);
    s["invariance_residual"] = v.residual;
    if (v.rotation_error >= 0.0) s["rotation_error"] = v.rotation_error;
    if (v.residual > threshold) {
      throw StepFailure("invariance residual " + format_double(v.residual) + " exceeds " +
                        format_double(threshold));
    }
  }
  return s;
}

// ---- assembly --------------------------------------------------------------

struct Cli {
  CLI::App app{"Reversible KAM toolkit: Diophantine checks, smoothing, homological "
               "solves, KAM Newton runs and Lienard experiments.",
               "rkam"};
  std::vector<std::unique_ptr<Command>> commands;

  Cli() {
    app.require_subcommand(1);
    app.set_version_flag("--version", version_string());
    auto add = [&](CLI::App* sub, std::vector<std::string> path, Json defaults, auto body) {
      auto c = std::make_unique<Command>();
      c->path = std::move(path);
      c->app = sub;
      c->defaults = std::move(defaults);
      c->body = body;
      add_common(*c);
      commands.push_back(std::move(c));
      return commands.back().get();
    };

    auto* dioph = add(app.add_subcommand("dioph", "Certify a frequency vector"), {"dioph"},
                      Json{{"name", "dioph"}, {"d", 1}, {"omega", "golden"}, {"tau", 1.01},
                           {"kmax", 2048}, {"russmann", false}, {"russmann_min", 16},
                           {"russmann_max", 1024}},
                      run_dioph);
    flag<std::vector<double>>(*dioph, "--omega", "omega", "Frequency components");
    flag<int>(*dioph, "--d", "d", "Dimension");
    flag<double>(*dioph, "--tau", "tau", "Diophantine exponent");
    flag<int>(*dioph, "--kmax", "kmax", "Largest |k| checked");
    flag<bool>(*dioph, "--russmann", "russmann", "Also fit the small-divisor sum growth (true/false)");

    auto* smooth = add(app.add_subcommand("smooth-test", "Error rate of the smoothing operator"),
                       {"smooth-test"},
                       Json{{"name", "smooth-test"}, {"ell_star", {2.5, 3.1, 4.0}}, {"N", 2048},
                            {"s_min_exp", 2}, {"s_max_exp", 7}, {"tolerance", 0.25}},
                       run_smooth_test);
    flag<std::vector<double>>(*smooth, "--ell-star", "ell_star", "Smoothness exponents");
    flag<int>(*smooth, "--N", "N", "Mode cutoff of the synthetic input");

    auto* hom = add(app.add_subcommand("homsolve", "Solve the homological equations"), {"homsolve"},
                    Json{{"name", "homsolve"}, {"d", 1}, {"N", 8}, {"q_y", 2}, {"r", 0.01},
                         {"eps", 1e-4}, {"decay", 0.7}, {"map", false}, {"omega", "golden"},
                         {"tau", 1.01}, {"kmax", 1000}, {"f", ""}, {"g", ""}},
                    run_homsolve);
    flag<int>(*hom, "--N", "N", "Mode cutoff");
    flag<int>(*hom, "--d", "d", "Dimension");
    flag<bool>(*hom, "--map", "map", "Map case instead of flow (true/false)");
    flag<std::string>(*hom, "--f", "f", "Field JSON for f");
    flag<std::string>(*hom, "--g", "g", "Field JSON for g");

    CLI::App* kam = app.add_subcommand("kam", "KAM Newton iteration");
    kam->require_subcommand(1);
    auto* kr = add(kam->add_subcommand("run", "Run the KAM iteration and verify the torus"),
                   {"kam", "run"},
                   Json{{"name", "kam"}, {"mode", "flow"}, {"d", 1}, {"mu", 0.1},
                        {"eps0", 1e-4}, {"M", 6}, {"ell", 0.0}, {"tol", 0.0},
                        {"omega_kind", "golden"}, {"omega", Json::array()}, {"tau", 1.01},
                        {"kmax", 1000}, {"q_y", 2}, {"perturbation", "standard"},
                        {"map_degree", 4}, {"force", {1.0, 0.5}}, {"verify_samples", 0},
                        {"verify_dt", 1.0}, {"integrator_tol", 1e-12},
                        {"rotation_iterations", 20000}, {"threshold", 1e-8}},
                   run_kam);
    flag<std::string>(*kr, "--mode", "mode", "flow or map");
    flag<double>(*kr, "--eps0", "eps0", "Perturbation size");
    flag<int>(*kr, "--M", "M", "Number of schedule steps");
    flag<std::string>(*kr, "--name", "name", "Run name under the output root");

    CLI::App* lien = app.add_subcommand("lienard", "Lienard equation experiments");
    lien->require_subcommand(1);
    auto* lo = add(lien->add_subcommand("orbit", "Reference orbit and its invariants"),
                   {"lienard", "orbit"},
                   Json{{"name", "lienard-orbit"}, {"n", 1}, {"tol", 1e-13}, {"samples", 256}},
                   run_lienard_orbit);
    flag<int>(*lo, "--n", "n", "Degree n of x^(2n+1)");
    auto* lp = add(lien->add_subcommand("poincare", "Time-one map in (theta, lambda)"),
                   {"lienard", "poincare"},
                   Json{{"name", "lienard-poincare"}, {"n", 2}, {"perturbation", "compliant"},
                        {"amplitude", 0.1}, {"theta", 0.5}, {"lambda", 5.0}, {"iterations", 100},
                        {"steps_per_radian", 50.0}, {"lambda_min", 0.0}, {"lambda_max", 1e6},
                        {"reversibility_samples", 6}},
                   run_lienard_poincare);
    flag<int>(*lp, "--n", "n", "Degree n of x^(2n+1)");
    flag<std::string>(*lp, "--perturbation", "perturbation",
                      "none, compliant, mixed or nonreversible");
    flag<int>(*lp, "--iterations", "iterations", "Section iterates");
    auto* ls = add(lien->add_subcommand("stability", "Boundedness experiment"),
                   {"lienard", "stability"},
                   Json{{"name", "lienard-stability"}, {"n", 2}, {"perturbation", "compliant"},
                        {"amplitude", 0.1}, {"t_max", 1e4}, {"levels", {4.0, 6.0, 8.0, 10.0, 12.0}},
                        {"per_level", 4}, {"threshold", 3.0}, {"steps_per_radian", 20.0},
                        {"control", true}},
                   run_lienard_stability);
    flag<int>(*ls, "--n", "n", "Degree n of x^(2n+1)");
    flag<std::string>(*ls, "--perturbation", "perturbation",
                      "none, compliant, mixed or nonreversible");
    flag<double>(*ls, "--t-max", "t_max", "Integration horizon");

    auto* ver = add(app.add_subcommand("verify", "Check a run directory's digests and torus"),
                    {"verify"}, Json{{"run", ""}, {"threshold", 1e-8}}, run_verify);
    flag<std::string>(*ver, "--run", "run", "Run directory holding manifest.json");
  }

  Command* selected() {
    for (auto& c : commands) {
      if (c->app->parsed()) return c.get();
    }
    return nullptr;
  }

  Command* find(const std::vector<std::string>& path) {
    for (auto& c : commands) {
      if (c->path == path) return c.get();
    }
    return nullptr;
  }
};

void print_summary(const Json& s, std::ostream& out) {
  for (auto it = s.begin(); it != s.end(); ++it) {
    out << it.key() << ": ";
    if (it.value().is_number_float()) {
      out << format_double(it.value().get<double>());
    } else {
      out << it.value().dump();
    }
    out << "\n";
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Cli cli;
  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    cli.app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = cli.app.exit(e, out, err);
    return code == 0 ? kOk : kParameterError;
  }
  Command* c = cli.selected();
  if (!c) return kParameterError;
  try {
    if (c->common.threads < 1) throw ParameterError("--threads must be at least 1");
    set_num_threads(c->common.threads);
    Json cfg = resolve_config(*c);
    if (c->common.verbose > 0) err << "config: " << cfg.dump() << "\n";
    Json summary = c->body(cfg, *c, out, err);
    print_summary(summary, out);
    if (!c->common.json_summary.empty()) {
      if (c->common.json_summary == "-") {
        out << dump_json(summary);
      } else {
        write_text_file(c->common.json_summary, dump_json(summary));
      }
    }
    return kOk;
  } catch (const ResonanceError& e) {
    err << "error: " << e.what() << "\n";
    return kParameterError;
  } catch (const SmallDivisorError& e) {
    err << "error: small divisor " << format_double(e.divisor()) << ": " << e.what() << "\n";
    return kStepFailure;
  } catch (const StepFailure& e) {
    err << "error: step failure: " << e.what() << "\n";
    return kStepFailure;
  } catch (const IntegrationFailure& e) {
    err << "error: integration failure: " << e.what() << "\n";
    return kStepFailure;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kParameterError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kParameterError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

std::vector<std::vector<std::string>> command_paths() {
  Cli cli;
  std::vector<std::vector<std::string>> out;
  for (const auto& c : cli.commands) out.push_back(c->path);
  return out;
}

std::vector<std::string> option_names(const std::vector<std::string>& path) {
  Cli cli;
  Command* c = cli.find(path);
  if (!c) return {};
  std::vector<std::string> out;
  for (const CLI::Option* opt : c->app->get_options()) {
    for (const auto& n : opt->get_lnames()) out.push_back(n);
  }
  return out;
}

}  // namespace rkam::cli
