#include "rkam/verify.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>

#include "rkam/errors.hpp"
#include "rkam/grid.hpp"

namespace rkam {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double angle_gap(double a, double b) { return std::abs(std::remainder(a - b, kTwoPi)); }

}  // namespace

InvarianceReport verify_flow_invariance(const TorusEmbedding& emb, const FlowSystem& sys,
                                        int samples, double dt, double tol) {
  namespace ode = boost::numeric::odeint;
  using State = std::vector<double>;
  const int d = emb.d;
  if (emb.map_case) throw ParameterError("embedding belongs to a map");
  if (sys.d() != d) throw ShapeError("system and embedding dimensions differ");
  if (samples < 1) throw ParameterError("need at least one sample per axis");
  const UniformGrid grid(d, samples, false);
  InvarianceReport rep;
  std::vector<double> theta(d), th1(d), x1(2 * d);
  auto rhs = [&](const State& s, State& ds, double t) { sys.rhs(t, s.data(), ds.data()); };
  for (size_t idx = 0; idx < grid.points(); ++idx) {
    double t0 = 0.0;
    grid.point(idx, theta.data(), &t0);
    State s(2 * d);
    emb.evaluate(theta.data(), t0, s.data(), s.data() + d);
    ode::integrate_adaptive(ode::make_controlled(tol, tol, ode::runge_kutta_fehlberg78<State>()),
                            rhs, s, t0, t0 + dt, dt / 16.0);
    for (int a = 0; a < d; ++a) th1[a] = theta[a] + emb.omega[a] * dt;
    emb.evaluate(th1.data(), t0 + dt, x1.data(), x1.data() + d);
    for (int a = 0; a < d; ++a) {
      rep.angle_error = std::max(rep.angle_error, angle_gap(s[a], x1[a]));
      rep.action_error = std::max(rep.action_error, std::abs(s[d + a] - x1[d + a]));
    }
    ++rep.samples;
  }
  rep.residual = std::max(rep.angle_error, rep.action_error);
  return rep;
}

InvarianceReport verify_map_invariance(const TorusEmbedding& emb, const PlaneMap& map,
                                       int samples) {
  const int d = emb.d;
  if (!emb.map_case) throw ParameterError("embedding belongs to a flow");
  if (samples < 1) throw ParameterError("need at least one sample per axis");
  const UniformGrid grid(d, samples, true);
  InvarianceReport rep;
  std::vector<double> theta(d), th1(d), x(d), y(d), x1(d), y1(d);
  for (size_t idx = 0; idx < grid.points(); ++idx) {
    grid.point(idx, theta.data(), nullptr);
    emb.evaluate(theta.data(), 0.0, x.data(), y.data());
    map(x.data(), y.data());
    for (int a = 0; a < d; ++a) th1[a] = theta[a] + kTwoPi * emb.omega[a];
    emb.evaluate(th1.data(), 0.0, x1.data(), y1.data());
    for (int a = 0; a < d; ++a) {
      rep.angle_error = std::max(rep.angle_error, angle_gap(x[a], x1[a]));
      rep.action_error = std::max(rep.action_error, std::abs(y[a] - y1[a]));
    }
    ++rep.samples;
  }
  rep.residual = std::max(rep.angle_error, rep.action_error);
  return rep;
}

std::vector<double> rotation_number(const PlaneMap& map, std::vector<double> x,
                                    std::vector<double> y, long iterations) {
  if (iterations < 3) throw ParameterError("rotation number needs at least 3 iterations");
  const size_t d = x.size();
  std::vector<long double> num(d, 0.0L);
  long double den = 0.0L;
  std::vector<double> prev(d);
  for (long n = 1; n < iterations; ++n) {
    prev = x;
    map(x.data(), y.data());
    const double s = static_cast<double>(n) / iterations;
    const double w = std::exp(-1.0 / (s * (1.0 - s)));
    for (size_t a = 0; a < d; ++a) num[a] += w * static_cast<long double>(x[a] - prev[a]);
    den += w;
  }
  std::vector<double> out(d);
  for (size_t a = 0; a < d; ++a) out[a] = static_cast<double>(num[a] / den) / kTwoPi;
  return out;
}

}  // namespace rkam
