#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "rkam/errors.hpp"
#include "rkam/fourier_field.hpp"
#include "rkam/grid.hpp"
#include "support.hpp"

using namespace rkam;
using rkam::testing::random_field;

namespace {

FourierField cos_x() {
  FourierField f(1, 1, 4, 0, 0.0, Parity::kEven);
  f.set_coeff({{1}, 0}, 0, 0, 0.5);
  return f;
}

}  // namespace

TEST_CASE("zero field evaluates to zero") {
  FourierField f(2, 3, 3, 2, 1.0);
  auto v = f.evaluate({0.3, -1.2}, {0.1, 0.2}, 0.7);
  CHECK(v.size() == 3);
  for (double x : v) CHECK(x == 0.0);
}

TEST_CASE("cosine reconstruction") {
  auto f = cos_x();
  CHECK(f.coeff({{-1}, 0}, 0, 0) == cdouble(0.5));
  CHECK(f.evaluate({0.0}, {0.0}, 0.0)[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.evaluate({std::numbers::pi}, {0.0}, 0.3)[0] == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("reality symmetric fields evaluate to real numbers") {
  std::mt19937_64 rng(7);
  auto f = random_field(2, 2, 6, 2, 0.5, Parity::kNone, rng);
  CHECK(f.reality_defect() == 0.0);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    auto z = f.evaluate_complex({u(rng), u(rng)}, {0.1 * u(rng), 0.1 * u(rng)}, u(rng));
    for (auto& c : z) CHECK(std::abs(c.imag()) <= 1e-14);
  }
}

TEST_CASE("action outside the radius is rejected") {
  auto f = cos_x();
  CHECK_THROWS_AS(f.evaluate({0.0}, {0.1}, 0.0), DomainError);
}

TEST_CASE("sup norm and majorant of cos x") {
  auto f = cos_x();
  auto rep = sup_norm(f, 0.0, 0.0);
  CHECK(rep.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(majorant(f, 0.1, 0.0) == doctest::Approx(std::exp(0.1)).epsilon(1e-14));
  CHECK_THROWS_AS(sup_norm(f, -0.1, 0.0), DomainError);
  CHECK_THROWS_AS(sup_norm(f, 0.0, -1.0), DomainError);
}

TEST_CASE("majorant bounds the grid sup, and refinement is monotone") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    auto f = random_field(1, 2, 7, 2, 0.3, Parity::kNone, rng);
    double prev = 0.0;
    for (int n : {16, 32, 64, 128}) {
      auto rep = sup_norm(f, 0.0, 0.3, n);
      CHECK(rep.value >= prev);
      CHECK(rep.majorant >= rep.value);
      prev = rep.value;
    }
  }
}

TEST_CASE("derivatives act diagonally") {
  auto d = differentiate_x(cos_x(), 0);
  // -sin x = (i/2) e^{ix} - (i/2) e^{-ix}
  CHECK(std::abs(d.coeff({{1}, 0}, 0, 0) - cdouble(0.0, 0.5)) == 0.0);
  CHECK(std::abs(d.coeff({{-1}, 0}, 0, 0) - cdouble(0.0, -0.5)) == 0.0);
  CHECK(d.parity() == Parity::kOdd);

  FourierField g(1, 1, 3, 0, 0.0, Parity::kEven);
  g.set_coeff({{1}, 2}, 0, 0, 0.25);
  auto gt = differentiate_t(g);
  CHECK(std::abs(gt.coeff({{1}, 2}, 0, 0) - cdouble(0.0, 0.5)) == 0.0);

  FourierField h(1, 1, 2, 2, 1.0);
  h.set_coeff({{0}, 0}, 2, 0, 3.0);  // 3 y^2
  auto hy = differentiate_y(h, 0);
  CHECK(hy.coeff({{0}, 0}, 1, 0) == cdouble(6.0));
  CHECK(hy.coeff({{0}, 0}, 2, 0) == cdouble(0.0));
}

TEST_CASE("product to sum identity") {
  auto p = multiply_truncated(cos_x(), cos_x());
  CHECK(std::abs(p.coeff({{0}, 0}, 0, 0) - 0.5) < 1e-16);
  CHECK(std::abs(p.coeff({{2}, 0}, 0, 0) - 0.25) < 1e-16);
  CHECK(std::abs(p.coeff({{-2}, 0}, 0, 0) - 0.25) < 1e-16);
  CHECK(std::abs(p.coeff({{1}, 0}, 0, 0)) == 0.0);
  CHECK(p.parity() == Parity::kEven);
}

TEST_CASE("parity tags propagate soundly") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    auto a = random_field(1, 1, 5, 2, 0.2, Parity::kOdd, rng);
    auto b = random_field(1, 1, 5, 1, 0.2, Parity::kOdd, rng);
    auto c = random_field(1, 1, 4, 2, 0.2, Parity::kEven, rng);
    auto ab = multiply_truncated(a, b, 8);
    CHECK(ab.parity() == Parity::kEven);
    const double scale = sup_norm(ab, 0.0, ab.r()).value;
    CHECK(grid_parity_residual(ab, Parity::kEven) <= 1e-12 * scale);
    auto ac = multiply_truncated(a, c);
    CHECK(ac.parity() == Parity::kOdd);
    CHECK(grid_parity_residual(ac, Parity::kOdd) <= 1e-12 * sup_norm(ac, 0.0, ac.r()).value);
    auto dx = differentiate_x(c, 0);
    CHECK(dx.parity() == Parity::kOdd);
    CHECK(grid_parity_residual(dx, Parity::kOdd) <= 1e-12 * sup_norm(dx, 0.0, dx.r()).value);
    CHECK(add(a, c).parity() == Parity::kNone);
    for (const auto* f : {&ab, &ac, &dx}) CHECK(f->reality_defect() <= 1e-15);
  }
}

TEST_CASE("multiplication matches pointwise products") {
  std::mt19937_64 rng(5);
  auto a = random_field(2, 1, 3, 1, 0.5, Parity::kNone, rng);
  auto b = random_field(2, 2, 3, 1, 0.5, Parity::kNone, rng);
  auto ab = multiply_truncated(a, b, 6);
  // Degree 1 x degree 1 truncates y1*y2 etc.; compare at y = 0 where no
  // truncation happens in the action.
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x{u(rng), u(rng)}, y{0.0, 0.0};
    double t = u(rng);
    auto va = a.evaluate(x, y, t);
    auto vb = b.evaluate(x, y, t);
    auto vab = ab.evaluate(x, y, t);
    CHECK(vab[0] == doctest::Approx(va[0] * vb[0]).epsilon(1e-13));
    CHECK(vab[1] == doctest::Approx(va[0] * vb[1]).epsilon(1e-13));
  }
  CHECK_THROWS_AS(add(a, b), ShapeError);
}

TEST_CASE("grid round trip recovers coefficients") {
  std::mt19937_64 rng(9);
  for (bool autonomous : {false, true}) {
    for (int d : {1, 2}) {
      auto f = random_field(d, 2, 6, 2, 0.4, Parity::kNone, rng, autonomous);
      for (int n : {13, 16, 20}) {
        auto samples = synthesize(f, n);
        auto g = analyze(samples, d, 2, n, 6, 2, 0.4, autonomous);
        double err = 0.0;
        for (size_t i = 0; i < f.data().size(); ++i) {
          err = std::max(err, std::abs(f.data()[i] - g.data()[i]));
        }
        CHECK(err <= 1e-12);
      }
    }
  }
  CHECK_THROWS_AS(analyze(std::vector<double>(12 * 12 * 3, 0.0), 1, 1, 12, 6, 2, 0.1, false),
                  ParameterError);
}

TEST_CASE("jet evaluation matches finite differences") {
  std::mt19937_64 rng(21);
  auto f = random_field(1, 1, 6, 2, 1.0, Parity::kNone, rng);
  auto basis = MonomialBasis::get(1, 2);
  const double x0 = 0.7, y0 = 0.05, t = 1.3, a = 0.3, b = -0.2;
  Jet x = Jet(basis.get(), x0);
  x[1] = a;
  Jet y = Jet(basis.get(), y0);
  y[1] = b;
  SliceEvaluator ev(f, t, 3);
  std::vector<double> S(ev.table_size());
  ev.table(&x0, S.data());
  JetPoint pt(f, basis.get(), &x, &y);
  auto eval = [&](double e) { return f.evaluate({x0 + a * e}, {y0 + b * e}, t)[0]; };
  const double h = 1e-3;
  Jet v = pt.combine(ev, S.data(), 0);
  CHECK(v[0] == doctest::Approx(eval(0.0)).epsilon(1e-13));
  CHECK(v[1] == doctest::Approx((eval(h) - eval(-h)) / (2 * h)).epsilon(1e-5));
  CHECK(v[2] == doctest::Approx((eval(h) - 2 * eval(0) + eval(-h)) / (2 * h * h)).epsilon(1e-4));

  auto fx = differentiate_x(f, 0);
  auto fy = differentiate_y(f, 0);
  Jet vx = pt.combine(ev, S.data(), 0, 0, -1);
  Jet vy = pt.combine(ev, S.data(), 0, -1, 0);
  CHECK(vx[0] == doctest::Approx(fx.evaluate({x0}, {y0}, t)[0]).epsilon(1e-13));
  CHECK(vy[0] == doctest::Approx(fy.evaluate({x0}, {y0}, t)[0]).epsilon(1e-13));
}

TEST_CASE("cutoff and degree changes keep shared coefficients") {
  std::mt19937_64 rng(2);
  auto f = random_field(1, 1, 5, 2, 0.3, Parity::kEven, rng);
  auto g = f.with_cutoff(8).with_cutoff(5);
  auto h = f.with_degree(4).with_degree(2);
  for (size_t i = 0; i < f.data().size(); ++i) {
    CHECK(f.data()[i] == g.data()[i]);
    CHECK(f.data()[i] == h.data()[i]);
  }
  CHECK(f.with_cutoff(2).modes().cutoff() == 2);
}
