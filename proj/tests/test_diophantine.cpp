#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "rkam/diophantine.hpp"
#include "rkam/errors.hpp"
#include "rkam/numerics.hpp"

using namespace rkam;

namespace {

const double kGolden = 0.5 * (std::sqrt(5.0) - 1.0);

// Brute force over every k in [1, K] and every j in a generous window.
double brute_kappa(double w, double tau, long K) {
  double best = INFINITY;
  for (long k = 1; k <= K; ++k) {
    const long span = static_cast<long>(k * (1.0 + std::abs(w))) + 1;
    for (long j = -span; j <= span; ++j) {
      best = std::min(best, std::abs(k * w + j) * std::pow(static_cast<double>(k), tau));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("golden mean certificate matches brute force") {
  auto f = certify({kGolden}, 1.01, 10000);
  CHECK(f.kappa == doctest::Approx(brute_kappa(kGolden, 1.01, 10000)).epsilon(1e-9));
  CHECK(f.kappa > 0.3);
  CHECK(f.kappa < 0.4);
  REQUIRE(f.argmin_k.size() == 1);
  const int k = std::abs(f.argmin_k[0]);
  CHECK(std::abs(f.argmin_k[0] * kGolden + f.argmin_j) * std::pow(k, 1.01) ==
        doctest::Approx(f.kappa).epsilon(1e-12));
}

TEST_CASE("rational frequency is resonant") {
  try {
    certify({0.5}, 1.5, 10);
    FAIL("expected a resonance error");
  } catch (const ResonanceError& e) {
    REQUIRE(e.k().size() == 1);
    CHECK(e.k()[0] == 2);
    CHECK(e.j() == -1);
  }
  CHECK_THROWS_AS(certify({std::sqrt(2.0) - 1.0, 2.0 * (std::sqrt(2.0) - 1.0)}, 2.5, 10),
                  ResonanceError);
}

TEST_CASE("preconditions") {
  CHECK_THROWS_AS(certify({kGolden}, 1.0, 10), ParameterError);
  CHECK_THROWS_AS(certify({kGolden}, 1.5, 0), ParameterError);
  CHECK_THROWS_AS(certify({}, 1.5, 10), ParameterError);
  auto f = certify({kGolden}, 1.01, 16);
  CHECK_THROWS_AS(russmann_sum(f, 17), ParameterError);
  CHECK_THROWS_AS(frequency_kind_from_string("silver"), ParameterError);
}

TEST_CASE("kappa shrinks on a larger range") {
  for (long K : {10L, 50L, 300L}) {
    CHECK(certify({kGolden}, 1.01, 2 * K).kappa <= certify({kGolden}, 1.01, K).kappa);
  }
  auto w = make_frequency(2, FrequencyKind::kSqrtPrime);
  CHECK(certify(w, 2.01, 60).kappa <= certify(w, 2.01, 30).kappa);
}

TEST_CASE("omega and 1 - omega have the same certificate") {
  auto a = certify({kGolden}, 1.01, 500);
  auto b = certify({1.0 - kGolden}, 1.01, 500);
  CHECK(a.kappa == doctest::Approx(b.kappa).epsilon(1e-12));
  CHECK(std::abs(a.argmin_k[0]) == std::abs(b.argmin_k[0]));
}

TEST_CASE("russmann sum for n = 1 by hand") {
  auto f = certify({kGolden}, 1.01, 10);
  double expect = 0.0;
  for (double x : {kGolden, -kGolden}) {
    for (int j = -2; j <= 2; ++j) {
      if (std::abs(x + j) <= 1.0) expect += 1.0 / ((x + j) * (x + j));
    }
  }
  CHECK(russmann_sum(f, 1) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("russmann sum grows monotonically and within the scaling bound") {
  auto f = certify({kGolden}, 1.01, 1024);
  std::vector<double> n, sum;
  double prev = 0.0;
  for (long m = 1; m <= 1024; m *= 2) {
    const double s = russmann_sum(f, m);
    CHECK(s >= prev);
    prev = s;
    if (m >= 16) {
      n.push_back(static_cast<double>(m));
      sum.push_back(s);
    }
  }
  const double slope = loglog_slope(n, sum);
  CHECK(slope >= 0.0);
  CHECK(slope <= 2.0 * f.tau + 0.2);
}

TEST_CASE("built-in frequencies") {
  CHECK(make_frequency(1, FrequencyKind::kGolden)[0] == doctest::Approx(0.6180339887498949).epsilon(1e-15));
  auto w = make_frequency(2, FrequencyKind::kSqrtPrime);
  CHECK(w[0] == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-15));
  CHECK(w[1] == doctest::Approx(std::sqrt(3.0) - 1.0).epsilon(1e-15));
  CHECK(make_frequency(2, FrequencyKind::kCustom, {0.1, 0.2})[1] == 0.2);
  CHECK_THROWS_AS(make_frequency(2, FrequencyKind::kCustom, {0.1}), ParameterError);
  for (auto kind : {FrequencyKind::kGolden, FrequencyKind::kSqrtPrime}) {
    for (int d : {1, 2, 3}) {
      auto v = make_frequency(d, kind);
      CHECK_NOTHROW(certify(v, default_tau(d), d == 1 ? 2000 : (d == 2 ? 300 : 40)));
    }
  }
  CHECK(default_tau(1) == doctest::Approx(1.0001));
  CHECK(default_tau(2, 0.1) == doctest::Approx(2.001));
}

TEST_CASE("divisor floor") {
  auto f = certify({kGolden}, 1.01, 100);
  CHECK(divisor_floor(f) == doctest::Approx(0.5 * f.kappa / std::pow(100.0, 1.01)));
}
