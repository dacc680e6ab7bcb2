#pragma once

#include <string>
#include <vector>

namespace rkam {

// A frequency vector together with its measured Diophantine certificate:
// |<k, omega> + j| >= kappa / |k|^tau for 0 < |k|_1 <= K_max and all j.
struct Frequency {
  std::vector<double> omega;
  double kappa = 0.0;
  double tau = 0.0;
  long K_max = 0;
  std::vector<int> argmin_k;
  long argmin_j = 0;

  int d() const { return static_cast<int>(omega.size()); }
};

enum class FrequencyKind { kGolden, kSqrtPrime, kCustom };

FrequencyKind frequency_kind_from_string(const std::string& s);

// tau = d + mu / 100.
double default_tau(int d, double mu = 0.01);

Frequency certify(const std::vector<double>& omega, double tau, long K_max);

// Half the certified bound at the edge of the certification range.
double divisor_floor(const Frequency& freq);

// Sum over 0 < |k|_1 <= n and every j with |<k, omega> + j| <= 1 (which
// always includes the minimizing j) of |<k, omega> + j|^{-2}.
double russmann_sum(const Frequency& freq, long n);

std::vector<double> make_frequency(int d, FrequencyKind kind,
                                   const std::vector<double>& custom = {});

}  // namespace rkam
