#include "rkam/diophantine.hpp"

#include <cfloat>
#include <cmath>
#include <functional>
#include <sstream>

#include "rkam/errors.hpp"

namespace rkam {

namespace {

// Calls fn(k) for every k with 0 < |k|_1 <= K. With half_space set only the
// representative whose first nonzero entry is positive is visited.
void for_each_k(int d, long K, bool half_space,
                const std::function<void(const std::vector<int>&, long)>& fn) {
  std::vector<int> k(d, 0);
  std::function<void(int, long, bool)> rec = [&](int axis, long budget, bool nonzero) {
    if (axis == d) {
      if (nonzero) fn(k, K - budget);
      return;
    }
    const long lo = (half_space && !nonzero) ? 0 : -budget;
    for (long v = lo; v <= budget; ++v) {
      k[axis] = static_cast<int>(v);
      rec(axis + 1, budget - std::labs(v), nonzero || v != 0);
    }
    k[axis] = 0;
  };
  rec(0, K, false);
}

double dot(const std::vector<int>& k, const std::vector<double>& w) {
  long double s = 0.0L;
  for (size_t i = 0; i < k.size(); ++i) s += static_cast<long double>(k[i]) * w[i];
  return static_cast<double>(s);
}

std::string describe(const std::vector<int>& k) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < k.size(); ++i) os << (i ? "," : "") << k[i];
  os << ")";
  return os.str();
}

}  // namespace

FrequencyKind frequency_kind_from_string(const std::string& s) {
  if (s == "golden") return FrequencyKind::kGolden;
  if (s == "sqrt_prime") return FrequencyKind::kSqrtPrime;
  if (s == "custom") return FrequencyKind::kCustom;
  throw ParameterError("unknown frequency kind '" + s + "'");
}

double default_tau(int d, double mu) { return d + mu / 100.0; }

Frequency certify(const std::vector<double>& omega, double tau, long K_max) {
  const int d = static_cast<int>(omega.size());
  if (d < 1) throw ParameterError("frequency vector is empty");
  if (K_max < 1) throw ParameterError("K_max must be at least 1");
  if (!(tau > d)) throw ParameterError("tau must exceed the dimension");
  for (double w : omega) {
    if (!std::isfinite(w)) throw ParameterError("frequency components must be finite");
  }
  Frequency freq;
  freq.omega = omega;
  freq.tau = tau;
  freq.K_max = K_max;
  double best = INFINITY;
  for_each_k(d, K_max, true, [&](const std::vector<int>& k, long norm) {
    const double x = dot(k, omega);
    const double j = -std::nearbyint(x);
    const double dist = std::abs(x + j);
    double scale = 1.0;
    for (int i = 0; i < d; ++i) scale += std::abs(k[i] * omega[i]);
    if (dist <= 8.0 * DBL_EPSILON * scale) {
      throw ResonanceError(k, static_cast<long>(j),
                           "resonant frequency: <k,omega> + j = 0 at k=" + describe(k) +
                               ", j=" + std::to_string(static_cast<long>(j)));
    }
    const double v = dist * std::pow(static_cast<double>(norm), tau);
    if (v < best) {
      best = v;
      freq.argmin_k = k;
      freq.argmin_j = static_cast<long>(j);
    }
  });
  freq.kappa = std::min(best, std::nextafter(1.0, 0.0));
  return freq;
}

double divisor_floor(const Frequency& freq) {
  return 0.5 * freq.kappa / std::pow(static_cast<double>(freq.K_max), freq.tau);
}

double russmann_sum(const Frequency& freq, long n) {
  if (n < 1 || n > freq.K_max) {
    throw ParameterError("russmann_sum needs 1 <= n <= K_max");
  }
  long double sum = 0.0L;
  for_each_k(freq.d(), n, false, [&](const std::vector<int>& k, long) {
    const double x = dot(k, freq.omega);
    const long jlo = static_cast<long>(std::ceil(-x - 1.0));
    const long jhi = static_cast<long>(std::floor(-x + 1.0));
    for (long j = jlo; j <= jhi; ++j) {
      const double div = std::abs(x + static_cast<double>(j));
      if (div <= 1.0 && div > 0.0) sum += 1.0L / (static_cast<long double>(div) * div);
    }
  });
  return static_cast<double>(sum);
}

std::vector<double> make_frequency(int d, FrequencyKind kind,
                                   const std::vector<double>& custom) {
  if (d < 1) throw ParameterError("frequency dimension must be at least 1");
  if (kind == FrequencyKind::kCustom) {
    if (static_cast<int>(custom.size()) != d) {
      throw ParameterError("custom frequency has wrong length");
    }
    return custom;
  }
  static const int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  const int max_d = static_cast<int>(sizeof(kPrimes) / sizeof(kPrimes[0]));
  std::vector<double> out;
  int next_prime = 0;
  if (kind == FrequencyKind::kGolden) out.push_back(0.5 * (std::sqrt(5.0) - 1.0));
  while (static_cast<int>(out.size()) < d) {
    if (next_prime >= max_d) throw ParameterError("dimension too large for built-in frequencies");
    const int prime = kPrimes[next_prime++];
    // sqrt(5) is rationally tied to the golden mean.
    if (kind == FrequencyKind::kGolden && prime == 5) continue;
    const double r = std::sqrt(static_cast<double>(prime));
    out.push_back(r - std::floor(r));
  }
  return out;
}

}  // namespace rkam
