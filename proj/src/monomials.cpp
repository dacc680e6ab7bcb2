#include "rkam/monomials.hpp"

#include <map>
#include <mutex>
#include <utility>

#include "rkam/errors.hpp"

namespace rkam {

namespace {

void enumerate(int nvars, int total, int var, std::vector<int>& cur,
               std::vector<int>& out) {
  if (var == nvars - 1) {
    cur[var] = total;
    out.insert(out.end(), cur.begin(), cur.end());
    return;
  }
  for (int e = total; e >= 0; --e) {
    cur[var] = e;
    enumerate(nvars, total - e, var + 1, cur, out);
  }
}

}  // namespace

MonomialBasis::MonomialBasis(int nvars, int degree)
    : nvars_(nvars), degree_(degree) {
  if (nvars < 1 || degree < 0) {
    throw ParameterError("monomial basis needs nvars >= 1 and degree >= 0");
  }
  std::vector<int> cur(nvars, 0);
  for (int t = 0; t <= degree; ++t) {
    size_t before = exps_.size();
    enumerate(nvars, t, 0, cur, exps_);
    total_.resize(total_.size() + (exps_.size() - before) / nvars, t);
  }
  const int n = size();
  prod_.assign(static_cast<size_t>(n) * n, -1);
  lower_.assign(static_cast<size_t>(n) * nvars, -1);
  raise_.assign(static_cast<size_t>(n) * nvars, -1);
  std::vector<int> e(nvars);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int v = 0; v < nvars; ++v) e[v] = exponent(i)[v] + exponent(j)[v];
      prod_[i * n + j] = index(e.data());
    }
    for (int v = 0; v < nvars; ++v) {
      for (int w = 0; w < nvars; ++w) e[w] = exponent(i)[w];
      e[v] += 1;
      raise_[i * nvars + v] = index(e.data());
      e[v] -= 2;
      if (e[v] >= 0) lower_[i * nvars + v] = index(e.data());
    }
  }
}

int MonomialBasis::index(const int* e) const {
  int total = 0;
  for (int v = 0; v < nvars_; ++v) {
    if (e[v] < 0) return -1;
    total += e[v];
  }
  if (total > degree_) return -1;
  for (int i = 0; i < size(); ++i) {
    if (total_[i] != total) continue;
    bool same = true;
    for (int v = 0; v < nvars_ && same; ++v) same = exponent(i)[v] == e[v];
    if (same) return i;
  }
  return -1;
}

void MonomialBasis::powers(const double* y, double* out) const {
  out[0] = 1.0;
  for (int i = 1; i < size(); ++i) {
    // Build from a lower monomial: find first variable with positive exponent.
    for (int v = 0; v < nvars_; ++v) {
      int lo = lowered(i, v);
      if (lo >= 0) {
        out[i] = out[lo] * y[v];
        break;
      }
    }
  }
}

std::shared_ptr<const MonomialBasis> MonomialBasis::get(int nvars, int degree) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const MonomialBasis>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(nvars, degree);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto basis = std::make_shared<const MonomialBasis>(nvars, degree);
  cache.emplace(key, basis);
  return basis;
}

}  // namespace rkam
