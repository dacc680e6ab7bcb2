#pragma once

#include <memory>
#include <vector>

namespace rkam {

// Monomials in `nvars` variables of total degree <= `degree`, graded then
// reverse-lex ordered: 1, y1, y2, y1^2, y1 y2, y2^2, ...
class MonomialBasis {
 public:
  MonomialBasis(int nvars, int degree);

  static std::shared_ptr<const MonomialBasis> get(int nvars, int degree);

  int nvars() const { return nvars_; }
  int degree() const { return degree_; }
  int size() const { return static_cast<int>(total_.size()); }

  const int* exponent(int i) const { return &exps_[i * nvars_]; }
  int total_degree(int i) const { return total_[i]; }

  // Index of an exponent vector, -1 when its degree exceeds the basis.
  int index(const int* e) const;
  // Index of the product of monomials i and j, -1 when truncated away.
  int product(int i, int j) const { return prod_[i * size() + j]; }
  // Index of monomial i with exponent of variable v lowered by one (-1 if 0).
  int lowered(int i, int v) const { return lower_[i * nvars_ + v]; }
  // Index of monomial i with exponent of variable v raised by one (-1 if truncated).
  int raised(int i, int v) const { return raise_[i * nvars_ + v]; }

  // Evaluate every monomial at y (length nvars).
  void powers(const double* y, double* out) const;

 private:
  int nvars_;
  int degree_;
  std::vector<int> exps_;
  std::vector<int> total_;
  std::vector<int> prod_;
  std::vector<int> lower_;
  std::vector<int> raise_;
};

}  // namespace rkam
