#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "rkam/jet.hpp"
#include "rkam/monomials.hpp"

namespace rkam {

using cdouble = std::complex<double>;

// Behaviour under the involution (x, t) -> (-x, -t) with the action fixed.
enum class Parity { kEven, kOdd, kNone };

std::string to_string(Parity p);
Parity parity_from_string(const std::string& s);
Parity product_parity(Parity a, Parity b);
Parity flipped(Parity p);

struct TorusIndex {
  std::vector<int> k;
  int l = 0;
};

// All (k, l) with |k|_1 + |l| <= N, ordered lexicographically in (l, k).
// Autonomous sets only carry l = 0.
class ModeSet {
 public:
  ModeSet(int d, int N, bool autonomous);
  static std::shared_ptr<const ModeSet> get(int d, int N, bool autonomous);

  int d() const { return d_; }
  int cutoff() const { return N_; }
  bool autonomous() const { return autonomous_; }
  size_t size() const { return l_.size(); }

  const int* k(size_t i) const { return &k_[i * d_]; }
  int l(size_t i) const { return l_[i]; }
  int order(size_t i) const { return order_[i]; }
  // Index of (k, l) or -1.
  long find(const int* k, int l) const;
  size_t negated(size_t i) const { return neg_[i]; }
  size_t zero() const { return zero_; }

 private:
  long box_index(const int* k, int l) const;

  int d_;
  int N_;
  bool autonomous_;
  std::vector<int> k_;
  std::vector<int> l_;
  std::vector<int> order_;
  std::vector<size_t> neg_;
  std::vector<long> box_;
  size_t zero_ = 0;
};

// Vector-valued trigonometric polynomial in (x, t) on T^d x T, polynomial of
// degree q_y in the action y in R^d. Coefficients are stored for every mode
// (both signs) and every action monomial.
class FourierField {
 public:
  FourierField() = default;
  FourierField(int d, int m, int N, int q_y, double r,
               Parity parity = Parity::kNone, bool autonomous = false);

  int d() const { return d_; }
  int m() const { return m_; }
  int cutoff() const { return N_; }
  int q_y() const { return q_; }
  double r() const { return r_; }
  Parity parity() const { return parity_; }
  bool autonomous() const { return autonomous_; }
  bool empty() const { return d_ == 0; }

  void set_r(double r);
  void set_parity(Parity p) { parity_ = p; }

  const ModeSet& modes() const { return *modes_; }
  const MonomialBasis& powers() const { return *powers_; }
  int num_powers() const { return powers_->size(); }

  cdouble& at(int power, size_t mode, int comp) {
    return c_[(power * modes_->size() + mode) * m_ + comp];
  }
  const cdouble& at(int power, size_t mode, int comp) const {
    return c_[(power * modes_->size() + mode) * m_ + comp];
  }
  std::vector<cdouble>& data() { return c_; }
  const std::vector<cdouble>& data() const { return c_; }

  // Coefficient lookup by index; zero outside the mode set.
  cdouble coeff(const TorusIndex& idx, int power, int comp) const;
  // Sets (k, l) and, unless it is self-conjugate, the partner (-k, -l) to the
  // conjugate value so that the field stays real.
  void set_coeff(const TorusIndex& idx, int power, int comp, cdouble value);

  std::vector<double> evaluate(const std::vector<double>& x,
                               const std::vector<double>& y, double t) const;
  std::vector<cdouble> evaluate_complex(const std::vector<double>& x,
                                        const std::vector<double>& y,
                                        double t) const;

  // max |c(-k,-l) - conj c(k,l)|
  double reality_defect() const;
  // max |c(-k,-l) -/+ c(k,l)| for the given parity (0 for kNone).
  double parity_defect(Parity p) const;
  double max_abs_coeff() const;
  bool is_zero() const;

  void enforce_reality();
  // Replaces coefficients by their symmetric/antisymmetric part and retags.
  void project_parity(Parity p);

  // Copy with cutoff changed (modes added as zero or dropped).
  FourierField with_cutoff(int N) const;
  // Copy with action degree changed (higher powers dropped or zero-filled).
  FourierField with_degree(int q_y) const;

 private:
  int d_ = 0;
  int m_ = 0;
  int N_ = 0;
  int q_ = 0;
  double r_ = 0.0;
  Parity parity_ = Parity::kNone;
  bool autonomous_ = false;
  std::shared_ptr<const ModeSet> modes_;
  std::shared_ptr<const MonomialBasis> powers_;
  std::vector<cdouble> c_;
};

struct SupNormReport {
  double value = 0.0;     // grid sup of the Euclidean norm over components
  double majorant = 0.0;  // sum |c| e^{(|k|+|l|) s} r^{|p|}, Euclidean over components
  std::vector<int> grid_size;
  double s_eff = 0.0;
  double r_eff = 0.0;
};

// Grid sup over a uniform real grid with `grid` points per axis (0 picks
// 4N+4) and action samples {0, +-r/2, +-r} per action axis, plus the
// weighted-coefficient majorant on the complex strip of width s.
SupNormReport sup_norm(const FourierField& f, double s, double r, int grid = 0);
double majorant(const FourierField& f, double s, double r);

// Algebra. Results carry the propagated parity tag.
FourierField add(const FourierField& a, const FourierField& b);
FourierField subtract(const FourierField& a, const FourierField& b);
FourierField scale(const FourierField& a, double s);
// Componentwise product (or scalar-times-vector when one side has m = 1),
// truncated to cutoff N (default: max of the operands) and action degree
// max(q_a, q_b).
FourierField multiply_truncated(const FourierField& a, const FourierField& b,
                                int N = -1);
FourierField differentiate_x(const FourierField& a, int axis);
FourierField differentiate_t(const FourierField& a);
FourierField differentiate_y(const FourierField& a, int axis);

// Max over a uniform grid of |F(-x, y, -t) -/+ F(x, y, t)|.
double grid_parity_residual(const FourierField& f, Parity p, int grid = 0);

// Evaluation of a field at many x for one fixed t: the time modes are summed
// once, leaving a short sum over the angle wavenumbers per point.
class SliceEvaluator {
 public:
  // deriv_order: highest x-derivative order tabulated by table().
  SliceEvaluator(const FourierField& f, double t, int deriv_order);

  const FourierField& field() const { return *f_; }
  const MonomialBasis& derivs() const { return *derivs_; }
  int table_size() const { return derivs_->size() * f_->num_powers() * f_->m(); }

  // S[(alpha * P + p) * m + c] = Re sum_k A_k(p, c) (ik)^alpha e^{ik.x}.
  void table(const double* x, double* S) const;

 private:
  const FourierField* f_;
  std::shared_ptr<const MonomialBasis> derivs_;
  std::vector<int> kvec_;             // distinct k vectors, flattened
  std::vector<cdouble> partial_;      // [kidx][power][comp]
  std::vector<std::vector<double>> kpow_;  // [alpha][kidx] = k^alpha
  int N_;
};

// Precomputed products delta^alpha / alpha! * y^p at a jet point, where
// delta is the nilpotent part of the angle jet.
class JetPoint {
 public:
  JetPoint(const FourierField& f, const MonomialBasis* jet_basis,
           const Jet* x, const Jet* y);

  const double* x0() const { return x0_.data(); }

  // Value (x_axis < 0, y_axis < 0) or a first derivative in x or y of one
  // component, given a table from SliceEvaluator at x0 with order >= jet
  // degree (+1 for x derivatives).
  Jet combine(const SliceEvaluator& ev, const double* S, int comp,
              int x_axis = -1, int y_axis = -1) const;

 private:
  const MonomialBasis* jet_basis_;
  int n_alpha_;
  int n_pow_;
  std::vector<double> x0_;
  std::vector<Jet> prod_;  // [alpha][p]
  const MonomialBasis* alpha_basis_;
  const MonomialBasis* powers_;
};

}  // namespace rkam
