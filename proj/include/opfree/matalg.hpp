#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "opfree/common.hpp"

namespace opfree::matalg {

// Validation summary for a candidate multi-matrix algebra. Worst defect per
// property; never thrown from, so adversarial inputs can be inspected.
struct SubalgebraReport {
  double unit_defect = 0.0;      // ||E_B(1) - 1||
  double adjoint_defect = 0.0;   // max ||E_B(b*) - b*||
  double product_defect = 0.0;   // max ||E_B(b b') - b b'||
  double tracial_defect = 0.0;   // max |tau(b b') - tau(b' b)| over the basis
  double gram_min_eig = 0.0;
  double gram_max_eig = 0.0;
  bool gram_conditioning_warning = false;

  bool passed(double tol) const;
  std::vector<std::string> failures(double tol) const;
};

// A multi-matrix *-algebra B inside M_n(C) with a faithful trace tau and the
// tau-orthogonal conditional expectation onto span(basis). Immutable after
// construction; safe to share across threads.
class AlgebraContext {
 public:
  // B = ⊕_j M_{size_j} ⊗ 1_{mult_j}, embedded block-diagonally. Ambient
  // dimension is Σ size_j·mult_j. Optional per-block trace weights (positive,
  // normalized internally); default is the uniform normalized trace.
  static AlgebraContext multi_matrix(const std::vector<std::pair<int, int>>& blocks,
                                     const std::vector<double>& block_weights = {},
                                     Tolerances tol = {});

  // Arbitrary spanning set inside M_n(C); diag_weights are per-diagonal-entry
  // tau weights (defaults to 1/n each). Intended for validation tests; the
  // basis is used as given, closure defects are reported not repaired.
  static AlgebraContext from_basis(int ambient_dim, std::vector<Matrix> basis,
                                   RealVector diag_weights = {}, Tolerances tol = {});

  int ambient_dim() const { return n_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  const std::vector<Matrix>& basis() const { return basis_; }
  const RealVector& trace_weights() const { return weights_; }
  const Tolerances& tol() const { return tol_; }

  Complex trace(const Matrix& a) const;
  double tau_norm(const Matrix& a) const;  // sqrt(tau(a* a))

  // tau-orthogonal projection onto span(basis): the unique tau-preserving
  // conditional expectation for a genuine multi-matrix subalgebra.
  Matrix conditional_expectation(const Matrix& a) const;

  Vector coords(const Matrix& a) const;  // coordinates of E_B(a) in the basis
  Matrix from_coords(const Vector& c) const;

  const Matrix& gram() const { return gram_; }
  const Matrix& gram_inverse() const { return gram_inv_; }
  const Vector& unit_coords() const { return unit_coords_; }

  // Structure data in basis coordinates, cached at construction.
  const Matrix& mult_matrix(int alpha) const { return mult_[alpha]; }   // coords(b_a · b_b)
  const Matrix& adjoint_matrix() const { return adjoint_; }             // coords(b_a^*)
  Vector product_coords(const Vector& x, const Vector& y) const;
  Vector adjoint_coords(const Vector& x) const;

  SubalgebraReport validate() const { return report_; }

  Matrix random_element(Rng& rng) const;
  Matrix random_self_adjoint_element(Rng& rng) const;

 private:
  AlgebraContext() = default;
  void finalize();

  int n_ = 0;
  std::vector<Matrix> basis_;
  RealVector weights_;  // per diagonal entry, sums to 1
  Tolerances tol_;

  Matrix gram_, gram_inv_;
  Vector unit_coords_;
  std::vector<Matrix> mult_;
  Matrix adjoint_;
  SubalgebraReport report_;
};

struct AlgElement {
  const AlgebraContext* ctx = nullptr;
  Matrix mat;
};

}  // namespace opfree::matalg
