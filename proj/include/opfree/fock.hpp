#pragma once

#include <vector>

#include "opfree/bpoly.hpp"
#include "opfree/covmap.hpp"

namespace opfree::fock {

using covmap::CovarianceMatrix;
using matalg::AlgebraContext;

inline constexpr int kDefaultDimCap = 20000;

// The bimodule generated by symbols b_a · e_i · b_b with the Gram pairing
// ⟨a e_i b, c e_j d⟩ = tau(b* η_ij(a* c) d), realized as the quotient by the
// null space of the Gram matrix.
struct Bimodule {
  const AlgebraContext* ctx = nullptr;
  const CovarianceMatrix* eta = nullptr;

  struct Label {
    int a = 0, i = 0, b = 0;
  };
  std::vector<Label> span_labels;
  Matrix gram;      // over span_labels
  Matrix quotient;  // columns are a Gram-orthonormal basis of the non-null space
  double gram_min_eig = 0.0;
  double gram_max_eig = 0.0;

  int generator_count() const { return static_cast<int>(span_labels.size()); }
  int dimension() const { return static_cast<int>(quotient.cols()); }
};

Bimodule build_bimodule(const AlgebraContext& ctx, const CovarianceMatrix& eta);

// Truncated full Fock space over the bimodule: level 0 is B with ⟨a,b⟩ =
// tau(a* b); level n is the Gram quotient of (head generators b_a e_i) ⊗
// (level n−1), with the balanced tensor relation enforced by the inner-product
// kernel. Creation prepends a head; s_i = L(e_i) + L(e_i)†. Immutable after
// construction.
class FockModel {
 public:
  FockModel(const AlgebraContext& ctx, const CovarianceMatrix& eta, int depth,
            int dim_cap = kDefaultDimCap);

  const AlgebraContext& ctx() const { return *ctx_; }
  const CovarianceMatrix& eta() const { return *eta_; }
  int depth() const { return depth_; }
  const std::vector<int>& level_dims() const { return level_dims_; }
  int total_dim() const { return total_dim_; }
  int exact_degree() const { return 2 * depth_; }
  const Bimodule& bimodule() const { return bimodule_; }

  const Matrix& creation(int i) const { return creation_[i]; }
  Matrix annihilation(int i) const { return creation_[i].adjoint(); }
  const Matrix& semicircular(int i) const { return semicircular_[i]; }
  Matrix act(const Matrix& b) const;  // left action λ(b) on the truncated space
  const Vector& omega() const { return omega_; }

  // Level-0 component of v, read back as an element of B.
  Matrix read_level0(const Vector& v) const;

  // E_B of a word polynomial in the semicircular letters with B coefficients.
  // Exact for word degree ≤ 2·depth; larger degrees raise ExactnessError.
  Matrix expectation(const bpoly::BPolynomial& p) const;
  Complex trace_of(const bpoly::BPolynomial& p) const;

  // The word's operator on the truncated space (no exactness guarantee).
  Matrix evaluate(const bpoly::BPolynomial& p) const;

  // Spectral norm on the truncated space: a lower bound for the operator norm
  // of the untruncated word, monotone nondecreasing in depth.
  double operator_norm_estimate(const bpoly::BPolynomial& p) const;

  // Vacuum readback Ê(T) for an operator on the truncated space; agrees with
  // E_B on the algebra generated by the s_i and λ(B).
  Matrix vacuum_expectation(const Matrix& op) const;
  Complex vacuum_trace(const Matrix& op) const;

 private:
  void apply_word_to_omega(const bpoly::BWord& w, Vector& out) const;

  const AlgebraContext* ctx_ = nullptr;
  const CovarianceMatrix* eta_ = nullptr;
  Bimodule bimodule_;
  int depth_ = 0;
  int total_dim_ = 0;
  std::vector<int> level_dims_;
  std::vector<int> level_offsets_;
  std::vector<Matrix> basis_action_;  // λ(b_alpha) on the whole space
  std::vector<Matrix> creation_;      // per index, whole-space matrices
  std::vector<Matrix> semicircular_;
  Matrix level0_onb_;  // dimB × k0: ONB of level 0 in basis coordinates
  Vector omega_;
};

}  // namespace opfree::fock
