#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "opfree/matalg.hpp"

namespace opfree::bpoly {

using matalg::AlgebraContext;

// One word b_0 x_{i_1} b_1 ... x_{i_d} b_d: d+1 coefficient matrices in B and
// d letter indices.
struct BWord {
  std::vector<Matrix> coeffs;
  std::vector<int> letters;

  int degree() const { return static_cast<int>(letters.size()); }
};

// Formal sum of words. Words are kept factored for evaluation; the canonical
// form (letter sequence -> dense coefficient tensor over the basis of B)
// backs equality checks and normalization.
class BPolynomial {
 public:
  BPolynomial() = default;
  explicit BPolynomial(const AlgebraContext& ctx) : ctx_(&ctx) {}

  static BPolynomial zero(const AlgebraContext& ctx) { return BPolynomial(ctx); }
  static BPolynomial constant(const AlgebraContext& ctx, Matrix b);
  static BPolynomial one(const AlgebraContext& ctx);
  static BPolynomial letter(const AlgebraContext& ctx, int i);  // x_i
  static BPolynomial word(const AlgebraContext& ctx, BWord w);

  const AlgebraContext& ctx() const;
  const std::vector<BWord>& terms() const { return terms_; }
  bool has_context() const { return ctx_ != nullptr; }
  int degree() const;  // max word degree; 0 for the zero polynomial

  BPolynomial operator+(const BPolynomial& o) const;
  BPolynomial operator-(const BPolynomial& o) const;
  BPolynomial operator*(const BPolynomial& o) const;
  BPolynomial operator*(const Complex& s) const;
  BPolynomial left_mul(const Matrix& b) const;   // b · p
  BPolynomial right_mul(const Matrix& b) const;  // p · b
  BPolynomial adjoint() const;

  // letters -> flattened coefficient tensor of size dimB^(d+1).
  using Canonical = std::map<std::vector<int>, Vector>;
  Canonical canonical() const;
  bool is_zero() const;

  // Drops words whose canonical tensor vanishes below tolerance; merging of
  // identical letter sequences happens in the canonical form itself.
  BPolynomial normalized() const;

  static double max_defect(const Canonical& a, const Canonical& b);
  double defect_against(const BPolynomial& o) const;

  // Evaluation at a matrix tuple: coefficients b map to b ⊗ 1_r, the letter i
  // maps to point[i] acting on C^n ⊗ C^r.
  Matrix evaluate(const std::vector<Matrix>& point) const;

  std::string to_string(const std::map<std::string, Matrix>* names = nullptr) const;

 private:
  const AlgebraContext* ctx_ = nullptr;
  std::vector<BWord> terms_;
};

// Formal sums p · e_i · q with polynomial factors.
struct DerivTerm {
  BPolynomial left;
  int index = 0;
  BPolynomial right;
};

class DerivTensor {
 public:
  DerivTensor() = default;
  explicit DerivTensor(const AlgebraContext& ctx) : ctx_(&ctx) {}
  static DerivTensor elementary(const AlgebraContext& ctx, int i);  // 1 · e_i · 1

  const AlgebraContext& ctx() const;
  const std::vector<DerivTerm>& terms() const { return terms_; }
  void add_term(DerivTerm t);

  DerivTensor operator+(const DerivTensor& o) const;
  DerivTensor operator-(const DerivTensor& o) const;
  DerivTensor operator*(const Complex& s) const;
  DerivTensor left_mul(const BPolynomial& p) const;   // p · ξ
  DerivTensor right_mul(const BPolynomial& q) const;  // ξ · q

  // (lettersL, i, lettersR) -> joint coefficient tensor.
  using Key = std::tuple<std::vector<int>, int, std::vector<int>>;
  using Canonical = std::map<Key, Vector>;
  Canonical canonical() const;
  bool is_zero() const;
  double defect_against(const DerivTensor& o) const;

 private:
  const AlgebraContext* ctx_ = nullptr;
  std::vector<DerivTerm> terms_;
};

// ∂_η: ∂(b)=0, ∂(x_i)=e_i, Leibniz; on a word, the sum over letter positions.
DerivTensor eta_derivative(const BPolynomial& p);

// J(p e_i q) = q* e_i p*; conjugate linear, J² = id, J∂(p) = ∂(p*).
DerivTensor conjugation_J(const DerivTensor& xi);

// Self-adjoint affine pencil over k×k matrices of B-coefficients, with
// p = -u Q^{-1} v for L = [[0,u],[v,Q]]. Entries are affine in the letters;
// with noncommuting coefficients the letter part of an entry is one-sided,
// either b·x_i (stored in coeff[1+i]) or x_i·b (stored in right_coeff[i]).
// Self-adjointness of the pencil is right_coeff[i] == coeff[1+i]^†.
struct LinearPencil {
  int k = 0;            // pencil dimension (block count)
  int index_count = 0;  // number of letters covered
  int block_dim = 0;    // ambient dim of B-coefficients
  std::vector<Matrix> coeff;        // coeff[0] constant part, coeff[1+i] left forms; (k·n)²
  std::vector<Matrix> right_coeff;  // right forms per letter; (k·n)²

  Matrix evaluate(const std::vector<Matrix>& point) const;    // L(X)
  Matrix schur_eval(const std::vector<Matrix>& point) const;  // -U Q(X)^{-1} V
  double self_adjoint_defect() const;
};

// Anderson linearization via monomial splitting plus symmetrization. k is not
// minimal; correctness is the Schur-complement identity only.
LinearPencil linearize(const BPolynomial& p, int index_count, bool require_self_adjoint = true);

// Parser for the textual polynomial format "b0 * x1 * b1 + ...". Coefficient
// names resolve through `names`; bare real/complex literals act as scalars.
BPolynomial parse_polynomial(const AlgebraContext& ctx, const std::string& text,
                             const std::map<std::string, Matrix>& names);

}  // namespace opfree::bpoly
