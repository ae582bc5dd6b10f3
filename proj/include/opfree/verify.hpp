#pragma once

#include <vector>

#include "opfree/cumulant.hpp"
#include "opfree/fock.hpp"
#include "opfree/report.hpp"

namespace opfree::verify {

using bpoly::BPolynomial;
using bpoly::DerivTensor;
using fock::FockModel;

// Scalar pairing ⟨p1 e_i q1, p2 e_j q2⟩ = tau(q1* η_ij(E_B(p1* p2)) q2), with
// E_B from the Fock model; sesquilinear, conjugate-linear in the first slot.
Complex pair_l2(const FockModel& model, const DerivTensor& u, const DerivTensor& v);

// Tensors with operator coefficients (used for kernel projections).
struct MatrixTensor {
  struct Term {
    Matrix left;
    int index = 0;
    Matrix right;
  };
  std::vector<Term> terms;
};
Complex pair_l2(const FockModel& model, const MatrixTensor& u, const MatrixTensor& v);

// M-valued inner product ⟨u | v⟩_M = Σ q1* η_ij(E_B(p1* p2)) q2 as a polynomial.
BPolynomial m_inner(const FockModel& model, const DerivTensor& u, const DerivTensor& v);

// ∂*(p e_i q) = p ∂*(e_i) q − ⟨J∂(p)|e_i⟩_M q − p ⟨J(e_i)|∂(q)⟩_M, extended
// linearly, with the base case ∂*(e_i) = s_i. Valid in the semicircular model,
// where the family is a conjugate system for itself.
BPolynomial deriv_adjoint(const FockModel& model, const DerivTensor& xi);

struct IbpOutcome {
  report::Report rep;
  int first_fail_degree = -1;
};

// ⟨ξ_i, p⟩_tau against the expanded pairing Σ_k tau(η_{i j_k}(E_B(left)) E_B(right))
// over every monomial of degree ≤ degree with basis coefficients, plus a few
// seeded random-coefficient words per degree when an rng is supplied.
IbpOutcome check_integration_by_parts(const FockModel& model,
                                      const std::vector<BPolynomial>& xi, int degree,
                                      double tolerance, Rng* rng = nullptr);

// Adjoint formula (via its defining adjointness property) plus the shuffle
// identity ⟨∂*(p e_i), ∂*(q e_j)⟩ = ⟨∂*(e_i), ∂*(p* q e_j)⟩.
report::Report check_adjoint_formula(const FockModel& model, int pq_degree, int r_degree,
                                     double tolerance, Rng& rng);

// ‖∂*(p e_i)‖ ≤ ‖∂*(e_i)‖·‖p‖ with the truncated norm estimate; violations
// within the slack factor are warnings (the estimate is a lower bound).
report::Report check_norm_bound(const FockModel& model, const std::vector<BPolynomial>& ps,
                                double slack);

// J as an isometry: ⟨Ju, Jv⟩ = conj ⟨v, u⟩.
report::Report check_j_isometry(const FockModel& model, int samples, double tolerance, Rng& rng);

// ⟨x1 s_i y1, x2 s_j y2⟩ computed in the model equals the e_i-pairing, for
// words x, y over `word_letters` and s from `pair_letters` (block-free).
report::Report check_psi_isometry(const FockModel& model, const std::vector<int>& word_letters,
                                  const std::vector<int>& pair_letters, int word_degree,
                                  double tolerance);

// P u = 0 and P* v = 0 force v ∂(P) u = 0; kernels via singular-value cutoff.
report::Report check_kernel_annihilation(const FockModel& model, const BPolynomial& P,
                                         double tolerance);

// Fock expectation against the non-crossing pair-partition oracle on every
// word of degree ≤ degree over a coefficient basis.
report::Report check_oracle_equivalence(const FockModel& model, int degree, double tolerance);

// tau(ab) = tau(ba) on random words (requires a tau-symmetric covariance).
report::Report check_traciality(const FockModel& model, int word_degree, int samples,
                                double tolerance, Rng& rng);

}  // namespace opfree::verify
