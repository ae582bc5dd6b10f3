#pragma once

#include <utility>
#include <vector>

#include "opfree/matalg.hpp"

namespace opfree::covmap {

using matalg::AlgebraContext;

struct CovReport {
  double choi_min_eig = 0.0;     // minimum eigenvalue of the Choi matrix of eta∘E_B
  double tau_symmetry_defect = 0.0;
  double image_defect = 0.0;     // worst ||(1-E_B) eta_ij(b)|| over the basis
  bool completely_positive(double slack) const { return choi_min_eig >= -slack; }
  bool tau_symmetric(double tol) const { return tau_symmetry_defect <= tol; }
};

// eta: B -> B ⊗ M_|I|(C), stored as Kraus operators K_m (eta(b) = Σ K_m b K_m†)
// plus the per-entry coordinate maps eta_ij: B -> B in the basis of B. Ambient
// inputs are first pushed through E_B (the eta := eta∘E_B convention).
// Immutable after construction.
class CovarianceMatrix {
 public:
  // Kraus parametrization: each K is (n·|I|)×n. CP by construction; the
  // B-into-B image requirement is validated and a defect above tolerance is a
  // construction error.
  static CovarianceMatrix from_kraus(const AlgebraContext& ctx, int index_count,
                                     std::vector<Matrix> kraus);

  // eta_ij = δ_ij E_B.
  static CovarianceMatrix diagonal_expectation(const AlgebraContext& ctx, int index_count);

  // Entrywise table constructor for adversarial/validation tests: entry (i,j)
  // is the coordinate matrix of eta_ij on B. No CP guarantee; Kraus data is
  // synthesized from the Choi matrix only when the map is CP.
  static CovarianceMatrix from_table(const AlgebraContext& ctx, int index_count,
                                     std::vector<std::vector<Matrix>> entry_coords);

  const AlgebraContext& ctx() const { return *ctx_; }
  int index_count() const { return m_; }

  // eta_ij(E_B(b)) as an element of B.
  Matrix eta_entry(int i, int j, const Matrix& b) const;
  const Matrix& entry_coords(int i, int j) const;  // dimB × dimB coordinate map

  // The block matrix (eta_ij(1)) in M_{n|I|}(C).
  Matrix eta_of_unit() const;

  CovReport check_tau_symmetric() const;
  CovReport check_completely_positive() const;
  double image_defect() const { return image_defect_; }
  const std::vector<Matrix>& kraus() const { return kraus_; }

  // η̃_ij = ½(η_ij + η_ji^t) with the transpose taken against the bilinear
  // pairing (a,b) ↦ tau(ab) on B. τ-symmetric by construction; CP is
  // re-validated in the attached report and may fail.
  std::pair<CovarianceMatrix, CovReport> symmetrized() const;

  CovarianceMatrix scaled(double t) const;  // t ≥ 0
  static CovarianceMatrix sum(const CovarianceMatrix& a, const CovarianceMatrix& b);
  static CovarianceMatrix block_diagonal(const CovarianceMatrix& a, const CovarianceMatrix& b);

 private:
  CovarianceMatrix() = default;
  void rebuild_kraus_from_choi();
  Matrix choi_matrix() const;  // Choi of eta∘E_B : M_n -> M_{n|I|}

  const AlgebraContext* ctx_ = nullptr;
  int m_ = 0;
  std::vector<Matrix> kraus_;                  // empty when not available (non-CP table)
  std::vector<std::vector<Matrix>> coords_;    // coords_[i][j]: dimB×dimB
  double image_defect_ = 0.0;
};

}  // namespace opfree::covmap
