#include "opfree/covmap.hpp"

#include <cmath>

namespace opfree::covmap {

namespace {

Matrix block_of(const Matrix& big, int i, int j, int n) {
  return big.block(i * n, j * n, n, n);
}

}  // namespace

CovarianceMatrix CovarianceMatrix::from_kraus(const AlgebraContext& ctx, int index_count,
                                              std::vector<Matrix> kraus) {
  if (index_count < 1) throw ValidationError("covariance: index_count must be positive");
  const int n = ctx.ambient_dim();
  for (const auto& k : kraus)
    if (k.rows() != static_cast<Eigen::Index>(n) * index_count || k.cols() != n)
      throw ValidationError("covariance: Kraus operator must be (n·|I|)×n");

  CovarianceMatrix cov;
  cov.ctx_ = &ctx;
  cov.m_ = index_count;
  cov.kraus_ = std::move(kraus);
  cov.coords_.assign(index_count, std::vector<Matrix>(index_count));

  const int dimb = ctx.dim();
  double defect = 0.0;
  std::vector<Matrix> images(dimb);  // eta(b_beta), full (n m)×(n m)
  for (int beta = 0; beta < dimb; ++beta) {
    Matrix full = Matrix::Zero(n * index_count, n * index_count);
    for (const auto& k : cov.kraus_) full += k * ctx.basis()[beta] * k.adjoint();
    images[beta] = std::move(full);
  }
  for (int i = 0; i < index_count; ++i) {
    for (int j = 0; j < index_count; ++j) {
      Matrix nm(dimb, dimb);
      for (int beta = 0; beta < dimb; ++beta) {
        const Matrix blk = block_of(images[beta], i, j, n);
        const Vector c = ctx.coords(blk);
        defect = std::max(defect, (blk - ctx.from_coords(c)).norm());
        nm.col(beta) = c;
      }
      cov.coords_[i][j] = std::move(nm);
    }
  }
  cov.image_defect_ = defect;
  if (defect > ctx.tol().equality)
    throw ValidationError("covariance: eta does not map B into B (image defect " +
                          std::to_string(defect) + ")");
  return cov;
}

CovarianceMatrix CovarianceMatrix::diagonal_expectation(const AlgebraContext& ctx,
                                                        int index_count) {
  // Kraus form of E_B from the Choi eigendecomposition, then one copy per index.
  const int n = ctx.ambient_dim();
  Matrix choi = Matrix::Zero(n * n, n * n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      Matrix ekl = Matrix::Zero(n, n);
      ekl(k, l) = 1.0;
      choi += kron(ekl, ctx.conditional_expectation(ekl));
    }
  }
  choi = 0.5 * (choi + choi.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Matrix> es(choi);
  std::vector<Matrix> eb_kraus;
  const double cutoff = 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff());
  for (int p = 0; p < es.eigenvalues().size(); ++p) {
    if (es.eigenvalues()[p] <= cutoff) continue;
    Matrix k(n, n);  // column-stacked eigenvector scaled by sqrt(eigenvalue)
    const Vector v = std::sqrt(es.eigenvalues()[p]) * es.eigenvectors().col(p);
    for (int col = 0; col < n; ++col) k.col(col) = v.segment(col * n, n);
    eb_kraus.push_back(std::move(k));
  }
  std::vector<Matrix> kraus;
  for (int i = 0; i < index_count; ++i) {
    for (const auto& k : eb_kraus) {
      Matrix big = Matrix::Zero(n * index_count, n);
      big.block(i * n, 0, n, n) = k;
      kraus.push_back(std::move(big));
    }
  }
  return from_kraus(ctx, index_count, std::move(kraus));
}

CovarianceMatrix CovarianceMatrix::from_table(const AlgebraContext& ctx, int index_count,
                                              std::vector<std::vector<Matrix>> entry_coords) {
  if (index_count < 1) throw ValidationError("covariance: index_count must be positive");
  if (static_cast<int>(entry_coords.size()) != index_count)
    throw ValidationError("covariance: entry table shape mismatch");
  for (const auto& row : entry_coords) {
    if (static_cast<int>(row.size()) != index_count)
      throw ValidationError("covariance: entry table shape mismatch");
    for (const auto& e : row)
      if (e.rows() != ctx.dim() || e.cols() != ctx.dim())
        throw ValidationError("covariance: entry coordinate map must be dimB×dimB");
  }
  CovarianceMatrix cov;
  cov.ctx_ = &ctx;
  cov.m_ = index_count;
  cov.coords_ = std::move(entry_coords);
  cov.image_defect_ = 0.0;  // coordinate maps land in B by construction
  cov.rebuild_kraus_from_choi();
  return cov;
}

const Matrix& CovarianceMatrix::entry_coords(int i, int j) const {
  if (i < 0 || i >= m_ || j < 0 || j >= m_)
    throw ValidationError("eta entry: index out of range");
  return coords_[i][j];
}

Matrix CovarianceMatrix::eta_entry(int i, int j, const Matrix& b) const {
  const Vector c = ctx_->coords(b);  // applies E_B
  return ctx_->from_coords(entry_coords(i, j) * c);
}

Matrix CovarianceMatrix::eta_of_unit() const {
  const int n = ctx_->ambient_dim();
  Matrix out = Matrix::Zero(n * m_, n * m_);
  const Vector one = ctx_->unit_coords();
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j)
      out.block(i * n, j * n, n, n) = ctx_->from_coords(coords_[i][j] * one);
  return out;
}

CovReport CovarianceMatrix::check_tau_symmetric() const {
  CovReport rep;
  rep.image_defect = image_defect_;
  const auto& basis = ctx_->basis();
  double worst = 0.0;
  for (int i = 0; i < m_; ++i) {
    for (int j = 0; j < m_; ++j) {
      for (size_t a = 0; a < basis.size(); ++a) {
        const Matrix eij_a = eta_entry(i, j, basis[a]);
        for (size_t b = 0; b < basis.size(); ++b) {
          const Matrix eji_b = eta_entry(j, i, basis[b]);
          const Complex lhs = ctx_->trace(eij_a * basis[b]);
          const Complex rhs = ctx_->trace(basis[a] * eji_b);
          worst = std::max(worst, std::abs(lhs - rhs));
        }
      }
    }
  }
  rep.tau_symmetry_defect = worst;
  return rep;
}

Matrix CovarianceMatrix::choi_matrix() const {
  const int n = ctx_->ambient_dim();
  const int nm = n * m_;
  Matrix choi = Matrix::Zero(n * nm, n * nm);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      Matrix ekl = Matrix::Zero(n, n);
      ekl(k, l) = 1.0;
      const Vector c = ctx_->coords(ekl);
      Matrix image = Matrix::Zero(nm, nm);
      for (int i = 0; i < m_; ++i)
        for (int j = 0; j < m_; ++j)
          image.block(i * n, j * n, n, n) = ctx_->from_coords(coords_[i][j] * c);
      choi += kron(ekl, image);
    }
  }
  return 0.5 * (choi + choi.adjoint().eval());
}

CovReport CovarianceMatrix::check_completely_positive() const {
  CovReport rep;
  rep.image_defect = image_defect_;
  Eigen::SelfAdjointEigenSolver<Matrix> es(choi_matrix());
  rep.choi_min_eig = es.eigenvalues().minCoeff();
  return rep;
}

void CovarianceMatrix::rebuild_kraus_from_choi() {
  kraus_.clear();
  const int n = ctx_->ambient_dim();
  const int nm = n * m_;
  const Matrix choi = choi_matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> es(choi);
  const double max_eig = std::max(1e-300, es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -ctx_->tol().gram_null_rel * std::max(1.0, max_eig))
    return;  // not CP: leave the Kraus list empty
  for (int p = 0; p < es.eigenvalues().size(); ++p) {
    if (es.eigenvalues()[p] <= 1e-12 * std::max(1.0, max_eig)) continue;
    const Vector v = std::sqrt(std::max(0.0, es.eigenvalues()[p])) * es.eigenvectors().col(p);
    Matrix k(nm, n);  // Choi eigenvector reshaped: v = Σ_col e_col ⊗ k.col(col)
    for (int col = 0; col < n; ++col) k.col(col) = v.segment(col * nm, nm);
    kraus_.push_back(std::move(k));
  }
}

std::pair<CovarianceMatrix, CovReport> CovarianceMatrix::symmetrized() const {
  const int dimb = ctx_->dim();
  // Bilinear pairing P_ab = tau(b_a b_b); the transpose of N against P is P^{-1} N^T P.
  Matrix pairing(dimb, dimb);
  for (int a = 0; a < dimb; ++a)
    for (int b = 0; b < dimb; ++b)
      pairing(a, b) = ctx_->trace(ctx_->basis()[a] * ctx_->basis()[b]);
  const Matrix pairing_inv = pairing.fullPivLu().inverse();

  std::vector<std::vector<Matrix>> out(m_, std::vector<Matrix>(m_));
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j)
      out[i][j] = 0.5 * (coords_[i][j] +
                         pairing_inv * coords_[j][i].transpose() * pairing);

  CovarianceMatrix sym;
  sym.ctx_ = ctx_;
  sym.m_ = m_;
  sym.coords_ = std::move(out);
  sym.image_defect_ = image_defect_;
  sym.rebuild_kraus_from_choi();

  CovReport rep = sym.check_completely_positive();
  rep.tau_symmetry_defect = sym.check_tau_symmetric().tau_symmetry_defect;
  return {std::move(sym), rep};
}

CovarianceMatrix CovarianceMatrix::scaled(double t) const {
  if (t < 0.0) throw ValidationError("covariance: scale must be nonnegative");
  CovarianceMatrix out;
  out.ctx_ = ctx_;
  out.m_ = m_;
  out.image_defect_ = image_defect_;
  out.coords_.assign(m_, std::vector<Matrix>(m_));
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j) out.coords_[i][j] = t * coords_[i][j];
  const double root = std::sqrt(t);
  for (const auto& k : kraus_) out.kraus_.push_back(root * k);
  return out;
}

CovarianceMatrix CovarianceMatrix::sum(const CovarianceMatrix& a, const CovarianceMatrix& b) {
  if (a.ctx_ != b.ctx_ || a.m_ != b.m_)
    throw ValidationError("covariance sum: context or index mismatch");
  CovarianceMatrix out;
  out.ctx_ = a.ctx_;
  out.m_ = a.m_;
  out.image_defect_ = std::max(a.image_defect_, b.image_defect_);
  out.coords_.assign(a.m_, std::vector<Matrix>(a.m_));
  for (int i = 0; i < a.m_; ++i)
    for (int j = 0; j < a.m_; ++j) out.coords_[i][j] = a.coords_[i][j] + b.coords_[i][j];
  if (!a.kraus_.empty() && !b.kraus_.empty()) {
    out.kraus_ = a.kraus_;
    out.kraus_.insert(out.kraus_.end(), b.kraus_.begin(), b.kraus_.end());
  }
  return out;
}

CovarianceMatrix CovarianceMatrix::block_diagonal(const CovarianceMatrix& a,
                                                  const CovarianceMatrix& b) {
  if (a.ctx_ != b.ctx_) throw ValidationError("covariance block sum: context mismatch");
  const int n = a.ctx_->ambient_dim();
  const int m = a.m_ + b.m_;
  CovarianceMatrix out;
  out.ctx_ = a.ctx_;
  out.m_ = m;
  out.image_defect_ = std::max(a.image_defect_, b.image_defect_);
  const int dimb = a.ctx_->dim();
  out.coords_.assign(m, std::vector<Matrix>(m, Matrix::Zero(dimb, dimb)));
  for (int i = 0; i < a.m_; ++i)
    for (int j = 0; j < a.m_; ++j) out.coords_[i][j] = a.coords_[i][j];
  for (int i = 0; i < b.m_; ++i)
    for (int j = 0; j < b.m_; ++j) out.coords_[a.m_ + i][a.m_ + j] = b.coords_[i][j];
  for (const auto& k : a.kraus_) {
    Matrix big = Matrix::Zero(n * m, n);
    big.topRows(n * a.m_) = k;
    out.kraus_.push_back(std::move(big));
  }
  for (const auto& k : b.kraus_) {
    Matrix big = Matrix::Zero(n * m, n);
    big.bottomRows(n * b.m_) = k;
    out.kraus_.push_back(std::move(big));
  }
  return out;
}

}  // namespace opfree::covmap
