#include "opfree/fock.hpp"

#include <cmath>

namespace opfree::fock {

namespace {

// Gram-orthonormal basis of the non-null eigenspace: columns W with W† G W = 1.
// The cutoff is relative to the largest eigenvalue, so the quotient is
// scale-free.
Matrix quotient_onb(const Matrix& gram, double rel_cutoff, double* min_eig = nullptr,
                    double* max_eig = nullptr) {
  if (gram.rows() == 0) {
    if (min_eig) *min_eig = 0.0;
    if (max_eig) *max_eig = 0.0;
    return Matrix(0, 0);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (gram + gram.adjoint()));
  const RealVector evals = es.eigenvalues();
  if (min_eig) *min_eig = evals.minCoeff();
  if (max_eig) *max_eig = evals.maxCoeff();
  const double top = std::max(0.0, evals.maxCoeff());
  const double cutoff = rel_cutoff * std::max(top, 1e-300);
  std::vector<int> keep;
  for (int p = 0; p < evals.size(); ++p)
    if (evals[p] > cutoff) keep.push_back(p);
  Matrix w(gram.rows(), static_cast<Eigen::Index>(keep.size()));
  for (size_t c = 0; c < keep.size(); ++c)
    w.col(static_cast<Eigen::Index>(c)) =
        es.eigenvectors().col(keep[c]) / std::sqrt(evals[keep[c]]);
  return w;
}

}  // namespace

Bimodule build_bimodule(const AlgebraContext& ctx, const CovarianceMatrix& eta) {
  Bimodule bm;
  bm.ctx = &ctx;
  bm.eta = &eta;
  const int dimb = ctx.dim();
  const int m = eta.index_count();
  for (int a = 0; a < dimb; ++a)
    for (int i = 0; i < m; ++i)
      for (int b = 0; b < dimb; ++b) bm.span_labels.push_back(Bimodule::Label{a, i, b});

  const int count = bm.generator_count();
  bm.gram = Matrix(count, count);
  for (int row = 0; row < count; ++row) {
    const auto& [a, i, b] = bm.span_labels[row];
    for (int col = 0; col < count; ++col) {
      const auto& [c, j, d] = bm.span_labels[col];
      const Matrix mid = eta.eta_entry(i, j, ctx.basis()[a].adjoint() * ctx.basis()[c]);
      bm.gram(row, col) =
          ctx.trace(ctx.basis()[b].adjoint() * mid * ctx.basis()[d]);
    }
  }
  bm.quotient = quotient_onb(bm.gram, ctx.tol().gram_null_rel, &bm.gram_min_eig, &bm.gram_max_eig);
  if (bm.gram_min_eig < -ctx.tol().gram_null_rel * std::max(1.0, bm.gram_max_eig))
    throw ValidationError("bimodule: Gram matrix has a negative eigenvalue (eta not CP?)");
  return bm;
}

FockModel::FockModel(const AlgebraContext& ctx, const CovarianceMatrix& eta, int depth,
                     int dim_cap)
    : ctx_(&ctx), eta_(&eta), depth_(depth) {
  if (depth < 1) throw ValidationError("fock: depth must be at least 1");
  bimodule_ = build_bimodule(ctx, eta);

  const int dimb = ctx.dim();
  const int m = eta.index_count();

  // Per-level data in local form first.
  std::vector<std::vector<Matrix>> act(static_cast<size_t>(depth) + 1);   // [level][alpha]
  std::vector<std::vector<Matrix>> create(static_cast<size_t>(depth) + 1);  // [level][i]

  // Level 0: B itself with the tau inner product.
  const Matrix w0 = quotient_onb(ctx.gram(), ctx.tol().gram_null_rel);
  level0_onb_ = w0;
  const int k0 = static_cast<int>(w0.cols());
  level_dims_.push_back(k0);
  act[0].resize(dimb);
  for (int g = 0; g < dimb; ++g)
    act[0][g] = w0.adjoint() * ctx.gram() * ctx.mult_matrix(g) * w0;

  // Precompute coordinates of eta_ij(b_a* b_c).
  std::vector<Vector> pair_coords(static_cast<size_t>(dimb) * m * dimb * m);
  auto pair_index = [dimb, m](int a, int i, int c, int j) {
    return ((static_cast<size_t>(a) * m + i) * dimb + c) * m + j;
  };
  for (int a = 0; a < dimb; ++a)
    for (int i = 0; i < m; ++i)
      for (int c = 0; c < dimb; ++c)
        for (int j = 0; j < m; ++j)
          pair_coords[pair_index(a, i, c, j)] =
              ctx.coords(eta.eta_entry(i, j, ctx.basis()[a].adjoint() * ctx.basis()[c]));

  int total = k0;
  for (int level = 1; level <= depth; ++level) {
    const int kprev = level_dims_.back();
    const int cand = dimb * m * kprev;  // candidates (b_a e_i) ⊗ u_q
    if (total + cand > dim_cap)
      throw SizeLimitError("fock: dimension cap exceeded while building level " +
                           std::to_string(level));

    Matrix gram = Matrix::Zero(cand, cand);
    auto cidx = [m, kprev](int a, int i, int q) { return (a * m + i) * kprev + q; };
    for (int a = 0; a < dimb; ++a)
      for (int i = 0; i < m; ++i)
        for (int c = 0; c < dimb; ++c)
          for (int j = 0; j < m; ++j) {
            const Vector& h = pair_coords[pair_index(a, i, c, j)];
            Matrix blk = Matrix::Zero(kprev, kprev);
            for (int g = 0; g < dimb; ++g)
              if (h[g] != Complex(0.0)) blk += h[g] * act[level - 1][g];
            gram.block(cidx(a, i, 0), cidx(c, j, 0), kprev, kprev) = blk;
          }

    const Matrix w = quotient_onb(gram, ctx.tol().gram_null_rel);
    const int k = static_cast<int>(w.cols());
    level_dims_.push_back(k);
    total += k;

    // Left action on the new level: b_g · ((b_a e_i) ⊗ u) expands the head
    // coefficient through the structure constants.
    act[level].resize(dimb);
    const Matrix gw = gram * w;
    for (int g = 0; g < dimb; ++g) {
      Matrix cand_action = Matrix::Zero(cand, cand);
      const Matrix& mult = ctx.mult_matrix(g);  // coords of b_g b_a
      for (int a = 0; a < dimb; ++a)
        for (int ap = 0; ap < dimb; ++ap) {
          if (mult(ap, a) == Complex(0.0)) continue;
          for (int i = 0; i < m; ++i)
            for (int q = 0; q < kprev; ++q)
              cand_action(cidx(ap, i, q), cidx(a, i, q)) += mult(ap, a);
        }
      act[level][g] = w.adjoint() * gram * cand_action * w;
    }

    // Creation: u_q at level-1 ↦ (1·e_i) ⊗ u_q.
    create[level].resize(m);
    const Vector unit = ctx.unit_coords();
    for (int i = 0; i < m; ++i) {
      Matrix embed = Matrix::Zero(cand, kprev);
      for (int a = 0; a < dimb; ++a)
        if (unit[a] != Complex(0.0))
          for (int q = 0; q < kprev; ++q) embed(cidx(a, i, q), q) = unit[a];
      create[level][i] = w.adjoint() * gram * embed;
    }
  }

  total_dim_ = total;
  level_offsets_.resize(level_dims_.size());
  int off = 0;
  for (size_t lev = 0; lev < level_dims_.size(); ++lev) {
    level_offsets_[lev] = off;
    off += level_dims_[lev];
  }

  basis_action_.assign(dimb, Matrix::Zero(total, total));
  for (int g = 0; g < dimb; ++g)
    for (int lev = 0; lev <= depth; ++lev)
      basis_action_[g].block(level_offsets_[lev], level_offsets_[lev], level_dims_[lev],
                             level_dims_[lev]) = act[lev][g];

  creation_.assign(m, Matrix::Zero(total, total));
  for (int i = 0; i < m; ++i)
    for (int lev = 1; lev <= depth; ++lev)
      creation_[i].block(level_offsets_[lev], level_offsets_[lev - 1], level_dims_[lev],
                         level_dims_[lev - 1]) = create[lev][i];

  semicircular_.clear();
  for (int i = 0; i < m; ++i)
    semicircular_.push_back(creation_[i] + creation_[i].adjoint());

  omega_ = Vector::Zero(total);
  omega_.head(k0) = w0.adjoint() * ctx.gram() * ctx.unit_coords();
}

Matrix FockModel::act(const Matrix& b) const {
  const Vector c = ctx_->coords(b);
  Matrix out = Matrix::Zero(total_dim_, total_dim_);
  for (int g = 0; g < ctx_->dim(); ++g)
    if (c[g] != Complex(0.0)) out += c[g] * basis_action_[g];
  return out;
}

Matrix FockModel::read_level0(const Vector& v) const {
  return ctx_->from_coords(level0_onb_ * v.head(level_dims_[0]));
}

void FockModel::apply_word_to_omega(const bpoly::BWord& w, Vector& out) const {
  Vector v = omega_;
  auto apply_coeff = [&](const Matrix& b) {
    const Vector c = ctx_->coords(b);
    Vector next = Vector::Zero(total_dim_);
    for (int g = 0; g < ctx_->dim(); ++g)
      if (c[g] != Complex(0.0)) next += c[g] * (basis_action_[g] * v);
    v = std::move(next);
  };
  apply_coeff(w.coeffs.back());
  for (int k = w.degree() - 1; k >= 0; --k) {
    v = semicircular_[w.letters[k]] * v;
    apply_coeff(w.coeffs[k]);
  }
  out += v;
}

Matrix FockModel::expectation(const bpoly::BPolynomial& p) const {
  for (const auto& w : p.terms())
    if (w.degree() > exact_degree())
      throw ExactnessError("fock expectation: word degree " + std::to_string(w.degree()) +
                           " exceeds the exactness bound " + std::to_string(exact_degree()));
  Vector acc = Vector::Zero(total_dim_);
  for (const auto& w : p.terms()) apply_word_to_omega(w, acc);
  return read_level0(acc);
}

Complex FockModel::trace_of(const bpoly::BPolynomial& p) const {
  return ctx_->trace(expectation(p));
}

Matrix FockModel::evaluate(const bpoly::BPolynomial& p) const {
  Matrix acc = Matrix::Zero(total_dim_, total_dim_);
  for (const auto& w : p.terms()) {
    Matrix op = act(w.coeffs[0]);
    for (int k = 0; k < w.degree(); ++k)
      op = op * semicircular_[w.letters[k]] * act(w.coeffs[k + 1]);
    acc += op;
  }
  return acc;
}

double FockModel::operator_norm_estimate(const bpoly::BPolynomial& p) const {
  const Matrix op = evaluate(p);
  if (op.size() == 0) return 0.0;
  return op.operatorNorm();
}

Matrix FockModel::vacuum_expectation(const Matrix& op) const {
  return read_level0(op * omega_);
}

Complex FockModel::vacuum_trace(const Matrix& op) const {
  return omega_.dot(op * omega_);
}

}  // namespace opfree::fock
