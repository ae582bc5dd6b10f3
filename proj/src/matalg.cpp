#include "opfree/matalg.hpp"

#include <cmath>
#include <numeric>

namespace opfree::matalg {

bool SubalgebraReport::passed(double tol) const {
  return unit_defect <= tol && adjoint_defect <= tol && product_defect <= tol &&
         tracial_defect <= tol && gram_min_eig > 0.0;
}

std::vector<std::string> SubalgebraReport::failures(double tol) const {
  std::vector<std::string> out;
  if (unit_defect > tol) out.push_back("unit-membership");
  if (adjoint_defect > tol) out.push_back("adjoint-closure");
  if (product_defect > tol) out.push_back("product-closure");
  if (tracial_defect > tol) out.push_back("trace-traciality-on-B");
  if (gram_min_eig <= 0.0) out.push_back("gram-positive-definite");
  if (gram_conditioning_warning) out.push_back("gram-conditioning-warning");
  return out;
}

AlgebraContext AlgebraContext::multi_matrix(const std::vector<std::pair<int, int>>& blocks,
                                            const std::vector<double>& block_weights,
                                            Tolerances tol) {
  if (blocks.empty()) throw ValidationError("multi_matrix: no blocks");
  if (!block_weights.empty() && block_weights.size() != blocks.size())
    throw ValidationError("multi_matrix: block weight count mismatch");

  int n = 0;
  for (auto [size, mult] : blocks) {
    if (size < 1 || mult < 1) throw ValidationError("multi_matrix: invalid block shape");
    n += size * mult;
  }

  std::vector<double> w(blocks.size(), 1.0);
  if (!block_weights.empty()) w = block_weights;
  double total = 0.0;
  for (size_t j = 0; j < blocks.size(); ++j) {
    if (w[j] <= 0.0) throw ValidationError("multi_matrix: trace weights must be positive");
    if (block_weights.empty()) w[j] = static_cast<double>(blocks[j].first * blocks[j].second) / n;
    total += w[j];
  }
  for (auto& x : w) x /= total;

  AlgebraContext ctx;
  ctx.n_ = n;
  ctx.tol_ = tol;
  ctx.weights_ = RealVector::Zero(n);

  int offset = 0;
  for (size_t j = 0; j < blocks.size(); ++j) {
    const int k = blocks[j].first;
    const int m = blocks[j].second;
    const double entry_weight = w[j] / (k * m);
    for (int p = 0; p < k; ++p)
      for (int t = 0; t < m; ++t) ctx.weights_[offset + p * m + t] = entry_weight;
    // Basis of the block: matrix units of M_k, amplified with multiplicity m.
    for (int p = 0; p < k; ++p) {
      for (int q = 0; q < k; ++q) {
        Matrix b = Matrix::Zero(n, n);
        for (int t = 0; t < m; ++t) b(offset + p * m + t, offset + q * m + t) = 1.0;
        ctx.basis_.push_back(std::move(b));
      }
    }
    offset += k * m;
  }
  ctx.finalize();
  return ctx;
}

AlgebraContext AlgebraContext::from_basis(int ambient_dim, std::vector<Matrix> basis,
                                          RealVector diag_weights, Tolerances tol) {
  if (ambient_dim < 1) throw ValidationError("from_basis: ambient dimension must be positive");
  if (basis.empty()) throw ValidationError("from_basis: empty basis");
  for (const auto& b : basis)
    if (b.rows() != ambient_dim || b.cols() != ambient_dim)
      throw ValidationError("from_basis: basis matrix dimension mismatch");

  AlgebraContext ctx;
  ctx.n_ = ambient_dim;
  ctx.tol_ = tol;
  if (diag_weights.size() == 0) {
    ctx.weights_ = RealVector::Constant(ambient_dim, 1.0 / ambient_dim);
  } else {
    if (diag_weights.size() != ambient_dim)
      throw ValidationError("from_basis: trace weight count mismatch");
    if (diag_weights.minCoeff() <= 0.0)
      throw ValidationError("from_basis: trace weights must be positive");
    ctx.weights_ = diag_weights / diag_weights.sum();
  }
  ctx.basis_ = std::move(basis);
  ctx.finalize();
  return ctx;
}

void AlgebraContext::finalize() {
  const int dimb = dim();
  gram_ = Matrix(dimb, dimb);
  for (int a = 0; a < dimb; ++a)
    for (int b = 0; b < dimb; ++b) gram_(a, b) = trace(basis_[a].adjoint() * basis_[b]);
  gram_ = 0.5 * (gram_ + gram_.adjoint().eval());

  Eigen::SelfAdjointEigenSolver<Matrix> es(gram_);
  const RealVector evals = es.eigenvalues();
  report_.gram_min_eig = evals.minCoeff();
  report_.gram_max_eig = evals.maxCoeff();
  report_.gram_conditioning_warning =
      report_.gram_min_eig < 1e-12 * std::max(report_.gram_max_eig, 1.0);
  if (report_.gram_max_eig <= 0.0)
    throw ValidationError("AlgebraContext: basis spans nothing");
  // Pseudo-inverse beyond the conditioning cutoff: a near-duplicate basis
  // vector degrades to a warning instead of blocking construction.
  const double cutoff = 1e-14 * report_.gram_max_eig;
  RealVector inv = evals;
  for (int i = 0; i < inv.size(); ++i) inv[i] = evals[i] > cutoff ? 1.0 / evals[i] : 0.0;
  gram_inv_ = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();

  unit_coords_ = coords(Matrix::Identity(n_, n_));

  mult_.resize(dimb);
  for (int a = 0; a < dimb; ++a) {
    Matrix cols(dimb, dimb);
    for (int b = 0; b < dimb; ++b) cols.col(b) = coords(basis_[a] * basis_[b]);
    mult_[a] = std::move(cols);
  }
  adjoint_ = Matrix(dimb, dimb);
  for (int a = 0; a < dimb; ++a) adjoint_.col(a) = coords(basis_[a].adjoint());

  report_.unit_defect = (from_coords(unit_coords_) - Matrix::Identity(n_, n_)).norm();
  double adj = 0.0, prod = 0.0, trc = 0.0;
  for (int a = 0; a < dimb; ++a) {
    const Matrix astar = basis_[a].adjoint();
    adj = std::max(adj, (conditional_expectation(astar) - astar).norm());
    for (int b = 0; b < dimb; ++b) {
      const Matrix ab = basis_[a] * basis_[b];
      prod = std::max(prod, (conditional_expectation(ab) - ab).norm());
      trc = std::max(trc, std::abs(trace(ab) - trace(basis_[b] * basis_[a])));
    }
  }
  report_.adjoint_defect = adj;
  report_.product_defect = prod;
  report_.tracial_defect = trc;
}

Complex AlgebraContext::trace(const Matrix& a) const {
  if (a.rows() != n_ || a.cols() != n_)
    throw ValidationError("trace: ambient dimension mismatch");
  Complex acc = 0.0;
  for (int i = 0; i < n_; ++i) acc += weights_[i] * a(i, i);
  return acc;
}

double AlgebraContext::tau_norm(const Matrix& a) const {
  return std::sqrt(std::max(0.0, trace(a.adjoint() * a).real()));
}

Vector AlgebraContext::coords(const Matrix& a) const {
  if (a.rows() != n_ || a.cols() != n_)
    throw ValidationError("coords: ambient dimension mismatch");
  Vector v(dim());
  for (int b = 0; b < dim(); ++b) v[b] = trace(basis_[b].adjoint() * a);
  return gram_inv_ * v;
}

Matrix AlgebraContext::from_coords(const Vector& c) const {
  if (c.size() != dim()) throw ValidationError("from_coords: coordinate size mismatch");
  Matrix out = Matrix::Zero(n_, n_);
  for (int b = 0; b < dim(); ++b) out += c[b] * basis_[b];
  return out;
}

Matrix AlgebraContext::conditional_expectation(const Matrix& a) const {
  return from_coords(coords(a));
}

Vector AlgebraContext::product_coords(const Vector& x, const Vector& y) const {
  Vector out = Vector::Zero(dim());
  for (int a = 0; a < dim(); ++a)
    if (x[a] != Complex(0.0)) out += x[a] * (mult_[a] * y);
  return out;
}

Vector AlgebraContext::adjoint_coords(const Vector& x) const {
  return adjoint_ * x.conjugate();
}

Matrix AlgebraContext::random_element(Rng& rng) const {
  Matrix out = Matrix::Zero(n_, n_);
  for (const auto& b : basis_) out += rng.cplx() * b;
  return out;
}

Matrix AlgebraContext::random_self_adjoint_element(Rng& rng) const {
  Matrix a = random_element(rng);
  return 0.5 * (a + a.adjoint());
}

}  // namespace opfree::matalg
