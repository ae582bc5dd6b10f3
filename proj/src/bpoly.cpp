#include "opfree/bpoly.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace opfree::bpoly {

namespace {

// Flattened outer product of the per-coefficient coordinate vectors; the first
// coefficient is the most significant index.
Vector word_tensor(const AlgebraContext& ctx, const BWord& w) {
  const int dimb = ctx.dim();
  Vector t = Vector::Ones(1);
  for (const auto& c : w.coeffs) {
    const Vector x = ctx.coords(c);
    Vector next(t.size() * dimb);
    for (Eigen::Index a = 0; a < t.size(); ++a)
      next.segment(a * dimb, dimb) = t[a] * x;
    t = std::move(next);
  }
  return t;
}

void accumulate(Vector& dst, const Vector& src) {
  if (dst.size() == 0)
    dst = src;
  else
    dst += src;
}

bool tensor_negligible(const Vector& t, double tol) {
  return t.size() == 0 || t.cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

BPolynomial BPolynomial::constant(const AlgebraContext& ctx, Matrix b) {
  BPolynomial p(ctx);
  p.terms_.push_back(BWord{{std::move(b)}, {}});
  return p;
}

BPolynomial BPolynomial::one(const AlgebraContext& ctx) {
  return constant(ctx, Matrix::Identity(ctx.ambient_dim(), ctx.ambient_dim()));
}

BPolynomial BPolynomial::letter(const AlgebraContext& ctx, int i) {
  if (i < 0) throw ValidationError("letter index must be nonnegative");
  const Matrix id = Matrix::Identity(ctx.ambient_dim(), ctx.ambient_dim());
  BPolynomial p(ctx);
  p.terms_.push_back(BWord{{id, id}, {i}});
  return p;
}

BPolynomial BPolynomial::word(const AlgebraContext& ctx, BWord w) {
  if (w.coeffs.size() != w.letters.size() + 1)
    throw ValidationError("word: coefficient/letter count mismatch");
  for (const auto& c : w.coeffs)
    if (c.rows() != ctx.ambient_dim() || c.cols() != ctx.ambient_dim())
      throw ValidationError("word: coefficient dimension mismatch");
  BPolynomial p(ctx);
  p.terms_.push_back(std::move(w));
  return p;
}

const AlgebraContext& BPolynomial::ctx() const {
  if (!ctx_) throw ValidationError("polynomial has no algebra context");
  return *ctx_;
}

int BPolynomial::degree() const {
  int d = 0;
  for (const auto& w : terms_) d = std::max(d, w.degree());
  return d;
}

BPolynomial BPolynomial::operator+(const BPolynomial& o) const {
  if (ctx_ && o.ctx_ && ctx_ != o.ctx_) throw ValidationError("polynomial context mismatch");
  BPolynomial out;
  out.ctx_ = ctx_ ? ctx_ : o.ctx_;
  out.terms_ = terms_;
  out.terms_.insert(out.terms_.end(), o.terms_.begin(), o.terms_.end());
  return out;
}

BPolynomial BPolynomial::operator-(const BPolynomial& o) const {
  return *this + (o * Complex(-1.0));
}

BPolynomial BPolynomial::operator*(const BPolynomial& o) const {
  if (ctx_ && o.ctx_ && ctx_ != o.ctx_) throw ValidationError("polynomial context mismatch");
  BPolynomial out;
  out.ctx_ = ctx_ ? ctx_ : o.ctx_;
  for (const auto& a : terms_) {
    for (const auto& b : o.terms_) {
      BWord w;
      w.letters = a.letters;
      w.letters.insert(w.letters.end(), b.letters.begin(), b.letters.end());
      w.coeffs.assign(a.coeffs.begin(), a.coeffs.end() - 1);
      w.coeffs.push_back(a.coeffs.back() * b.coeffs.front());
      w.coeffs.insert(w.coeffs.end(), b.coeffs.begin() + 1, b.coeffs.end());
      out.terms_.push_back(std::move(w));
    }
  }
  return out;
}

BPolynomial BPolynomial::operator*(const Complex& s) const {
  BPolynomial out;
  out.ctx_ = ctx_;
  for (const auto& w : terms_) {
    BWord ws = w;
    ws.coeffs.front() = s * ws.coeffs.front();
    out.terms_.push_back(std::move(ws));
  }
  return out;
}

BPolynomial BPolynomial::left_mul(const Matrix& b) const {
  BPolynomial out;
  out.ctx_ = ctx_;
  for (const auto& w : terms_) {
    BWord wb = w;
    wb.coeffs.front() = b * wb.coeffs.front();
    out.terms_.push_back(std::move(wb));
  }
  return out;
}

BPolynomial BPolynomial::right_mul(const Matrix& b) const {
  BPolynomial out;
  out.ctx_ = ctx_;
  for (const auto& w : terms_) {
    BWord wb = w;
    wb.coeffs.back() = wb.coeffs.back() * b;
    out.terms_.push_back(std::move(wb));
  }
  return out;
}

BPolynomial BPolynomial::adjoint() const {
  BPolynomial out;
  out.ctx_ = ctx_;
  for (const auto& w : terms_) {
    BWord ws;
    ws.letters.assign(w.letters.rbegin(), w.letters.rend());
    for (auto it = w.coeffs.rbegin(); it != w.coeffs.rend(); ++it)
      ws.coeffs.push_back(it->adjoint());
    out.terms_.push_back(std::move(ws));
  }
  return out;
}

BPolynomial::Canonical BPolynomial::canonical() const {
  Canonical out;
  if (!ctx_) return out;
  for (const auto& w : terms_) accumulate(out[w.letters], word_tensor(*ctx_, w));
  const double tol = ctx_->tol().equality;
  for (auto it = out.begin(); it != out.end();)
    it = tensor_negligible(it->second, tol) ? out.erase(it) : std::next(it);
  return out;
}

bool BPolynomial::is_zero() const { return canonical().empty(); }

BPolynomial BPolynomial::normalized() const {
  if (!ctx_) return *this;
  // Words with a unique letter sequence stay factored; colliding sequences are
  // merged through the canonical tensor.
  std::map<std::vector<int>, std::vector<const BWord*>> groups;
  for (const auto& w : terms_) groups[w.letters].push_back(&w);

  const double tol = ctx_->tol().equality;
  const int dimb = ctx_->dim();
  BPolynomial out(*ctx_);
  for (const auto& [letters, words] : groups) {
    if (words.size() == 1) {
      if (!tensor_negligible(word_tensor(*ctx_, *words[0]), tol)) out.terms_.push_back(*words[0]);
      continue;
    }
    Vector t;
    for (const BWord* w : words) accumulate(t, word_tensor(*ctx_, *w));
    if (tensor_negligible(t, tol)) continue;
    const int slots = static_cast<int>(letters.size()) + 1;
    for (Eigen::Index flat = 0; flat < t.size(); ++flat) {
      if (std::abs(t[flat]) <= tol) continue;
      BWord w;
      w.letters = letters;
      Eigen::Index rem = flat;
      std::vector<int> idx(slots);
      for (int s = slots - 1; s >= 0; --s) {
        idx[s] = static_cast<int>(rem % dimb);
        rem /= dimb;
      }
      for (int s = 0; s < slots; ++s) w.coeffs.push_back(ctx_->basis()[idx[s]]);
      w.coeffs.front() = (t[flat] * w.coeffs.front()).eval();
      out.terms_.push_back(std::move(w));
    }
  }
  return out;
}

double BPolynomial::max_defect(const Canonical& a, const Canonical& b) {
  double worst = 0.0;
  auto scan = [&](const Canonical& x, const Canonical& y) {
    for (const auto& [key, t] : x) {
      auto it = y.find(key);
      if (it == y.end())
        worst = std::max(worst, t.cwiseAbs().maxCoeff());
      else
        worst = std::max(worst, (t - it->second).cwiseAbs().maxCoeff());
    }
  };
  scan(a, b);
  for (const auto& [key, t] : b)
    if (a.find(key) == a.end()) worst = std::max(worst, t.cwiseAbs().maxCoeff());
  return worst;
}

double BPolynomial::defect_against(const BPolynomial& o) const {
  return max_defect(canonical(), o.canonical());
}

Matrix BPolynomial::evaluate(const std::vector<Matrix>& point) const {
  const int n = ctx().ambient_dim();
  Eigen::Index s = n;
  if (!point.empty()) s = point.front().rows();
  for (const auto& x : point)
    if (x.rows() != s || x.cols() != s)
      throw ValidationError("evaluate: point matrices must share one square dimension");
  if (s % n != 0)
    throw ValidationError("evaluate: point dimension must be a multiple of the ambient dimension");
  const Eigen::Index r = s / n;
  const Matrix idr = Matrix::Identity(r, r);

  Matrix acc = Matrix::Zero(s, s);
  for (const auto& w : terms_) {
    Matrix m = kron(w.coeffs.front(), idr);
    for (int k = 0; k < w.degree(); ++k) {
      const int i = w.letters[k];
      if (i < 0 || i >= static_cast<int>(point.size()))
        throw ValidationError("evaluate: letter index outside the point tuple");
      m = m * point[i] * kron(w.coeffs[k + 1], idr);
    }
    acc += m;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// DerivTensor

DerivTensor DerivTensor::elementary(const AlgebraContext& ctx, int i) {
  DerivTensor t(ctx);
  t.terms_.push_back(DerivTerm{BPolynomial::one(ctx), i, BPolynomial::one(ctx)});
  return t;
}

const AlgebraContext& DerivTensor::ctx() const {
  if (!ctx_) throw ValidationError("tensor has no algebra context");
  return *ctx_;
}

void DerivTensor::add_term(DerivTerm t) {
  if (!ctx_) ctx_ = &t.left.ctx();
  terms_.push_back(std::move(t));
}

DerivTensor DerivTensor::operator+(const DerivTensor& o) const {
  DerivTensor out;
  out.ctx_ = ctx_ ? ctx_ : o.ctx_;
  out.terms_ = terms_;
  out.terms_.insert(out.terms_.end(), o.terms_.begin(), o.terms_.end());
  return out;
}

DerivTensor DerivTensor::operator-(const DerivTensor& o) const {
  return *this + (o * Complex(-1.0));
}

DerivTensor DerivTensor::operator*(const Complex& s) const {
  DerivTensor out;
  out.ctx_ = ctx_;
  for (const auto& t : terms_)
    out.terms_.push_back(DerivTerm{t.left * s, t.index, t.right});
  return out;
}

DerivTensor DerivTensor::left_mul(const BPolynomial& p) const {
  DerivTensor out;
  out.ctx_ = ctx_;
  for (const auto& t : terms_)
    out.terms_.push_back(DerivTerm{p * t.left, t.index, t.right});
  return out;
}

DerivTensor DerivTensor::right_mul(const BPolynomial& q) const {
  DerivTensor out;
  out.ctx_ = ctx_;
  for (const auto& t : terms_)
    out.terms_.push_back(DerivTerm{t.left, t.index, t.right * q});
  return out;
}

DerivTensor::Canonical DerivTensor::canonical() const {
  Canonical out;
  if (!ctx_) return out;
  for (const auto& t : terms_) {
    for (const auto& wl : t.left.terms()) {
      const Vector tl = word_tensor(*ctx_, wl);
      for (const auto& wr : t.right.terms()) {
        const Vector tr = word_tensor(*ctx_, wr);
        Vector joint(tl.size() * tr.size());
        for (Eigen::Index a = 0; a < tl.size(); ++a)
          joint.segment(a * tr.size(), tr.size()) = tl[a] * tr;
        accumulate(out[Key{wl.letters, t.index, wr.letters}], joint);
      }
    }
  }
  const double tol = ctx_->tol().equality;
  for (auto it = out.begin(); it != out.end();)
    it = tensor_negligible(it->second, tol) ? out.erase(it) : std::next(it);
  return out;
}

bool DerivTensor::is_zero() const { return canonical().empty(); }

double DerivTensor::defect_against(const DerivTensor& o) const {
  const Canonical a = canonical();
  const Canonical b = o.canonical();
  double worst = 0.0;
  for (const auto& [key, t] : a) {
    auto it = b.find(key);
    worst = std::max(worst, it == b.end() ? t.cwiseAbs().maxCoeff()
                                          : (t - it->second).cwiseAbs().maxCoeff());
  }
  for (const auto& [key, t] : b)
    if (a.find(key) == a.end()) worst = std::max(worst, t.cwiseAbs().maxCoeff());
  return worst;
}

DerivTensor eta_derivative(const BPolynomial& p) {
  DerivTensor out(p.ctx());
  const AlgebraContext& ctx = p.ctx();
  for (const auto& w : p.terms()) {
    for (int k = 1; k <= w.degree(); ++k) {
      BWord left;
      left.coeffs.assign(w.coeffs.begin(), w.coeffs.begin() + k);
      left.letters.assign(w.letters.begin(), w.letters.begin() + (k - 1));
      BWord right;
      right.coeffs.assign(w.coeffs.begin() + k, w.coeffs.end());
      right.letters.assign(w.letters.begin() + k, w.letters.end());
      out.add_term(DerivTerm{BPolynomial::word(ctx, std::move(left)), w.letters[k - 1],
                             BPolynomial::word(ctx, std::move(right))});
    }
  }
  return out;
}

DerivTensor conjugation_J(const DerivTensor& xi) {
  DerivTensor out(xi.ctx());
  for (const auto& t : xi.terms())
    out.add_term(DerivTerm{t.right.adjoint(), t.index, t.left.adjoint()});
  return out;
}

// ---------------------------------------------------------------------------
// Linearization

namespace {

// One pencil entry: constant + l · x_letter · r, with one of l, r the identity
// in every entry this construction produces.
struct AffineEntry {
  Matrix constant;  // n×n
  int letter = -1;  // -1: constant only
  Matrix lmat, rmat;

  AffineEntry adjoint() const {
    AffineEntry out;
    out.constant = constant.adjoint();
    out.letter = letter;
    if (letter >= 0) {
      out.lmat = rmat.adjoint();
      out.rmat = lmat.adjoint();
    }
    return out;
  }
};

AffineEntry constant_entry(Matrix c) { return AffineEntry{std::move(c), -1, {}, {}}; }

// Blockwise kron lift: each n×n block b becomes b ⊗ 1_r.
Matrix lift_blocks(const Matrix& m, int k, int n, Eigen::Index r) {
  const Matrix idr = Matrix::Identity(r, r);
  Matrix out = Matrix::Zero(k * n * r, k * n * r);
  for (int s = 0; s < k; ++s)
    for (int t = 0; t < k; ++t) {
      const Matrix blk = m.block(s * n, t * n, n, n);
      if (blk.cwiseAbs().maxCoeff() > 0.0)
        out.block(static_cast<Eigen::Index>(s) * n * r, static_cast<Eigen::Index>(t) * n * r,
                  n * r, n * r) = kron(blk, idr);
    }
  return out;
}

}  // namespace

Matrix LinearPencil::evaluate(const std::vector<Matrix>& point) const {
  const int n = block_dim;
  const Eigen::Index s = point.empty() ? n : point.front().rows();
  if (s % n != 0) throw ValidationError("pencil evaluate: point dimension mismatch");
  const Eigen::Index r = s / n;
  Matrix out = lift_blocks(coeff[0], k, n, r);
  const Matrix idk = Matrix::Identity(k, k);
  for (int i = 0; i < index_count; ++i) {
    const Matrix xi_big = kron(idk, point.at(i));  // X_i on every pencil slot
    if (coeff[1 + i].cwiseAbs().maxCoeff() > 0.0)
      out += lift_blocks(coeff[1 + i], k, n, r) * xi_big;
    if (right_coeff[i].cwiseAbs().maxCoeff() > 0.0)
      out += xi_big * lift_blocks(right_coeff[i], k, n, r);
  }
  return out;
}

Matrix LinearPencil::schur_eval(const std::vector<Matrix>& point) const {
  const Matrix L = evaluate(point);
  if (k == 1) return L;  // degree-1 passthrough pencil
  const Eigen::Index s = L.rows() / k;
  const Matrix u = L.block(0, s, s, L.cols() - s);
  const Matrix v = L.block(s, 0, L.rows() - s, s);
  const Matrix q = L.block(s, s, L.rows() - s, L.cols() - s);
  return -u * q.fullPivLu().solve(v);
}

double LinearPencil::self_adjoint_defect() const {
  double worst = (coeff[0] - coeff[0].adjoint().eval()).norm();
  for (int i = 0; i < index_count; ++i)
    worst = std::max(worst, (right_coeff[i] - coeff[1 + i].adjoint().eval()).norm());
  return worst;
}

LinearPencil linearize(const BPolynomial& p, int index_count, bool require_self_adjoint) {
  const AlgebraContext& ctx = p.ctx();
  const int n = ctx.ambient_dim();
  if (p.degree() < 1) throw ValidationError("linearize: degree must be at least 1");
  for (const auto& w : p.terms())
    for (int i : w.letters)
      if (i >= index_count) throw ValidationError("linearize: letter outside index range");
  if (require_self_adjoint && p.defect_against(p.adjoint()) > ctx.tol().equality)
    throw ValidationError("linearize: polynomial is not self-adjoint");

  const Matrix identity = Matrix::Identity(n, n);
  const bool affine_form =
      p.degree() <= 1 &&
      std::all_of(p.terms().begin(), p.terms().end(), [&](const BWord& w) {
        if (w.degree() == 0) return true;
        const Complex s = ctx.trace(w.coeffs[1]);
        return (w.coeffs[1] - s * identity).norm() <= ctx.tol().equality;
      });
  if (affine_form) {
    // Degree-1 passthrough: the polynomial is its own 1×1 pencil. For a
    // self-adjoint input the effective letter coefficients are scalar, so the
    // left/right split is the trivial half-and-half one.
    LinearPencil pencil;
    pencil.k = 1;
    pencil.index_count = index_count;
    pencil.block_dim = n;
    pencil.coeff.assign(static_cast<size_t>(index_count) + 1, Matrix::Zero(n, n));
    pencil.right_coeff.assign(static_cast<size_t>(index_count), Matrix::Zero(n, n));
    for (const auto& w : p.terms()) {
      if (w.degree() == 0) {
        pencil.coeff[0] += w.coeffs[0];
      } else {
        const Matrix half = 0.5 * w.coeffs[0] * ctx.trace(w.coeffs[1]);
        pencil.coeff[1 + w.letters[0]] += half;
        pencil.right_coeff[w.letters[0]] += half.adjoint();
      }
    }
    return pencil;
  }

  // Factor each word of m = p/2 into affine pieces c_1..c_K, K >= 2:
  // c_j = b_{j-1}·x_{i_j} for the letters, the trailing coefficient as a
  // constant factor (folded into c_d when it is a scalar multiple of 1).
  struct Monomial {
    std::vector<AffineEntry> factors;
  };
  std::vector<Monomial> monomials;
  const Matrix id = Matrix::Identity(n, n);
  for (const auto& w : p.terms()) {
    Monomial mono;
    const int d = w.degree();
    if (d == 0) {
      mono.factors = {constant_entry(0.5 * w.coeffs[0]), constant_entry(id)};
    } else {
      for (int j = 0; j < d; ++j) {
        AffineEntry f;
        f.constant = Matrix::Zero(n, n);
        f.letter = w.letters[j];
        f.lmat = (j == 0) ? Matrix(0.5 * w.coeffs[j]) : w.coeffs[j];
        f.rmat = id;
        mono.factors.push_back(std::move(f));
      }
      const Matrix tail = w.coeffs[d];
      const Complex scale = ctx.trace(tail);
      if ((tail - scale * id).norm() <= ctx.tol().equality) {
        mono.factors.back().lmat = (mono.factors.back().lmat * scale).eval();
        if (mono.factors.size() == 1) mono.factors.push_back(constant_entry(id));
      } else {
        mono.factors.push_back(constant_entry(tail));
      }
    }
    monomials.push_back(std::move(mono));
  }

  int m_slots = 0;
  for (const auto& mono : monomials) m_slots += static_cast<int>(mono.factors.size()) - 1;
  const int k = 1 + 2 * m_slots;

  LinearPencil pencil;
  pencil.k = k;
  pencil.index_count = index_count;
  pencil.block_dim = n;
  const Eigen::Index kn = static_cast<Eigen::Index>(k) * n;
  pencil.coeff.assign(static_cast<size_t>(index_count) + 1, Matrix::Zero(kn, kn));
  pencil.right_coeff.assign(static_cast<size_t>(index_count), Matrix::Zero(kn, kn));

  // Scalar coefficients commute past the letters, so they are stored split
  // half-left half-right; that makes right_coeff == coeff† an exact identity
  // for self-adjoint pencils.
  auto put = [&](int row, int col, const AffineEntry& e) {
    pencil.coeff[0].block(row * n, col * n, n, n) += e.constant;
    if (e.letter < 0) return;
    const bool left_form = (e.rmat - id).norm() <= 1e-14;
    const Matrix& b = left_form ? e.lmat : e.rmat;
    const Complex s = b.trace() / static_cast<double>(n);
    if ((b - s * id).norm() <= 1e-14) {
      pencil.coeff[1 + e.letter].block(row * n, col * n, n, n) += 0.5 * s * id;
      pencil.right_coeff[e.letter].block(row * n, col * n, n, n) += 0.5 * s * id;
      return;
    }
    if (left_form)
      pencil.coeff[1 + e.letter].block(row * n, col * n, n, n) += e.lmat;
    else
      pencil.right_coeff[e.letter].block(row * n, col * n, n, n) += e.rmat;
  };

  // Layout: index 0, then the A-side slots (rows of u*, Q*), then the B-side
  // slots (rows of v, Q). L = [[0, u, v*], [u*, 0, Q*], [v, Q, 0]].
  int off = 0;
  for (const auto& mono : monomials) {
    const int kw = static_cast<int>(mono.factors.size());
    const int width = kw - 1;
    const int a0 = 1 + off;            // A-slot base for this word
    const int b0 = 1 + m_slots + off;  // B-slot base
    const auto& c = mono.factors;

    // u: c_1 at the last A-slot of the word; v: c_K at the last B-slot.
    put(0, a0 + width - 1, c[0]);
    put(a0 + width - 1, 0, c[0].adjoint());
    put(b0 + width - 1, 0, c[kw - 1]);
    put(0, b0 + width - 1, c[kw - 1].adjoint());

    // Q within the word (0-based (K-1)×(K-1) block): interior factors on the
    // shifted anti-diagonal, -1 on the anti-diagonal.
    const AffineEntry minus_one = constant_entry(-id);
    for (int r = 1; r <= kw - 2; ++r) {
      const int qr = r - 1, qc = kw - 2 - r;
      put(b0 + qr, a0 + qc, c[r]);                       // Q
      put(a0 + qc, b0 + qr, c[r].adjoint());             // Q*
    }
    for (int r = 1; r <= kw - 1; ++r) {
      const int qr = r - 1, qc = kw - 1 - r;
      put(b0 + qr, a0 + qc, minus_one);
      put(a0 + qc, b0 + qr, minus_one);
    }
    off += width;
  }
  return pencil;
}

// ---------------------------------------------------------------------------
// Text form

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  size_t b = s.find_last_not_of(" \t");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

}  // namespace

std::string BPolynomial::to_string(const std::map<std::string, Matrix>* names) const {
  if (terms_.empty()) return "0";
  const Matrix id = Matrix::Identity(ctx().ambient_dim(), ctx().ambient_dim());
  auto scalar_str = [](Complex s) {
    std::ostringstream os;
    os.precision(17);
    if (std::abs(s.imag()) <= 1e-15)
      os << s.real();
    else
      os << "(" << s.real() << "," << s.imag() << ")";
    return os.str();
  };
  auto coeff_str = [&](const Matrix& b) -> std::string {
    const double tol = ctx().tol().equality;
    if (names) {
      for (const auto& [name, mat] : *names) {
        if (mat.rows() != b.rows()) continue;
        if ((mat - b).norm() <= tol) return name;
        // scalar multiple of a named matrix
        const Complex denom = ctx().trace(mat.adjoint() * mat);
        if (std::abs(denom) < 1e-30) continue;
        const Complex s = ctx().trace(mat.adjoint() * b) / denom;
        if ((b - s * mat).norm() <= tol * std::max(1.0, b.norm()))
          return scalar_str(s) + " * " + name;
      }
    }
    const Complex s = ctx().trace(b);
    if ((b - s * id).norm() <= tol) return scalar_str(s);
    return "<matrix>";
  };
  std::ostringstream os;
  bool first_term = true;
  for (const auto& w : terms_) {
    if (!first_term) os << " + ";
    first_term = false;
    std::vector<std::string> parts;
    const std::string c0 = coeff_str(w.coeffs[0]);
    if (c0 != "1" || w.degree() == 0) parts.push_back(c0);
    for (int k = 0; k < w.degree(); ++k) {
      parts.push_back("x" + std::to_string(w.letters[k]));
      const std::string ck = coeff_str(w.coeffs[k + 1]);
      if (ck != "1" || k + 1 == w.degree()) {
        if (ck != "1") parts.push_back(ck);
      }
    }
    for (size_t i = 0; i < parts.size(); ++i) {
      if (i) os << " * ";
      os << parts[i];
    }
  }
  return os.str();
}

BPolynomial parse_polynomial(const AlgebraContext& ctx, const std::string& text,
                             const std::map<std::string, Matrix>& names) {
  const Matrix id = Matrix::Identity(ctx.ambient_dim(), ctx.ambient_dim());
  BPolynomial out(ctx);
  std::vector<std::string> term_strings;
  {
    std::string cur;
    for (char ch : text) {
      if (ch == '+') {
        term_strings.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    term_strings.push_back(cur);
  }
  for (auto& raw : term_strings) {
    std::string t = trim(raw);
    if (t.empty()) continue;
    Complex sign = 1.0;
    if (t.front() == '-') {
      sign = -1.0;
      t = trim(t.substr(1));
    }
    BWord w;
    Matrix pending = sign * id;
    std::string factor;
    std::istringstream stream(t);
    while (std::getline(stream, factor, '*')) {
      factor = trim(factor);
      if (factor.empty()) throw ConfigurationError("polynomial parse: empty factor");
      if (factor[0] == 'x' && factor.size() > 1 &&
          std::all_of(factor.begin() + 1, factor.end(), [](char c) { return std::isdigit(c); })) {
        w.coeffs.push_back(pending);
        w.letters.push_back(std::stoi(factor.substr(1)));
        pending = id;
      } else if (auto it = names.find(factor); it != names.end()) {
        if (it->second.rows() != ctx.ambient_dim())
          throw ConfigurationError("polynomial parse: named matrix dimension mismatch");
        pending = (pending * it->second).eval();
      } else if (factor.front() == '(' && factor.back() == ')') {
        const size_t comma = factor.find(',');
        if (comma == std::string::npos)
          throw ConfigurationError("polynomial parse: malformed complex literal '" + factor + "'");
        try {
          const double re = std::stod(factor.substr(1, comma - 1));
          const double im = std::stod(factor.substr(comma + 1, factor.size() - comma - 2));
          pending = (pending * Complex(re, im)).eval();
        } catch (const std::exception&) {
          throw ConfigurationError("polynomial parse: malformed complex literal '" + factor + "'");
        }
      } else {
        try {
          size_t consumed = 0;
          const double val = std::stod(factor, &consumed);
          if (consumed != factor.size()) throw std::invalid_argument(factor);
          pending = (pending * val).eval();
        } catch (const std::exception&) {
          throw ConfigurationError("polynomial parse: unknown factor '" + factor + "'");
        }
      }
    }
    w.coeffs.push_back(pending);
    out = out + BPolynomial::word(ctx, std::move(w));
  }
  return out;
}

}  // namespace opfree::bpoly
