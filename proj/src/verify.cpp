#include "opfree/verify.hpp"

#include <cmath>
#include <functional>

namespace opfree::verify {

namespace {

using bpoly::BWord;
using bpoly::DerivTerm;
using matalg::AlgebraContext;

Complex pair_terms(const FockModel& model, const DerivTerm& a, const DerivTerm& b) {
  const Matrix mid = model.eta().eta_entry(
      a.index, b.index, model.expectation(a.left.adjoint() * b.left));
  const BPolynomial wrapped = a.right.adjoint() *
                              BPolynomial::constant(model.ctx(), mid) * b.right;
  return model.ctx().trace(model.expectation(wrapped));
}

// All words of the given degree over basis coefficients: letters over the
// model's index set, every coefficient slot running through the basis of B.
void for_each_basis_word(const AlgebraContext& ctx, int index_count, int degree,
                         const std::function<void(const BWord&)>& fn) {
  const int dimb = ctx.dim();
  BWord w;
  w.letters.assign(static_cast<size_t>(degree), 0);
  w.coeffs.assign(static_cast<size_t>(degree) + 1, Matrix());
  std::vector<int> coeff_idx(static_cast<size_t>(degree) + 1, 0);

  std::function<void(int)> letters_loop = [&](int pos) {
    if (pos == degree) {
      std::function<void(int)> coeff_loop = [&](int cpos) {
        if (cpos == degree + 1) {
          for (int s = 0; s <= degree; ++s) w.coeffs[s] = ctx.basis()[coeff_idx[s]];
          fn(w);
          return;
        }
        for (int c = 0; c < dimb; ++c) {
          coeff_idx[cpos] = c;
          coeff_loop(cpos + 1);
        }
      };
      coeff_loop(0);
      return;
    }
    for (int l = 0; l < index_count; ++l) {
      w.letters[pos] = l;
      letters_loop(pos + 1);
    }
  };
  letters_loop(0);
}

}  // namespace

Complex pair_l2(const FockModel& model, const DerivTensor& u, const DerivTensor& v) {
  Complex acc = 0.0;
  for (const auto& a : u.terms())
    for (const auto& b : v.terms()) acc += pair_terms(model, a, b);
  return acc;
}

Complex pair_l2(const FockModel& model, const MatrixTensor& u, const MatrixTensor& v) {
  Complex acc = 0.0;
  for (const auto& a : u.terms) {
    for (const auto& b : v.terms) {
      const Matrix mid = model.eta().eta_entry(
          a.index, b.index, model.vacuum_expectation(a.left.adjoint() * b.left));
      acc += model.vacuum_trace(a.right.adjoint() * model.act(mid) * b.right);
    }
  }
  return acc;
}

BPolynomial m_inner(const FockModel& model, const DerivTensor& u, const DerivTensor& v) {
  BPolynomial acc = BPolynomial::zero(model.ctx());
  for (const auto& a : u.terms()) {
    for (const auto& b : v.terms()) {
      const Matrix mid = model.eta().eta_entry(
          a.index, b.index, model.expectation(a.left.adjoint() * b.left));
      acc = acc + a.right.adjoint() * BPolynomial::constant(model.ctx(), mid) * b.right;
    }
  }
  return acc;
}

BPolynomial deriv_adjoint(const FockModel& model, const DerivTensor& xi) {
  const AlgebraContext& ctx = model.ctx();
  BPolynomial acc = BPolynomial::zero(ctx);
  for (const auto& t : xi.terms()) {
    const DerivTensor ei = DerivTensor::elementary(ctx, t.index);
    const BPolynomial si = BPolynomial::letter(ctx, t.index);
    const BPolynomial correction_left =
        m_inner(model, bpoly::conjugation_J(bpoly::eta_derivative(t.left)), ei);
    const BPolynomial correction_right =
        m_inner(model, ei, bpoly::eta_derivative(t.right));  // J(e_i) = e_i
    acc = acc + t.left * si * t.right - correction_left * t.right - t.left * correction_right;
  }
  return acc;
}

IbpOutcome check_integration_by_parts(const FockModel& model,
                                      const std::vector<BPolynomial>& xi, int degree,
                                      double tolerance, Rng* rng) {
  const AlgebraContext& ctx = model.ctx();
  const int m = model.eta().index_count();
  IbpOutcome out;
  report::Report& rep = out.rep;
  rep.suite = "integration-by-parts";
  rep.identity = "conjugate-variable integration by parts";
  rep.environment.emplace_back("degree", std::to_string(degree));
  rep.environment.emplace_back("candidates", std::to_string(xi.size()));

  std::vector<BPolynomial> xi_adj;
  for (const auto& x : xi) xi_adj.push_back(x.adjoint());

  auto word_defect = [&](const BWord& w) {
    const int d = w.degree();
    const BPolynomial p = BPolynomial::word(ctx, w);
    // right side: sum over letter positions of tau(η_{i j_k}(E(left)) E(right))
    std::vector<Complex> rhs_scalar(xi.size(), 0.0);
    for (int k = 1; k <= d; ++k) {
      BWord left{std::vector<Matrix>(w.coeffs.begin(), w.coeffs.begin() + k),
                 std::vector<int>(w.letters.begin(), w.letters.begin() + (k - 1))};
      BWord right{std::vector<Matrix>(w.coeffs.begin() + k, w.coeffs.end()),
                  std::vector<int>(w.letters.begin() + k, w.letters.end())};
      const Matrix eleft = model.expectation(BPolynomial::word(ctx, left));
      const Matrix eright = model.expectation(BPolynomial::word(ctx, right));
      for (size_t c = 0; c < xi.size(); ++c) {
        const Matrix etaval =
            model.eta().eta_entry(static_cast<int>(c), w.letters[k - 1], eleft);
        rhs_scalar[c] += ctx.trace(etaval * eright);
      }
    }
    double worst = 0.0;
    for (size_t c = 0; c < xi.size(); ++c) {
      const Complex lhs = ctx.trace(model.expectation(xi_adj[c] * p));
      worst = std::max(worst, std::abs(lhs - rhs_scalar[c]));
    }
    return worst;
  };

  for (int d = 0; d <= degree; ++d) {
    double worst = 0.0;
    for_each_basis_word(ctx, m, d, [&](const BWord& w) {
      worst = std::max(worst, word_defect(w));
    });
    if (rng) {
      for (int extra = 0; extra < 5; ++extra) {
        BWord w;
        for (int k = 0; k < d; ++k) w.letters.push_back(static_cast<int>(rng->integer(m)));
        for (int k = 0; k <= d; ++k) w.coeffs.push_back(ctx.random_element(*rng));
        worst = std::max(worst, word_defect(w));
      }
    }
    rep.add("degree " + std::to_string(d), "conjugate-variable integration by parts", worst,
            tolerance);
    if (worst > tolerance && (out.first_fail_degree < 0 || d < out.first_fail_degree))
      out.first_fail_degree = d;
  }
  return out;
}

report::Report check_adjoint_formula(const FockModel& model, int pq_degree, int r_degree,
                                     double tolerance, Rng& rng) {
  const AlgebraContext& ctx = model.ctx();
  const int m = model.eta().index_count();
  const int dimb = ctx.dim();
  report::Report rep;
  rep.suite = "adjoint-formula";
  rep.identity = "adjoint of the eta-derivative on p·e_i·q vectors";
  rep.environment.emplace_back("pq_degree", std::to_string(pq_degree));
  rep.environment.emplace_back("r_degree", std::to_string(r_degree));
  rep.note = "adjoint base case e_i -> s_i is specific to the semicircular model";

  // p/q family: the identity is linear in p and q and compatible with outer
  // B-multiplications, so letters with basis interior coefficients plus basis
  // constants and a few random-coefficient words give full degree-<=2 coverage.
  std::vector<BPolynomial> family;
  for (int b = 0; b < dimb; ++b) family.push_back(BPolynomial::constant(ctx, ctx.basis()[b]));
  for (int i = 0; i < m && pq_degree >= 1; ++i)
    family.push_back(BPolynomial::letter(ctx, i));
  if (pq_degree >= 2) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int b = 0; b < dimb; ++b) {
          BWord w;
          w.letters = {i, j};
          w.coeffs = {Matrix::Identity(ctx.ambient_dim(), ctx.ambient_dim()), ctx.basis()[b],
                      Matrix::Identity(ctx.ambient_dim(), ctx.ambient_dim())};
          family.push_back(BPolynomial::word(ctx, w));
        }
  }
  for (int t = 0; t < 3; ++t) {
    BWord w;
    const int d = std::min(pq_degree, 1 + static_cast<int>(rng.integer(2)));
    for (int k = 0; k < d; ++k) w.letters.push_back(static_cast<int>(rng.integer(m)));
    for (int k = 0; k <= d; ++k) w.coeffs.push_back(ctx.random_element(rng));
    family.push_back(BPolynomial::word(ctx, w));
  }

  // r monomials: degree <= r_degree words with basis coefficients.
  std::vector<BPolynomial> rs;
  for (int d = 0; d <= r_degree; ++d)
    for_each_basis_word(ctx, m, d, [&](const BWord& w) { rs.push_back(BPolynomial::word(ctx, w)); });

  double worst_formula = 0.0;
  for (const auto& p : family) {
    for (const auto& q : family) {
      for (int i = 0; i < m; ++i) {
        DerivTensor xi(ctx);
        xi.add_term(DerivTerm{p, i, q});
        const BPolynomial phi = deriv_adjoint(model, xi);
        for (const auto& r : rs) {
          const Complex lhs = ctx.trace(model.expectation(phi.adjoint() * r));
          const Complex rhs = pair_l2(model, xi, bpoly::eta_derivative(r));
          worst_formula = std::max(worst_formula, std::abs(lhs - rhs));
        }
      }
    }
  }
  rep.add("adjointness of the formula", "adjoint of the eta-derivative on p·e_i·q vectors",
          worst_formula, tolerance);

  // shuffle identity on the same family
  double worst_shuffle = 0.0;
  for (const auto& p : family) {
    for (const auto& q : family) {
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          DerivTensor pei(ctx), qej(ctx), pqej(ctx), ei(ctx);
          pei.add_term(DerivTerm{p, i, BPolynomial::one(ctx)});
          qej.add_term(DerivTerm{q, j, BPolynomial::one(ctx)});
          pqej.add_term(DerivTerm{p.adjoint() * q, j, BPolynomial::one(ctx)});
          const BPolynomial a = deriv_adjoint(model, pei);
          const BPolynomial b = deriv_adjoint(model, qej);
          const BPolynomial c = deriv_adjoint(model, DerivTensor::elementary(ctx, i));
          const BPolynomial d = deriv_adjoint(model, pqej);
          const Complex lhs = ctx.trace(model.expectation(a.adjoint() * b));
          const Complex rhs = ctx.trace(model.expectation(c.adjoint() * d));
          worst_shuffle = std::max(worst_shuffle, std::abs(lhs - rhs));
        }
      }
    }
  }
  rep.add("shuffle identity", "left factors shuffle through the adjoint pairing", worst_shuffle,
          tolerance);
  return rep;
}

report::Report check_norm_bound(const FockModel& model, const std::vector<BPolynomial>& ps,
                                double slack) {
  const AlgebraContext& ctx = model.ctx();
  const int m = model.eta().index_count();
  report::Report rep;
  rep.suite = "norm-bound";
  rep.identity = "adjoint vectors are bounded by the operator norm of the left factor";
  rep.environment.emplace_back("slack", std::to_string(slack));
  rep.note = "the truncated norm estimate is a lower bound; overshoot within the slack is a WARN";

  for (int i = 0; i < m; ++i) {
    const BPolynomial si_adj =
        deriv_adjoint(model, DerivTensor::elementary(ctx, i));
    const double base =
        std::sqrt(std::abs(ctx.trace(model.expectation(si_adj.adjoint() * si_adj))));
    int idx = 0;
    for (const auto& p : ps) {
      DerivTensor pei(ctx);
      pei.add_term(DerivTerm{p, i, BPolynomial::one(ctx)});
      const BPolynomial phi = deriv_adjoint(model, pei);
      const double lhs =
          std::sqrt(std::abs(ctx.trace(model.expectation(phi.adjoint() * phi))));
      const double bound = base * model.operator_norm_estimate(p);
      const double ratio_defect = bound > 0.0 ? std::max(0.0, lhs / bound - 1.0)
                                              : (lhs > 1e-12 ? 1.0 : 0.0);
      // equality cases sit exactly on the bound; keep float noise out of WARN
      rep.add_banded("p#" + std::to_string(idx++) + " e_" + std::to_string(i),
                     "adjoint vectors are bounded by the operator norm of the left factor",
                     ratio_defect, 1e-10, slack - 1.0);
    }
  }
  return rep;
}

report::Report check_j_isometry(const FockModel& model, int samples, double tolerance, Rng& rng) {
  const AlgebraContext& ctx = model.ctx();
  const int m = model.eta().index_count();
  report::Report rep;
  rep.suite = "j-isometry";
  rep.identity = "the conjugation J is an isometry of the eta-pairing";

  auto random_tensor = [&](int max_terms) {
    DerivTensor t(ctx);
    const int terms = 1 + static_cast<int>(rng.integer(max_terms));
    for (int s = 0; s < terms; ++s) {
      auto rand_word = [&]() {
        BWord w;
        const int d = static_cast<int>(rng.integer(3));
        for (int k = 0; k < d; ++k) w.letters.push_back(static_cast<int>(rng.integer(m)));
        for (int k = 0; k <= d; ++k) w.coeffs.push_back(ctx.random_element(rng));
        return BPolynomial::word(ctx, w);
      };
      t.add_term(DerivTerm{rand_word(), static_cast<int>(rng.integer(m)), rand_word()});
    }
    return t;
  };

  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const DerivTensor u = random_tensor(2);
    const DerivTensor v = random_tensor(2);
    // J is conjugate linear, so as an isometry it flips the pairing slots:
    // ⟨Ju, Jv⟩ = ⟨v, u⟩ = conj ⟨u, v⟩.
    const Complex lhs = pair_l2(model, bpoly::conjugation_J(u), bpoly::conjugation_J(v));
    const Complex rhs = pair_l2(model, v, u);
    worst = std::max(worst, std::abs(lhs - rhs));
    worst = std::max(worst, std::abs(lhs - std::conj(pair_l2(model, u, v))));
  }
  rep.add("random tensors x" + std::to_string(samples),
          "the conjugation J is an isometry of the eta-pairing", worst, tolerance);
  return rep;
}

report::Report check_psi_isometry(const FockModel& model, const std::vector<int>& word_letters,
                                  const std::vector<int>& pair_letters, int word_degree,
                                  double tolerance) {
  const AlgebraContext& ctx = model.ctx();
  report::Report rep;
  rep.suite = "psi-isometry";
  rep.identity = "free-product pairing of x s_i y words matches the eta-pairing";
  rep.environment.emplace_back("word_degree", std::to_string(word_degree));

  // words over the free block: constants plus s-words of degree <= word_degree
  std::vector<BPolynomial> words;
  for (int b = 0; b < ctx.dim(); ++b)
    words.push_back(BPolynomial::constant(ctx, ctx.basis()[b]));
  std::vector<std::vector<int>> seqs{{}};
  for (int d = 1; d <= word_degree; ++d) {
    std::vector<std::vector<int>> next;
    for (const auto& s : seqs) {
      if (static_cast<int>(s.size()) != d - 1) continue;
      for (int l : word_letters) {
        auto e = s;
        e.push_back(l);
        next.push_back(e);
      }
    }
    for (const auto& s : next) {
      BWord w;
      w.letters = s;
      w.coeffs.assign(s.size() + 1, Matrix::Identity(ctx.ambient_dim(), ctx.ambient_dim()));
      words.push_back(BPolynomial::word(ctx, w));
    }
    seqs.insert(seqs.end(), next.begin(), next.end());
  }

  double worst = 0.0;
  int skipped = 0;
  for (const auto& x1 : words)
    for (const auto& y1 : words)
      for (const auto& x2 : words)
        for (const auto& y2 : words)
          for (int i : pair_letters)
            for (int j : pair_letters) {
              const int total_degree = x1.degree() + y1.degree() + x2.degree() + y2.degree() + 2;
              if (total_degree > model.exact_degree()) {
                ++skipped;
                continue;
              }
              const BPolynomial lhs_word = (x1 * BPolynomial::letter(ctx, i) * y1).adjoint() *
                                           (x2 * BPolynomial::letter(ctx, j) * y2);
              const Complex lhs = ctx.trace(model.expectation(lhs_word));
              DerivTensor u(ctx), v(ctx);
              u.add_term(DerivTerm{x1, i, y1});
              v.add_term(DerivTerm{x2, j, y2});
              const Complex rhs = pair_l2(model, u, v);
              worst = std::max(worst, std::abs(lhs - rhs));
            }
  rep.environment.emplace_back("skipped_beyond_exactness", std::to_string(skipped));
  rep.add("word pairs", "free-product pairing of x s_i y words matches the eta-pairing", worst,
          tolerance);
  return rep;
}

namespace {

// Projection onto ker(op) ∩ {vectors supported on levels ≤ depth − word_degree}.
// A kernel vector of the truncated operator with that support profile is a
// kernel vector of the untruncated operator: the operator cannot reach the
// clipped levels from there. Kernel vectors leaning on the top levels may be
// truncation artifacts and are excluded.
std::pair<Matrix, int> safe_kernel_projector(const FockModel& model, const Matrix& op,
                                             int word_degree) {
  const int total = model.total_dim();
  const int keep_levels = model.depth() - word_degree;  // highest admissible level index
  int safe_dim = 0;
  {
    int off = 0;
    for (size_t lev = 0; lev < model.level_dims().size(); ++lev) {
      if (static_cast<int>(lev) <= keep_levels) safe_dim += model.level_dims()[lev];
      off += model.level_dims()[lev];
    }
    (void)off;
  }
  if (safe_dim <= 0) return {Matrix::Zero(total, total), 0};

  // stack the operator on top of the coordinate projection onto the excluded levels
  Matrix stacked = Matrix::Zero(2 * total, total);
  stacked.topRows(total) = op;
  for (int row = safe_dim; row < total; ++row) stacked(total + row, row) = 1.0;

  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff =
      sv.size() == 0 ? 0.0
                     : model.ctx().tol().sv_cutoff_rel * std::max(sv.maxCoeff(), 1e-300);
  Matrix proj = Matrix::Zero(total, total);
  int dim = 0;
  for (int s = 0; s < sv.size(); ++s) {
    if (sv[s] <= cutoff) {
      proj += svd.matrixV().col(s) * svd.matrixV().col(s).adjoint();
      ++dim;
    }
  }
  // V spans the whole domain only when the stacked matrix is wide enough;
  // JacobiSVD returns min(rows, cols) singular values, rows >= cols here.
  return {proj, dim};
}

}  // namespace

report::Report check_kernel_annihilation(const FockModel& model, const BPolynomial& P,
                                         double tolerance) {
  report::Report rep;
  rep.suite = "kernel-annihilation";
  rep.identity = "kernel projections annihilate the derivative";
  rep.note = "kernels are restricted to truncation-safe levels (top levels excluded)";

  const Matrix pmat = model.evaluate(P);
  const int word_degree = P.degree();
  auto [u, ker_dim] = safe_kernel_projector(model, pmat, word_degree);
  auto [v, coker_dim] = safe_kernel_projector(model, pmat.adjoint(), word_degree);
  rep.environment.emplace_back("ker_dim", std::to_string(ker_dim));
  rep.environment.emplace_back("coker_dim", std::to_string(coker_dim));

  if (ker_dim == 0 || coker_dim == 0) {
    rep.vacuous = true;
    rep.note = "kernel or cokernel is trivial on the truncated space";
    rep.add("v ∂(P) u", "kernel projections annihilate the derivative", 0.0, tolerance);
    return rep;
  }

  MatrixTensor t;
  const DerivTensor dp = bpoly::eta_derivative(P);
  for (const auto& term : dp.terms())
    t.terms.push_back(MatrixTensor::Term{v * model.evaluate(term.left), term.index,
                                         model.evaluate(term.right) * u});
  const double norm = std::sqrt(std::abs(pair_l2(model, t, t)));
  rep.add("v ∂(P) u", "kernel projections annihilate the derivative", norm, tolerance);
  return rep;
}

report::Report check_oracle_equivalence(const FockModel& model, int degree, double tolerance) {
  const AlgebraContext& ctx = model.ctx();
  const int m = model.eta().index_count();
  report::Report rep;
  rep.suite = "oracle-equivalence";
  rep.identity = "Fock expectations realize the pair-partition semicircular law";
  rep.environment.emplace_back("degree", std::to_string(degree));

  for (int d = 0; d <= degree; ++d) {
    double worst = 0.0;
    long count = 0;
    for_each_basis_word(ctx, m, d, [&](const BWord& w) {
      const Matrix lhs = model.expectation(BPolynomial::word(ctx, w));
      const Matrix rhs = cumulant::semicircular_moment_oracle(model.eta(), w.letters, w.coeffs);
      worst = std::max(worst, (lhs - rhs).norm());
      ++count;
    });
    rep.add("degree " + std::to_string(d) + " (" + std::to_string(count) + " words)",
            "Fock expectations realize the pair-partition semicircular law", worst, tolerance);
  }
  return rep;
}

report::Report check_traciality(const FockModel& model, int word_degree, int samples,
                                double tolerance, Rng& rng) {
  const AlgebraContext& ctx = model.ctx();
  const int m = model.eta().index_count();
  report::Report rep;
  rep.suite = "traciality";
  rep.identity = "tau composed with E_B is tracial under tau-symmetric covariance";

  auto random_word = [&]() {
    BWord w;
    const int d = 1 + static_cast<int>(rng.integer(word_degree));
    for (int k = 0; k < d; ++k) w.letters.push_back(static_cast<int>(rng.integer(m)));
    for (int k = 0; k <= d; ++k) w.coeffs.push_back(ctx.random_element(rng));
    return BPolynomial::word(ctx, w);
  };

  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const BPolynomial a = random_word();
    const BPolynomial b = random_word();
    const Complex lhs = ctx.trace(model.expectation(a * b));
    const Complex rhs = ctx.trace(model.expectation(b * a));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  rep.add("random word pairs x" + std::to_string(samples),
          "tau composed with E_B is tracial under tau-symmetric covariance", worst, tolerance);
  return rep;
}

}  // namespace opfree::verify
