#include <doctest.h>

#include <cmath>

#include "opfree/cumulant.hpp"
#include "opfree/fock.hpp"
#include "opfree/verify.hpp"

using namespace opfree;
using namespace opfree::fock;
using bpoly::BPolynomial;
using bpoly::BWord;
using covmap::CovarianceMatrix;
using matalg::AlgebraContext;

namespace {

AlgebraContext scalar() { return AlgebraContext::multi_matrix({{1, 1}}); }
AlgebraContext diag2() { return AlgebraContext::multi_matrix({{1, 1}, {1, 1}}); }

BPolynomial basis_word(const AlgebraContext& ctx, const std::vector<int>& letters,
                       const std::vector<int>& coeffs) {
  BWord w;
  w.letters = letters;
  for (int c : coeffs) w.coeffs.push_back(ctx.basis()[c]);
  return BPolynomial::word(ctx, w);
}

}  // namespace

TEST_CASE("bimodule construction") {
  SUBCASE("zero covariance quotients to nothing") {
    auto ctx = diag2();
    auto eta = CovarianceMatrix::from_kraus(ctx, 1, {});
    auto bm = build_bimodule(ctx, eta);
    CHECK(bm.generator_count() == 4);
    CHECK(bm.dimension() == 0);
  }

  SUBCASE("scalar identity covariance is one-dimensional") {
    auto ctx = scalar();
    auto eta = CovarianceMatrix::from_kraus(ctx, 1, {Matrix::Identity(1, 1)});
    auto bm = build_bimodule(ctx, eta);
    CHECK(bm.generator_count() == 1);
    CHECK(bm.dimension() == 1);
    CHECK(std::abs(bm.gram(0, 0) - Complex(1.0)) <= 1e-14);
  }

  SUBCASE("diagonal M_2 with the identity covariance") {
    auto ctx = diag2();
    auto eta = CovarianceMatrix::diagonal_expectation(ctx, 1);
    auto bm = build_bimodule(ctx, eta);
    REQUIRE(bm.generator_count() == 4);
    // Gram entries tau(b_b* eta(b_a* b_a) b_b), evaluated entrywise
    for (int row = 0; row < 4; ++row) {
      for (int col = 0; col < 4; ++col) {
        const auto& [a, i, b] = bm.span_labels[row];
        const auto& [c, j, d] = bm.span_labels[col];
        const Matrix mid = eta.eta_entry(i, j, ctx.basis()[a].adjoint() * ctx.basis()[c]);
        const Complex want = ctx.trace(ctx.basis()[b].adjoint() * mid * ctx.basis()[d]);
        CHECK(std::abs(bm.gram(row, col) - want) <= 1e-14);
      }
    }
    // diagonal Gram with entries {1/2, 0, 0, 1/2}: the two crossed generators
    // are null, so the quotient is two-dimensional
    CHECK((bm.gram - bm.gram.diagonal().asDiagonal().toDenseMatrix()).norm() <= 1e-14);
    CHECK(bm.dimension() == 2);
  }
}

TEST_CASE("scalar chain model") {
  auto ctx = scalar();
  auto eta = CovarianceMatrix::from_kraus(ctx, 1, {Matrix::Identity(1, 1)});
  FockModel model(ctx, eta, 3);

  CHECK(model.level_dims() == std::vector<int>{1, 1, 1, 1});
  CHECK(model.total_dim() == 4);

  // s is the tridiagonal chain with unit couplings
  const Matrix s = model.semicircular(0);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      const double want = std::abs(r - c) == 1 ? 1.0 : 0.0;
      CHECK(std::abs(s(r, c) - Complex(want)) <= 1e-12);
    }

  // creation maps the vacuum to level one; annihilation kills it
  const Vector created = model.creation(0) * model.omega();
  CHECK(std::abs(created(1) - Complex(1.0)) <= 1e-12);
  CHECK(std::abs(created(0)) <= 1e-14);
  CHECK((model.annihilation(0) * model.omega()).norm() <= 1e-14);

  // moments: E(s^2) = 1, E(s^4) = 2, odd moments vanish
  auto spoly = BPolynomial::letter(ctx, 0);
  auto expect_scalar = [&](const BPolynomial& p) {
    return model.expectation(p)(0, 0).real();
  };
  CHECK(expect_scalar(spoly * spoly) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(expect_scalar(spoly * spoly * spoly) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(expect_scalar(spoly * spoly * spoly * spoly) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(expect_scalar(spoly * spoly * spoly * spoly * spoly * spoly) ==
        doctest::Approx(5.0).epsilon(1e-12));

  // exactness guard: degree 7 > 2·depth = 6
  auto deg7 = spoly * spoly * spoly * spoly * spoly * spoly * spoly;
  CHECK_THROWS_AS(model.expectation(deg7), ExactnessError);

  // operator norm estimate of the truncated chain: 2cos(pi/(N+2)), N = 3
  CHECK(model.operator_norm_estimate(spoly) ==
        doctest::Approx(2.0 * std::cos(M_PI / 5.0)).epsilon(1e-10));
  CHECK(model.operator_norm_estimate(BPolynomial::one(ctx)) == doctest::Approx(1.0));
}

TEST_CASE("second moments realize the covariance") {
  auto ctx = diag2();
  auto base = CovarianceMatrix::diagonal_expectation(ctx, 2);
  FockModel model(ctx, base, 2);

  Rng rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix b = ctx.random_element(rng);
    for (int i = 0; i < 2; ++i) {
      // E(s_i) = 0
      CHECK(model.expectation(BPolynomial::letter(ctx, i)).norm() <= 1e-13);
      for (int j = 0; j < 2; ++j) {
        BWord w;
        w.letters = {i, j};
        w.coeffs = {Matrix::Identity(2, 2), b, Matrix::Identity(2, 2)};
        const Matrix got = model.expectation(BPolynomial::word(ctx, w));
        const Matrix want = base.eta_entry(i, j, b);
        CHECK((got - want).norm() <= 1e-12);
      }
    }
  }

  // s_i self-adjoint; b in B acts with its own spectral norm at every level
  for (int i = 0; i < 2; ++i)
    CHECK((model.semicircular(i) - model.semicircular(i).adjoint()).norm() <= 1e-12);
  const Matrix e11 = ctx.basis()[0];
  CHECK(model.operator_norm_estimate(BPolynomial::constant(ctx, e11)) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("moment exactness is depth-stable") {
  auto ctx = diag2();
  Rng rng(33);
  std::vector<Matrix> kraus;
  for (int t = 0; t < 2; ++t) {
    Matrix k = Matrix::Zero(4, 2);
    for (int i = 0; i < 2; ++i)
      for (int p = 0; p < 2; ++p) k(i * 2 + p, p) = rng.cplx();
    kraus.push_back(k);
  }
  auto [eta, rep] = CovarianceMatrix::from_kraus(ctx, 2, kraus).symmetrized();
  REQUIRE(rep.completely_positive(1e-10));
  REQUIRE(rep.tau_symmetric(1e-10));

  FockModel shallow(ctx, eta, 2);
  FockModel deep(ctx, eta, 3);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 1 + static_cast<int>(rng.integer(4));  // degree ≤ 4 = 2·shallow depth
    BWord w;
    for (int k = 0; k < d; ++k) w.letters.push_back(static_cast<int>(rng.integer(2)));
    for (int k = 0; k <= d; ++k) w.coeffs.push_back(ctx.random_element(rng));
    auto p = BPolynomial::word(ctx, w);
    CHECK((shallow.expectation(p) - deep.expectation(p)).norm() <= 1e-11);
  }
}

TEST_CASE("fock expectations agree with the pair-partition oracle") {
  auto ctx = diag2();
  std::vector<CovarianceMatrix> etas;
  etas.push_back(CovarianceMatrix::diagonal_expectation(ctx, 2));
  {
    Rng rng(35);
    std::vector<Matrix> kraus;
    for (int t = 0; t < 2; ++t) {
      Matrix k = Matrix::Zero(4, 2);
      for (int i = 0; i < 2; ++i)
        for (int p = 0; p < 2; ++p) k(i * 2 + p, p) = rng.cplx();
      kraus.push_back(k);
    }
    auto [sym, rep] = CovarianceMatrix::from_kraus(ctx, 2, kraus).symmetrized();
    REQUIRE(rep.completely_positive(1e-10));
    etas.push_back(std::move(sym));
  }

  for (const auto& eta : etas) {
    FockModel model(ctx, eta, 2);
    for (int d = 0; d <= 4; ++d) {
      std::vector<int> letters(static_cast<size_t>(d), 0);
      std::vector<int> coeffs(static_cast<size_t>(d) + 1, 0);
      std::function<void(int)> lloop = [&](int pos) {
        if (pos == d) {
          std::function<void(int)> cloop = [&](int cpos) {
            if (cpos == d + 1) {
              std::vector<Matrix> cmats;
              for (int c : coeffs) cmats.push_back(ctx.basis()[c]);
              const Matrix lhs =
                  model.expectation(basis_word(ctx, letters, coeffs));
              const Matrix rhs = cumulant::semicircular_moment_oracle(eta, letters, cmats);
              CHECK((lhs - rhs).norm() <= 1e-10);
              return;
            }
            for (int c = 0; c < 2; ++c) {
              coeffs[cpos] = c;
              cloop(cpos + 1);
            }
          };
          cloop(0);
          return;
        }
        for (int l = 0; l < 2; ++l) {
          letters[pos] = l;
          lloop(pos + 1);
        }
      };
      lloop(0);
    }
  }
}

TEST_CASE("traciality with a weighted trace needs tau symmetry") {
  auto ctx = AlgebraContext::multi_matrix({{1, 1}, {1, 1}}, {1.0 / 3.0, 2.0 / 3.0});
  Rng rng(37);
  std::vector<Matrix> kraus;
  for (int t = 0; t < 2; ++t) {
    Matrix k = Matrix::Zero(4, 2);
    for (int i = 0; i < 2; ++i)
      for (int p = 0; p < 2; ++p) k(i * 2 + p, p) = rng.cplx();
    kraus.push_back(k);
  }
  auto [eta, rep] = CovarianceMatrix::from_kraus(ctx, 2, kraus).symmetrized();
  REQUIRE(rep.completely_positive(1e-9));
  REQUIRE(rep.tau_symmetric(1e-10));

  FockModel model(ctx, eta, 3);
  for (int trial = 0; trial < 20; ++trial) {
    BWord wa, wb;
    const int da = 1 + static_cast<int>(rng.integer(3));
    const int db = 1 + static_cast<int>(rng.integer(3));
    for (int k = 0; k < da; ++k) wa.letters.push_back(static_cast<int>(rng.integer(2)));
    for (int k = 0; k <= da; ++k) wa.coeffs.push_back(ctx.random_element(rng));
    for (int k = 0; k < db; ++k) wb.letters.push_back(static_cast<int>(rng.integer(2)));
    for (int k = 0; k <= db; ++k) wb.coeffs.push_back(ctx.random_element(rng));
    auto a = BPolynomial::word(ctx, wa);
    auto b = BPolynomial::word(ctx, wb);
    const Complex lhs = ctx.trace(model.expectation(a * b));
    const Complex rhs = ctx.trace(model.expectation(b * a));
    CHECK(std::abs(lhs - rhs) <= 1e-9);
  }
}

TEST_CASE("block-diagonal covariance produces free families in the model") {
  auto ctx = diag2();
  auto eta = CovarianceMatrix::block_diagonal(CovarianceMatrix::diagonal_expectation(ctx, 1),
                                              CovarianceMatrix::diagonal_expectation(ctx, 1));
  FockModel model(ctx, eta, 2);

  cumulant::CumulantTable::MomentFn moment = [&](const std::vector<int>& letters,
                                                 const std::vector<int>& interior) {
    BWord w;
    w.letters = letters;
    w.coeffs.push_back(Matrix::Identity(2, 2));
    for (int c : interior) w.coeffs.push_back(ctx.basis()[c]);
    w.coeffs.push_back(Matrix::Identity(2, 2));
    return model.expectation(BPolynomial::word(ctx, w));
  };
  auto table = cumulant::CumulantTable::from_moments(ctx, 2, 0, 4, moment);
  auto rep = cumulant::check_amalgamated_freeness(table, {{0}, {1}}, 4, 1e-10);
  CHECK(rep.passed());
}

TEST_CASE("noncommutative coefficients: full stack on M_2 inside M_4") {
  // B = M_2 ⊗ 1_2 in M_4, so E_B is a nontrivial projection and B is
  // noncommutative; Kraus operators built from elements of B keep eta inside B.
  auto ctx = AlgebraContext::multi_matrix({{2, 2}});
  Rng rng(39);
  std::vector<Matrix> kraus;
  for (int t = 0; t < 2; ++t) kraus.push_back(ctx.random_element(rng));
  auto [eta, rep] = CovarianceMatrix::from_kraus(ctx, 1, kraus).symmetrized();
  REQUIRE(rep.completely_positive(1e-9));
  REQUIRE(rep.tau_symmetric(1e-9));

  FockModel model(ctx, eta, 2);
  CHECK((model.semicircular(0) - model.semicircular(0).adjoint()).norm() <= 1e-12);

  // oracle equivalence across all basis words of degree <= 4
  double worst = 0.0;
  const int dimb = ctx.dim();
  for (int d = 0; d <= 4; ++d) {
    std::vector<int> letters(static_cast<size_t>(d), 0);
    std::vector<int> coeffs(static_cast<size_t>(d) + 1, 0);
    std::function<void(int)> cloop = [&](int cpos) {
      if (cpos == d + 1) {
        std::vector<Matrix> cmats;
        for (int c : coeffs) cmats.push_back(ctx.basis()[c]);
        const Matrix lhs = model.expectation(basis_word(ctx, letters, coeffs));
        const Matrix rhs = cumulant::semicircular_moment_oracle(eta, letters, cmats);
        worst = std::max(worst, (lhs - rhs).norm());
        return;
      }
      for (int c = 0; c < dimb; ++c) {
        coeffs[cpos] = c;
        cloop(cpos + 1);
      }
    };
    cloop(0);
  }
  CHECK(worst <= 1e-9);

  // traciality of tau on the generated algebra
  for (int trial = 0; trial < 10; ++trial) {
    BWord wa, wb;
    for (int k = 0; k < 2; ++k) {
      wa.letters.push_back(0);
      wb.letters.push_back(0);
    }
    for (int k = 0; k <= 2; ++k) {
      wa.coeffs.push_back(ctx.random_element(rng));
      wb.coeffs.push_back(ctx.random_element(rng));
    }
    auto a = BPolynomial::word(ctx, wa);
    auto b = BPolynomial::word(ctx, wb);
    CHECK(std::abs(ctx.trace(model.expectation(a * b)) -
                   ctx.trace(model.expectation(b * a))) <= 1e-9);
  }
}

TEST_CASE("dimension cap failure names the level") {
  auto ctx = AlgebraContext::multi_matrix({{2, 1}});
  auto eta = CovarianceMatrix::diagonal_expectation(ctx, 2);
  CHECK_THROWS_AS(FockModel(ctx, eta, 4, 64), SizeLimitError);
}

TEST_CASE("non-CP covariance tables cannot build a bimodule") {
  auto ctx = diag2();
  Matrix id = Matrix::Identity(2, 2);
  Matrix zero = Matrix::Zero(2, 2);
  auto eta = CovarianceMatrix::from_table(ctx, 2, {{zero, id}, {id, zero}});
  REQUIRE_FALSE(eta.check_completely_positive().completely_positive(1e-10));
  CHECK_THROWS_AS(build_bimodule(ctx, eta), ValidationError);
  CHECK_THROWS_AS(FockModel(ctx, eta, 2), ValidationError);
}

TEST_CASE("full M_2 coefficients with two indices") {
  auto ctx = AlgebraContext::multi_matrix({{2, 1}});
  Rng rng(71);
  std::vector<Matrix> kraus;
  for (int t = 0; t < 2; ++t) {
    Matrix k(4, 2);
    k.topRows(2) = ctx.random_element(rng);
    k.bottomRows(2) = ctx.random_element(rng);
    kraus.push_back(k);
  }
  auto [eta, rep] = CovarianceMatrix::from_kraus(ctx, 2, kraus).symmetrized();
  REQUIRE(rep.completely_positive(1e-10));
  REQUIRE(rep.tau_symmetric(1e-9));
  FockModel model(ctx, eta, 2);
  CHECK(model.level_dims()[0] == 4);
  auto orep = opfree::verify::check_oracle_equivalence(model, 3, 1e-9);
  CHECK(orep.passed());
}
