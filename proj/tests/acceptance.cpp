// Acceptance suite: one check per shipped guarantee, each printed as a single
// PASS/FAIL line with its measured defect and runtime. Exit code is the number
// of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <vector>

#include "opfree/config.hpp"
#include "opfree/cumulant.hpp"
#include "opfree/ncpart.hpp"
#include "opfree/verify.hpp"

using namespace opfree;
using bpoly::BPolynomial;
using bpoly::BWord;
using covmap::CovarianceMatrix;
using cumulant::CumulantTable;
using fock::FockModel;
using matalg::AlgebraContext;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// --------------------------------------------------------------------------
// independent brute-force oracle for the partition count check

using Blocks = std::vector<std::vector<int>>;

void all_partitions_rec(int pos, int d, int maxused, std::vector<int>& assign,
                        const std::function<void(const std::vector<int>&)>& emit) {
  if (pos == d) {
    emit(assign);
    return;
  }
  for (int b = 0; b <= maxused + 1; ++b) {
    assign[pos] = b;
    all_partitions_rec(pos + 1, d, std::max(maxused, b), assign, emit);
  }
}

bool naive_noncrossing(int d, const std::vector<int>& assign) {
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b)
      for (int c = b + 1; c < d; ++c)
        for (int e = c + 1; e < d; ++e)
          if (assign[a] == assign[c] && assign[b] == assign[e] && assign[a] != assign[b])
            return false;
  return true;
}

Outcome criterion_nc_counts() {
  Outcome out;
  for (int d = 1; d <= 10; ++d) {
    const auto nc = ncpart::enumerate_nc(d);
    if (static_cast<std::int64_t>(nc.size()) != ncpart::catalan(d)) {
      out.detail = "count mismatch at d=" + std::to_string(d);
      return out;
    }
  }
  for (int d = 1; d <= 8; ++d) {
    std::int64_t brute = 0;
    std::vector<int> assign(static_cast<size_t>(d), 0);
    all_partitions_rec(0, d, -1, assign, [&](const std::vector<int>& a) {
      if (naive_noncrossing(d, a)) ++brute;
    });
    std::set<Blocks> unique_blocks;
    for (const auto& pi : ncpart::enumerate_nc(d)) unique_blocks.insert(pi.blocks);
    if (brute != static_cast<std::int64_t>(unique_blocks.size())) {
      out.detail = "brute-force filter disagrees at d=" + std::to_string(d);
      return out;
    }
  }
  out.pass = true;
  out.detail = "counts match Catalan numbers to d=10, filter oracle agrees to d=8";
  return out;
}

// --------------------------------------------------------------------------

Outcome criterion_moment_cumulant_duality() {
  Outcome out;
  double worst = 0.0;
  Rng rng(1001);
  const std::vector<std::vector<std::pair<int, int>>> shapes{
      {{1, 1}, {1, 1}},  // diagonal M_2
      {{2, 2}},          // M_2 with multiplicity two inside M_4
  };
  for (const auto& shape : shapes) {
    auto ctx = AlgebraContext::multi_matrix(shape);
    cumulant::MatrixDomain dom{&ctx};
    for (int dataset = 0; dataset < 25; ++dataset) {
      cumulant::CumulantEvaluator<cumulant::MatrixDomain> ev(dom);
      std::vector<Matrix> args;
      for (int k = 0; k < 6; ++k)
        args.push_back(rng.matrix(ctx.ambient_dim(), ctx.ambient_dim()));
      for (int d = 1; d <= 6; ++d) {
        std::vector<Matrix> prefix(args.begin(), args.begin() + d);
        const Matrix direct = dom.moment(std::span<const Matrix>(prefix));
        const Matrix rebuilt = ev.moment_from_cumulants(prefix);
        worst = std::max(worst, (direct - rebuilt).norm());
      }
    }
  }
  out.pass = worst <= 1e-10;
  out.detail = "50 datasets, d<=6, max defect " + report::format_defect(worst);
  return out;
}

// --------------------------------------------------------------------------

CovarianceMatrix random_symmetrized_eta(const AlgebraContext& ctx, int index_count,
                                        std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Matrix> kraus;
  const int n = ctx.ambient_dim();
  for (int t = 0; t < 2; ++t) {
    Matrix k = Matrix::Zero(n * index_count, n);
    // blockwise-diagonal Kraus data keeps the image inside the diagonal B
    for (int i = 0; i < index_count; ++i)
      for (int p = 0; p < n; ++p) k(i * n + p, p) = rng.cplx();
    kraus.push_back(k);
  }
  auto [sym, rep] = CovarianceMatrix::from_kraus(ctx, index_count, kraus).symmetrized();
  if (!rep.completely_positive(1e-10) || !rep.tau_symmetric(1e-10))
    throw ValidationError("random covariance seed does not give a CP tau-symmetric map");
  return std::move(sym);
}

Outcome criterion_semicircular_law() {
  Outcome out;
  double worst = 0.0;

  {  // scalar identity covariance, depth 4
    auto ctx = AlgebraContext::multi_matrix({{1, 1}});
    auto eta = CovarianceMatrix::from_kraus(ctx, 1, {Matrix::Identity(1, 1)});
    FockModel model(ctx, eta, 4);
    auto rep = verify::check_oracle_equivalence(model, 6, 1e-9);
    worst = std::max(worst, rep.max_defect());
    if (!rep.passed()) {
      out.detail = "scalar model disagrees with the pair-partition oracle";
      return out;
    }
  }
  {  // diagonal covariance over two indices on diagonal M_2, depth 3
    auto ctx = AlgebraContext::multi_matrix({{1, 1}, {1, 1}});
    auto eta = CovarianceMatrix::diagonal_expectation(ctx, 2);
    FockModel model(ctx, eta, 3);
    auto rep = verify::check_oracle_equivalence(model, 6, 1e-9);
    worst = std::max(worst, rep.max_defect());
    if (!rep.passed()) {
      out.detail = "diagonal-EB model disagrees with the pair-partition oracle";
      return out;
    }
  }
  {  // random Kraus covariance, tau-symmetrized, depth 3
    auto ctx = AlgebraContext::multi_matrix({{1, 1}, {1, 1}});
    auto eta = random_symmetrized_eta(ctx, 2, 35);
    FockModel model(ctx, eta, 3);
    auto rep = verify::check_oracle_equivalence(model, 6, 1e-9);
    worst = std::max(worst, rep.max_defect());
    if (!rep.passed()) {
      out.detail = "random symmetrized model disagrees with the pair-partition oracle";
      return out;
    }
  }
  out.pass = true;
  out.detail = "three covariances, all words to degree 6, max defect " +
               report::format_defect(worst);
  return out;
}

// --------------------------------------------------------------------------

Outcome criterion_conjugate_system() {
  Outcome out;
  auto ctx = AlgebraContext::multi_matrix({{1, 1}, {1, 1}});
  auto eta = CovarianceMatrix::diagonal_expectation(ctx, 2);
  FockModel model(ctx, eta, 3);
  const int m = 2;
  const int d_max = 5;

  auto table_for = [&](const std::vector<BPolynomial>& xi) {
    std::vector<BPolynomial> letter_ops;
    for (int i = 0; i < m; ++i) letter_ops.push_back(BPolynomial::letter(ctx, i));
    for (const auto& x : xi) letter_ops.push_back(x);
    CumulantTable::MomentFn moment = [&, letter_ops](const std::vector<int>& letters,
                                                     const std::vector<int>& interior) {
      BPolynomial word = letter_ops.at(static_cast<size_t>(letters.at(0)));
      for (size_t k = 1; k < letters.size(); ++k)
        word = word * BPolynomial::constant(ctx, ctx.basis()[interior[k - 1]]) *
               letter_ops.at(static_cast<size_t>(letters[k]));
      return model.expectation(word);
    };
    return CumulantTable::from_moments(ctx, m, m, d_max + 1, moment);
  };

  std::vector<BPolynomial> s{BPolynomial::letter(ctx, 0), BPolynomial::letter(ctx, 1)};
  Rng ibp_rng(1002);
  auto good_ibp = verify::check_integration_by_parts(model, s, d_max, 1e-9, &ibp_rng);
  auto good_conj = cumulant::check_conjugate_cumulants(eta, table_for(s), d_max, 1e-9);
  if (!good_ibp.rep.passed() || !good_conj.rep.passed()) {
    out.detail = "semicircular family fails its own certification";
    return out;
  }

  std::vector<BPolynomial> shifted{s[0] + BPolynomial::one(ctx) * Complex(0.1),
                                   s[1] + BPolynomial::one(ctx) * Complex(0.1)};
  auto bad_ibp = verify::check_integration_by_parts(model, shifted, d_max, 1e-9);
  auto bad_conj = cumulant::check_conjugate_cumulants(eta, table_for(shifted), d_max, 1e-9);
  if (bad_ibp.rep.passed() || bad_conj.rep.passed()) {
    out.detail = "perturbed candidate was not rejected";
    return out;
  }
  if (bad_ibp.first_fail_degree != bad_conj.first_fail_degree) {
    out.detail = "first-failure degrees disagree: " +
                 std::to_string(bad_ibp.first_fail_degree) + " vs " +
                 std::to_string(bad_conj.first_fail_degree);
    return out;
  }
  out.pass = true;
  out.detail = "s passes both to degree 5; s+0.1 fails both first at degree " +
               std::to_string(bad_ibp.first_fail_degree);
  return out;
}

// --------------------------------------------------------------------------

Outcome criterion_adjoint_calculus() {
  Outcome out;
  Rng rng(1003);
  double worst = 0.0;
  int warns = 0;
  for (int variant = 0; variant < 2; ++variant) {
    auto ctx = variant == 0 ? AlgebraContext::multi_matrix({{1, 1}})
                            : AlgebraContext::multi_matrix({{1, 1}, {1, 1}});
    auto eta = variant == 0
                   ? CovarianceMatrix::from_kraus(ctx, 1, {Matrix::Identity(1, 1)})
                   : CovarianceMatrix::diagonal_expectation(ctx, 2);
    FockModel model(ctx, eta, 4);
    auto rep = verify::check_adjoint_formula(model, 2, 2, 1e-9, rng);
    worst = std::max(worst, rep.max_defect());
    if (!rep.passed()) {
      out.detail = "adjoint formula or shuffle identity failed";
      return out;
    }

    std::vector<BPolynomial> ps;
    ps.push_back(BPolynomial::one(ctx));
    for (const auto& b : ctx.basis()) ps.push_back(BPolynomial::constant(ctx, b));
    for (int i = 0; i < eta.index_count(); ++i) ps.push_back(BPolynomial::letter(ctx, i));
    for (int i = 0; i < eta.index_count(); ++i)
      for (int j = 0; j < eta.index_count(); ++j)
        ps.push_back(BPolynomial::letter(ctx, i) * BPolynomial::letter(ctx, j));
    auto norms = verify::check_norm_bound(model, ps, 1.05);
    warns += norms.warn_count();
    if (!norms.passed()) {
      out.detail = "norm bound failed beyond the slack factor";
      return out;
    }
  }
  if (warns != 0) {
    out.detail = "norm bound emitted warnings on the golden models";
    return out;
  }
  out.pass = true;
  out.detail = "formula and shuffle to degree 2, norm bounds WARN-free; max defect " +
               report::format_defect(worst);
  return out;
}

// --------------------------------------------------------------------------

Outcome criterion_freeness() {
  Outcome out;
  auto ctx = AlgebraContext::multi_matrix({{1, 1}, {1, 1}});
  auto part = CovarianceMatrix::diagonal_expectation(ctx, 1);
  auto eta = CovarianceMatrix::block_diagonal(part, part);
  FockModel model(ctx, eta, 3);

  CumulantTable::MomentFn moment = [&](const std::vector<int>& letters,
                                       const std::vector<int>& interior) {
    BWord w;
    w.letters = letters;
    w.coeffs.push_back(Matrix::Identity(2, 2));
    for (int c : interior) w.coeffs.push_back(ctx.basis()[c]);
    w.coeffs.back() = w.coeffs.back();
    w.coeffs.push_back(Matrix::Identity(2, 2));
    return model.expectation(BPolynomial::word(ctx, w));
  };
  auto table = CumulantTable::from_moments(ctx, 2, 0, 6, moment);
  auto rep = cumulant::check_amalgamated_freeness(table, {{0}, {1}}, 6, 1e-10);
  if (!rep.passed()) {
    out.detail = "block-diagonal covariance produced a mixed cumulant of size " +
                 report::format_defect(rep.max_defect());
    return out;
  }

  // coupled covariance: every entry is E_B, so mixed pairings survive
  std::vector<Matrix> kraus;
  for (const auto& k : part.kraus()) {
    Matrix big(4, 2);
    big.topRows(2) = k;
    big.bottomRows(2) = k;
    kraus.push_back(big);
  }
  auto coupled = CovarianceMatrix::from_kraus(ctx, 2, kraus);
  FockModel coupled_model(ctx, coupled, 3);
  CumulantTable::MomentFn coupled_moment = [&](const std::vector<int>& letters,
                                               const std::vector<int>& interior) {
    BWord w;
    w.letters = letters;
    w.coeffs.push_back(Matrix::Identity(2, 2));
    for (int c : interior) w.coeffs.push_back(ctx.basis()[c]);
    w.coeffs.push_back(Matrix::Identity(2, 2));
    return coupled_model.expectation(BPolynomial::word(ctx, w));
  };
  auto coupled_table = CumulantTable::from_moments(ctx, 2, 0, 4, coupled_moment);
  CumulantTable::Key witness;
  const double mixed = coupled_table.max_mixed_entry({{0}, {1}}, 4, &witness);
  if (mixed <= 1e-10) {
    out.detail = "coupled covariance was not detected";
    return out;
  }
  out.pass = true;
  out.detail = "block-diagonal mixed cumulants <= 1e-10 to d=6; coupled witness " +
               CumulantTable::key_label(witness);
  return out;
}

// --------------------------------------------------------------------------

Outcome criterion_free_convolution() {
  Outcome out;
  auto ctx = AlgebraContext::multi_matrix({{1, 1}, {1, 1}});
  auto eta1 = CovarianceMatrix::diagonal_expectation(ctx, 2);
  auto eta2 = random_symmetrized_eta(ctx, 2, 35);
  auto doubled = CovarianceMatrix::block_diagonal(eta1, eta2);
  FockModel model(ctx, doubled, 2);
  const int d_max = 4;

  double worst = 0.0;
  const CumulantTable base = CumulantTable::semicircular(eta1, d_max);
  for (double t : {0.0, 1.0, 2.5}) {
    std::vector<BPolynomial> letter_ops;
    for (int i = 0; i < 2; ++i)
      letter_ops.push_back(BPolynomial::letter(ctx, i) +
                           BPolynomial::letter(ctx, 2 + i) * Complex(std::sqrt(t)));
    CumulantTable::MomentFn moment = [&, letter_ops](const std::vector<int>& letters,
                                                     const std::vector<int>& interior) {
      BPolynomial word = letter_ops.at(static_cast<size_t>(letters.at(0)));
      for (size_t k = 1; k < letters.size(); ++k)
        word = word * BPolynomial::constant(ctx, ctx.basis()[interior[k - 1]]) *
               letter_ops.at(static_cast<size_t>(letters[k]));
      return model.expectation(word);
    };
    const auto empirical = CumulantTable::from_moments(ctx, 2, 0, d_max, moment);
    const auto convolved = base.free_convolve_semicircular(eta2, t);
    const auto direct =
        CumulantTable::semicircular(CovarianceMatrix::sum(eta1, eta2.scaled(t)), d_max);
    worst = std::max(worst, empirical.max_difference(convolved));
    worst = std::max(worst, convolved.max_difference(direct));

    FockModel direct_model(ctx, CovarianceMatrix::sum(eta1, eta2.scaled(t)), 2);
    std::vector<BPolynomial> plain{BPolynomial::letter(ctx, 0), BPolynomial::letter(ctx, 1)};
    CumulantTable::MomentFn direct_moment = [&, plain](const std::vector<int>& letters,
                                                       const std::vector<int>& interior) {
      BPolynomial word = plain.at(static_cast<size_t>(letters.at(0)));
      for (size_t k = 1; k < letters.size(); ++k)
        word = word * BPolynomial::constant(ctx, ctx.basis()[interior[k - 1]]) *
               plain.at(static_cast<size_t>(letters[k]));
      return direct_model.expectation(word);
    };
    const auto direct_empirical = CumulantTable::from_moments(ctx, 2, 0, d_max, direct_moment);
    worst = std::max(worst, direct_empirical.max_difference(convolved));
  }
  out.pass = worst <= 1e-9;
  out.detail = "t in {0, 1, 2.5}, max table difference " + report::format_defect(worst);
  return out;
}

// --------------------------------------------------------------------------

Outcome criterion_linearization() {
  Outcome out;
  auto ctx = AlgebraContext::multi_matrix({{1, 1}});
  Rng rng(1004);
  double worst = 0.0;
  int built = 0;
  while (built < 20) {
    // random scalar-coefficient polynomial of degree <= 4, symmetrized
    BPolynomial q(ctx);
    const int terms = 1 + static_cast<int>(rng.integer(3));
    std::set<std::vector<int>> used;
    for (int t = 0; t < terms; ++t) {
      const int d = 1 + static_cast<int>(rng.integer(4));
      std::vector<int> seq;
      for (int k = 0; k < d; ++k) seq.push_back(static_cast<int>(rng.integer(2)));
      if (!used.insert(seq).second) continue;
      BWord w;
      w.letters = seq;
      for (int k = 0; k <= d; ++k)
        w.coeffs.push_back(Matrix::Identity(1, 1) *
                           (k == 0 ? Complex(rng.real(), rng.real()) : Complex(1.0)));
      q = q + BPolynomial::word(ctx, w);
    }
    BPolynomial p = (q + q.adjoint()) * Complex(0.5);
    if (p.degree() < 1 || p.is_zero()) continue;
    ++built;
    auto pencil = bpoly::linearize(p, 2);
    if (pencil.self_adjoint_defect() > 1e-10) {
      out.detail = "pencil not self-adjoint";
      return out;
    }
    for (int pt = 0; pt < 10; ++pt) {
      std::vector<Matrix> point{rng.hermitian(4), rng.hermitian(4)};
      const Matrix direct = p.evaluate(point);
      const double scale = std::max(1.0, direct.norm());
      worst = std::max(worst, (pencil.schur_eval(point) - direct).norm() / scale);
    }
  }
  out.pass = worst <= 1e-9;
  out.detail = "20 polynomials x 10 tuples, max relative defect " + report::format_defect(worst);
  return out;
}

// --------------------------------------------------------------------------

Outcome criterion_isometries() {
  Outcome out;
  Rng rng(1005);
  double worst = 0.0;

  {  // J on the diagonal model
    auto ctx = AlgebraContext::multi_matrix({{1, 1}, {1, 1}});
    auto eta = CovarianceMatrix::diagonal_expectation(ctx, 2);
    FockModel model(ctx, eta, 3);
    auto rep = verify::check_j_isometry(model, 25, 1e-9, rng);
    worst = std::max(worst, rep.max_defect());
    if (!rep.passed()) {
      out.detail = "conjugation pairing identity failed";
      return out;
    }
  }
  {  // free-product pairing on a block-free doubled scalar model
    auto ctx = AlgebraContext::multi_matrix({{1, 1}});
    auto one = CovarianceMatrix::from_kraus(ctx, 1, {Matrix::Identity(1, 1)});
    auto eta = CovarianceMatrix::block_diagonal(one, one);
    FockModel model(ctx, eta, 5);
    auto rep = verify::check_psi_isometry(model, {0}, {1}, 2, 1e-9);
    worst = std::max(worst, rep.max_defect());
    if (!rep.passed()) {
      out.detail = "free-product pairing identity failed";
      return out;
    }
  }
  out.pass = true;
  out.detail = "conjugation and free-product pairings, max defect " +
               report::format_defect(worst);
  return out;
}

// --------------------------------------------------------------------------

Outcome criterion_scope_note() {
  Outcome out;
  cli::RunConfig config;
  config.blocks = {{1, 1}};
  config.covariance.kind = "diagonal-EB";
  config.covariance.index_count = 1;
  config.depth = 2;
  config.suites = {"scope"};
  std::ostringstream report_text;
  if (cli::run_command(config, report_text) != 0) {
    out.detail = "scope suite did not pass";
    return out;
  }
  const std::string text = report_text.str();
  const bool has_statement =
      text.find("infinite-dimensional") != std::string::npos &&
      text.find("cannot be decided on a finite-dimensional truncation") != std::string::npos;
  const bool points_at_ingredients =
      text.find("integration-by-parts") != std::string::npos &&
      text.find("conjugate-cumulants") != std::string::npos &&
      text.find("adjoint-formula") != std::string::npos;
  if (!has_statement || !points_at_ingredients) {
    out.detail = "report template does not record the scope note with ingredient pointers";
    return out;
  }
  out.pass = true;
  out.detail = "report records the desk-scale scope note with ingredient suites";
  return out;
}

struct Criterion {
  std::string name;
  double time_limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"non-crossing partition counts", 10.0, criterion_nc_counts},
      {"moment-cumulant duality", 30.0, criterion_moment_cumulant_duality},
      {"semicircular law realization", 120.0, criterion_semicircular_law},
      {"conjugate-system certification", 120.0, criterion_conjugate_system},
      {"adjoint calculus", 120.0, criterion_adjoint_calculus},
      {"freeness with amalgamation", 120.0, criterion_freeness},
      {"free convolution consistency", 120.0, criterion_free_convolution},
      {"self-adjoint linearization", 60.0, criterion_linearization},
      {"pairing isometries", 60.0, criterion_isometries},
      {"desk-scale scope note", 10.0, criterion_scope_note},
  };

  int failures = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed > c.time_limit_s) {
      out.pass = false;
      out.detail += " [exceeded " + std::to_string(c.time_limit_s) + "s budget]";
    }
    std::printf("[%s] %2d. %-34s %6.2fs  %s\n", out.pass ? "PASS" : "FAIL", index,
                c.name.c_str(), elapsed, out.detail.c_str());
    if (!out.pass) ++failures;
  }
  if (failures == 0)
    std::printf("acceptance: all %zu criteria passed\n", criteria.size());
  else
    std::printf("acceptance: %d of %zu criteria FAILED\n", failures, criteria.size());
  return failures;
}
