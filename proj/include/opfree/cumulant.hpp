#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "opfree/bpoly.hpp"
#include "opfree/covmap.hpp"
#include "opfree/ncpart.hpp"
#include "opfree/report.hpp"

namespace opfree::cumulant {

using matalg::AlgebraContext;

// A domain supplies the operand type for multiplicative-function evaluation:
// left/right multiplication by elements of B and the B-valued moment of an
// operand list. MatrixDomain works over ambient matrices, WordDomain over
// formal polynomials with a caller-supplied expectation.

struct MatrixDomain {
  using Op = Matrix;
  const AlgebraContext* ctx = nullptr;

  const AlgebraContext& context() const { return *ctx; }
  Op left_mul(const Matrix& b, const Op& a) const { return b * a; }
  Op right_mul(const Op& a, const Matrix& b) const { return a * b; }
  Matrix moment(std::span<const Op> ops) const {
    Matrix prod = Matrix::Identity(ctx->ambient_dim(), ctx->ambient_dim());
    for (const auto& a : ops) prod = prod * a;
    return ctx->conditional_expectation(prod);
  }
  std::string fingerprint(const Op& a) const;
};

struct WordDomain {
  using Op = bpoly::BPolynomial;
  const AlgebraContext* ctx = nullptr;
  std::function<Matrix(const bpoly::BPolynomial&)> expect;

  const AlgebraContext& context() const { return *ctx; }
  Op left_mul(const Matrix& b, const Op& a) const { return a.left_mul(b); }
  Op right_mul(const Op& a, const Matrix& b) const { return a.right_mul(b); }
  Matrix moment(std::span<const Op> ops) const {
    bpoly::BPolynomial prod = bpoly::BPolynomial::one(*ctx);
    for (const auto& a : ops) prod = prod * a;
    return expect(prod);
  }
  std::string fingerprint(const Op& a) const;
};

template <class Domain>
struct MultiplicativeFunction {
  std::function<Matrix(const Domain&, std::span<const typename Domain::Op>)> kernel;
  std::function<bool(int)> supports = [](int) { return true; };
};

// Recursive interval-block evaluation of f̂(π)[a_1 ⊗ ... ⊗ a_d]: collapse the
// interval block through the arity kernel, multiply the value into the left
// neighbor (prepend when the interval starts the row), recurse on the rest.
// `prefer_last_interval` switches the tie-break for the value-independence
// property test; the default matches split_interval_block (smallest k).
template <class Domain>
Matrix eval_multiplicative(const Domain& dom, const MultiplicativeFunction<Domain>& f,
                           const ncpart::NCPartition& pi,
                           std::vector<typename Domain::Op> args,
                           bool prefer_last_interval = false) {
  if (static_cast<int>(args.size()) != pi.d)
    throw ConfigurationError("eval_multiplicative: arity mismatch");
  if (pi.d == 0) throw ConfigurationError("eval_multiplicative: empty partition");
  if (pi.blocks.size() == 1) {
    if (!f.supports(pi.d))
      throw ConfigurationError("eval_multiplicative: no kernel for arity " + std::to_string(pi.d));
    return f.kernel(dom, std::span<const typename Domain::Op>(args));
  }

  ncpart::IntervalSplit split;
  if (prefer_last_interval) {
    std::size_t chosen = 0;
    for (std::size_t bi = 0; bi < pi.blocks.size(); ++bi) {
      const auto& b = pi.blocks[bi];
      if (b.back() - b.front() + 1 == static_cast<int>(b.size())) chosen = bi;
    }
    split = ncpart::split_on_block(pi, chosen);
  } else {
    split = ncpart::split_interval_block(pi);
  }

  const int k = split.k, l = split.l;
  if (!f.supports(l - k + 1))
    throw ConfigurationError("eval_multiplicative: no kernel for arity " +
                             std::to_string(l - k + 1));
  const Matrix value = f.kernel(
      dom, std::span<const typename Domain::Op>(args.data() + (k - 1), l - k + 1));

  std::vector<typename Domain::Op> rest;
  rest.reserve(args.size() - (l - k + 1));
  for (int p = 0; p < k - 1; ++p) rest.push_back(std::move(args[p]));
  for (int p = l; p < static_cast<int>(args.size()); ++p) rest.push_back(std::move(args[p]));
  if (k == 1) {
    rest.front() = dom.left_mul(value, rest.front());
  } else {
    rest[k - 2] = dom.right_mul(rest[k - 2], value);
  }
  return eval_multiplicative(dom, f, split.rest, std::move(rest), prefer_last_interval);
}

// Moment-to-cumulant subtraction recursion over arbitrary operands, with a
// fingerprint cache; the non-crossing recursion revisits shared sub-collapses
// heavily.
template <class Domain>
class CumulantEvaluator {
 public:
  explicit CumulantEvaluator(const Domain& dom) : dom_(&dom) {
    kappa_.kernel = [this](const Domain& d, std::span<const typename Domain::Op> ops) {
      (void)d;
      return cumulant(std::vector<typename Domain::Op>(ops.begin(), ops.end()));
    };
  }

  Matrix cumulant(std::vector<typename Domain::Op> args) {
    const int d = static_cast<int>(args.size());
    if (d == 0) throw ConfigurationError("cumulant: no operands");
    std::string key = std::to_string(d);
    for (const auto& a : args) key += dom_->fingerprint(a);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;

    Matrix value = dom_->moment(std::span<const typename Domain::Op>(args));
    if (d > 1) {
      for (const auto& pi : ncpart::enumerate_nc(d)) {
        if (pi.blocks.size() == 1) continue;
        value -= eval_multiplicative(*dom_, kappa_, pi, args);
      }
    }
    cache_.emplace(std::move(key), value);
    return value;
  }

  // Σ_{π ∈ NC(d)} κ̂(π): recovers the moment from the cumulant family.
  Matrix moment_from_cumulants(const std::vector<typename Domain::Op>& args) {
    const int d = static_cast<int>(args.size());
    Matrix acc = Matrix::Zero(dom_->context().ambient_dim(), dom_->context().ambient_dim());
    for (const auto& pi : ncpart::enumerate_nc(d))
      acc += eval_multiplicative(*dom_, kappa_, pi, args);
    return acc;
  }

 private:
  const Domain* dom_;
  MultiplicativeFunction<Domain> kappa_;
  std::map<std::string, Matrix> cache_;
};

// ---------------------------------------------------------------------------
// Canonical cumulant tables over letter words.
//
// Keys are words X_{i_1} b_{c_2} X_{i_2} ... b_{c_d} X_{i_d}: a letter
// sequence plus the interior coefficient basis indices (leading and trailing
// coefficients pull out of κ by bimodularity, so they are not stored). An
// extended alphabet segment supports first-slot-only letters, used for
// conjugate-system candidates ξ occupying the first tensor slot.

struct GridOp {
  Matrix left;     // acquired left multiplier
  int letter = 0;
  int coeff = -1;  // own left coefficient as a basis index; -1 means the unit
  Matrix right;    // acquired right multiplier
};

class CumulantTable {
 public:
  using Key = std::pair<std::vector<int>, std::vector<int>>;  // (letters, interior coeffs)
  using MomentFn =
      std::function<Matrix(const std::vector<int>& letters, const std::vector<int>& interior)>;

  // Materializes κ degree by degree: κ^{(d)} = moment − Σ_{π≠1_d} κ̂(π) with
  // κ̂ evaluated through the already-built lower orders. Letters in
  // [regular_alphabet, regular_alphabet + first_slot_extra) occur in slot 1 only.
  static CumulantTable from_moments(const AlgebraContext& ctx, int regular_alphabet,
                                    int first_slot_extra, int degree_cap, const MomentFn& moment);

  // κ^{(2)}(X_i ⊗ b X_j) = η_ij(b), all other orders zero.
  static CumulantTable semicircular(const covmap::CovarianceMatrix& eta, int degree_cap);

  const AlgebraContext& ctx() const { return *ctx_; }
  int degree_cap() const { return degree_cap_; }
  int regular_alphabet() const { return regular_; }
  int first_slot_extra() const { return extra_; }

  const Matrix& entry(const Key& key) const;  // throws ConfigurationError when missing
  bool has_entry(const Key& key) const { return entries_.count(key) > 0; }

  // Multilinear kernel over operands with acquired multipliers.
  Matrix kappa(std::span<const GridOp> ops) const;

  // Σ_{π ∈ NC(d)} κ̂(π) — cumulants back to moments.
  Matrix moment_from_table(std::vector<GridOp> ops) const;
  Matrix moment_of_key(const Key& key) const;

  // Adds t·η to the second-order entries: the cumulant table of x + √t·s for
  // s semicircular with covariance eta, free from x with amalgamation.
  CumulantTable free_convolve_semicircular(const covmap::CovarianceMatrix& eta, double t) const;

  double max_difference(const CumulantTable& other) const;

  // Largest entry norm over mixed-family keys; families partition the regular
  // alphabet. Returns the worst key through `witness`.
  double max_mixed_entry(const std::vector<std::vector<int>>& families, int d_max,
                         Key* witness = nullptr) const;

  static std::string key_label(const Key& key);

 private:
  CumulantTable() = default;

  const AlgebraContext* ctx_ = nullptr;
  int regular_ = 0;
  int extra_ = 0;
  int degree_cap_ = 0;
  std::map<Key, Matrix> entries_;
};

// E_B(b_0 s_{i_1} b_1 ... s_{i_d} b_d) as the non-crossing pair-partition sum
// with nested η entries; zero for odd degree. Independent of the Fock-space
// construction and of the cumulant tables.
Matrix semicircular_moment_oracle(const covmap::CovarianceMatrix& eta,
                                  const std::vector<int>& letters,
                                  const std::vector<Matrix>& coeffs);

// Mixed cumulants across labeled families must vanish under freeness with
// amalgamation; the report names the worst violating key.
report::Report check_amalgamated_freeness(const CumulantTable& table,
                                          const std::vector<std::vector<int>>& families,
                                          int d_max, double tolerance);

struct ConjugateCumulantOutcome {
  report::Report rep;
  int first_fail_degree = -1;  // word degree d of the first failing family; -1 when all pass
};

// Cumulant characterization of a conjugate system: κ^{(1)}(ξ_i b) = 0,
// κ^{(2)}(ξ_i ⊗ b x_j) = η_ij(b), higher κ with ξ_i in the first slot vanish.
// The table's extended letters m..m+k-1 are the candidates ξ_0..ξ_{k-1}.
ConjugateCumulantOutcome check_conjugate_cumulants(const covmap::CovarianceMatrix& eta,
                                                   const CumulantTable& table, int d_max,
                                                   double tolerance);

}  // namespace opfree::cumulant
