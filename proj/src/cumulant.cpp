#include "opfree/cumulant.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

namespace opfree::cumulant {

namespace {

void append_bytes(std::string& out, const Matrix& m) {
  const auto rows = static_cast<std::int32_t>(m.rows());
  const auto cols = static_cast<std::int32_t>(m.cols());
  out.append(reinterpret_cast<const char*>(&rows), sizeof(rows));
  out.append(reinterpret_cast<const char*>(&cols), sizeof(cols));
  out.append(reinterpret_cast<const char*>(m.data()), sizeof(Complex) * m.size());
}

}  // namespace

std::string MatrixDomain::fingerprint(const Op& a) const {
  std::string out;
  append_bytes(out, a);
  return out;
}

std::string WordDomain::fingerprint(const Op& a) const {
  std::string out;
  for (const auto& w : a.terms()) {
    out.push_back('w');
    for (int l : w.letters) out.append(reinterpret_cast<const char*>(&l), sizeof(l));
    for (const auto& c : w.coeffs) append_bytes(out, c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CumulantTable

namespace {

struct GridDomain {
  using Op = GridOp;
  const CumulantTable* table = nullptr;

  const AlgebraContext& context() const { return table->ctx(); }
  Op left_mul(const Matrix& b, const Op& a) const {
    Op out = a;
    out.left = b * out.left;
    return out;
  }
  Op right_mul(const Op& a, const Matrix& b) const {
    Op out = a;
    out.right = out.right * b;
    return out;
  }
  Matrix moment(std::span<const Op>) const {
    throw ConfigurationError("grid domain has no direct moment function");
  }
  std::string fingerprint(const Op&) const { return {}; }
};

std::vector<GridOp> grid_ops_for_key(const AlgebraContext& ctx, const CumulantTable::Key& key) {
  const Matrix id = Matrix::Identity(ctx.ambient_dim(), ctx.ambient_dim());
  std::vector<GridOp> ops;
  const auto& [letters, interior] = key;
  for (size_t k = 0; k < letters.size(); ++k)
    ops.push_back(GridOp{id, letters[k], k == 0 ? -1 : interior[k - 1], id});
  return ops;
}

}  // namespace

CumulantTable CumulantTable::from_moments(const AlgebraContext& ctx, int regular_alphabet,
                                          int first_slot_extra, int degree_cap,
                                          const MomentFn& moment) {
  if (regular_alphabet < 1) throw ConfigurationError("cumulant table: empty alphabet");
  if (degree_cap < 1 || degree_cap > ncpart::kMaxEnumerationSize)
    throw SizeLimitError("cumulant table: degree cap out of range");

  CumulantTable table;
  table.ctx_ = &ctx;
  table.regular_ = regular_alphabet;
  table.extra_ = first_slot_extra;
  table.degree_cap_ = degree_cap;

  GridDomain dom{&table};
  MultiplicativeFunction<GridDomain> kappa;
  kappa.kernel = [&table](const GridDomain&, std::span<const GridOp> ops) {
    return table.kappa(ops);
  };

  const int dimb = ctx.dim();
  for (int d = 1; d <= degree_cap; ++d) {
    const auto partitions = ncpart::enumerate_nc(d);
    std::vector<int> letters(static_cast<size_t>(d), 0);
    std::vector<int> interior(static_cast<size_t>(d) - 1, 0);

    // odometer over (slot-1 letter incl. extended segment) × (interior letters) × (interior coeffs)
    std::function<void(int)> fill_letters = [&](int pos) {
      if (pos == d) {
        std::function<void(int)> fill_coeffs = [&](int cpos) {
          if (cpos == d - 1) {
            Matrix value = moment(letters, interior);
            if (d > 1) {
              for (const auto& pi : partitions) {
                if (pi.blocks.size() == 1) continue;
                value -= eval_multiplicative(dom, kappa, pi,
                                             grid_ops_for_key(ctx, {letters, interior}));
              }
            }
            table.entries_[{letters, interior}] = std::move(value);
            return;
          }
          for (int c = 0; c < dimb; ++c) {
            interior[cpos] = c;
            fill_coeffs(cpos + 1);
          }
        };
        fill_coeffs(0);
        return;
      }
      const int limit = pos == 0 ? regular_alphabet + first_slot_extra : regular_alphabet;
      for (int l = 0; l < limit; ++l) {
        letters[pos] = l;
        fill_letters(pos + 1);
      }
    };
    fill_letters(0);
  }
  return table;
}

CumulantTable CumulantTable::semicircular(const covmap::CovarianceMatrix& eta, int degree_cap) {
  const AlgebraContext& ctx = eta.ctx();
  CumulantTable table;
  table.ctx_ = &ctx;
  table.regular_ = eta.index_count();
  table.extra_ = 0;
  table.degree_cap_ = degree_cap;

  const int dimb = ctx.dim();
  const int m = eta.index_count();
  const Matrix zero = Matrix::Zero(ctx.ambient_dim(), ctx.ambient_dim());

  std::vector<int> letters, interior;
  std::function<void(int, int)> fill = [&](int d, int pos) {
    if (pos == d) {
      std::function<void(int)> coeffs = [&](int cpos) {
        if (cpos == d - 1) {
          Matrix value = zero;
          if (d == 2) value = eta.eta_entry(letters[0], letters[1], ctx.basis()[interior[0]]);
          table.entries_[{letters, interior}] = value;
          return;
        }
        for (int c = 0; c < dimb; ++c) {
          interior[cpos] = c;
          coeffs(cpos + 1);
        }
      };
      coeffs(0);
      return;
    }
    for (int l = 0; l < m; ++l) {
      letters[pos] = l;
      fill(d, pos + 1);
    }
  };
  for (int d = 1; d <= degree_cap; ++d) {
    letters.assign(static_cast<size_t>(d), 0);
    interior.assign(static_cast<size_t>(d) - 1, 0);
    fill(d, 0);
  }
  return table;
}

const Matrix& CumulantTable::entry(const Key& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end())
    throw ConfigurationError("cumulant table: missing entry " + key_label(key));
  return it->second;
}

Matrix CumulantTable::kappa(std::span<const GridOp> ops) const {
  const int d = static_cast<int>(ops.size());
  if (d == 0) throw ConfigurationError("cumulant table: empty operand list");
  if (d > degree_cap_) throw ConfigurationError("cumulant table: degree above cap");
  const AlgebraContext& ctx = *ctx_;
  const int dimb = ctx.dim();

  // Leading multiplier and slot-1 coefficient pull out to the left,
  // the trailing multiplier to the right; interior products expand over the
  // basis and hit stored entries multilinearly.
  std::vector<int> letters(static_cast<size_t>(d));
  for (int k = 0; k < d; ++k) letters[k] = ops[k].letter;

  const Matrix lead =
      ops[0].coeff < 0 ? ops[0].left : Matrix(ops[0].left * ctx.basis()[ops[0].coeff]);

  Matrix acc = Matrix::Zero(ctx.ambient_dim(), ctx.ambient_dim());
  if (d == 1) {
    acc = entry({letters, {}});
  } else {
    std::vector<Vector> interior_coords;
    interior_coords.reserve(static_cast<size_t>(d) - 1);
    for (int k = 1; k < d; ++k) {
      Matrix u = ops[k - 1].right * ops[k].left;
      if (ops[k].coeff >= 0) u = u * ctx.basis()[ops[k].coeff];
      interior_coords.push_back(ctx.coords(u));
    }
    std::vector<int> idx(static_cast<size_t>(d) - 1, 0);
    std::function<void(int, Complex)> expand = [&](int pos, Complex weight) {
      if (std::abs(weight) < 1e-300) return;
      if (pos == d - 1) {
        acc += weight * entry({letters, idx});
        return;
      }
      for (int c = 0; c < dimb; ++c) {
        idx[pos] = c;
        expand(pos + 1, weight * interior_coords[pos][c]);
      }
    };
    expand(0, Complex(1.0));
  }
  return lead * acc * ops[d - 1].right;
}

Matrix CumulantTable::moment_from_table(std::vector<GridOp> ops) const {
  const int d = static_cast<int>(ops.size());
  GridDomain dom{this};
  MultiplicativeFunction<GridDomain> kappa_fn;
  kappa_fn.kernel = [this](const GridDomain&, std::span<const GridOp> span) {
    return kappa(span);
  };
  Matrix acc = Matrix::Zero(ctx_->ambient_dim(), ctx_->ambient_dim());
  for (const auto& pi : ncpart::enumerate_nc(d))
    acc += eval_multiplicative(dom, kappa_fn, pi, ops);
  return acc;
}

Matrix CumulantTable::moment_of_key(const Key& key) const {
  return moment_from_table(grid_ops_for_key(*ctx_, key));
}

CumulantTable CumulantTable::free_convolve_semicircular(const covmap::CovarianceMatrix& eta,
                                                        double t) const {
  if (&eta.ctx() != ctx_) throw ConfigurationError("free convolution: context mismatch");
  if (eta.index_count() != regular_)
    throw ConfigurationError("free convolution: index count mismatch");
  if (extra_ != 0)
    throw ConfigurationError("free convolution: extended tables are not convolvable");
  CumulantTable out = *this;
  for (auto& [key, value] : out.entries_) {
    const auto& [letters, interior] = key;
    if (letters.size() == 2)
      value += t * eta.eta_entry(letters[0], letters[1], ctx_->basis()[interior[0]]);
  }
  return out;
}

double CumulantTable::max_difference(const CumulantTable& other) const {
  double worst = 0.0;
  for (const auto& [key, value] : entries_) {
    auto it = other.entries_.find(key);
    if (it == other.entries_.end())
      throw ConfigurationError("cumulant table difference: key grids do not match");
    worst = std::max(worst, (value - it->second).norm());
  }
  return worst;
}

double CumulantTable::max_mixed_entry(const std::vector<std::vector<int>>& families, int d_max,
                                      Key* witness) const {
  std::vector<int> family_of(static_cast<size_t>(regular_), -1);
  for (size_t f = 0; f < families.size(); ++f)
    for (int l : families[f]) {
      if (l < 0 || l >= regular_)
        throw ConfigurationError("freeness families: letter out of range");
      family_of[l] = static_cast<int>(f);
    }
  double worst = 0.0;
  for (const auto& [key, value] : entries_) {
    const auto& letters = key.first;
    if (static_cast<int>(letters.size()) < 2 ||
        static_cast<int>(letters.size()) > d_max)
      continue;
    bool in_grid = true;
    for (int l : letters)
      if (l >= regular_ || family_of[l] < 0) in_grid = false;
    if (!in_grid) continue;
    bool mixed = false;
    for (size_t k = 1; k < letters.size(); ++k)
      if (family_of[letters[k]] != family_of[letters[0]]) mixed = true;
    if (!mixed) continue;
    const double norm = value.norm();
    if (norm > worst) {
      worst = norm;
      if (witness) *witness = key;
    }
  }
  return worst;
}

std::string CumulantTable::key_label(const Key& key) {
  std::ostringstream os;
  os << "x[";
  for (size_t i = 0; i < key.first.size(); ++i) os << (i ? "," : "") << key.first[i];
  os << "];b[";
  for (size_t i = 0; i < key.second.size(); ++i) os << (i ? "," : "") << key.second[i];
  os << "]";
  return os.str();
}

// ---------------------------------------------------------------------------
// Pair-partition oracle

namespace {

struct SemiOp {
  Matrix left;
  int letter = 0;
  Matrix right;
};

struct SemiDomain {
  using Op = SemiOp;
  const AlgebraContext* ctx = nullptr;
  const AlgebraContext& context() const { return *ctx; }
  Op left_mul(const Matrix& b, const Op& a) const { return SemiOp{b * a.left, a.letter, a.right}; }
  Op right_mul(const Op& a, const Matrix& b) const {
    return SemiOp{a.left, a.letter, a.right * b};
  }
  Matrix moment(std::span<const Op>) const {
    throw ConfigurationError("pair oracle has no direct moments");
  }
  std::string fingerprint(const Op&) const { return {}; }
};

}  // namespace

Matrix semicircular_moment_oracle(const covmap::CovarianceMatrix& eta,
                                  const std::vector<int>& letters,
                                  const std::vector<Matrix>& coeffs) {
  const AlgebraContext& ctx = eta.ctx();
  if (coeffs.size() != letters.size() + 1)
    throw ValidationError("semicircular oracle: coefficient/letter count mismatch");
  const int d = static_cast<int>(letters.size());
  if (d == 0) return ctx.conditional_expectation(coeffs[0]);
  if (d % 2 == 1) return Matrix::Zero(ctx.ambient_dim(), ctx.ambient_dim());

  SemiDomain dom{&ctx};
  MultiplicativeFunction<SemiDomain> pair_kernel;
  pair_kernel.supports = [](int arity) { return arity == 2; };
  pair_kernel.kernel = [&](const SemiDomain&, std::span<const SemiOp> ops) {
    const SemiOp& u = ops[0];
    const SemiOp& v = ops[1];
    return Matrix(u.left * eta.eta_entry(u.letter, v.letter, u.right * v.left) * v.right);
  };

  const Matrix id = Matrix::Identity(ctx.ambient_dim(), ctx.ambient_dim());
  std::vector<SemiOp> ops;
  for (int k = 0; k < d; ++k) ops.push_back(SemiOp{id, letters[k], coeffs[k + 1]});

  Matrix acc = Matrix::Zero(ctx.ambient_dim(), ctx.ambient_dim());
  for (const auto& pi : ncpart::enumerate_nc_pairings(d))
    acc += eval_multiplicative(dom, pair_kernel, pi, ops);
  return coeffs[0] * acc;
}

// ---------------------------------------------------------------------------
// Reports

report::Report check_amalgamated_freeness(const CumulantTable& table,
                                          const std::vector<std::vector<int>>& families,
                                          int d_max, double tolerance) {
  report::Report rep;
  rep.suite = "freeness";
  rep.identity = "vanishing mixed cumulants under freeness with amalgamation";
  rep.environment.emplace_back("families", std::to_string(families.size()));
  rep.environment.emplace_back("d_max", std::to_string(d_max));
  if (families.size() < 2) {
    rep.vacuous = true;
    rep.note = "fewer than two families: no mixed cumulants to test";
    return rep;
  }
  CumulantTable::Key witness;
  const double worst = table.max_mixed_entry(families, d_max, &witness);
  rep.add("mixed-cumulants d<=" + std::to_string(d_max),
          "vanishing mixed cumulants under freeness with amalgamation", worst, tolerance,
          worst > 0.0 ? CumulantTable::key_label(witness) : "");
  if (worst > tolerance)
    rep.note = "worst mixed cumulant at " + CumulantTable::key_label(witness);
  return rep;
}

ConjugateCumulantOutcome check_conjugate_cumulants(const covmap::CovarianceMatrix& eta,
                                                   const CumulantTable& table, int d_max,
                                                   double tolerance) {
  const AlgebraContext& ctx = eta.ctx();
  const int m = table.regular_alphabet();
  const int candidates = table.first_slot_extra();
  if (candidates < 1)
    throw ConfigurationError("conjugate cumulant check: table has no candidate letters");
  if (eta.index_count() != m)
    throw ConfigurationError("conjugate cumulant check: index count mismatch");
  if (d_max + 1 > table.degree_cap())
    throw ConfigurationError("conjugate cumulant check: table degree cap too small");

  ConjugateCumulantOutcome out;
  report::Report& rep = out.rep;
  rep.suite = "conjugate-cumulants";
  rep.identity = "cumulant characterization of conjugate systems";
  rep.environment.emplace_back("d_max", std::to_string(d_max));
  const int dimb = ctx.dim();

  auto record_fail_degree = [&](int degree, double defect) {
    if (defect > tolerance && (out.first_fail_degree < 0 || degree < out.first_fail_degree))
      out.first_fail_degree = degree;
  };

  // family 1: κ^{(1)}(ξ_i b) = E(ξ_i) b = 0 over the basis
  for (int i = 0; i < candidates; ++i) {
    double worst = 0.0;
    const Matrix exi = table.entry({{m + i}, {}});
    for (int b = 0; b < dimb; ++b) worst = std::max(worst, Matrix(exi * ctx.basis()[b]).norm());
    rep.add("kappa1[xi_" + std::to_string(i) + "]",
            "first-order cumulant of a conjugate variable vanishes", worst, tolerance);
    record_fail_degree(0, worst);
  }

  // family 2: κ^{(2)}(ξ_i ⊗ b x_j) = η_ij(b)
  for (int i = 0; i < candidates; ++i) {
    double worst = 0.0;
    for (int j = 0; j < m; ++j)
      for (int b = 0; b < dimb; ++b) {
        const Matrix got = table.entry({{m + i, j}, {b}});
        const Matrix want = eta.eta_entry(i, j, ctx.basis()[b]);
        worst = std::max(worst, (got - want).norm());
      }
    rep.add("kappa2[xi_" + std::to_string(i) + "]",
            "second-order cumulant of a conjugate variable equals the covariance entry", worst,
            tolerance);
    record_fail_degree(1, worst);
  }

  // family 3: κ^{(d+1)}(ξ_i ⊗ b_1 x_{i_1} ⊗ ... ⊗ b_d x_{i_d}) = 0 for 2 <= d <= d_max
  for (int d = 2; d <= d_max; ++d) {
    double worst = 0.0;
    std::vector<int> letters(static_cast<size_t>(d) + 1, 0);
    std::vector<int> interior(static_cast<size_t>(d), 0);
    std::function<void(int)> letters_loop = [&](int pos) {
      if (pos == d) {
        std::function<void(int)> coeff_loop = [&](int cpos) {
          if (cpos == d) {
            worst = std::max(worst, table.entry({letters, interior}).norm());
            return;
          }
          for (int c = 0; c < dimb; ++c) {
            interior[cpos] = c;
            coeff_loop(cpos + 1);
          }
        };
        coeff_loop(0);
        return;
      }
      for (int l = 0; l < m; ++l) {
        letters[pos + 1] = l;
        letters_loop(pos + 1);
      }
    };
    for (int i = 0; i < candidates; ++i) {
      letters[0] = m + i;
      letters_loop(0);
    }
    rep.add("kappa" + std::to_string(d + 1) + "[all xi]",
            "higher cumulants of a conjugate variable vanish", worst, tolerance);
    record_fail_degree(d, worst);
  }
  return out;
}

}  // namespace opfree::cumulant
