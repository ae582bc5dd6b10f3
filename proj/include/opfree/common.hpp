#pragma once

#include <Eigen/Dense>

#include <complex>
#include <random>
#include <stdexcept>
#include <string>

namespace opfree {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Tolerance knobs shared by all modules. Contexts carry a copy, so a single
// run can tighten or loosen them without touching global state.
struct Tolerances {
  double equality = 1e-10;       // matrix equality / closure defects
  double positivity = 1e-12;     // positivity cutoff for scalars
  double gram_null_rel = 1e-10;  // relative null-space cutoff for Gram quotients
  double sv_cutoff_rel = 1e-10;  // relative singular-value cutoff for kernel projections
  double suite_defect = 1e-9;    // default verification-suite tolerance
  double norm_slack = 1.05;      // WARN/FAIL split for truncated norm bounds
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SizeLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a truncated Fock computation cannot be exact at the requested degree.
class ExactnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Deterministic random source; every randomized test or suite owns one seeded instance.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double real(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  Complex cplx() { return Complex(real(), real()); }

  Matrix matrix(int rows, int cols) {
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) m(r, c) = cplx();
    return m;
  }

  Matrix hermitian(int n) {
    Matrix m = matrix(n, n);
    return 0.5 * (m + m.adjoint());
  }

  std::uint64_t integer(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(gen_);
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline double max_abs(const Matrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

}  // namespace opfree
