#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "qclone/errors.hpp"

namespace qclone {

using cplx = std::complex<double>;

// Side-length cap for tensor products (guards accidental blow-ups).
inline constexpr std::size_t kKronSideCap = std::size_t{1} << 20;
// Side-length cap for dense eigensolves.
inline constexpr std::size_t kDenseEigCap = 4096;

// Dense row-major complex matrix.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  static ComplexMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<cplx> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const cplx> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const cplx> data() const { return data_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conjugate() const;
  cplx trace() const;
  double max_abs() const;
  double frobenius_norm() const;
  bool is_hermitian(double rel_tol = 1e-12) const;
  bool all_finite() const;

  std::vector<cplx> column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const cplx> v);

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(cplx s);
  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) {
    a += b;
    return a;
  }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) {
    a -= b;
    return a;
  }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) {
    a *= s;
    return a;
  }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

  std::vector<cplx> apply(std::span<const cplx> x) const;  // matrix * vector

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<cplx> data_;
};

// Square operator carrying its tensor-factor layout. Hermiticity is enforced
// at construction: ||M - M^dag||_max <= 1e-12 * ||M||_max.
struct HermitianOperator {
  ComplexMatrix mat;
  std::vector<std::size_t> dims;

  HermitianOperator(ComplexMatrix m, std::vector<std::size_t> d);
  std::size_t side() const { return mat.rows(); }
};

// Normalized amplitude vector over a tensor-factor layout (<psi|psi> = 1
// within 1e-12, checked at construction).
struct PureState {
  std::vector<cplx> amp;
  std::vector<std::size_t> dims;

  PureState(std::vector<cplx> a, std::vector<std::size_t> d);
  std::size_t dim() const { return amp.size(); }
};

// Full spectrum of a Hermitian operator, eigenvalues ascending.
struct Spectrum {
  std::vector<double> eigenvalues;
  ComplexMatrix eigenvectors;  // orthonormal columns aligned with eigenvalues
  double max_value = 0.0;
  ComplexMatrix max_space;  // columns spanning the top eigenspace
  double degeneracy_tol = 1e-9;
  double max_residual = 0.0;

  std::size_t degeneracy() const { return max_space.cols(); }
};

struct RealEigenpair {
  double value = 0.0;
  std::vector<cplx> vector;
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                   std::size_t side_cap = kKronSideCap);
HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b,
                       std::size_t side_cap = kKronSideCap);

// Partial trace keeping the listed factors (original order). Empty keep set
// yields the 1x1 trace.
HermitianOperator partial_trace(const HermitianOperator& op,
                                std::vector<std::size_t> keep);

// Reduced density matrix of |psi><psi| on the kept factors.
HermitianOperator reduced_density(const PureState& psi,
                                  std::vector<std::size_t> keep);

// Full diagonalization via Householder tridiagonalization + implicit QL.
// degeneracy_tol is relative: the top eigenspace collects eigenvalues
// >= max - degeneracy_tol * max(1, |max|). Residuals are verified against
// 1e-9 * ||H||_2 and a NumericalError is thrown on violation.
Spectrum hermitian_eig(const HermitianOperator& h, double degeneracy_tol = 1e-9);

// Dominant real eigenpair of a (possibly non-Hermitian) matrix. Matrices
// that are diagonally similar to a Hermitian one (the reduced cloning
// matrices are) take the exact similarity route; otherwise a shifted power
// iteration is used. Throws NumericalError when no real dominant pair is
// found, e.g. for a complex dominant pair.
RealEigenpair general_max_real_eigenpair(const ComplexMatrix& m);

// Schmidt coefficients across the bipartition (cut | complement),
// nonnegative and descending; squares sum to 1.
std::vector<double> schmidt_coefficients(const PureState& psi,
                                         const std::vector<std::size_t>& cut);

// ---- shared small utilities ----

std::size_t dims_product(std::span<const std::size_t> dims);
// Strides of a mixed-radix layout with factor 0 the most significant digit.
std::vector<std::size_t> dim_strides(std::span<const std::size_t> dims);

double vec_norm(std::span<const cplx> v);
cplx vec_dot(std::span<const cplx> a, std::span<const cplx> b);  // <a|b>
void vec_normalize(std::span<cplx> v);
void phase_fix_largest(std::span<cplx> v);  // largest-|.| entry real positive
void phase_fix_first(std::span<cplx> v);    // first nonvanishing entry real positive

namespace detail {
// Implicit-shift QL on a real symmetric tridiagonal (diag, sub); accumulates
// the rotations into the columns of z. On exit diag holds the (unordered)
// eigenvalues.
void tql2(std::vector<double>& diag, std::vector<double> sub, ComplexMatrix& z);
}  // namespace detail

}  // namespace qclone
