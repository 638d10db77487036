#include "qclone/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qclone {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

// ---------------------------------------------------------------------------
// ComplexMatrix
// ---------------------------------------------------------------------------

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix m(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) m(c, r) = std::conj((*this)(r, c));
  return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix m(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) m(c, r) = (*this)(r, c);
  return m;
}

ComplexMatrix ComplexMatrix::conjugate() const {
  ComplexMatrix m(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) m.data_[i] = std::conj(data_[i]);
  return m;
}

cplx ComplexMatrix::trace() const {
  cplx t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const cplx& v : data_) m = std::max(m, std::abs(v));
  return m;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const cplx& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

bool ComplexMatrix::is_hermitian(double rel_tol) const {
  if (rows_ != cols_) return false;
  const double tol = rel_tol * std::max(max_abs(), 1e-300);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = r; c < cols_; ++c)
      if (std::abs((*this)(r, c) - std::conj((*this)(c, r))) > tol) return false;
  return true;
}

bool ComplexMatrix::all_finite() const {
  for (const cplx& v : data_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

std::vector<cplx> ComplexMatrix::column(std::size_t c) const {
  std::vector<cplx> v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

void ComplexMatrix::set_column(std::size_t c, std::span<const cplx> v) {
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  require(rows_ == o.rows_ && cols_ == o.cols_, "matrix shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  require(rows_ == o.rows_ && cols_ == o.cols_, "matrix shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (cplx& v : data_) v *= s;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.cols_ == b.rows_, "matrix product shape mismatch");
  ComplexMatrix c(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    cplx* crow = c.data_.data() + i * c.cols_;
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      const cplx* brow = b.data_.data() + k * b.cols_;
      for (std::size_t j = 0; j < b.cols_; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

std::vector<cplx> ComplexMatrix::apply(std::span<const cplx> x) const {
  require(x.size() == cols_, "matrix-vector shape mismatch");
  std::vector<cplx> y(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    cplx acc = 0.0;
    const cplx* row = data_.data() + r * cols_;
    for (std::size_t c = 0; c < cols_; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
  return y;
}

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

HermitianOperator::HermitianOperator(ComplexMatrix m, std::vector<std::size_t> d)
    : mat(std::move(m)), dims(std::move(d)) {
  require(mat.rows() == mat.cols(), "operator must be square");
  require(!dims.empty(), "operator needs at least one tensor factor");
  require(dims_product(dims) == mat.rows(),
          "product of factor dims must equal the side length");
  if (!mat.all_finite()) throw std::invalid_argument("operator entries not finite");
  if (!mat.is_hermitian(1e-12))
    throw std::invalid_argument("operator is not Hermitian within tolerance");
}

PureState::PureState(std::vector<cplx> a, std::vector<std::size_t> d)
    : amp(std::move(a)), dims(std::move(d)) {
  require(!dims.empty(), "state needs at least one tensor factor");
  require(dims_product(dims) == amp.size(),
          "product of factor dims must equal the amplitude count");
  for (const cplx& v : amp)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument("state amplitudes not finite");
  const double n = vec_norm(amp);
  if (std::abs(n - 1.0) > 1e-12)
    throw std::invalid_argument("state is not normalized within 1e-12");
}

// ---------------------------------------------------------------------------
// Index utilities
// ---------------------------------------------------------------------------

std::size_t dims_product(std::span<const std::size_t> dims) {
  std::size_t p = 1;
  for (std::size_t d : dims) p *= d;
  return p;
}

std::vector<std::size_t> dim_strides(std::span<const std::size_t> dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t f = dims.size(); f-- > 1;) s[f - 1] = s[f] * dims[f];
  return s;
}

double vec_norm(std::span<const cplx> v) {
  double s = 0.0;
  for (const cplx& x : v) s += std::norm(x);
  return std::sqrt(s);
}

cplx vec_dot(std::span<const cplx> a, std::span<const cplx> b) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

void vec_normalize(std::span<cplx> v) {
  const double n = vec_norm(v);
  if (n == 0.0) throw std::invalid_argument("cannot normalize the zero vector");
  for (cplx& x : v) x /= n;
}

void phase_fix_largest(std::span<cplx> v) {
  std::size_t best = 0;
  double mag = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > mag) {
      mag = a;
      best = i;
    }
  }
  if (mag == 0.0) return;
  const cplx ph = v[best] / mag;
  for (cplx& x : v) x *= std::conj(ph);
}

void phase_fix_first(std::span<cplx> v) {
  double scale = 0.0;
  for (const cplx& x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return;
  for (const cplx& x : v) {
    const double a = std::abs(x);
    if (a > 1e-12 * scale) {
      const cplx ph = x / a;
      for (cplx& y : v) y *= std::conj(ph);
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// Tensor products and partial traces
// ---------------------------------------------------------------------------

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                   std::size_t side_cap) {
  if (a.rows() * b.rows() > side_cap || a.cols() * b.cols() > side_cap)
    throw SizeError("tensor product exceeds the configured side cap");
  ComplexMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ar = 0; ar < a.rows(); ++ar)
    for (std::size_t ac = 0; ac < a.cols(); ++ac) {
      const cplx v = a(ar, ac);
      if (v == cplx{}) continue;
      for (std::size_t br = 0; br < b.rows(); ++br)
        for (std::size_t bc = 0; bc < b.cols(); ++bc)
          c(ar * b.rows() + br, ac * b.cols() + bc) = v * b(br, bc);
    }
  return c;
}

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b,
                       std::size_t side_cap) {
  std::vector<std::size_t> dims = a.dims;
  dims.insert(dims.end(), b.dims.begin(), b.dims.end());
  return HermitianOperator(kron(a.mat, b.mat, side_cap), std::move(dims));
}

namespace {

// Offsets of every multi-index over the selected factors.
std::vector<std::size_t> subset_offsets(std::span<const std::size_t> dims,
                                        std::span<const std::size_t> strides,
                                        const std::vector<std::size_t>& subset) {
  std::size_t count = 1;
  for (std::size_t f : subset) count *= dims[f];
  std::vector<std::size_t> offs(count, 0);
  std::size_t repeat = count;
  for (std::size_t f : subset) {
    repeat /= dims[f];
    std::size_t idx = 0;
    for (std::size_t block = 0; block < count / (repeat * dims[f]); ++block)
      for (std::size_t digit = 0; digit < dims[f]; ++digit)
        for (std::size_t r = 0; r < repeat; ++r) offs[idx++] += digit * strides[f];
  }
  return offs;
}

std::vector<std::size_t> validate_keep(std::vector<std::size_t> keep,
                                       std::size_t nfactors) {
  std::sort(keep.begin(), keep.end());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] >= nfactors) throw std::invalid_argument("keep index out of range");
    if (i > 0 && keep[i] == keep[i - 1])
      throw std::invalid_argument("duplicate keep index");
  }
  return keep;
}

std::vector<std::size_t> complement_of(const std::vector<std::size_t>& keep,
                                       std::size_t nfactors) {
  std::vector<std::size_t> rest;
  std::size_t j = 0;
  for (std::size_t f = 0; f < nfactors; ++f) {
    if (j < keep.size() && keep[j] == f)
      ++j;
    else
      rest.push_back(f);
  }
  return rest;
}

}  // namespace

HermitianOperator partial_trace(const HermitianOperator& op,
                                std::vector<std::size_t> keep) {
  keep = validate_keep(std::move(keep), op.dims.size());
  const auto strides = dim_strides(op.dims);
  const auto rest = complement_of(keep, op.dims.size());
  const auto koffs = subset_offsets(op.dims, strides, keep);
  const auto toffs = subset_offsets(op.dims, strides, rest);

  std::vector<std::size_t> kdims;
  for (std::size_t f : keep) kdims.push_back(op.dims[f]);
  if (kdims.empty()) kdims.push_back(1);

  ComplexMatrix out(koffs.size(), koffs.size());
  for (std::size_t r = 0; r < koffs.size(); ++r)
    for (std::size_t c = 0; c < koffs.size(); ++c) {
      cplx acc = 0.0;
      for (std::size_t t : toffs) acc += op.mat(koffs[r] + t, koffs[c] + t);
      out(r, c) = acc;
    }
  return HermitianOperator(std::move(out), std::move(kdims));
}

HermitianOperator reduced_density(const PureState& psi,
                                  std::vector<std::size_t> keep) {
  keep = validate_keep(std::move(keep), psi.dims.size());
  const auto strides = dim_strides(psi.dims);
  const auto rest = complement_of(keep, psi.dims.size());
  const auto koffs = subset_offsets(psi.dims, strides, keep);
  const auto toffs = subset_offsets(psi.dims, strides, rest);

  std::vector<std::size_t> kdims;
  for (std::size_t f : keep) kdims.push_back(psi.dims[f]);
  if (kdims.empty()) kdims.push_back(1);

  // rho(r,c) = sum_t psi[r,t] conj(psi[c,t])
  ComplexMatrix out(koffs.size(), koffs.size());
  for (std::size_t r = 0; r < koffs.size(); ++r)
    for (std::size_t c = 0; c <= r; ++c) {
      cplx acc = 0.0;
      for (std::size_t t : toffs)
        acc += psi.amp[koffs[r] + t] * std::conj(psi.amp[koffs[c] + t]);
      out(r, c) = acc;
      out(c, r) = std::conj(acc);
    }
  return HermitianOperator(std::move(out), std::move(kdims));
}

// ---------------------------------------------------------------------------
// Hermitian eigensolver: Householder tridiagonalization + implicit QL
// ---------------------------------------------------------------------------

namespace {

// Reduces the Hermitian matrix a in place to a real symmetric tridiagonal
// (diag, sub) and fills q with the accumulated unitary: a = q T q^dag.
void householder_tridiag(ComplexMatrix& a, std::vector<double>& diag,
                         std::vector<double>& sub, ComplexMatrix& q) {
  const std::size_t n = a.rows();
  diag.assign(n, 0.0);
  sub.assign(n > 0 ? n - 1 : 0, 0.0);

  std::vector<std::vector<cplx>> reflectors(n >= 3 ? n - 2 : 0);

  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;  // size of the trailing block
    std::vector<cplx> x(m);
    for (std::size_t i = 0; i < m; ++i) x[i] = a(k + 1 + i, k);
    const double nx = vec_norm(x);
    if (nx == 0.0) continue;

    const double a0 = std::abs(x[0]);
    const cplx phase = a0 > 0.0 ? x[0] / a0 : cplx{1.0};
    const cplx beta = -phase * nx;

    std::vector<cplx> v = x;
    v[0] -= beta;
    const double nv = vec_norm(v);
    a(k + 1, k) = beta;
    a(k, k + 1) = std::conj(beta);
    for (std::size_t i = 1; i < m; ++i) {
      a(k + 1 + i, k) = 0.0;
      a(k, k + 1 + i) = 0.0;
    }
    if (nv <= nx * kEps) continue;  // column already in tridiagonal form
    for (cplx& t : v) t /= nv;

    // Two-sided rank-2 update of the trailing block: A <- A - 2 v u^+ - 2 u v^+
    // with w = A v, u = w - (v^+ w) v.
    std::vector<cplx> w(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      cplx acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) acc += a(k + 1 + i, k + 1 + j) * v[j];
      w[i] = acc;
    }
    const cplx vw = vec_dot(v, w);
    std::vector<cplx> u(m);
    for (std::size_t i = 0; i < m; ++i) u[i] = w[i] - vw * v[i];
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        a(k + 1 + i, k + 1 + j) -=
            2.0 * (v[i] * std::conj(u[j]) + u[i] * std::conj(v[j]));
    reflectors[k] = std::move(v);
  }

  // Phase similarity making the subdiagonal real nonnegative.
  std::vector<cplx> ph(n, 1.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const cplx t = a(k + 1, k);
    const double at = std::abs(t);
    sub[k] = at;
    ph[k + 1] = at > 0.0 ? ph[k] * (t / at) : ph[k];
  }
  for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i).real();

  // q = (H_0 H_1 ... H_{n-3}) diag(ph)
  q = ComplexMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i) q(i, i) = ph[i];
  for (std::size_t k = reflectors.size(); k-- > 0;) {
    const auto& v = reflectors[k];
    if (v.empty()) continue;
    const std::size_t m = v.size();
    for (std::size_t col = 0; col < n; ++col) {
      cplx acc = 0.0;
      for (std::size_t i = 0; i < m; ++i) acc += std::conj(v[i]) * q(k + 1 + i, col);
      acc *= 2.0;
      for (std::size_t i = 0; i < m; ++i) q(k + 1 + i, col) -= acc * v[i];
    }
  }
}

}  // namespace

namespace detail {

void tql2(std::vector<double>& diag, std::vector<double> sub, ComplexMatrix& z) {
  const int n = static_cast<int>(diag.size());
  if (n <= 1) return;
  sub.resize(n, 0.0);  // sub[i] couples i and i+1; sub[n-1] is padding

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    for (;;) {
      int m = l;
      for (; m < n - 1; ++m) {
        const double dd = std::abs(diag[m]) + std::abs(diag[m + 1]);
        if (std::abs(sub[m]) <= kEps * dd) break;
      }
      if (m == l) break;
      if (++iter > 80)
        throw NumericalError("tridiagonal QL failed to converge",
                             std::abs(sub[l]));
      double g = (diag[l + 1] - diag[l]) / (2.0 * sub[l]);
      double r = std::hypot(g, 1.0);
      g = diag[m] - diag[l] + sub[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      for (int i = m - 1; i >= l; --i) {
        double f = s * sub[i];
        const double b = c * sub[i];
        r = std::hypot(f, g);
        sub[i + 1] = r;
        if (r == 0.0) {
          diag[i + 1] -= p;
          sub[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = diag[i + 1] - p;
        r = (diag[i] - g) * s + 2.0 * c * b;
        p = s * r;
        diag[i + 1] = g + p;
        g = c * r - b;
        for (std::size_t k = 0; k < z.rows(); ++k) {
          const cplx zk = z(k, i + 1);
          z(k, i + 1) = s * z(k, i) + c * zk;
          z(k, i) = c * z(k, i) - s * zk;
        }
      }
      if (underflow) continue;
      diag[l] -= p;
      sub[l] = g;
      sub[m] = 0.0;
    }
  }
}

}  // namespace detail

Spectrum hermitian_eig(const HermitianOperator& h, double degeneracy_tol) {
  const std::size_t n = h.side();
  if (n > kDenseEigCap)
    throw SizeError("dense eigensolve exceeds the configured cap");

  // Work on an exactly Hermitian copy.
  ComplexMatrix a = h.mat;
  for (std::size_t r = 0; r < n; ++r) {
    a(r, r) = a(r, r).real();
    for (std::size_t c = r + 1; c < n; ++c) {
      const cplx avg = 0.5 * (a(r, c) + std::conj(a(c, r)));
      a(r, c) = avg;
      a(c, r) = std::conj(avg);
    }
  }

  std::vector<double> diag, sub;
  ComplexMatrix q;
  householder_tridiag(a, diag, sub, q);
  detail::tql2(diag, sub, q);

  // Sort ascending, permuting eigenvector columns along.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return diag[i] < diag[j]; });

  Spectrum spec;
  spec.degeneracy_tol = degeneracy_tol;
  spec.eigenvalues.resize(n);
  spec.eigenvectors = ComplexMatrix(n, n);
  std::vector<cplx> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    spec.eigenvalues[j] = diag[order[j]];
    for (std::size_t i = 0; i < n; ++i) col[i] = q(i, order[j]);
    phase_fix_largest(col);
    spec.eigenvectors.set_column(j, col);
  }
  spec.max_value = spec.eigenvalues.back();

  // Residual check against the original matrix.
  const double hnorm =
      std::max(std::abs(spec.eigenvalues.front()), std::abs(spec.eigenvalues.back()));
  const double bound = 1e-9 * std::max(hnorm, 1e-300);
  double worst = 0.0;
  {
    const ComplexMatrix hv = h.mat * spec.eigenvectors;
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        s += std::norm(hv(i, j) - spec.eigenvalues[j] * spec.eigenvectors(i, j));
      worst = std::max(worst, std::sqrt(s));
    }
  }
  spec.max_residual = worst;
  if (worst > bound)
    throw NumericalError("eigensolver residual exceeds 1e-9 * ||H||_2", worst);

  const double cut =
      spec.max_value - degeneracy_tol * std::max(1.0, std::abs(spec.max_value));
  std::size_t first = n;
  while (first > 0 && spec.eigenvalues[first - 1] >= cut) --first;
  spec.max_space = ComplexMatrix(n, n - first);
  for (std::size_t j = first; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      spec.max_space(i, j - first) = spec.eigenvectors(i, j);
  return spec;
}

// ---------------------------------------------------------------------------
// Dominant real eigenpair of a general matrix
// ---------------------------------------------------------------------------

namespace {

// Attempts D^-1 M D with diagonal D so the result is Hermitian. Works for
// matrices with m_ij m_ji > 0 on a consistent pattern (e.g. the reduced
// cloning matrices). Returns false when no such similarity exists.
bool try_diagonal_symmetrization(const ComplexMatrix& m, std::vector<double>& dscale) {
  const std::size_t n = m.rows();
  const double scale = std::max(m.max_abs(), 1e-300);
  const double ztol = 1e-13 * scale;

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(m(i, j).imag()) > ztol) return false;  // real matrices only
      const bool zij = std::abs(m(i, j)) <= ztol;
      const bool zji = std::abs(m(j, i)) <= ztol;
      if (zij != zji) return false;
      if (!zij && m(i, j).real() * m(j, i).real() <= 0.0) return false;
    }

  // BFS spanning tree per connected component of the nonzero pattern.
  dscale.assign(n, 0.0);
  std::vector<std::size_t> stack;
  for (std::size_t root = 0; root < n; ++root) {
    if (dscale[root] != 0.0) continue;
    dscale[root] = 1.0;
    stack.push_back(root);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || std::abs(m(i, j)) <= ztol) continue;
        const double ratio = std::sqrt(m(j, i).real() / m(i, j).real());
        if (dscale[j] == 0.0) {
          dscale[j] = dscale[i] * ratio;
          stack.push_back(j);
        }
      }
    }
  }

  // Verify every edge under the found similarity.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double sij = m(i, j).real() * dscale[j] / dscale[i];
      const double sji = m(j, i).real() * dscale[i] / dscale[j];
      if (std::abs(sij - sji) > 1e-10 * (std::abs(sij) + std::abs(sji) + scale))
        return false;
    }
  return true;
}

}  // namespace

RealEigenpair general_max_real_eigenpair(const ComplexMatrix& m) {
  require(m.rows() == m.cols(), "matrix must be square");
  const std::size_t n = m.rows();
  if (n == 0) throw std::invalid_argument("empty matrix");
  if (n == 1) {
    const cplx v = m(0, 0);
    if (std::abs(v.imag()) > 1e-12 * std::max(std::abs(v), 1.0))
      throw NumericalError("dominant eigenvalue is not real", std::abs(v.imag()));
    return {v.real(), {cplx{1.0}}};
  }

  auto pick_dominant = [](const Spectrum& s) {
    // Largest magnitude; ties resolve toward the larger value.
    std::size_t best = 0;
    for (std::size_t j = 1; j < s.eigenvalues.size(); ++j) {
      const double a = std::abs(s.eigenvalues[j]), b = std::abs(s.eigenvalues[best]);
      if (a > b || (a == b && s.eigenvalues[j] > s.eigenvalues[best])) best = j;
    }
    return best;
  };

  if (m.is_hermitian(1e-12)) {
    const Spectrum s = hermitian_eig(HermitianOperator(m, {n}));
    const std::size_t j = pick_dominant(s);
    std::vector<cplx> v = s.eigenvectors.column(j);
    phase_fix_first(v);
    return {s.eigenvalues[j], std::move(v)};
  }

  std::vector<double> dscale;
  if (try_diagonal_symmetrization(m, dscale)) {
    ComplexMatrix sym(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double a = m(i, j).real() * dscale[j] / dscale[i];
        const double b = m(j, i).real() * dscale[i] / dscale[j];
        sym(i, j) = 0.5 * (a + b);
      }
    const Spectrum s = hermitian_eig(HermitianOperator(std::move(sym), {n}));
    const std::size_t j = pick_dominant(s);
    std::vector<cplx> v = s.eigenvectors.column(j);
    for (std::size_t i = 0; i < n; ++i) v[i] *= dscale[i];
    vec_normalize(v);
    phase_fix_first(v);
    return {s.eigenvalues[j], std::move(v)};
  }

  // Shifted power iteration fallback. The shift keeps nonnegative matrices
  // aperiodic so the Perron root dominates strictly.
  const double scale = std::max(m.max_abs(), 1e-300);
  bool nonneg = true;
  for (std::size_t i = 0; i < n && nonneg; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(m(i, j).imag()) > 1e-13 * scale || m(i, j).real() < -1e-13 * scale) {
        nonneg = false;
        break;
      }
    }
  const double shift = nonneg ? scale : 0.0;

  std::vector<cplx> x(n, cplx{1.0 / std::sqrt(static_cast<double>(n))});
  double rho = 0.0, rho_prev = std::numeric_limits<double>::infinity();
  const std::size_t max_iter = 200000;
  for (std::size_t it = 0; it < max_iter; ++it) {
    std::vector<cplx> y = m.apply(x);
    for (std::size_t i = 0; i < n; ++i) y[i] += shift * x[i];
    const double ny = vec_norm(y);
    if (ny == 0.0) throw NumericalError("power iteration collapsed to zero", 0.0);
    for (cplx& t : y) t /= ny;
    const cplx q = vec_dot(y, m.apply(y));
    rho = q.real();
    x.swap(y);
    if (it > 8 && std::abs(rho - rho_prev) <= 1e-15 * std::max(1.0, std::abs(rho)))
      break;
    rho_prev = rho;
  }

  // Validate the pair; a complex dominant pair never settles.
  std::vector<cplx> r = m.apply(x);
  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i) res += std::norm(r[i] - rho * x[i]);
  res = std::sqrt(res);
  if (res > 1e-9 * scale)
    throw NumericalError(
        "no real dominant eigenpair found (complex dominant pair?)", res);
  phase_fix_first(x);
  return {rho, std::move(x)};
}

// ---------------------------------------------------------------------------
// Schmidt coefficients
// ---------------------------------------------------------------------------

std::vector<double> schmidt_coefficients(const PureState& psi,
                                         const std::vector<std::size_t>& cut) {
  const auto keep = validate_keep(cut, psi.dims.size());
  if (keep.empty() || keep.size() == psi.dims.size())
    throw std::invalid_argument("cut must split the factors into two nonempty groups");

  const auto rest = complement_of(keep, psi.dims.size());
  std::size_t dl = 1, dr = 1;
  for (std::size_t f : keep) dl *= psi.dims[f];
  for (std::size_t f : rest) dr *= psi.dims[f];

  // Eigenvalues of the smaller reduced density matrix.
  const auto& side = dl <= dr ? keep : rest;
  const HermitianOperator rho = reduced_density(psi, side);
  Spectrum s = hermitian_eig(rho);

  std::vector<double> coeffs;
  coeffs.reserve(s.eigenvalues.size());
  for (auto it = s.eigenvalues.rbegin(); it != s.eigenvalues.rend(); ++it)
    coeffs.push_back(std::sqrt(std::max(0.0, *it)));
  return coeffs;
}

}  // namespace qclone
