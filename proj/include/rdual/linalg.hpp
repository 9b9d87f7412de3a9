#pragma once

// Dense complex linear algebra for small square problems (n <= 64).
//
// Matrices are stored column-major; column j is the image of the j-th
// standard basis vector. Inner products are linear in the first argument:
// inner(x, y) = sum_k x_k * conj(y_k).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rdual/error.hpp"

namespace rdual {

using Scalar = std::complex<double>;

struct Tolerances {
  double rank_rel = 1e-10;   // singular value sigma counts as zero iff sigma <= rank_rel * sigma_max
  double cert_rel = 1e-9;    // certificate residuals and bound comparisons
  double exact_rel = 1e-12;  // structural checks (Hermitian input, exact identities)

  void validate() const {
    for (double t : {rank_rel, cert_rel, exact_rel}) {
      if (!(t > 0.0 && t < 1.0)) {
        throw Error(ErrorCode::BadSpec, "tolerances must lie strictly between 0 and 1");
      }
    }
  }
};

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(std::span<const double> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  static Matrix diagonal(std::initializer_list<double> d) {
    return diagonal(std::span<const double>(d.begin(), d.size()));
  }

  /// Builds a matrix whose columns are the given vectors (all of length `rows`).
  static Matrix from_columns(std::size_t rows, const std::vector<std::vector<Scalar>>& cols) {
    Matrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j].size() != rows) {
        throw Error(ErrorCode::ShapeError, "column " + std::to_string(j) + " has wrong length");
      }
      std::copy(cols[j].begin(), cols[j].end(), m.column(j).begin());
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  Scalar& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
  const Scalar& operator()(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }

  std::span<Scalar> column(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const Scalar> column(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }

  /// Columns [first, first + count) as a new matrix.
  Matrix column_block(std::size_t first, std::size_t count) const {
    Matrix m(rows_, count);
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(first * rows_), count * rows_,
                m.data_.begin());
    return m;
  }

  std::span<const Scalar> data() const noexcept { return data_; }
  std::span<Scalar> data() noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Scalar> data_;
};

using Operator = Matrix;

// ---------------------------------------------------------------------------
// Elementwise and algebraic helpers

inline Scalar inner(std::span<const Scalar> x, std::span<const Scalar> y) {
  Scalar s{};
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * std::conj(y[k]);
  return s;
}

inline double norm(std::span<const Scalar> x) {
  double s = 0.0;
  for (const auto& v : x) s += std::norm(v);
  return std::sqrt(s);
}

inline bool is_finite(const Matrix& a) {
  return std::all_of(a.data().begin(), a.data().end(),
                     [](const Scalar& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

inline void require_finite(const Matrix& a, std::string_view what) {
  if (!is_finite(a)) throw Error(ErrorCode::NonFinite, std::string(what) + " has non-finite entries");
}

inline void require_same_shape(const Matrix& a, const Matrix& b, std::string_view what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": shape mismatch");
  }
}

inline Matrix adjoint(const Matrix& a) {
  Matrix r(a.cols(), a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) r(j, i) = std::conj(a(i, j));
  return r;
}

inline Matrix transpose(const Matrix& a) {
  Matrix r(a.cols(), a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) r(j, i) = a(i, j);
  return r;
}

inline Matrix conjugate(const Matrix& a) {
  Matrix r = a;
  for (auto& z : r.data()) z = std::conj(z);
  return r;
}

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::DimensionMismatch, "matrix product");
  Matrix r(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto out = r.column(j);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Scalar bkj = b(k, j);
      if (bkj == Scalar{}) continue;
      auto ak = a.column(k);
      for (std::size_t i = 0; i < a.rows(); ++i) out[i] += ak[i] * bkj;
    }
  }
  return r;
}

inline std::vector<Scalar> operator*(const Matrix& a, std::span<const Scalar> x) {
  if (a.cols() != x.size()) throw Error(ErrorCode::DimensionMismatch, "matrix-vector product");
  std::vector<Scalar> y(a.rows());
  for (std::size_t k = 0; k < a.cols(); ++k) {
    auto ak = a.column(k);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] += ak[i] * x[k];
  }
  return y;
}

inline Matrix operator+(Matrix a, const Matrix& b) {
  require_same_shape(a, b, "matrix sum");
  for (std::size_t k = 0; k < a.data().size(); ++k) a.data()[k] += b.data()[k];
  return a;
}

inline Matrix operator-(Matrix a, const Matrix& b) {
  require_same_shape(a, b, "matrix difference");
  for (std::size_t k = 0; k < a.data().size(); ++k) a.data()[k] -= b.data()[k];
  return a;
}

inline Matrix operator*(Scalar s, Matrix a) {
  for (auto& z : a.data()) z *= s;
  return a;
}

inline double frobenius_norm(const Matrix& a) { return norm(a.data()); }

inline double max_abs(const Matrix& a) {
  double m = 0.0;
  for (const auto& z : a.data()) m = std::max(m, std::abs(z));
  return m;
}

/// Largest column norm; the residual measure used for sequence comparisons.
inline double max_column_norm(const Matrix& a) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, norm(a.column(j)));
  return m;
}

inline double hermitian_defect(const Matrix& a) { return frobenius_norm(a - adjoint(a)); }

/// ||A* A - I||_F, zero iff the columns are orthonormal.
inline double orthonormality_defect(const Matrix& a) {
  return frobenius_norm(adjoint(a) * a - Matrix::identity(a.cols()));
}

inline Matrix hermitian_part(const Matrix& a) { return Scalar(0.5) * (a + adjoint(a)); }

inline Matrix scale_columns(Matrix a, std::span<const double> s) {
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (auto& z : a.column(j)) z *= s[j];
  return a;
}

// ---------------------------------------------------------------------------
// Jacobi machinery

namespace detail {

inline constexpr int kMaxSweeps = 30;

/// 2x2 unitary J (column-major j00, j10, j01, j11) that diagonalises the
/// Hermitian block [[a, b], [conj(b), d]] via J* B J.
struct Rotation {
  Scalar j00, j10, j01, j11;
};

inline Rotation jacobi_rotation(double a, double d, Scalar b) {
  const double abs_b = std::abs(b);
  const Scalar w = std::conj(b) / abs_b;  // phase that makes the off-diagonal real
  const double theta = (d - a) / (2.0 * abs_b);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  return {c, -w * s, s, w * c};
}

inline void rotate_columns(Matrix& m, std::size_t p, std::size_t q, const Rotation& r) {
  auto cp = m.column(p);
  auto cq = m.column(q);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const Scalar x = cp[i];
    const Scalar y = cq[i];
    cp[i] = x * r.j00 + y * r.j10;
    cq[i] = x * r.j01 + y * r.j11;
  }
}

inline void rotate_rows_adjoint(Matrix& m, std::size_t p, std::size_t q, const Rotation& r) {
  for (std::size_t c = 0; c < m.cols(); ++c) {
    const Scalar x = m(p, c);
    const Scalar y = m(q, c);
    m(p, c) = std::conj(r.j00) * x + std::conj(r.j10) * y;
    m(q, c) = std::conj(r.j01) * x + std::conj(r.j11) * y;
  }
}

}  // namespace detail

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  Matrix vectors;              // orthonormal eigenvectors as columns
};

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
inline EigenDecomposition hermitian_eig(const Matrix& a, const Tolerances& tol = {}) {
  if (!a.is_square() || a.rows() == 0) throw Error(ErrorCode::DimensionMismatch, "hermitian_eig needs a square matrix");
  require_finite(a, "hermitian_eig input");
  const double scale = std::max(1.0, frobenius_norm(a));
  if (hermitian_defect(a) > tol.exact_rel * scale) {
    throw Error(ErrorCode::NotHermitian, "hermitian_eig input is not Hermitian");
  }

  const std::size_t n = a.rows();
  Matrix work = hermitian_part(a);
  Matrix v = Matrix::identity(n);
  for (std::size_t i = 0; i < n; ++i) work(i, i) = work(i, i).real();

  const double norm_f = frobenius_norm(work);
  const double skip = std::max(std::numeric_limits<double>::epsilon() * norm_f / static_cast<double>(n),
                               std::numeric_limits<double>::min());
  bool converged = norm_f == 0.0;
  for (int sweep = 0; sweep < detail::kMaxSweeps && !converged; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Scalar b = work(p, q);
        if (std::abs(b) <= skip) continue;
        rotated = true;
        const auto r = detail::jacobi_rotation(work(p, p).real(), work(q, q).real(), b);
        detail::rotate_columns(work, p, q, r);
        detail::rotate_rows_adjoint(work, p, q, r);
        detail::rotate_columns(v, p, q, r);
        work(p, q) = 0.0;
        work(q, p) = 0.0;
        work(p, p) = work(p, p).real();
        work(q, q) = work(q, q).real();
      }
    }
    converged = !rotated;
  }
  if (!converged) throw Error(ErrorCode::NoConvergence, "Jacobi eigen sweeps exceeded the cap");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return work(x, x).real() < work(y, y).real(); });
  EigenDecomposition out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = work(order[k], order[k]).real();
    std::copy_n(v.column(order[k]).begin(), n, out.vectors.column(k).begin());
  }
  return out;
}

/// Extends k orthonormal columns of an n x k matrix to an orthonormal basis of C^n.
/// The first k output columns equal the input.
inline Matrix complete_to_onb(const Matrix& partial, const Tolerances& tol = {}) {
  const std::size_t n = partial.rows();
  const std::size_t k = partial.cols();
  if (k > n) throw Error(ErrorCode::NotOrthonormal, "more vectors than the dimension");
  require_finite(partial, "complete_to_onb input");
  if (orthonormality_defect(partial) > tol.cert_rel) {
    throw Error(ErrorCode::NotOrthonormal, "partial system is not orthonormal");
  }
  Matrix out(n, n);
  for (std::size_t j = 0; j < k; ++j) std::copy_n(partial.column(j).begin(), n, out.column(j).begin());

  for (std::size_t filled = k; filled < n; ++filled) {
    std::vector<Scalar> best;
    double best_norm = -1.0;
    for (std::size_t e = 0; e < n; ++e) {
      std::vector<Scalar> r(n);
      r[e] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < filled; ++j) {
          const auto b = out.column(j);
          const Scalar c = inner(r, b);
          for (std::size_t i = 0; i < n; ++i) r[i] -= c * b[i];
        }
      }
      const double rn = norm(r);
      if (rn > best_norm) {
        best_norm = rn;
        best = std::move(r);
      }
    }
    for (std::size_t i = 0; i < n; ++i) out(i, filled) = best[i] / best_norm;
  }
  return out;
}

struct Svd {
  Matrix left;                    // unitary
  std::vector<double> singulars;  // descending
  Matrix right;                   // unitary; A = left * diag(singulars) * right*
};

/// One-sided (Hestenes) Jacobi SVD of a square matrix. Columns of A*V are
/// orthogonalised to relative working precision, so left vectors stay
/// orthonormal even for tiny singular values.
inline Svd svd(const Matrix& a, const Tolerances& tol = {}) {
  if (!a.is_square() || a.rows() == 0) throw Error(ErrorCode::DimensionMismatch, "svd needs a square matrix");
  require_finite(a, "svd input");
  const std::size_t n = a.rows();
  Matrix w = a;
  Matrix v = Matrix::identity(n);
  const double orth_tol = std::sqrt(static_cast<double>(n)) * std::numeric_limits<double>::epsilon();

  bool converged = false;
  for (int sweep = 0; sweep < detail::kMaxSweeps && !converged; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = std::norm(norm(w.column(p)));
        const double beta = std::norm(norm(w.column(q)));
        if (alpha == 0.0 || beta == 0.0) continue;
        const Scalar g = inner(w.column(q), w.column(p));  // (W* W)_{pq}
        if (std::abs(g) <= orth_tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const auto r = detail::jacobi_rotation(alpha, beta, g);
        detail::rotate_columns(w, p, q, r);
        detail::rotate_columns(v, p, q, r);
      }
    }
    converged = !rotated;
  }
  if (!converged) throw Error(ErrorCode::NoConvergence, "one-sided Jacobi sweeps exceeded the cap");

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = norm(w.column(j));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  const double sigma_max = sigma[order[0]];
  const double eps = std::numeric_limits<double>::epsilon();
  const double negligible = std::max(sigma_max * eps * eps, std::numeric_limits<double>::min());

  Svd out{Matrix(n, n), std::vector<double>(n, 0.0), Matrix(n, n)};
  std::size_t nonzero = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    std::copy_n(v.column(j).begin(), n, out.right.column(k).begin());
    if (sigma[j] > negligible) {
      out.singulars[k] = sigma[j];
      for (std::size_t i = 0; i < n; ++i) out.left(i, k) = w(i, j) / sigma[j];
      ++nonzero;
    }
  }
  if (nonzero < n) {
    const Matrix completed = complete_to_onb(out.left.column_block(0, nonzero), tol);
    out.left = completed;
  }
  return out;
}

/// Operator (spectral) norm.
inline double operator_norm(const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  return svd(a).singulars.front();
}

inline std::size_t numerical_rank(std::span<const double> singulars_desc, const Tolerances& tol) {
  if (singulars_desc.empty() || singulars_desc.front() == 0.0) return 0;
  const double threshold = tol.rank_rel * singulars_desc.front();
  return static_cast<std::size_t>(
      std::count_if(singulars_desc.begin(), singulars_desc.end(), [&](double s) { return s > threshold; }));
}

/// Inverse through the SVD; `on_singular` names the error raised when the
/// smallest singular value falls below the rank threshold.
inline Matrix inverse(const Matrix& a, const Tolerances& tol = {}, ErrorCode on_singular = ErrorCode::SingularAction) {
  const Svd d = svd(a, tol);
  if (numerical_rank(d.singulars, tol) < a.rows()) throw Error(on_singular, "matrix is numerically singular");
  std::vector<double> inv(d.singulars.size());
  std::transform(d.singulars.begin(), d.singulars.end(), inv.begin(), [](double s) { return 1.0 / s; });
  return scale_columns(d.right, inv) * adjoint(d.left);
}

/// V diag(fn(lambda)) V* for a Hermitian input.
template <class Fn>
Matrix spectral_function(const EigenDecomposition& eig, Fn&& fn) {
  std::vector<double> mapped(eig.values.size());
  std::transform(eig.values.begin(), eig.values.end(), mapped.begin(), fn);
  return hermitian_part(scale_columns(eig.vectors, mapped) * adjoint(eig.vectors));
}

namespace detail {
inline void require_psd(const EigenDecomposition& eig, const Tolerances& tol) {
  const double scale = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
  if (eig.values.front() < -tol.rank_rel * scale) {
    throw Error(ErrorCode::NotPsd, "matrix has a negative eigenvalue " + std::to_string(eig.values.front()));
  }
}
}  // namespace detail

/// Positive square root of a Hermitian positive semidefinite matrix.
inline Matrix psd_sqrt(const Matrix& a, const Tolerances& tol = {}) {
  const auto eig = hermitian_eig(a, tol);
  detail::require_psd(eig, tol);
  return spectral_function(eig, [](double l) { return std::sqrt(std::max(l, 0.0)); });
}

/// Pseudo-inverse square root: eigenvalues above rank_rel * lambda_max map to
/// lambda^{-1/2}, the rest to zero.
inline Matrix psd_pinv_sqrt(const Matrix& a, const Tolerances& tol = {}) {
  const auto eig = hermitian_eig(a, tol);
  detail::require_psd(eig, tol);
  const double threshold = tol.rank_rel * std::max(eig.values.back(), 0.0);
  return spectral_function(eig, [&](double l) { return l > threshold ? 1.0 / std::sqrt(l) : 0.0; });
}

}  // namespace rdual
