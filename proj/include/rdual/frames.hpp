#pragma once

// Frames, frame sequences and Riesz sequences in the square model: a
// sequence in C^n always has exactly n members, and redundancy shows up as
// rank deficiency of the synthesis matrix.

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rdual/linalg.hpp"

namespace rdual {

/// n vectors in C^n, stored as the columns of the synthesis matrix T.
class VectorSeq {
 public:
  explicit VectorSeq(Matrix columns) : t_(std::move(columns)) {
    if (!t_.is_square() || t_.rows() == 0) {
      throw Error(ErrorCode::ShapeError, "a sequence must hold exactly dim vectors of length dim");
    }
    require_finite(t_, "sequence");
  }

  static VectorSeq standard_basis(std::size_t n) { return VectorSeq(Matrix::identity(n)); }

  std::size_t dim() const noexcept { return t_.rows(); }
  std::size_t size() const noexcept { return t_.cols(); }
  const Matrix& synthesis() const noexcept { return t_; }
  std::span<const Scalar> operator[](std::size_t i) const { return t_.column(i); }

 private:
  Matrix t_;
};

class OrthonormalBasis {
 public:
  /// Throws NotOrthonormal unless ||Gram - I|| <= cert_rel.
  static OrthonormalBasis certify(VectorSeq seq, const Tolerances& tol = {}) {
    if (orthonormality_defect(seq.synthesis()) > tol.cert_rel) {
      throw Error(ErrorCode::NotOrthonormal, "sequence is not an orthonormal basis");
    }
    return OrthonormalBasis(std::move(seq));
  }

  static OrthonormalBasis certify(Matrix columns, const Tolerances& tol = {}) {
    return certify(VectorSeq(std::move(columns)), tol);
  }

  static OrthonormalBasis standard(std::size_t n) { return OrthonormalBasis(VectorSeq::standard_basis(n)); }

  std::size_t dim() const noexcept { return seq_.dim(); }
  const VectorSeq& seq() const noexcept { return seq_; }
  const Matrix& matrix() const noexcept { return seq_.synthesis(); }
  std::span<const Scalar> operator[](std::size_t i) const { return seq_[i]; }

 private:
  explicit OrthonormalBasis(VectorSeq seq) : seq_(std::move(seq)) {}
  VectorSeq seq_;
};

struct FrameBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// True when both bounds agree within `rel` relative to the larger bound.
inline bool bounds_match(const FrameBounds& a, const FrameBounds& b, double rel) {
  const double scale = std::max(a.upper, b.upper);
  return std::abs(a.lower - b.lower) <= rel * scale && std::abs(a.upper - b.upper) <= rel * scale;
}

enum class SequenceKind { riesz_basis, proper_frame_sequence, zero_sequence };

constexpr std::string_view to_string(SequenceKind k) {
  switch (k) {
    case SequenceKind::riesz_basis: return "riesz_basis";
    case SequenceKind::proper_frame_sequence: return "proper_frame_sequence";
    case SequenceKind::zero_sequence: return "zero_sequence";
  }
  return "unknown";
}

struct Classification {
  std::size_t rank = 0;
  SequenceKind kind = SequenceKind::zero_sequence;
  std::optional<FrameBounds> bounds;
};

inline void require_same_dim(const VectorSeq& a, const VectorSeq& b, std::string_view what) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": dimensions differ");
}

/// S = T T*.
inline Matrix frame_operator(const VectorSeq& s) {
  return hermitian_part(s.synthesis() * adjoint(s.synthesis()));
}

/// G = T* T, so that ||sum c_j w_j||^2 = c* G c.
inline Matrix gram(const VectorSeq& s) { return hermitian_part(adjoint(s.synthesis()) * s.synthesis()); }

/// Mixed Gram matrix: entry (j, k) = <b_k, a_j>.
inline Matrix cross_gram(const VectorSeq& a, const VectorSeq& b) {
  require_same_dim(a, b, "cross_gram");
  return adjoint(a.synthesis()) * b.synthesis();
}

inline std::vector<double> singular_values(const VectorSeq& s) { return svd(s.synthesis()).singulars; }

inline std::size_t rank(const VectorSeq& s, const Tolerances& tol = {}) {
  return numerical_rank(singular_values(s), tol);
}

namespace detail {

inline FrameBounds bounds_from_singulars(const std::vector<double>& sv, std::size_t r) {
  return {sv[r - 1] * sv[r - 1], sv[0] * sv[0]};
}

/// U diag(fn(sigma)) V* over the numerical range of T; zero elsewhere.
template <class Fn>
Matrix map_singulars(const VectorSeq& s, const Tolerances& tol, Fn&& fn) {
  const Svd d = svd(s.synthesis(), tol);
  const std::size_t r = numerical_rank(d.singulars, tol);
  if (r == 0) throw Error(ErrorCode::ZeroSequence, "sequence has rank zero");
  std::vector<double> mapped(d.singulars.size(), 0.0);
  for (std::size_t k = 0; k < r; ++k) mapped[k] = fn(d.singulars[k]);
  return scale_columns(d.left, mapped) * adjoint(d.right);
}

}  // namespace detail

/// Optimal frame bounds (extreme nonzero eigenvalues of S); for linearly
/// independent sequences these are also the optimal Riesz bounds.
inline FrameBounds optimal_bounds(const VectorSeq& s, const Tolerances& tol = {}) {
  const auto sv = singular_values(s);
  const std::size_t r = numerical_rank(sv, tol);
  if (r == 0) throw Error(ErrorCode::ZeroSequence, "optimal bounds of a zero sequence");
  return detail::bounds_from_singulars(sv, r);
}

inline Classification classify(const VectorSeq& s, const Tolerances& tol = {}) {
  const auto sv = singular_values(s);
  Classification c;
  c.rank = numerical_rank(sv, tol);
  if (c.rank == 0) return c;
  c.kind = c.rank == s.dim() ? SequenceKind::riesz_basis : SequenceKind::proper_frame_sequence;
  c.bounds = detail::bounds_from_singulars(sv, c.rank);
  return c;
}

/// {S^+ f_i}; reconstructs every f in span(s) as sum <f, S^+ f_i> f_i.
inline VectorSeq canonical_dual(const VectorSeq& s, const Tolerances& tol = {}) {
  return VectorSeq(detail::map_singulars(s, tol, [](double sigma) { return 1.0 / sigma; }));
}

/// {S^{+1/2} f_i}: a Parseval frame for span(s).
inline VectorSeq parsevalize(const VectorSeq& s, const Tolerances& tol = {}) {
  return VectorSeq(detail::map_singulars(s, tol, [](double) { return 1.0; }));
}

/// Orthogonal projection onto span(s).
inline Matrix span_projection(const VectorSeq& s, const Tolerances& tol = {}) {
  const Matrix p = parsevalize(s, tol).synthesis();
  return hermitian_part(p * adjoint(p));
}

/// Both mixed reconstruction identities f = sum <f, f_i> g_i = sum <f, g_i> f_i,
/// i.e. G F* = I and F G* = I.
inline bool verify_dual_pair(const VectorSeq& f, const VectorSeq& g, const Tolerances& tol = {}) {
  require_same_dim(f, g, "verify_dual_pair");
  const Matrix id = Matrix::identity(f.dim());
  const Matrix& ft = f.synthesis();
  const Matrix& gt = g.synthesis();
  return frobenius_norm(gt * adjoint(ft) - id) <= tol.cert_rel &&
         frobenius_norm(ft * adjoint(gt) - id) <= tol.cert_rel;
}

}  // namespace rdual
