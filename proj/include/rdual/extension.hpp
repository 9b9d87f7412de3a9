#pragma once

// Extension of a bijection Phi on a subspace V to all of C^n:
//   Phi~(x1 + x2) = Phi(x1) + ||Phi^{-1}||^{-1} x2,  x1 in V, x2 in V^perp,
// which keeps ||Phi~|| = ||Phi||, ||Phi~^{-1}|| = ||Phi^{-1}|| and self-adjointness.

#include "rdual/frames.hpp"
#include "rdual/linalg.hpp"

namespace rdual {

/// Phi: V -> V given by an orthonormal basis of V (columns of an n x k
/// matrix) and the k x k matrix of Phi in that basis.
class SubspaceOperator {
 public:
  SubspaceOperator(Matrix v_basis, Matrix action, const Tolerances& tol = {})
      : v_basis_(std::move(v_basis)), action_(std::move(action)) {
    const std::size_t k = v_basis_.cols();
    if (k == 0 || k > v_basis_.rows()) throw Error(ErrorCode::ShapeError, "subspace basis must hold 1..n vectors");
    if (action_.rows() != k || action_.cols() != k) {
      throw Error(ErrorCode::DimensionMismatch, "action must be k x k for a k-dimensional subspace");
    }
    require_finite(v_basis_, "subspace basis");
    require_finite(action_, "subspace action");
    if (orthonormality_defect(v_basis_) > tol.cert_rel) {
      throw Error(ErrorCode::NotOrthonormal, "subspace basis is not orthonormal");
    }
    const Svd d = svd(action_, tol);
    if (numerical_rank(d.singulars, tol) < k) throw Error(ErrorCode::SingularAction, "action is not invertible");
    norm_ = d.singulars.front();
    inverse_norm_ = 1.0 / d.singulars.back();
    std::vector<double> inv(k);
    std::transform(d.singulars.begin(), d.singulars.end(), inv.begin(), [](double s) { return 1.0 / s; });
    action_inverse_ = scale_columns(d.right, inv) * adjoint(d.left);
  }

  std::size_t ambient_dim() const noexcept { return v_basis_.rows(); }
  std::size_t subspace_dim() const noexcept { return v_basis_.cols(); }
  const Matrix& v_basis() const noexcept { return v_basis_; }
  const Matrix& action() const noexcept { return action_; }
  const Matrix& action_inverse() const noexcept { return action_inverse_; }
  double norm() const noexcept { return norm_; }
  double inverse_norm() const noexcept { return inverse_norm_; }

  /// Phi as an n x n operator that vanishes on V^perp.
  Matrix embedded() const { return v_basis_ * action_ * adjoint(v_basis_); }

 private:
  Matrix v_basis_;
  Matrix action_;
  Matrix action_inverse_;
  double norm_ = 0.0;
  double inverse_norm_ = 0.0;
};

namespace detail {
inline Matrix assemble_extension(const Matrix& basis, const Matrix& on_v, double complement_scale) {
  const std::size_t n = basis.rows();
  const Matrix projection = basis * adjoint(basis);
  Matrix out = basis * on_v * adjoint(basis);
  if (basis.cols() == n) return out;
  return out + Scalar(complement_scale) * (Matrix::identity(n) - projection);
}

inline bool is_hermitian(const Matrix& a, const Tolerances& tol) {
  return hermitian_defect(a) <= tol.exact_rel * std::max(1.0, frobenius_norm(a));
}
}  // namespace detail

inline Matrix extend_operator(const SubspaceOperator& phi, const Tolerances& tol = {}) {
  Matrix out = detail::assemble_extension(phi.v_basis(), phi.action(), 1.0 / phi.inverse_norm());
  return detail::is_hermitian(phi.action(), tol) ? hermitian_part(out) : out;
}

/// Phi~^{-1}(x1 + x2) = Phi^{-1} x1 + ||Phi^{-1}|| x2.
inline Matrix extended_inverse(const SubspaceOperator& phi, const Tolerances& tol = {}) {
  Matrix out = detail::assemble_extension(phi.v_basis(), phi.action_inverse(), phi.inverse_norm());
  return detail::is_hermitian(phi.action(), tol) ? hermitian_part(out) : out;
}

/// S^{1/2} restricted to span(s), as a subspace operator in an orthonormal
/// basis of the span. Extending it gives the positive definite S~^{1/2}.
inline SubspaceOperator frame_sqrt_on_span(const VectorSeq& s, const Tolerances& tol = {}) {
  const Svd d = svd(s.synthesis(), tol);
  const std::size_t r = numerical_rank(d.singulars, tol);
  if (r == 0) throw Error(ErrorCode::ZeroSequence, "sequence has rank zero");
  const Matrix basis = d.left.column_block(0, r);
  const Matrix sqrt_s = psd_sqrt(frame_operator(s), tol);
  return SubspaceOperator(basis, hermitian_part(adjoint(basis) * sqrt_s * basis), tol);
}

}  // namespace rdual
