#pragma once

// R-duals of type I and type III, the symmetrical type-III relation and its
// certificates, biorthogonal gamma sequences, and the type-I pair decision
// with an antiunitary witness.
//
// Matrix forms used throughout (F, G, W: synthesis matrices; E, H: basis
// matrices):
//   type I:    W = H F^T conj(E)                  (w_j = sum_i <f_i, e_j> h_i)
//   type III:  W = Q H P^T conj(E),  P = S_f^{+1/2} F
//   recovery:  F = S_f^{1/2} E (H* Q^{-1} W)^T

#include <limits>
#include <optional>
#include <vector>

#include "rdual/extension.hpp"
#include "rdual/frames.hpp"
#include "rdual/linalg.hpp"

namespace rdual {

inline VectorSeq rdual_type_I(const VectorSeq& f, const OrthonormalBasis& e, const OrthonormalBasis& h) {
  require_same_dim(f, e.seq(), "rdual_type_I");
  require_same_dim(f, h.seq(), "rdual_type_I");
  return VectorSeq(h.matrix() * transpose(f.synthesis()) * conjugate(e.matrix()));
}

/// A bijective Q with ||Q|| <= sqrt(||S_f||) and ||Q^{-1}|| <= sqrt(||S_f^{-1}||).
class QOperator {
 public:
  const Matrix& q() const noexcept { return q_; }
  const Matrix& inverse() const noexcept { return q_inv_; }
  const FrameBounds& validated_against() const noexcept { return bounds_; }
  double norm() const noexcept { return norm_; }
  double inverse_norm() const noexcept { return inverse_norm_; }

 private:
  friend QOperator validate_q(const Matrix& q, const Matrix& s_f, const Tolerances& tol);
  Matrix q_;
  Matrix q_inv_;
  FrameBounds bounds_;
  double norm_ = 0.0;
  double inverse_norm_ = 0.0;
};

namespace detail {
/// Extreme nonzero eigenvalues of a Hermitian PSD operator.
inline FrameBounds psd_bounds(const Matrix& s, const Tolerances& tol) {
  const auto eig = hermitian_eig(s, tol);
  detail::require_psd(eig, tol);
  const double top = eig.values.back();
  if (top <= 0.0) throw Error(ErrorCode::ZeroSequence, "frame operator is zero");
  // Eigenvalues of S are squared singular values, so the rank threshold squares.
  // Below the solver's backward error (~n eps ||S||) an eigenvalue is
  // indistinguishable from zero, so that floor wins when it is larger.
  const double noise = 16.0 * static_cast<double>(s.rows()) * std::numeric_limits<double>::epsilon();
  const double threshold = std::max(tol.rank_rel * tol.rank_rel, noise) * top;
  double low = top;
  for (double l : eig.values) {
    if (l > threshold) {
      low = l;
      break;
    }
  }
  return {low, top};
}
}  // namespace detail

inline QOperator validate_q(const Matrix& q, const Matrix& s_f, const Tolerances& tol = {}) {
  if (!q.is_square() || q.rows() != s_f.rows()) throw Error(ErrorCode::DimensionMismatch, "validate_q");
  require_finite(q, "Q");
  const FrameBounds b = detail::psd_bounds(s_f, tol);
  const Svd d = svd(q, tol);
  if (numerical_rank(d.singulars, tol) < q.rows()) throw Error(ErrorCode::QSingular, "Q is not bijective");
  QOperator out;
  out.norm_ = d.singulars.front();
  out.inverse_norm_ = 1.0 / d.singulars.back();
  const double slack = 1.0 + tol.cert_rel;
  if (out.norm_ > std::sqrt(b.upper) * slack) {
    throw Error(ErrorCode::QTooLarge, "||Q|| = " + std::to_string(out.norm_) + " exceeds sqrt(||S_f||) = " +
                                          std::to_string(std::sqrt(b.upper)));
  }
  if (out.inverse_norm_ > std::sqrt(1.0 / b.lower) * slack) {
    throw Error(ErrorCode::QInverseTooLarge, "||Q^-1|| = " + std::to_string(out.inverse_norm_) +
                                                 " exceeds sqrt(||S_f^-1||) = " +
                                                 std::to_string(std::sqrt(1.0 / b.lower)));
  }
  std::vector<double> inv(d.singulars.size());
  std::transform(d.singulars.begin(), d.singulars.end(), inv.begin(), [](double s) { return 1.0 / s; });
  out.q_ = q;
  out.q_inv_ = scale_columns(d.right, inv) * adjoint(d.left);
  out.bounds_ = b;
  return out;
}

inline VectorSeq rdual_type_III(const VectorSeq& f, const OrthonormalBasis& e, const OrthonormalBasis& h,
                                const QOperator& q, const Tolerances& tol = {}) {
  require_same_dim(f, e.seq(), "rdual_type_III");
  require_same_dim(f, h.seq(), "rdual_type_III");
  if (q.q().rows() != f.dim()) throw Error(ErrorCode::DimensionMismatch, "rdual_type_III: Q");
  // Q must satisfy the norm constraints relative to this f's frame operator.
  validate_q(q.q(), frame_operator(f), tol);
  const VectorSeq type_one = rdual_type_I(parsevalize(f, tol), e, h);
  return VectorSeq(q.q() * type_one.synthesis());
}

/// f_i = sum_j <w_j, (Q*)^{-1} h_i> S_f^{1/2} e_j.
inline VectorSeq recover_type_III(const VectorSeq& omega, const OrthonormalBasis& e, const OrthonormalBasis& h,
                                  const QOperator& q, const Matrix& s_f_sqrt) {
  require_same_dim(omega, e.seq(), "recover_type_III");
  require_same_dim(omega, h.seq(), "recover_type_III");
  if (s_f_sqrt.rows() != omega.dim() || !s_f_sqrt.is_square()) {
    throw Error(ErrorCode::DimensionMismatch, "recover_type_III: S_f^{1/2}");
  }
  const Matrix coeff = adjoint(h.matrix()) * q.inverse() * omega.synthesis();  // (i, j) = <Q^{-1} w_j, h_i>
  return VectorSeq(s_f_sqrt * e.matrix() * transpose(coeff));
}

// ---------------------------------------------------------------------------
// Symmetrical type III

/// Witnesses for w_j = sum_i <S_f^{+1/2} f_i, e_j> S~_w^{1/2} h_i.
struct RDualCertificate {
  OrthonormalBasis e_basis;
  OrthonormalBasis h_basis;
  Matrix s_omega_sqrt_ext;  // S~_w^{1/2}: Hermitian positive definite
  double residual = 0.0;
};

/// Largest column error of the symmetrical type-III synthesis of `omega` from
/// `f` under the triple (e, h, s_sqrt_ext).
inline double symmetrical_residual(const VectorSeq& f, const VectorSeq& omega, const OrthonormalBasis& e,
                                   const OrthonormalBasis& h, const Matrix& s_sqrt_ext,
                                   const Tolerances& tol = {}) {
  require_same_dim(f, omega, "symmetrical_residual");
  const VectorSeq type_one = rdual_type_I(parsevalize(f, tol), e, h);
  return max_column_norm(s_sqrt_ext * type_one.synthesis() - omega.synthesis());
}

namespace detail {

/// Bases (E, H) with B = H A^T conj(E) whenever A and B share singular values:
/// A = P S Qa*, B = R S Sb*  =>  E = P Sb^T, H = R Qa^T.
inline std::pair<Matrix, Matrix> align_bases(const Matrix& a, const Matrix& b, const Tolerances& tol) {
  const Svd da = svd(a, tol);
  const Svd db = svd(b, tol);
  return {da.left * transpose(db.right), db.left * transpose(da.right)};
}

inline double certificate_scale(const VectorSeq& omega) { return std::max(1.0, max_column_norm(omega.synthesis())); }

}  // namespace detail

inline RDualCertificate certify_symmetrical_pair(const VectorSeq& f, const VectorSeq& omega,
                                                 const Tolerances& tol = {}) {
  require_same_dim(f, omega, "certify_symmetrical_pair");
  const Classification cf = classify(f, tol);
  const Classification cw = classify(omega, tol);
  if (cf.rank != cw.rank) {
    throw Error(ErrorCode::RankMismatch,
                "rank(f) = " + std::to_string(cf.rank) + " but rank(omega) = " + std::to_string(cw.rank));
  }
  if (cf.rank == 0) throw Error(ErrorCode::ZeroSequence, "certify_symmetrical_pair on zero sequences");
  if (!bounds_match(*cf.bounds, *cw.bounds, tol.cert_rel)) {
    throw Error(ErrorCode::BoundsMismatch, "optimal bounds differ: (" + std::to_string(cf.bounds->lower) + ", " +
                                               std::to_string(cf.bounds->upper) + ") vs (" +
                                               std::to_string(cw.bounds->lower) + ", " +
                                               std::to_string(cw.bounds->upper) + ")");
  }

  const VectorSeq g = parsevalize(f, tol);
  const VectorSeq u = parsevalize(omega, tol);
  auto [e, h] = detail::align_bases(g.synthesis(), u.synthesis(), tol);

  const SubspaceOperator root = frame_sqrt_on_span(omega, tol);
  RDualCertificate cert{OrthonormalBasis::certify(std::move(e), tol), OrthonormalBasis::certify(std::move(h), tol),
                        extend_operator(root, tol), 0.0};
  cert.residual = symmetrical_residual(f, omega, cert.e_basis, cert.h_basis, cert.s_omega_sqrt_ext, tol);
  if (cert.residual > tol.cert_rel * detail::certificate_scale(omega)) {
    throw Error(ErrorCode::CertificationFailed, "residual " + std::to_string(cert.residual) + " exceeds tolerance");
  }
  return cert;
}

namespace detail {
inline Matrix certificate_inverse_root(const RDualCertificate& cert, const Tolerances& tol) {
  try {
    return hermitian_part(inverse(cert.s_omega_sqrt_ext, tol));
  } catch (const Error&) {
    throw Error(ErrorCode::CertificationFailed, "certificate operator is not invertible");
  }
}

inline void require_certificate_shape(const VectorSeq& s, const RDualCertificate& cert) {
  if (cert.e_basis.dim() != s.dim() || cert.h_basis.dim() != s.dim() || cert.s_omega_sqrt_ext.rows() != s.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "certificate dimension differs from the sequence");
  }
}
}  // namespace detail

/// f_i = sum_j <S~_w^{-1/2} w_j, h_i> S_f^{1/2} e_j.
inline VectorSeq recover_symmetrical(const VectorSeq& omega, const RDualCertificate& cert, const Matrix& s_f_sqrt,
                                     const Tolerances& tol = {}) {
  detail::require_certificate_shape(omega, cert);
  if (!s_f_sqrt.is_square() || s_f_sqrt.rows() != omega.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "recover_symmetrical: S_f^{1/2}");
  }
  const Matrix inv_root = detail::certificate_inverse_root(cert, tol);
  const Matrix coeff = adjoint(cert.h_basis.matrix()) * inv_root * omega.synthesis();
  return VectorSeq(s_f_sqrt * cert.e_basis.matrix() * transpose(coeff));
}

/// gamma_j = S~_w^{-1/2} m_j with m_j = sum_i <S_f^{+1/2} f_i, e_j> h_i: the
/// symmetrical dual built from the canonical dual frame. Biorthogonal to
/// omega when f is a Riesz basis.
inline VectorSeq gamma_sequence(const VectorSeq& f, const RDualCertificate& cert, const Tolerances& tol = {}) {
  detail::require_certificate_shape(f, cert);
  const Matrix inv_root = detail::certificate_inverse_root(cert, tol);
  const VectorSeq m = rdual_type_I(parsevalize(f, tol), cert.e_basis, cert.h_basis);
  return VectorSeq(inv_root * m.synthesis());
}

/// max_{i,j} |<S~_w^{-1/2} w_j, h_i> - <S_f^{+1/2} f_i, e_j>|.
inline double coefficient_identity_check(const VectorSeq& f, const VectorSeq& omega, const RDualCertificate& cert,
                                         const Tolerances& tol = {}) {
  require_same_dim(f, omega, "coefficient_identity_check");
  detail::require_certificate_shape(f, cert);
  const Matrix inv_root = detail::certificate_inverse_root(cert, tol);
  const Matrix lhs = adjoint(cert.h_basis.matrix()) * inv_root * omega.synthesis();            // (i, j)
  const Matrix rhs = transpose(adjoint(cert.e_basis.matrix()) * parsevalize(f, tol).synthesis());  // (i, j)
  return max_abs(lhs - rhs);
}

// ---------------------------------------------------------------------------
// Type-I pair decision

/// Conjugate-linear map x -> unitary_part * conj(x).
struct AntiunitaryWitness {
  Matrix unitary_part;

  std::vector<Scalar> apply(std::span<const Scalar> x) const {
    std::vector<Scalar> c(x.begin(), x.end());
    for (auto& z : c) z = std::conj(z);
    return unitary_part * std::span<const Scalar>(c);
  }
};

struct PairDecision {
  bool is_pair = false;
  std::vector<double> spectra_f;      // eigenvalues of S_f, descending
  std::vector<double> spectra_omega;  // eigenvalues of S_w, descending
  std::optional<AntiunitaryWitness> witness;
  std::optional<std::pair<OrthonormalBasis, OrthonormalBasis>> bases;  // (E, H)
  double bases_residual = 0.0;    // max_j ||w_j - (type-I dual of f)_j||
  double witness_residual = 0.0;  // max_k ||S_w L e_k - L S_f e_k||
};

/// max_k ||S_w L e_k - L S_f e_k|| for L = unitary_part o conj; the antiunitary
/// intertwining S_w = L S_f L^{-1}, tested on the standard basis.
inline double antiunitary_residual(const AntiunitaryWitness& w, const Matrix& s_f, const Matrix& s_omega) {
  return max_column_norm(s_omega * w.unitary_part - w.unitary_part * conjugate(s_f));
}

inline PairDecision decide_type_I_pair(const VectorSeq& f, const VectorSeq& omega, const Tolerances& tol = {}) {
  require_same_dim(f, omega, "decide_type_I_pair");
  const Svd df = svd(f.synthesis(), tol);
  const Svd dw = svd(omega.synthesis(), tol);
  PairDecision out;
  for (std::size_t k = 0; k < f.dim(); ++k) {
    out.spectra_f.push_back(df.singulars[k] * df.singulars[k]);
    out.spectra_omega.push_back(dw.singulars[k] * dw.singulars[k]);
  }
  const double scale = std::max(df.singulars.front(), dw.singulars.front());
  double gap = 0.0;
  for (std::size_t k = 0; k < f.dim(); ++k) gap = std::max(gap, std::abs(df.singulars[k] - dw.singulars[k]));
  if (gap > tol.cert_rel * scale) return out;

  out.is_pair = true;
  auto e = OrthonormalBasis::certify(df.left * transpose(dw.right), tol);
  auto h = OrthonormalBasis::certify(dw.left * transpose(df.right), tol);
  out.bases_residual = max_column_norm(rdual_type_I(f, e, h).synthesis() - omega.synthesis());
  out.bases.emplace(std::move(e), std::move(h));

  // S_f = P D P*, S_w = R D R*; L = R P^T maps conj(p_k) to r_k.
  out.witness = AntiunitaryWitness{dw.left * transpose(df.left)};
  const Matrix s_f = frame_operator(f);
  const Matrix s_w = frame_operator(omega);
  out.witness_residual = antiunitary_residual(*out.witness, s_f, s_w);

  const double base_scale = std::max(1.0, max_column_norm(omega.synthesis()));
  const double op_scale = std::max(1.0, scale * scale);
  if (out.bases_residual > tol.cert_rel * base_scale || out.witness_residual > tol.cert_rel * op_scale) {
    // spectra agree only up to the tolerance edge; nothing verified, so no pair
    out.is_pair = false;
    out.bases.reset();
    out.witness.reset();
  }
  return out;
}

}  // namespace rdual
