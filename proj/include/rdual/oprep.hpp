#pragma once

// Shift-operator series for the inverse square root of a frame operator.
//
// With U the cyclic shift U h_i = h_{i+1 mod n} and V_j = S~^{-1/2} U^j S~^{1/2},
//   Lambda_k(g) = sum_j <g, h_j> V_j(h_k),
//   S~^{-1/2} = sum_k a_k Lambda_k,   a_k = <S~^{-1/2} h_0, h_k>.
// The family c_k = <S_f^{+1/2} f_k, S_f^{+1/2} f_0> is the alternative
// coefficient choice; it is measured against the target, not certified.

#include <algorithm>
#include <thread>
#include <vector>

#include "rdual/extension.hpp"
#include "rdual/frames.hpp"
#include "rdual/linalg.hpp"

namespace rdual {

struct ShiftFamily {
  Matrix u;                   // cyclic shift in the h-basis
  std::vector<Matrix> v_ops;  // V_0 .. V_{n-1}
  Matrix s_sqrt_ext;          // S~_w^{1/2}
  Matrix s_inv_sqrt_ext;      // S~_w^{-1/2}
};

/// The basis with h_k moved to index 0: h'_i = h_{(i + k) mod n}.
inline OrthonormalBasis rotate_basis(const OrthonormalBasis& h, std::size_t k) {
  const std::size_t n = h.dim();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) std::copy_n(h[(i + k) % n].begin(), n, m.column(i).begin());
  return OrthonormalBasis::certify(std::move(m));
}

/// U = H C H* where C is the cyclic permutation e_i -> e_{i+1 mod n}.
inline Matrix cyclic_shift(const OrthonormalBasis& h) {
  const std::size_t n = h.dim();
  Matrix c(n, n);
  for (std::size_t i = 0; i < n; ++i) c((i + 1) % n, i) = 1.0;
  return h.matrix() * c * adjoint(h.matrix());
}

inline ShiftFamily build_shift_family(const VectorSeq& omega, const OrthonormalBasis& h, const Tolerances& tol = {}) {
  require_same_dim(omega, h.seq(), "build_shift_family");
  const SubspaceOperator root = frame_sqrt_on_span(omega, tol);
  ShiftFamily fam;
  fam.u = cyclic_shift(h);
  fam.s_sqrt_ext = extend_operator(root, tol);
  fam.s_inv_sqrt_ext = extended_inverse(root, tol);
  const std::size_t n = omega.dim();
  fam.v_ops.reserve(n);
  Matrix u_power = Matrix::identity(n);
  for (std::size_t j = 0; j < n; ++j) {
    fam.v_ops.push_back(j == 0 ? Matrix::identity(n) : fam.s_inv_sqrt_ext * u_power * fam.s_sqrt_ext);
    u_power = fam.u * u_power;
  }
  return fam;
}

/// max_j ||V_j(S~^{-1/2} h_0) - S~^{-1/2} h_j||.
inline double shift_property_residual(const ShiftFamily& fam, const OrthonormalBasis& h) {
  const auto base = fam.s_inv_sqrt_ext * h[0];
  double worst = 0.0;
  for (std::size_t j = 0; j < fam.v_ops.size(); ++j) {
    const auto lhs = fam.v_ops[j] * std::span<const Scalar>(base);
    const auto rhs = fam.s_inv_sqrt_ext * h[j];
    double d = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) d += std::norm(lhs[i] - rhs[i]);
    worst = std::max(worst, std::sqrt(d));
  }
  return worst;
}

/// Optimal Bessel bound of the columns of `vectors`: lambda_max of T T*.
inline double bessel_bound_of_family(const Matrix& vectors) {
  const double s = operator_norm(vectors);
  return s * s;
}

inline double bessel_bound_of_family(const VectorSeq& vectors) { return bessel_bound_of_family(vectors.synthesis()); }

/// The sequence {V_j(h_k)}_j as columns.
inline Matrix shifted_family(const ShiftFamily& fam, const OrthonormalBasis& h, std::size_t k) {
  const std::size_t n = h.dim();
  Matrix b(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto col = fam.v_ops[j] * h[k];
    std::copy(col.begin(), col.end(), b.column(j).begin());
  }
  return b;
}

/// Lambda_k = sum_j V_j h_k h_j*. `jobs` > 1 builds the operators on worker threads.
inline std::vector<Matrix> lambda_family(const ShiftFamily& fam, const OrthonormalBasis& h, unsigned jobs = 1) {
  const std::size_t n = h.dim();
  std::vector<Matrix> out(n);
  const Matrix h_adj = adjoint(h.matrix());
  auto build = [&](std::size_t k) { out[k] = shifted_family(fam, h, k) * h_adj; };
  if (jobs <= 1) {
    for (std::size_t k = 0; k < n; ++k) build(k);
    return out;
  }
  std::vector<std::jthread> workers;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      for (std::size_t k = w; k < n; k += jobs) build(k);
    });
  }
  workers.clear();
  return out;
}

struct CoefficientReport {
  std::vector<Scalar> a;  // <S~^{-1/2} h_0, h_i>
  std::vector<Scalar> c;  // <S_f^{+1/2} f_i, S_f^{+1/2} f_0>
  std::vector<Scalar> p;  // <P_span(w) h_0, h_i>
  double l1_a = 0.0;
  double l1_c = 0.0;
};

inline CoefficientReport coefficients(const VectorSeq& f, const VectorSeq& omega, const OrthonormalBasis& h,
                                      const ShiftFamily& fam, const Tolerances& tol = {}) {
  require_same_dim(f, omega, "coefficients");
  require_same_dim(f, h.seq(), "coefficients");
  const std::size_t n = f.dim();
  const VectorSeq g = parsevalize(f, tol);
  const Matrix projection = span_projection(omega, tol);
  const auto target = fam.s_inv_sqrt_ext * h[0];
  const auto projected = projection * h[0];

  CoefficientReport r;
  for (std::size_t i = 0; i < n; ++i) {
    r.a.push_back(inner(target, h[i]));
    r.c.push_back(inner(g[i], g[0]));
    r.p.push_back(inner(projected, h[i]));
    r.l1_a += std::abs(r.a.back());
    r.l1_c += std::abs(r.c.back());
  }
  return r;
}

struct TailRow {
  std::size_t prefix_size = 0;  // terms 0 .. prefix_size-1 included
  double partial_error = 0.0;
  double tail_bound = 0.0;
};

struct RepresentationReport {
  Matrix operator_a;
  Matrix operator_c;
  double error_a = 0.0;
  double error_c = 0.0;
  double bessel_sup = 0.0;             // sup_k Bessel bound of {V_j(h_k)}_j
  std::vector<double> lambda_norms;    // ||Lambda_k||
  double max_modulus_gap = 0.0;        // max_i ||a_i| - |c_i||
  std::vector<TailRow> tail_table;
};

inline RepresentationReport represent_inv_sqrt(const ShiftFamily& fam, const std::vector<Matrix>& lambdas,
                                               const OrthonormalBasis& h, const CoefficientReport& coeffs) {
  const std::size_t n = lambdas.size();
  if (coeffs.a.size() != n || coeffs.c.size() != n || fam.v_ops.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "represent_inv_sqrt: inconsistent family sizes");
  }
  RepresentationReport r;
  r.operator_a = Matrix(n, n);
  r.operator_c = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    r.bessel_sup = std::max(r.bessel_sup, bessel_bound_of_family(shifted_family(fam, h, k)));
    r.lambda_norms.push_back(operator_norm(lambdas[k]));
    r.max_modulus_gap = std::max(r.max_modulus_gap, std::abs(std::abs(coeffs.a[k]) - std::abs(coeffs.c[k])));
  }
  const double root_b = std::sqrt(r.bessel_sup);

  for (std::size_t k = 0; k < n; ++k) {
    r.operator_a = r.operator_a + coeffs.a[k] * lambdas[k];
    r.operator_c = r.operator_c + coeffs.c[k] * lambdas[k];
    double tail = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) tail += std::abs(coeffs.a[i]);
    r.tail_table.push_back({k + 1, operator_norm(fam.s_inv_sqrt_ext - r.operator_a), tail * root_b});
  }
  r.error_a = operator_norm(r.operator_a - fam.s_inv_sqrt_ext);
  r.error_c = operator_norm(r.operator_c - fam.s_inv_sqrt_ext);
  return r;
}

}  // namespace rdual
