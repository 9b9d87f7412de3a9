#pragma once

// Seeded generators for test corpora.
//
// Engine: std::mt19937_64. Uniforms take the top 53 bits of one draw
// (u = (x >> 11) * 2^-53); normals use the Box-Muller cosine branch on two
// uniforms (the first shifted to (0, 1]). Complex normals draw the real part
// first. Output is bit-identical for a given seed within one build.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "rdual/frames.hpp"
#include "rdual/linalg.hpp"

namespace rdual {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Scalar complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re, im};
  }

 private:
  std::mt19937_64 engine_;
};

inline Matrix random_gaussian(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (auto& z : m.data()) z = rng.complex_normal();
  return m;
}

inline Matrix random_hermitian(std::size_t n, Rng& rng) { return hermitian_part(random_gaussian(n, n, rng)); }

/// Orthonormalises a Gaussian matrix with twice-iterated modified Gram-Schmidt.
inline Matrix random_unitary(std::size_t n, Rng& rng) {
  Matrix q = random_gaussian(n, n, rng);
  for (std::size_t j = 0; j < n; ++j) {
    auto col = q.column(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        const auto prev = q.column(k);
        const Scalar c = inner(col, prev);
        for (std::size_t i = 0; i < n; ++i) col[i] -= c * prev[i];
      }
    }
    const double nn = norm(col);
    for (auto& z : col) z /= nn;
  }
  return q;
}

enum class GenerateKind { onb, spectrum };

struct GenerateSpec {
  std::size_t n = 0;
  GenerateKind kind = GenerateKind::onb;
  std::vector<double> singular_values;  // required for spectrum, length n
  std::uint64_t seed = 0;
};

/// onb: a random orthonormal basis. spectrum: P diag(sv) Q* with independent
/// random unitaries P, Q.
inline VectorSeq generate_sequence(const GenerateSpec& spec) {
  if (spec.n == 0) throw Error(ErrorCode::BadSpec, "n must be positive");
  Rng rng(spec.seed);
  if (spec.kind == GenerateKind::onb) return VectorSeq(random_unitary(spec.n, rng));

  if (spec.singular_values.size() != spec.n) {
    throw Error(ErrorCode::BadSpec, "spectrum needs exactly n singular values");
  }
  for (double s : spec.singular_values) {
    if (!std::isfinite(s) || s < 0.0) throw Error(ErrorCode::BadSpec, "singular values must be finite and >= 0");
  }
  const Matrix p = random_unitary(spec.n, rng);
  const Matrix q = random_unitary(spec.n, rng);
  return VectorSeq(scale_columns(p, spec.singular_values) * adjoint(q));
}

}  // namespace rdual
