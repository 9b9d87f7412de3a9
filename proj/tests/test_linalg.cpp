#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "rdual/linalg.hpp"
#include "rdual/random.hpp"
#include "test_support.hpp"

using namespace rdual;
using rdual::testing::dist;
using rdual::testing::real_matrix;

namespace {

double reconstruction_residual(const Matrix& a, const EigenDecomposition& d) {
  return frobenius_norm(a - scale_columns(d.vectors, d.values) * adjoint(d.vectors));
}

double svd_residual(const Matrix& a, const Svd& d) {
  return frobenius_norm(a - scale_columns(d.left, d.singulars) * adjoint(d.right));
}

}  // namespace

TEST(HermitianEig, DiagonalInputGivesIdentityVectors) {
  const auto d = hermitian_eig(Matrix::diagonal({1.0, 4.0}));
  EXPECT_DOUBLE_EQ(d.values[0], 1.0);
  EXPECT_DOUBLE_EQ(d.values[1], 4.0);
  EXPECT_LE(dist(d.vectors, Matrix::identity(2)), 1e-15);
}

TEST(HermitianEig, TwoByTwoByHand) {
  const auto d = hermitian_eig(real_matrix(2, {2, 1, 1, 2}));
  EXPECT_NEAR(d.values[0], 1.0, 1e-14);
  EXPECT_NEAR(d.values[1], 3.0, 1e-14);
}

TEST(HermitianEig, ComplexTwoByTwo) {
  // [[2, i], [-i, 2]] has eigenvalues 1 and 3
  Matrix a(2, 2);
  a(0, 0) = 2.0;
  a(1, 1) = 2.0;
  a(0, 1) = Scalar(0, 1);
  a(1, 0) = Scalar(0, -1);
  const auto d = hermitian_eig(a);
  EXPECT_NEAR(d.values[0], 1.0, 1e-14);
  EXPECT_NEAR(d.values[1], 3.0, 1e-14);
  EXPECT_LE(reconstruction_residual(a, d), 1e-14);
}

TEST(HermitianEig, RandomSeed7) {
  Rng rng(7);
  const Matrix a = random_hermitian(5, rng);
  const auto d = hermitian_eig(a);
  EXPECT_LE(reconstruction_residual(a, d), 1e-12 * std::max(1.0, operator_norm(a)));
  EXPECT_LE(orthonormality_defect(d.vectors), 1e-12);
  EXPECT_TRUE(std::is_sorted(d.values.begin(), d.values.end()));
}

TEST(HermitianEig, HundredRandomInputs) {
  Rng rng(20240);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 15;
    const Matrix a = random_hermitian(n, rng);
    const auto d = hermitian_eig(a);
    ASSERT_LE(reconstruction_residual(a, d), 1e-12 * std::max(1.0, operator_norm(a))) << "trial " << trial;
    ASSERT_LE(orthonormality_defect(d.vectors), 1e-12) << "trial " << trial;
  }
}

TEST(HermitianEig, DegenerateSpectrum) {
  Rng rng(4);
  const Matrix u = random_unitary(6, rng);
  const Matrix a = hermitian_part(scale_columns(u, std::vector<double>{2, 2, 2, -1, -1, 0}) * adjoint(u));
  const auto d = hermitian_eig(a);
  EXPECT_LE(reconstruction_residual(a, d), 1e-13);
  EXPECT_LE(orthonormality_defect(d.vectors), 1e-13);
  EXPECT_NEAR(d.values[0], -1.0, 1e-13);
  EXPECT_NEAR(d.values[5], 2.0, 1e-13);
}

TEST(HermitianEig, ZeroMatrix) {
  const auto d = hermitian_eig(Matrix(3, 3));
  for (double v : d.values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(d.vectors, Matrix::identity(3));
}

TEST(HermitianEig, RejectsNonHermitian) {
  try {
    hermitian_eig(real_matrix(2, {1, 0, 1, 1}));
    FAIL() << "expected NotHermitian";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotHermitian);
  }
}

TEST(HermitianEig, RejectsNonFinite) {
  Matrix a = Matrix::identity(2);
  a(0, 0) = std::numeric_limits<double>::quiet_NaN();
  try {
    hermitian_eig(a);
    FAIL() << "expected NonFinite";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFinite);
  }
}

TEST(PsdSqrt, DiagonalAndIdentity) {
  EXPECT_LE(dist(psd_sqrt(Matrix::diagonal({4.0, 9.0})), Matrix::diagonal({2.0, 3.0})), 1e-15);
  EXPECT_LE(dist(psd_sqrt(Matrix::identity(3)), Matrix::identity(3)), 1e-15);
}

TEST(PsdSqrt, SquaringOracleOnFrameOperator) {
  Rng rng(3);
  const Matrix f = random_gaussian(4, 4, rng);
  const Matrix s = hermitian_part(f * adjoint(f));
  const Matrix r = psd_sqrt(s);
  EXPECT_LE(operator_norm(r * r - s), 1e-11 * std::max(1.0, operator_norm(s)));
  EXPECT_LE(hermitian_defect(r), 1e-15);
}

TEST(PsdSqrt, DiagonalEntrywiseProperty) {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> d(5);
    std::vector<double> roots(5);
    for (std::size_t i = 0; i < 5; ++i) {
      d[i] = 10.0 * rng.uniform();
      roots[i] = std::sqrt(d[i]);
    }
    EXPECT_LE(dist(psd_sqrt(Matrix::diagonal(d)), Matrix::diagonal(roots)), 1e-14);
  }
}

TEST(PsdSqrt, RejectsNegativeEigenvalue) {
  try {
    psd_sqrt(Matrix::diagonal({1.0, -0.5}));
    FAIL() << "expected NotPsd";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPsd);
  }
}

TEST(PsdPinvSqrt, DiagonalCases) {
  EXPECT_LE(dist(psd_pinv_sqrt(Matrix::diagonal({4.0, 0.0})), Matrix::diagonal({0.5, 0.0})), 1e-15);
  EXPECT_LE(dist(psd_pinv_sqrt(Matrix::diagonal({4.0, 1.0, 0.0})), Matrix::diagonal({0.5, 1.0, 0.0})), 1e-15);
}

TEST(PsdPinvSqrt, ProjectionOracleRankTwo) {
  Rng rng(12);
  const Matrix b = random_gaussian(4, 2, rng);
  const Matrix a = hermitian_part(b * adjoint(b));
  const Matrix proj = rdual::testing::gram_schmidt_projection(b);
  const Matrix r = psd_pinv_sqrt(a);
  EXPECT_LE(operator_norm(r * a * r - proj), 1e-10);
  EXPECT_LE(operator_norm(r * psd_sqrt(a) - proj), 1e-10);
}

TEST(PsdPinvSqrt, ProductWithSqrtIsProjection) {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const std::size_t k = 1 + trial % n;
    const Matrix b = random_gaussian(n, k, rng);
    const Matrix a = hermitian_part(b * adjoint(b));
    const Matrix proj = rdual::testing::gram_schmidt_projection(b);
    ASSERT_LE(operator_norm(psd_pinv_sqrt(a) * psd_sqrt(a) - proj), 1e-10) << "trial " << trial;
  }
}

TEST(Svd, IdentityAndDiagonal) {
  const auto id = svd(Matrix::identity(3));
  for (double s : id.singulars) EXPECT_DOUBLE_EQ(s, 1.0);
  const auto d = svd(Matrix::diagonal({0.0, 3.0}));
  EXPECT_DOUBLE_EQ(d.singulars[0], 3.0);
  EXPECT_DOUBLE_EQ(d.singulars[1], 0.0);
  EXPECT_LE(svd_residual(Matrix::diagonal({0.0, 3.0}), d), 1e-15);
  EXPECT_LE(orthonormality_defect(d.left), 1e-15);
}

TEST(Svd, RandomSeed11) {
  Rng rng(11);
  const Matrix a = random_gaussian(5, 5, rng);
  const auto d = svd(a);
  EXPECT_LE(svd_residual(a, d), 1e-12 * std::max(1.0, d.singulars.front()));
  EXPECT_LE(orthonormality_defect(d.left), 1e-12);
  EXPECT_LE(orthonormality_defect(d.right), 1e-12);
  EXPECT_TRUE(std::is_sorted(d.singulars.rbegin(), d.singulars.rend()));
}

TEST(Svd, SingularValuesMatchEigenvaluesOfGram) {
  Rng rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 15;
    const Matrix a = random_gaussian(n, n, rng);
    const auto d = svd(a);
    auto lam = hermitian_eig(hermitian_part(adjoint(a) * a)).values;
    std::reverse(lam.begin(), lam.end());
    for (std::size_t k = 0; k < n; ++k) {
      ASSERT_NEAR(d.singulars[k], std::sqrt(std::max(lam[k], 0.0)), 1e-10 * std::max(1.0, d.singulars[0]));
    }
    // power iteration on A*A as a third route to the top singular value
    ASSERT_NEAR(d.singulars[0] * d.singulars[0], rdual::testing::power_iteration_top(adjoint(a) * a),
                1e-8 * d.singulars[0] * d.singulars[0]);
  }
}

TEST(Svd, RankDeficientKeepsOrthogonality) {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 3 + trial % 10;
    const std::size_t r = 1 + trial % (n - 1);
    const Matrix a = random_gaussian(n, r, rng) * random_gaussian(r, n, rng);
    const auto d = svd(a);
    ASSERT_LE(svd_residual(a, d), 1e-12 * std::max(1.0, d.singulars.front()));
    ASSERT_LE(orthonormality_defect(d.left), 1e-12);
    ASSERT_LE(orthonormality_defect(d.right), 1e-12);
    ASSERT_EQ(numerical_rank(d.singulars, Tolerances{}), r);
  }
}

TEST(Svd, WideDynamicRange) {
  Rng rng(8);
  const Matrix p = random_unitary(6, rng);
  const Matrix q = random_unitary(6, rng);
  const std::vector<double> sv{1e3, 10, 1, 1e-4, 1e-9, 1e-13};
  const Matrix a = scale_columns(p, sv) * adjoint(q);
  const auto d = svd(a);
  EXPECT_LE(svd_residual(a, d), 1e-12 * 1e3);
  EXPECT_LE(orthonormality_defect(d.left), 1e-12);
  EXPECT_LE(orthonormality_defect(d.right), 1e-12);
}

TEST(CompleteToOnb, StandardAndEmpty) {
  Matrix e1(2, 1);
  e1(0, 0) = 1.0;
  const Matrix b = complete_to_onb(e1);
  EXPECT_LE(orthonormality_defect(b), 1e-15);
  EXPECT_EQ(b(0, 0), Scalar(1.0));

  const Matrix any = complete_to_onb(Matrix(3, 0));
  EXPECT_LE(orthonormality_defect(any), 1e-15);
}

TEST(CompleteToOnb, DiagonalStart) {
  Matrix v(2, 1);
  v(0, 0) = 1.0 / std::sqrt(2.0);
  v(1, 0) = 1.0 / std::sqrt(2.0);
  const Matrix b = complete_to_onb(v);
  EXPECT_LE(orthonormality_defect(b), 1e-15);
  EXPECT_EQ(b(0, 0), v(0, 0));
  EXPECT_NEAR(std::abs(inner(b.column(0), b.column(1))), 0.0, 1e-15);
  EXPECT_NEAR(norm(b.column(1)), 1.0, 1e-15);
}

TEST(CompleteToOnb, RandomPartialSystems) {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 9;
    const std::size_t k = trial % (n + 1);
    const Matrix partial = random_unitary(n, rng).column_block(0, k);
    const Matrix b = complete_to_onb(partial);
    ASSERT_LE(orthonormality_defect(b), 1e-13);
    ASSERT_LE(dist(b.column_block(0, k), partial), 0.0);
  }
}

TEST(CompleteToOnb, RejectsNonOrthonormal) {
  Matrix v(2, 1);
  v(0, 0) = 2.0;
  try {
    complete_to_onb(v);
    FAIL() << "expected NotOrthonormal";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotOrthonormal);
  }
}

TEST(Inverse, SingularMatrixRaisesRequestedCode) {
  try {
    inverse(Matrix::diagonal({1.0, 0.0}), Tolerances{}, ErrorCode::QSingular);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::QSingular);
  }
}

TEST(Tolerances, Validation) {
  EXPECT_NO_THROW(Tolerances{}.validate());
  EXPECT_THROW((Tolerances{0.0, 1e-9, 1e-12}.validate()), Error);
  EXPECT_THROW((Tolerances{1e-10, 1.5, 1e-12}.validate()), Error);
}
