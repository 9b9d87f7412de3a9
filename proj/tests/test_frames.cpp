#include <gtest/gtest.h>

#include <cmath>

#include "rdual/frames.hpp"
#include "rdual/random.hpp"
#include "test_support.hpp"

using namespace rdual;
using rdual::testing::dist;
using rdual::testing::seq;

namespace {

const Scalar one{1.0, 0.0};
const Scalar zero{0.0, 0.0};

VectorSeq diag41() { return seq(2, {{2.0, 0.0}, {0.0, 1.0}}); }
VectorSeq e1e1() { return seq(2, {{one, zero}, {one, zero}}); }

}  // namespace

TEST(VectorSeq, RejectsNonSquareAndNonFinite) {
  EXPECT_THROW(VectorSeq(Matrix(2, 3)), Error);
  Matrix bad = Matrix::identity(2);
  bad(1, 0) = std::numeric_limits<double>::infinity();
  try {
    VectorSeq s(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFinite);
  }
}

TEST(OrthonormalBasis, CertifyRejectsScaledVectors) {
  EXPECT_NO_THROW(OrthonormalBasis::certify(VectorSeq::standard_basis(3)));
  try {
    OrthonormalBasis::certify(diag41());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotOrthonormal);
  }
}

TEST(FrameOperator, HandExamples) {
  EXPECT_LE(dist(frame_operator(VectorSeq::standard_basis(2)), Matrix::identity(2)), 0.0);
  const VectorSeq s = seq(3, {{one, zero, zero}, {one, zero, zero}, {zero, one, zero}});
  EXPECT_LE(dist(frame_operator(s), Matrix::diagonal({2.0, 1.0, 0.0})), 0.0);
}

TEST(Gram, HandExamples) {
  EXPECT_LE(dist(gram(VectorSeq::standard_basis(3)), Matrix::identity(3)), 0.0);
  EXPECT_LE(dist(gram(e1e1()), rdual::testing::real_matrix(2, {1, 1, 1, 1})), 0.0);
}

TEST(OptimalBounds, HandExamples) {
  const VectorSeq s = seq(3, {{one, zero, zero}, {one, zero, zero}, {zero, one, zero}});
  auto b = optimal_bounds(s);
  EXPECT_NEAR(b.lower, 1.0, 1e-14);
  EXPECT_NEAR(b.upper, 2.0, 1e-14);
  b = optimal_bounds(VectorSeq::standard_basis(4));
  EXPECT_NEAR(b.lower, 1.0, 1e-15);
  EXPECT_NEAR(b.upper, 1.0, 1e-15);
  b = optimal_bounds(diag41());
  EXPECT_NEAR(b.lower, 1.0, 1e-15);
  EXPECT_NEAR(b.upper, 4.0, 1e-15);
}

TEST(OptimalBounds, ZeroSequenceRaises) {
  try {
    optimal_bounds(VectorSeq(Matrix(2, 2)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroSequence);
  }
}

TEST(OptimalBounds, FrameInequalityOracle) {
  // sampled ratios sum |<x, f_i>|^2 / ||x||^2 must sit inside [A, B]
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 6;
    const VectorSeq f(random_gaussian(n, n, rng));
    const auto b = optimal_bounds(f);
    for (int k = 0; k < 50; ++k) {
      const Matrix x = random_gaussian(n, 1, rng);
      double energy = 0.0;
      for (std::size_t i = 0; i < n; ++i) energy += std::norm(inner(x.column(0), f[i]));
      const double ratio = energy / std::pow(norm(x.column(0)), 2);
      ASSERT_GE(ratio, b.lower * (1 - 1e-12));
      ASSERT_LE(ratio, b.upper * (1 + 1e-12));
    }
  }
}

TEST(Classify, HandExamples) {
  auto c = classify(VectorSeq::standard_basis(2));
  EXPECT_EQ(c.kind, SequenceKind::riesz_basis);
  EXPECT_EQ(c.rank, 2u);
  EXPECT_NEAR(c.bounds->lower, 1.0, 1e-15);

  c = classify(e1e1());
  EXPECT_EQ(c.kind, SequenceKind::proper_frame_sequence);
  EXPECT_EQ(c.rank, 1u);
  EXPECT_NEAR(c.bounds->lower, 2.0, 1e-14);
  EXPECT_NEAR(c.bounds->upper, 2.0, 1e-14);

  c = classify(VectorSeq(Matrix(3, 3)));
  EXPECT_EQ(c.kind, SequenceKind::zero_sequence);
  EXPECT_EQ(c.rank, 0u);
  EXPECT_FALSE(c.bounds.has_value());
}

TEST(Classify, RankOfRandomProducts) {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const std::size_t r = 1 + trial % n;
    const VectorSeq s(random_gaussian(n, r, rng) * random_gaussian(r, n, rng));
    const auto c = classify(s);
    ASSERT_EQ(c.rank, r);
    ASSERT_EQ(c.kind, r == n ? SequenceKind::riesz_basis : SequenceKind::proper_frame_sequence);
  }
}

TEST(CanonicalDual, HandExamples) {
  EXPECT_LE(dist(canonical_dual(VectorSeq::standard_basis(3)).synthesis(), Matrix::identity(3)), 1e-15);
  EXPECT_LE(dist(canonical_dual(diag41()).synthesis(), Matrix::diagonal({0.5, 1.0})), 1e-15);
}

TEST(CanonicalDual, ReconstructionOnSpan) {
  Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const std::size_t r = 1 + trial % n;
    const Matrix b = random_gaussian(n, r, rng);
    const VectorSeq f(b * random_gaussian(r, n, rng));
    const VectorSeq g = canonical_dual(f);
    // sum <x, g_i> f_i = P x, with P from an independent Gram-Schmidt
    const Matrix recon = f.synthesis() * adjoint(g.synthesis());
    ASSERT_LE(operator_norm(recon - rdual::testing::gram_schmidt_projection(b)), 1e-9) << "trial " << trial;
  }
}

TEST(Parsevalize, HandExamples) {
  EXPECT_LE(dist(parsevalize(diag41()).synthesis(), Matrix::identity(2)), 1e-15);
  EXPECT_LE(dist(parsevalize(VectorSeq::standard_basis(3)).synthesis(), Matrix::identity(3)), 1e-15);
  const VectorSeq p = parsevalize(e1e1());
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_LE(dist(p.synthesis(), rdual::testing::real_matrix(2, {r, 0, r, 0})), 1e-12);
  EXPECT_LE(dist(frame_operator(p), Matrix::diagonal({1.0, 0.0})), 1e-12);
}

TEST(Parsevalize, FrameOperatorIsSpanProjection) {
  Rng rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const std::size_t r = 1 + (trial * 3) % n;
    const Matrix b = random_gaussian(n, r, rng);
    const VectorSeq f(b * random_gaussian(r, n, rng));
    const Matrix proj = rdual::testing::gram_schmidt_projection(b);
    ASSERT_LE(operator_norm(frame_operator(parsevalize(f)) - proj), 1e-9);
    ASSERT_LE(operator_norm(span_projection(f) - proj), 1e-9);
  }
}

TEST(VerifyDualPair, HandExamples) {
  EXPECT_TRUE(verify_dual_pair(VectorSeq::standard_basis(2), VectorSeq::standard_basis(2)));
  EXPECT_TRUE(verify_dual_pair(diag41(), seq(2, {{0.5, 0.0}, {0.0, 1.0}})));
  EXPECT_FALSE(verify_dual_pair(diag41(), VectorSeq::standard_basis(2)));
}

TEST(VerifyDualPair, RandomRieszBasisAndCanonicalDual) {
  Rng rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const VectorSeq f(random_gaussian(4, 4, rng) + Scalar(3.0) * Matrix::identity(4));
    EXPECT_TRUE(verify_dual_pair(f, canonical_dual(f)));
  }
}

TEST(Frames, DimensionMismatch) {
  try {
    cross_gram(VectorSeq::standard_basis(2), VectorSeq::standard_basis(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(GenerateSequence, SpecExamples) {
  const VectorSeq onb = generate_sequence({3, GenerateKind::onb, {}, 1});
  EXPECT_LE(dist(gram(onb), Matrix::identity(3)), 1e-10);

  const VectorSeq sp = generate_sequence({2, GenerateKind::spectrum, {2.0, 1.0}, 2});
  const auto b = optimal_bounds(sp);
  EXPECT_NEAR(b.lower, 1.0, 1e-10);
  EXPECT_NEAR(b.upper, 4.0, 1e-10);

  const auto c = classify(generate_sequence({3, GenerateKind::spectrum, {1.0, 1.0, 0.0}, 3}));
  EXPECT_EQ(c.rank, 2u);
  EXPECT_EQ(c.kind, SequenceKind::proper_frame_sequence);
}

TEST(GenerateSequence, BadSpecs) {
  for (const GenerateSpec& spec : {GenerateSpec{0, GenerateKind::onb, {}, 1},
                                   GenerateSpec{2, GenerateKind::spectrum, {1.0}, 1},
                                   GenerateSpec{2, GenerateKind::spectrum, {1.0, -1.0}, 1},
                                   GenerateSpec{2, GenerateKind::spectrum, {1.0, NAN}, 1}}) {
    try {
      generate_sequence(spec);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::BadSpec);
    }
  }
}

TEST(GenerateSequence, DeterministicPerSeed) {
  const GenerateSpec spec{5, GenerateKind::spectrum, {3, 2, 1, 0.5, 0}, 99};
  EXPECT_EQ(generate_sequence(spec).synthesis(), generate_sequence(spec).synthesis());
  GenerateSpec other = spec;
  other.seed = 100;
  EXPECT_FALSE(generate_sequence(spec).synthesis() == generate_sequence(other).synthesis());
}
