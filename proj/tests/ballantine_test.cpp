#include "pdfactor/ballantine.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pdfactor/error.hpp"
#include "pdfactor/spectral.hpp"
#include "test_support.hpp"

namespace pdfactor {
namespace {

using testing::mat2;
using testing::rot2;

constexpr double kPi = std::numbers::pi;

// The five -I factors as printed, two decimals, applied right to left.
FactorChain rounded_half_turn() {
  FactorChain c;
  c.n = 2;
  c.factors = {SpdMatrix::certify(mat2(5.48, 0, 0, 0.18)),
               SpdMatrix::certify(mat2(0.34, 0.92, 0.92, 5.50)),
               SpdMatrix::certify(mat2(4.33, -2.35, -2.35, 1.50)),
               SpdMatrix::certify(mat2(3.32, 2.71, 2.71, 2.52)),
               SpdMatrix::certify(mat2(1.58, -2.34, -2.34, 4.08))};
  return c;
}

Matrix random_positive_det(std::mt19937_64& rng, Eigen::Index n) {
  for (;;) {
    const Matrix m = testing::gaussian_matrix(rng, n, n);
    if (m.determinant() > 0) return m;
  }
}

void expect_all_spd(const FactorChain& c) {
  for (const auto& f : c.factors) {
    EXPECT_EQ(symmetry_defect(f.matrix()), 0.0);
    EXPECT_GT(f.min_eigenvalue(), 0.0);
  }
}

TEST(FactorOptions, Validation) {
  EXPECT_NO_THROW(FactorOptions{}.validate());
  EXPECT_THROW((FactorOptions{2, 1000, 1e-8}.validate()), Error);
  EXPECT_THROW((FactorOptions{5, 0.5, 1e-8}.validate()), Error);
  EXPECT_THROW((FactorOptions{5, 1000, -1.0}.validate()), Error);
}

TEST(FactorRotation2, ZeroIsIdentity) {
  const auto c = factor_rotation2(0.0);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.factors[0].matrix(), Matrix::Identity(2, 2));
}

TEST(FactorRotation2, HalfTurnAtBudgetThirty) {
  const auto c = factor_rotation2(kPi, {5, 30.0, 1e-8});
  ASSERT_EQ(c.size(), 5u);
  ASSERT_TRUE(c.params.has_value());
  EXPECT_LE(c.params->lambda, 30.0);
  EXPECT_LE((c.product() + Matrix::Identity(2, 2)).norm(), 1e-8);
  expect_all_spd(c);
}

TEST(FactorRotation2, NegativeAngleReverses) {
  const auto pos = factor_rotation2(1.0);
  const auto neg = factor_rotation2(-1.0);
  ASSERT_EQ(pos.size(), neg.size());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    EXPECT_EQ(neg.factors[i].matrix(), pos.factors[pos.size() - 1 - i].matrix());
  }
  EXPECT_LE((neg.product() - rot2(-1.0)).norm(), 1e-8);
  EXPECT_LE((pos.product() - rot2(1.0)).norm(), 1e-8);
}

TEST(FactorRotation2, AnglesAcrossRange) {
  for (double psi = -kPi + 0.05; psi <= kPi; psi += 0.1) {
    const auto c = factor_rotation2(psi);
    EXPECT_LE(c.size(), 5u);
    EXPECT_LE((c.product() - rot2(psi)).norm(), 1e-8) << psi;
  }
  EXPECT_THROW(factor_rotation2(-kPi), Error);
  EXPECT_THROW(factor_rotation2(4.0), Error);
}

TEST(FactorRotation2, MoreFactorsNeedSmallerLambda) {
  const auto five = factor_rotation2(2.5, {5, 1000, 1e-8});
  const auto eight = factor_rotation2(2.5, {8, 1000, 1e-8});
  ASSERT_TRUE(five.params && eight.params);
  EXPECT_LT(eight.params->lambda, five.params->lambda);
  EXPECT_EQ(eight.size(), 8u);
  EXPECT_LE((eight.product() - rot2(2.5)).norm(), 1e-8);
}

TEST(FactorOrthogonal, IdentityIsSingleFactor) {
  const auto c = factor_orthogonal(Matrix::Identity(4, 4));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.factors[0].matrix(), Matrix::Identity(4, 4));
}

TEST(FactorOrthogonal, MinusIdentity) {
  const auto c = factor_orthogonal(-Matrix::Identity(2, 2));
  EXPECT_EQ(c.size(), 5u);
  EXPECT_LE((c.product() + Matrix::Identity(2, 2)).norm(), 1e-8);
  expect_all_spd(c);
}

TEST(FactorOrthogonal, RandomSpecialOrthogonal) {
  auto rng = testing::make_rng(50);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = 2 + trial % 7;
    const Matrix v = testing::random_orthogonal(rng, n);
    const auto c = factor_orthogonal(v);
    EXPECT_LE(c.size(), 5u);
    EXPECT_LE((c.product() - v).norm() / v.norm(), 1e-8);
    expect_all_spd(c);
  }
}

TEST(FactorOrthogonal, PaddingTakesMaximumNotSum) {
  // Two planar blocks whose own chains have different lengths.
  Matrix d = Matrix::Identity(5, 5);
  d.block(0, 0, 2, 2) = rot2(2.9);
  d.block(2, 2, 2, 2) = rot2(0.3);
  auto rng = testing::make_rng(51);
  const Matrix q = testing::random_orthogonal(rng, 5);
  const Matrix v = q * d * q.transpose();
  const FactorOptions opts{3, 1e6, 1e-8};
  // A 3-factor scheme cannot reach 2.9 with this budget; with 5 it can.
  EXPECT_THROW(factor_orthogonal(v, opts), Error);
  const auto c = factor_orthogonal(v, {5, 1000, 1e-8});
  EXPECT_EQ(c.size(), 5u);
  EXPECT_LE((c.product() - v).norm(), 1e-8);
}

TEST(FactorOrthogonal, Errors) {
  Matrix reflect = Matrix::Identity(2, 2);
  reflect(1, 1) = -1;
  EXPECT_THROW(factor_orthogonal(reflect), Error);
  EXPECT_THROW(factor_orthogonal(2.0 * Matrix::Identity(2, 2)), Error);
}

TEST(FactorMatrix, SpdInputIsSingleFactor) {
  const Matrix s = mat2(3, 1, 1, 2);
  const auto c = factor_matrix(s);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_LE((c.factors[0].matrix() - s).norm(), 1e-12);
}

TEST(FactorMatrix, MinusIdentityAbsorbsS) {
  const auto c = factor_matrix(-Matrix::Identity(2, 2));
  EXPECT_EQ(c.size(), 5u);
  EXPECT_LE((c.product() + Matrix::Identity(2, 2)).norm(), 1e-8);
}

TEST(FactorMatrix, OrthogonalInputOmitsS) {
  auto rng = testing::make_rng(52);
  const Matrix v = testing::random_orthogonal(rng, 4);
  const auto direct = factor_orthogonal(v);
  const auto c = factor_matrix(v);
  // The basis inside each rotation plane is free, so only count and product
  // are compared.
  EXPECT_EQ(c.size(), direct.size());
  EXPECT_LE((c.product() - v).norm(), 1e-8);
}

TEST(FactorMatrix, SIsAppliedFirst) {
  const Matrix s = mat2(2, 0.5, 0.5, 1);
  const Matrix phi = rot2(1.2) * s;
  const auto c = factor_matrix(phi);
  EXPECT_LE((c.factors.front().matrix() - s).norm(), 1e-10);
  EXPECT_LE((c.product() - phi).norm() / phi.norm(), 1e-8);
}

TEST(FactorMatrix, RandomSoundnessAndDeterminant) {
  auto rng = testing::make_rng(53);
  for (int trial = 0; trial < 80; ++trial) {
    const Eigen::Index n = 2 + trial % 7;
    const Matrix phi = random_positive_det(rng, n);
    const auto c = factor_matrix(phi);
    EXPECT_LE(c.size(), 6u);
    const auto report = verify(c, phi, 1e-8);
    EXPECT_TRUE(report.pass) << report.residual;
    expect_all_spd(c);

    double det = 1.0;
    for (const auto& f : c.factors) det *= f.matrix().determinant();
    EXPECT_NEAR(det / phi.determinant(), 1.0, 1e-6);
  }
}

TEST(FactorMatrix, Errors) {
  try {
    factor_matrix(mat2(1, 0, 0, -1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonPositiveDeterminant);
    EXPECT_NE(std::string(e.what()).find("determinant not positive"), std::string::npos);
  }
  try {
    factor_matrix(mat2(1, 2, 2, 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularInput);
  }
  EXPECT_THROW(factor_matrix(Matrix::Identity(2, 3)), Error);
  Matrix nan = Matrix::Identity(2, 2);
  nan(0, 1) = std::nan("");
  EXPECT_THROW(factor_matrix(nan), Error);
}

TEST(Verify, IdentityPasses) {
  FactorChain c;
  c.n = 2;
  c.factors = {SpdMatrix::identity(2)};
  const auto r = verify(c, Matrix::Identity(2, 2), 1e-12);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.residual, 0.0);
  EXPECT_EQ(r.factor_count, 1u);
  ASSERT_EQ(r.factors.size(), 1u);
  EXPECT_TRUE(r.factors[0].spd);
  EXPECT_EQ(r.factors[0].condition, 1.0);
}

TEST(Verify, RoundedHalfTurnFactors) {
  // Two-decimal rounding leaves a relative residual of 0.0843 against -I.
  const auto c = rounded_half_turn();
  const Matrix minus_i = -Matrix::Identity(2, 2);
  const auto tight = verify(c, minus_i, 0.05);
  EXPECT_NEAR(tight.residual, 0.08426, 1e-4);
  EXPECT_FALSE(tight.pass);
  EXPECT_TRUE(verify(c, minus_i, 0.1).pass);
  EXPECT_FALSE(verify(c, minus_i, 1e-8).pass);
}

TEST(Verify, CorruptedFactorFails) {
  auto c = factor_matrix(-Matrix::Identity(2, 2));
  ASSERT_TRUE(verify(c, -Matrix::Identity(2, 2), 1e-8).pass);
  c.factors[2] = SpdMatrix::certify(c.factors[2].matrix() + 1e-3 * Matrix::Identity(2, 2));
  const auto r = verify(c, -Matrix::Identity(2, 2), 1e-8);
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.residual, 1e-8);
}

TEST(Verify, DimensionMismatch) {
  FactorChain c;
  c.n = 2;
  c.factors = {SpdMatrix::identity(2)};
  try {
    verify(c, Matrix::Identity(3, 3), 1e-8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

}  // namespace
}  // namespace pdfactor
