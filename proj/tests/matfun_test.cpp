#include "pdfactor/matfun.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "pdfactor/error.hpp"
#include "test_support.hpp"

namespace pdfactor {
namespace {

using testing::make_rng;
using testing::mat2;
using testing::random_spd;
using testing::random_symmetric;
using testing::rot2;

// Independent exponential: truncated Taylor series on a scaled argument,
// then repeated squaring.
Matrix taylor_expm(const Matrix& a) {
  int s = 0;
  while (a.norm() / std::ldexp(1.0, s) > 0.5) ++s;
  const Matrix b = a / std::ldexp(1.0, s);
  Matrix term = Matrix::Identity(a.rows(), a.cols());
  Matrix sum = term;
  for (int k = 1; k <= 200; ++k) {
    term = term * b / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

TEST(SymEig, DiagonalInputIsAlreadyDecomposed) {
  const auto e = sym_eig(SymMatrix::from(mat2(3, 0, 0, 1)));
  EXPECT_EQ(e.d(0), 3.0);
  EXPECT_EQ(e.d(1), 1.0);
  EXPECT_TRUE(e.q.isApprox(Matrix::Identity(2, 2)));
}

TEST(SymEig, ClassicTwoByTwo) {
  const auto e = sym_eig(SymMatrix::from(mat2(2, 1, 1, 2)));
  EXPECT_NEAR(e.d(0), 3.0, 1e-14);
  EXPECT_NEAR(e.d(1), 1.0, 1e-14);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(e.q(0, 0), r, 1e-14);
  EXPECT_NEAR(e.q(1, 0), r, 1e-14);
  // Second column: largest-magnitude entry positive, first index on ties.
  EXPECT_NEAR(e.q(0, 1), r, 1e-14);
  EXPECT_NEAR(e.q(1, 1), -r, 1e-14);
}

TEST(SymEig, RandomReconstructionAndOrthogonality) {
  auto rng = make_rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 2 + trial % 11;
    const Matrix s = random_symmetric(rng, n);
    const auto e = sym_eig(SymMatrix::from(s));
    const double recon = (e.q * e.d.asDiagonal() * e.q.transpose() - s).norm();
    EXPECT_LE(recon, 1e-10 * (1.0 + s.norm()));
    EXPECT_LE((e.q.transpose() * e.q - Matrix::Identity(n, n)).norm(),
              1e-12 * static_cast<double>(n));
    for (Eigen::Index i = 1; i < n; ++i) EXPECT_GE(e.d(i - 1), e.d(i));
  }
}

TEST(SymEig, BitIdenticalAcrossCalls) {
  auto rng = make_rng(2);
  const Matrix s = random_symmetric(rng, 7);
  const auto a = sym_eig(SymMatrix::from(s));
  const auto b = sym_eig(SymMatrix::from(s));
  EXPECT_TRUE((a.q.array() == b.q.array()).all());
  EXPECT_TRUE((a.d.array() == b.d.array()).all());
}

TEST(SymEig, EigenvectorSignConvention) {
  auto rng = make_rng(3);
  const auto e = sym_eig(SymMatrix::from(random_symmetric(rng, 6)));
  for (Eigen::Index j = 0; j < 6; ++j) {
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < 6; ++i)
      if (std::abs(e.q(i, j)) > std::abs(e.q(arg, j))) arg = i;
    EXPECT_GT(e.q(arg, j), 0.0);
  }
}

TEST(SymMatrix, RejectsBadInput) {
  EXPECT_THROW(SymMatrix::from(Matrix::Zero(2, 3)), Error);
  EXPECT_THROW(SymMatrix::from(mat2(1, 2, 0, 1)), Error);
  Matrix nan = Matrix::Identity(2, 2);
  nan(0, 0) = std::nan("");
  EXPECT_THROW(SymMatrix::from(nan), Error);
  try {
    SymMatrix::from(mat2(1, 2, 0, 1));
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
  }
}

TEST(SpdSqrt, DiagonalAndIdentity) {
  const auto r = spd_sqrt(SpdMatrix::certify(mat2(4, 0, 0, 9)));
  EXPECT_TRUE(r.matrix().isApprox(mat2(2, 0, 0, 3), 1e-15));
  const auto i = spd_sqrt(SpdMatrix::identity(3));
  EXPECT_EQ(i.matrix(), Matrix::Identity(3, 3));
}

TEST(SpdSqrt, SquaresBackToInput) {
  auto rng = make_rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index n = 2 + trial % 11;
    const Matrix s = random_spd(rng, n, 1e4);
    const Matrix r = spd_sqrt(SpdMatrix::certify(s)).matrix();
    EXPECT_LE((r * r - s).norm(), 1e-10 * (1.0 + s.norm()));
  }
}

TEST(SpdSqrt, CertificationRejectsIndefinite) {
  try {
    SpdMatrix::certify(mat2(1, 0, 0, -1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotPositiveDefinite);
  }
  // Below the relative threshold counts as not positive definite.
  EXPECT_THROW(SpdMatrix::certify(mat2(1, 0, 0, 1e-13)), Error);
  EXPECT_NO_THROW(SpdMatrix::certify(mat2(1, 0, 0, 1e-11)));
}

TEST(SpdLog, ClosedForms) {
  const auto l = spd_log(SpdMatrix::certify(mat2(std::exp(1.0), 0, 0, std::exp(-1.0))));
  EXPECT_NEAR(l.matrix()(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(l.matrix()(1, 1), -1.0, 1e-15);
  EXPECT_EQ(spd_log(SpdMatrix::identity(4)).matrix(), Matrix::Zero(4, 4));
}

TEST(SpdLog, ExpLogRoundTrips) {
  auto rng = make_rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index n = 2 + trial % 11;
    const Matrix s = random_spd(rng, n, 1e3);
    const Matrix back = sym_exp(spd_log(SpdMatrix::certify(s))).matrix();
    EXPECT_LE((back - s).norm(), 1e-10 * s.norm());

    // Symmetric with eigenvalues spread over [-20, 20].
    const Matrix q = testing::random_orthogonal(rng, n);
    Vector d = Vector::LinSpaced(n, -20.0, 20.0);
    const Matrix a = q * d.asDiagonal() * q.transpose();
    const SymMatrix sa = SymMatrix::from(0.5 * (a + a.transpose()));
    const Matrix a_back = spd_log(sym_exp(sa)).matrix();
    EXPECT_LE((a_back - sa.matrix()).norm(), 1e-10 * sa.matrix().norm());
  }
}

TEST(SymExp, ClosedForms) {
  const auto e = sym_exp(SymMatrix::from(mat2(std::log(2.0), 0, 0, -std::log(2.0))));
  EXPECT_NEAR(e.matrix()(0, 0), 2.0, 1e-15);
  EXPECT_NEAR(e.matrix()(1, 1), 0.5, 1e-15);
  EXPECT_EQ(sym_exp(SymMatrix::zero(3)).matrix(), Matrix::Identity(3, 3));
}

TEST(SymExp, MatchesPadeAndTaylor) {
  auto rng = make_rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + trial % 7;
    const Matrix a = random_symmetric(rng, n);
    const Matrix via_eig = sym_exp(SymMatrix::from(a)).matrix();
    EXPECT_LE((via_eig - taylor_expm(a)).norm(), 1e-10 * via_eig.norm());
    EXPECT_LE((via_eig - expm(a)).norm(), 1e-12 * via_eig.norm());
  }
}

TEST(Expm, SkewClosedForm) {
  const Matrix e = expm(mat2(0, 0.5, -0.5, 0));
  EXPECT_LE((e - rot2(0.5)).norm(), 1e-12);
  EXPECT_EQ(expm(Matrix::Zero(3, 3)), Matrix::Identity(3, 3));
}

TEST(Expm, MatchesTaylorOracleAcrossPadeDegrees) {
  auto rng = make_rng(7);
  // Scales chosen to land in every Pade branch, including squaring.
  for (double scale : {0.001, 0.05, 0.3, 1.0, 3.0, 8.0}) {
    const Matrix g = testing::gaussian_matrix(rng, 4, 4);
    const Matrix a = scale * g / g.cwiseAbs().colwise().sum().maxCoeff();
    const Matrix ref = taylor_expm(a);
    EXPECT_LE((expm(a) - ref).norm(), 1e-10 * ref.norm()) << "scale " << scale;
  }
  const Matrix big = 2.5 * testing::gaussian_matrix(rng, 4, 4);
  EXPECT_LE((expm(big) - taylor_expm(big)).norm(), 1e-10 * taylor_expm(big).norm());
}

TEST(Expm, RejectsNonSquare) {
  EXPECT_THROW(expm(Matrix::Zero(2, 3)), Error);
}

TEST(Polar, DiagonalAndRotation) {
  const auto p = polar(mat2(2, 0, 0, 3));
  EXPECT_LE((p.v - Matrix::Identity(2, 2)).norm(), 1e-14);
  EXPECT_LE((p.s.matrix() - mat2(2, 0, 0, 3)).norm(), 1e-14);

  const auto r = polar(rot2(1.1));
  EXPECT_LE((r.v - rot2(1.1)).norm(), 1e-14);
  EXPECT_LE((r.s.matrix() - Matrix::Identity(2, 2)).norm(), 1e-14);
}

TEST(Polar, ConstructThenSplit) {
  const Matrix phi = rot2(0.7) * mat2(2, 0, 0, 0.5);
  const auto p = polar(phi);
  EXPECT_LE((p.v - rot2(0.7)).norm(), 1e-10);
  EXPECT_LE((p.s.matrix() - mat2(2, 0, 0, 0.5)).norm(), 1e-10);
}

TEST(Polar, RandomReassemblyAndSqrtIdentity) {
  auto rng = make_rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index n = 2 + trial % 9;
    const Matrix phi = testing::gaussian_matrix(rng, n, n);
    const auto p = polar(phi);
    EXPECT_LE((p.v * p.s.matrix() - phi).norm(), 1e-10 * phi.norm());
    EXPECT_LE((p.v.transpose() * p.v - Matrix::Identity(n, n)).norm(), 1e-10);
    EXPECT_EQ(p.v.determinant() > 0, phi.determinant() > 0);
    const Matrix gram = phi.transpose() * phi;
    const Matrix root = spd_sqrt(SpdMatrix::certify(0.5 * (gram + gram.transpose()))).matrix();
    EXPECT_LE((root - p.s.matrix()).norm(), 1e-8 * root.norm());
  }
}

TEST(Polar, SingularInput) {
  try {
    polar(mat2(1, 2, 2, 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularInput);
  }
}

TEST(Cond, KnownValues) {
  EXPECT_EQ(cond(SpdMatrix::identity(3)), 1.0);
  const double r = std::sqrt(30.0);
  EXPECT_NEAR(cond(SpdMatrix::certify(mat2(r, 0, 0, 1.0 / r))), 30.0, 1e-12);
}

TEST(Cond, RatioOfEigenExtremes) {
  auto rng = make_rng(9);
  const Matrix s = random_spd(rng, 6, 500.0);
  const auto e = sym_eig(SymMatrix::from(s));
  EXPECT_NEAR(cond(SpdMatrix::certify(s)), e.d.maxCoeff() / e.d.minCoeff(), 1e-9);
  EXPECT_NEAR(cond(SpdMatrix::certify(s)), 500.0, 1e-6);
}

TEST(SpdProperties, SqrtAcrossSizesUpToTwelve) {
  auto rng = make_rng(10);
  for (Eigen::Index n = 1; n <= 12; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      const Matrix s = random_spd(rng, n, 1e3);
      const Matrix r = spd_sqrt(SpdMatrix::certify(s)).matrix();
      EXPECT_LE((r * r - s).norm(), 1e-10 * s.norm());
    }
  }
}

}  // namespace
}  // namespace pdfactor
