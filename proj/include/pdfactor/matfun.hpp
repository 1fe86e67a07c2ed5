#pragma once

// Dense small-matrix primitives: a cyclic Jacobi eigensolver for symmetric
// matrices and the matrix functions built on it (sqrt, log, exp, polar,
// condition number), plus a general Pade exponential.
//
// Two strong types guard the symmetric inputs:
//   SymMatrix  symmetric within 1e-12 (1 + |S|_F), stored exactly symmetrized.
//   SpdMatrix  symmetric with strictly positive spectrum. It keeps the
//              eigen-decomposition obtained while certifying it, so every
//              spectral function downstream reuses it instead of recomputing.

#include <Eigen/Dense>

namespace pdfactor {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Relative symmetry defect allowed when a general matrix is promoted to
// SymMatrix.
inline constexpr double kSymmetryTolerance = 1e-12;
// An input passes as SPD if min eig > kSpdTolerance * max(1, max eig).
inline constexpr double kSpdTolerance = 1e-12;

// Orthonormal eigenvectors (columns of q) and eigenvalues sorted descending.
// Each column has its largest-magnitude entry positive (lowest index on ties).
struct EigenPair {
  Matrix q;
  Vector d;
};

class SymMatrix {
 public:
  // Throws InvalidInput for non-square, non-finite or non-symmetric input.
  static SymMatrix from(const Matrix& m);
  static SymMatrix zero(Eigen::Index n);

  const Matrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }
  double trace() const { return m_.trace(); }

 private:
  explicit SymMatrix(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

class SpdMatrix {
 public:
  // Symmetrizes and eigen-decomposes `m`; throws NotPositiveDefinite unless
  // the spectrum clears kSpdTolerance.
  static SpdMatrix certify(const Matrix& m);
  // Builds Q diag(d) Q^T from a spectral description. Only d > 0 is
  // required; no conditioning threshold is applied.
  static SpdMatrix from_spectrum(Matrix q, Vector d);
  static SpdMatrix identity(Eigen::Index n);

  const Matrix& matrix() const noexcept { return m_; }
  const EigenPair& eigen() const noexcept { return eig_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }
  double min_eigenvalue() const { return eig_.d(eig_.d.size() - 1); }
  double max_eigenvalue() const { return eig_.d(0); }
  SymMatrix sym() const { return SymMatrix::from(m_); }

 private:
  SpdMatrix(Matrix m, EigenPair eig) : m_(std::move(m)), eig_(std::move(eig)) {}
  Matrix m_;
  EigenPair eig_;
};

double frobenius(const Matrix& m);
double symmetry_defect(const Matrix& m);
Matrix symmetrize(const Matrix& m);
bool passes_spd_certification(const Vector& eigenvalues_desc);

// Cyclic Jacobi. Stops when the off-diagonal Frobenius norm falls below
// 1e-14 |S|_F; NumericalFailure after 30 sweeps without convergence.
EigenPair sym_eig(const SymMatrix& s);

SpdMatrix spd_sqrt(const SpdMatrix& s);
SpdMatrix spd_inv_sqrt(const SpdMatrix& s);
SpdMatrix spd_inverse(const SpdMatrix& s);
SymMatrix spd_log(const SpdMatrix& s);
SpdMatrix sym_exp(const SymMatrix& a);

// Scaling and squaring with diagonal Pade approximants of degree 3..13.
Matrix expm(const Matrix& a);

struct PolarFactors {
  Matrix v;     // orthogonal, det v has the sign of det phi
  SpdMatrix s;  // (phi^T phi)^{1/2}
};
// phi = v * s. Throws SingularInput when phi is numerically singular.
PolarFactors polar(const Matrix& phi);

double cond(const SpdMatrix& s);

// Determinant by LU with partial pivoting. Throws InvalidInput if not square.
double determinant(const Matrix& m);

}  // namespace pdfactor
