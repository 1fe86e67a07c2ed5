#include "pdfactor/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pdfactor/error.hpp"

namespace pdfactor {

namespace {

constexpr double kOrthTolerance = 1e-8;
constexpr double kClusterTolerance = 1e-8;
constexpr double kDependentTolerance = 1e-10;

struct Plane {
  double theta;
  Vector v;
  Vector w;
};

// Two passes of Gram-Schmidt against `basis`; false if what is left is
// numerically dependent.
bool orthonormalize(Vector& x, const std::vector<Vector>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) x -= b.dot(x) * b;
  }
  const double norm = x.norm();
  if (norm <= kDependentTolerance) return false;
  x /= norm;
  return true;
}

double block_angle(const Matrix& v_mat, const Vector& v, Vector& w) {
  const double c = 0.5 * (v.dot(v_mat * v) + w.dot(v_mat * w));
  double s = 0.5 * (v.dot(v_mat * w) - w.dot(v_mat * v));
  if (s < 0.0) {
    w = -w;
    s = -s;
  }
  return std::atan2(s, c);
}

}  // namespace

OrthogonalDecomposition block_diagonalize(const Matrix& v) {
  if (v.rows() != v.cols() || v.rows() == 0 || !v.allFinite()) {
    throw Error(ErrorKind::InvalidInput,
                "block_diagonalize: matrix must be square and finite");
  }
  const Eigen::Index n = v.rows();
  const double orth = frobenius(v.transpose() * v - Matrix::Identity(n, n));
  if (!(orth <= kOrthTolerance)) {
    throw Error(ErrorKind::NotOrthogonal,
                "orthogonality defect " + std::to_string(orth));
  }
  const double det = determinant(v);
  if (det < 0.0) {
    throw Error(ErrorKind::NegativeDeterminant,
                "orthogonal matrix has determinant " + std::to_string(det));
  }

  // S = (V + V^T)/2 commutes with V and has eigenvalues cos(theta_i); the
  // skew part K carries sin(theta_i) inside each eigenspace of S.
  const EigenPair cosines = sym_eig(SymMatrix::from(symmetrize(v)));
  const Matrix skew = 0.5 * (v - v.transpose());

  std::vector<Plane> planes;
  std::vector<Vector> units;

  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index stop = start + 1;
    while (stop < n &&
           cosines.d(stop - 1) - cosines.d(stop) <= kClusterTolerance) {
      ++stop;
    }
    const Eigen::Index m = stop - start;
    const Matrix w_basis = cosines.q.middleCols(start, m);

    // Within the cluster, K^T K separates rotation planes (sin^2 theta) from
    // the +-1 directions (0). Visit directions by decreasing sin.
    const Matrix k_local = w_basis.transpose() * skew * w_basis;
    const EigenPair split =
        sym_eig(SymMatrix::from(symmetrize(k_local.transpose() * k_local)));
    std::vector<Vector> pending;
    for (Eigen::Index j = 0; j < m; ++j) {
      pending.emplace_back(w_basis * split.q.col(j));
    }

    std::vector<Vector> taken;
    std::vector<Vector> minus_one;
    for (auto& cand : pending) {
      Vector x = cand;
      if (!orthonormalize(x, taken)) continue;
      Vector kx = skew.transpose() * x;
      const double sine = kx.norm();
      if (sine > kDependentTolerance) {
        Vector y = kx / sine;
        std::vector<Vector> with_x = taken;
        with_x.push_back(x);
        if (!orthonormalize(y, with_x)) {
          throw Error(ErrorKind::NumericalFailure,
                      "block_diagonalize: degenerate rotation plane");
        }
        const double theta = block_angle(v, x, y);
        taken.push_back(x);
        taken.push_back(y);
        planes.push_back({theta, std::move(x), std::move(y)});
      } else if (x.dot(v * x) > 0.0) {
        taken.push_back(x);
        units.push_back(std::move(x));
      } else {
        taken.push_back(x);
        minus_one.push_back(std::move(x));
      }
    }
    if (minus_one.size() % 2 != 0) {
      throw Error(ErrorKind::NumericalFailure,
                  "block_diagonalize: unpaired -1 eigenvalue");
    }
    for (std::size_t i = 0; i < minus_one.size(); i += 2) {
      Vector x = minus_one[i];
      Vector y = minus_one[i + 1];
      const double theta = block_angle(v, x, y);
      planes.push_back({theta, std::move(x), std::move(y)});
    }
    start = stop;
  }

  std::stable_sort(planes.begin(), planes.end(),
                   [](const Plane& a, const Plane& b) {
                     return std::abs(a.theta) > std::abs(b.theta);
                   });

  OrthogonalDecomposition out{Matrix(n, n), {}};
  Eigen::Index col = 0;
  for (const auto& p : planes) {
    out.u.col(col) = p.v;
    out.u.col(col + 1) = p.w;
    out.blocks.emplace_back(RotationBlock{p.theta, col});
    col += 2;
  }
  for (const auto& x : units) {
    out.u.col(col) = x;
    out.blocks.emplace_back(UnitBlock{col});
    ++col;
  }
  if (col != n) {
    throw Error(ErrorKind::NumericalFailure,
                "block_diagonalize: invariant subspaces do not span");
  }
  const double residual = frobenius(assemble(out) - v);
  if (!(residual <= 1e-6)) {
    throw Error(ErrorKind::NumericalFailure,
                "block_diagonalize: reassembly residual " +
                    std::to_string(residual));
  }
  return out;
}

Matrix block_matrix(Eigen::Index n, const std::vector<BlockSpec>& blocks) {
  Matrix d = Matrix::Zero(n, n);
  for (const auto& b : blocks) {
    if (const auto* r = std::get_if<RotationBlock>(&b)) {
      const double c = std::cos(r->theta);
      const double s = std::sin(r->theta);
      d(r->first, r->first) = c;
      d(r->first, r->first + 1) = s;
      d(r->first + 1, r->first) = -s;
      d(r->first + 1, r->first + 1) = c;
    } else {
      const auto& u = std::get<UnitBlock>(b);
      d(u.row, u.row) = 1.0;
    }
  }
  return d;
}

Matrix assemble(const OrthogonalDecomposition& d) {
  return d.u * block_matrix(d.u.rows(), d.blocks) * d.u.transpose();
}

}  // namespace pdfactor
