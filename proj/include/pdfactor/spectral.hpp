#pragma once

// Real block-diagonal form of a special orthogonal matrix:
//   V = U D U^T,  D = diag(R(theta_1), R(theta_2), ..., 1, ..., 1)
// with R(theta) = [[cos, sin], [-sin, cos]] and theta in (0, pi].

#include <variant>
#include <vector>

#include "pdfactor/matfun.hpp"

namespace pdfactor {

struct RotationBlock {
  double theta;         // (0, pi]
  Eigen::Index first;   // rows/cols (first, first + 1) of D
};

struct UnitBlock {
  Eigen::Index row;
};

using BlockSpec = std::variant<RotationBlock, UnitBlock>;

struct OrthogonalDecomposition {
  Matrix u;
  std::vector<BlockSpec> blocks;
};

// Rotation blocks come first, sorted by descending angle, then one Unit block
// per +1 eigenvalue. Every -1 eigenvalue pair becomes Rotation(pi).
// Throws NotOrthogonal (|V^T V - I|_F > 1e-8) or NegativeDeterminant.
OrthogonalDecomposition block_diagonalize(const Matrix& v);

Matrix block_matrix(Eigen::Index n, const std::vector<BlockSpec>& blocks);

// U D U^T
Matrix assemble(const OrthogonalDecomposition& d);

}  // namespace pdfactor
