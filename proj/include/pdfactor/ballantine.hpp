#pragma once

// Factorization of any square matrix with positive determinant into a short
// product of SPD matrices: polar split Phi = V S, block-diagonalize V, factor
// each planar rotation with the k-step transport scheme, and conjugate the
// stage-wise block-diagonal factors back with U.

#include <vector>

#include "pdfactor/planar.hpp"

namespace pdfactor {

struct FactorOptions {
  int k_rotation = 5;            // factors per rotation stage
  double lambda_budget = 1000.0; // max condition of the planar scheme
  double tol_verify = 1e-8;      // relative residual accepted by verify()

  void validate() const;
};

struct FactorDiagnostics {
  double symmetry_defect = 0.0;
  double min_eigenvalue = 0.0;
  double condition = 0.0;
  bool spd = false;
};

struct VerificationReport {
  double residual = 0.0;  // |prod - target|_F / |target|_F
  double tolerance = 0.0;
  std::vector<FactorDiagnostics> factors;
  std::size_t factor_count = 0;
  bool pass = false;
};

// psi in (-pi, pi]. psi = 0 gives [I]; psi < 0 reverses the chain for |psi|.
FactorChain factor_rotation2(double psi, const FactorOptions& opts = {});

// V special orthogonal -> N_L ... N_1 with N_i = U M_i U^T. Blocks needing
// fewer factors are padded with identities, so L is the largest per-block
// count, not the sum.
FactorChain factor_orthogonal(const Matrix& v, const FactorOptions& opts = {});

// Phi with det > 0 -> [S, N_1, ..., N_L] (S dropped when Phi is orthogonal,
// the N_i dropped when Phi is SPD). At most 6 factors at default options.
FactorChain factor_matrix(const Matrix& phi, const FactorOptions& opts = {});

VerificationReport verify(const FactorChain& chain, const Matrix& target,
                          double tol);

}  // namespace pdfactor
