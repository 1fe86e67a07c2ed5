#pragma once

// The 2x2 engine: chains of k SPD factors whose product is a planar rotation,
// the net-rotation curve phi_k(theta, lambda), sweeps and root finding over it,
// and the symmetric generator that carries Sigma_0 to its rotated copy.
//
// Rotation convention: U_theta = [[cos, sin], [-sin, cos]].

#include <optional>
#include <vector>

#include "pdfactor/matfun.hpp"

namespace pdfactor {

Matrix rotation2(double theta);

struct ChainParams {
  double lambda = 1.0;  // condition parameter, >= 1
  double theta = 0.0;   // radians per rotation step
  int k = 3;            // number of factors, >= 3

  // Throws InvalidParams.
  void validate() const;
};

// Factors M_1..M_k applied right to left: product() = M_k ... M_1.
struct FactorChain {
  Eigen::Index n = 0;
  std::vector<SpdMatrix> factors;
  std::optional<ChainParams> params;

  Matrix product() const;
  std::size_t size() const noexcept { return factors.size(); }
};

struct SweepRow {
  double theta;  // radians
  double phi;    // unwrapped radians
};

struct SweepTable {
  double lambda = 1.0;
  int k = 3;
  std::vector<SweepRow> rows;

  double max_phi() const;
};

// I = S_0 -> S_1 = diag(lambda, 1/lambda) -> S_j = U_theta S_{j-1} U_theta^T
// (2 <= j <= k-1) -> S_k = I. Returns k + 1 covariances.
std::vector<SpdMatrix> chain_covariances(const ChainParams& p);

// M_j = ot_map(S_{j-1}, S_j). NumericalFailure if an intermediate fails SPD
// certification.
FactorChain build_chain(const ChainParams& p);

// atan2(P_12, P_11) of the chain product, in (-pi, pi]. The product must be a
// proper rotation within `tolerance` (orthogonality and determinant), else
// NotARotation.
double net_rotation(const FactorChain& c, double tolerance = 1e-8);

// Net rotation of the (lambda, theta, k) scheme via a closed-form 2x2 path,
// wrapped to (-pi, pi]. Agrees with net_rotation(build_chain(...)).
double chain_angle(double lambda, double theta, int k);

// Uniform grid of `steps` points on [0, theta_max]; phi unwrapped by branch
// continuation from phi(0) = 0. Grid intervals whose increment exceeds pi/2
// are bisected until the continuation is unambiguous.
SweepTable phi_sweep(double lambda, int k, double theta_max, int steps);

// Smallest-branch theta with phi_k(theta, lambda) = target (target >= 0),
// accurate to 1e-9 rad. TargetUnreachable carries the sweep maximum.
double solve_theta(double lambda, int k, double target);

// Smallest lambda on {1.25^i} <= lambda_budget whose curve reaches the target,
// paired with solve_theta's angle.
ChainParams plan_scheme(double target, int k, double lambda_budget);

// A = log(ot_map(S0, U S0 U^T)) / t_fn, the symmetric generator with
// e^{A t} S0 e^{A t} = U_theta S0 U_theta^T.
SymMatrix gradient_generator(const SpdMatrix& sigma0, double theta,
                             double t_fn);

}  // namespace pdfactor
