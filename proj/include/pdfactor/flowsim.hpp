#pragma once

// Piecewise-constant gradient flows x' = A_i x (A_i symmetric) realizing a
// factor chain: each factor M_i = exp(A_i * duration_i). Particles are moved
// with exact exponential substeps; the covariance follows the Lyapunov ODE
// S' = A S + S A integrated with classical RK4.

#include <iosfwd>
#include <optional>
#include <vector>

#include "pdfactor/planar.hpp"

namespace pdfactor {

struct FlowSegment {
  SymMatrix generator;
  double duration;
};

struct ParticleCloud {
  Eigen::Index n = 0;
  std::vector<Vector> positions;
  double time = 0.0;
};

struct Trajectory {
  Eigen::Index n = 0;
  std::vector<double> times;
  std::vector<std::vector<Vector>> positions;  // [sample][particle]
  std::vector<Matrix> covariances;             // [sample]
  std::vector<std::size_t> segment_ends;       // sample index per segment end
  bool covariance_from_sample = true;
};

// A_i = spd_log(M_i) / duration_i.
std::vector<FlowSegment> segments_from_chain(
    const FactorChain& chain, const std::vector<double>& durations);

// 1/N second moment about the origin. Throws NotPositiveDefinite when the
// cloud does not span the space.
SpdMatrix cloud_covariance(const ParticleCloud& cloud);

// Samples at t0 and at every substep boundary. `sigma0` overrides the
// covariance start; otherwise the cloud's second moment is used, falling back
// to the identity (recorded in the trajectory) for clouds that do not span.
// InvalidStep unless 0 < dt <= min duration.
Trajectory simulate(const std::vector<FlowSegment>& segments,
                    const ParticleCloud& cloud, double dt,
                    const std::optional<SpdMatrix>& sigma0 = std::nullopt);

// exp(A_L d_L) ... exp(A_1 d_1)
Matrix transition_matrix(const std::vector<FlowSegment>& segments);

// `t,particle_id,x1..xn`, one row per particle per sample.
void write_trajectory_csv(const Trajectory& traj, std::ostream& os);
// `t,sigma_11,sigma_12,...,sigma_nn`, full square row-major.
void write_covariance_csv(const Trajectory& traj, std::ostream& os);

}  // namespace pdfactor
