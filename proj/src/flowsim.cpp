#include "pdfactor/flowsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "pdfactor/error.hpp"

namespace pdfactor {

namespace {

Matrix lyapunov_rhs(const Matrix& a, const Matrix& s) {
  return a * s + s * a.transpose();
}

Matrix rk4_step(const Matrix& a, const Matrix& s, double h) {
  const Matrix k1 = lyapunov_rhs(a, s);
  const Matrix k2 = lyapunov_rhs(a, s + 0.5 * h * k1);
  const Matrix k3 = lyapunov_rhs(a, s + 0.5 * h * k2);
  const Matrix k4 = lyapunov_rhs(a, s + h * k3);
  return s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::vector<FlowSegment> segments_from_chain(
    const FactorChain& chain, const std::vector<double>& durations) {
  if (durations.size() != chain.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "need one duration per factor (" +
                    std::to_string(chain.size()) + "), got " +
                    std::to_string(durations.size()));
  }
  std::vector<FlowSegment> out;
  out.reserve(chain.size());
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const double d = durations[i];
    if (!std::isfinite(d) || d <= 0.0) {
      throw Error(ErrorKind::InvalidStep, "durations must be positive");
    }
    const SymMatrix log_m = spd_log(chain.factors[i]);
    out.push_back({SymMatrix::from(log_m.matrix() / d), d});
  }
  return out;
}

SpdMatrix cloud_covariance(const ParticleCloud& cloud) {
  if (cloud.positions.empty()) {
    throw Error(ErrorKind::NotPositiveDefinite, "empty particle cloud");
  }
  Matrix s = Matrix::Zero(cloud.n, cloud.n);
  for (const auto& x : cloud.positions) s += x * x.transpose();
  s /= static_cast<double>(cloud.positions.size());
  return SpdMatrix::certify(s);
}

Trajectory simulate(const std::vector<FlowSegment>& segments,
                    const ParticleCloud& cloud, double dt,
                    const std::optional<SpdMatrix>& sigma0) {
  if (!std::isfinite(dt) || dt <= 0.0) {
    throw Error(ErrorKind::InvalidStep, "dt must be positive");
  }
  for (const auto& seg : segments) {
    if (seg.generator.dim() != cloud.n) {
      throw Error(ErrorKind::DimensionMismatch,
                  "generator and particle dimensions differ");
    }
    if (dt > seg.duration * (1.0 + 1e-12)) {
      throw Error(ErrorKind::InvalidStep,
                  "dt exceeds the shortest segment duration");
    }
  }
  for (const auto& x : cloud.positions) {
    if (x.size() != cloud.n || !x.allFinite()) {
      throw Error(ErrorKind::InvalidInput, "particle coordinates invalid");
    }
  }

  Trajectory traj;
  traj.n = cloud.n;
  Matrix sigma;
  if (sigma0) {
    if (sigma0->dim() != cloud.n) {
      throw Error(ErrorKind::DimensionMismatch,
                  "initial covariance dimension differs");
    }
    sigma = sigma0->matrix();
  } else {
    try {
      sigma = cloud_covariance(cloud).matrix();
    } catch (const Error&) {
      sigma = Matrix::Identity(cloud.n, cloud.n);
      traj.covariance_from_sample = false;
    }
  }

  std::vector<Vector> pos = cloud.positions;
  double t0 = cloud.time;
  traj.times.push_back(t0);
  traj.positions.push_back(pos);
  traj.covariances.push_back(sigma);

  for (const auto& seg : segments) {
    const Matrix& a = seg.generator.matrix();
    const double span = seg.duration;
    const auto steps = static_cast<long>(std::ceil(span / dt - 1e-9));
    const double last = span - static_cast<double>(steps - 1) * dt;
    const Matrix step_map = expm(a * dt);
    const Matrix last_map = expm(a * last);
    for (long j = 0; j < steps; ++j) {
      const bool final = j + 1 == steps;
      const double h = final ? last : dt;
      const Matrix& map = final ? last_map : step_map;
      for (auto& x : pos) x = map * x;
      sigma = rk4_step(a, sigma, h);
      traj.times.push_back(final ? t0 + span
                                 : t0 + static_cast<double>(j + 1) * dt);
      traj.positions.push_back(pos);
      traj.covariances.push_back(sigma);
    }
    t0 += span;
    traj.segment_ends.push_back(traj.times.size() - 1);
  }
  return traj;
}

Matrix transition_matrix(const std::vector<FlowSegment>& segments) {
  if (segments.empty()) {
    throw Error(ErrorKind::InvalidInput, "no segments");
  }
  const Eigen::Index n = segments.front().generator.dim();
  Matrix p = Matrix::Identity(n, n);
  for (const auto& seg : segments) {
    p = sym_exp(SymMatrix::from(seg.generator.matrix() * seg.duration))
            .matrix() *
        p;
  }
  return p;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
  os << "t,particle_id";
  for (Eigen::Index i = 1; i <= traj.n; ++i) os << ",x" << i;
  os << '\n';
  for (std::size_t s = 0; s < traj.times.size(); ++s) {
    const std::string t = fmt17(traj.times[s]);
    for (std::size_t p = 0; p < traj.positions[s].size(); ++p) {
      os << t << ',' << p;
      for (Eigen::Index i = 0; i < traj.n; ++i) {
        os << ',' << fmt17(traj.positions[s][p](i));
      }
      os << '\n';
    }
  }
}

void write_covariance_csv(const Trajectory& traj, std::ostream& os) {
  os << 't';
  for (Eigen::Index i = 1; i <= traj.n; ++i)
    for (Eigen::Index j = 1; j <= traj.n; ++j)
      os << ",sigma_" << i << j;
  os << '\n';
  for (std::size_t s = 0; s < traj.times.size(); ++s) {
    os << fmt17(traj.times[s]);
    const Matrix& c = traj.covariances[s];
    for (Eigen::Index i = 0; i < traj.n; ++i)
      for (Eigen::Index j = 0; j < traj.n; ++j) os << ',' << fmt17(c(i, j));
    os << '\n';
  }
}

}  // namespace pdfactor
