#include "pdfactor/planar.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pdfactor/error.hpp"
#include "pdfactor/transport.hpp"

namespace pdfactor {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLambdaRatio = 1.25;
constexpr int kSolveGrid = 2000;
constexpr int kBisections = 80;
constexpr int kMaxRefineDepth = 60;

void check_scheme(double lambda, int k) {
  if (!std::isfinite(lambda) || lambda < 1.0) {
    throw Error(ErrorKind::InvalidParams, "lambda must be finite and >= 1");
  }
  if (k < 3) throw Error(ErrorKind::InvalidParams, "k must be >= 3");
}

double wrap(double a) {
  double r = std::remainder(a, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

Eigen::Matrix2d rot(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix2d u;
  u << c, s, -s, c;
  return u;
}

// Increment of the unwrapped curve between two samples. A wrapped difference
// cannot tell a small step from a step plus a full turn, so the midpoint is
// always probed: the interval is accepted only when both halves are small and
// agree with the whole, otherwise each half is refined.
double increment(double lambda, int k, double ta, double pa, double tb,
                 double pb, int depth) {
  const double d = wrap(pb - pa);
  const double tm = 0.5 * (ta + tb);
  const double pm = chain_angle(lambda, tm, k);
  const double d1 = wrap(pm - pa);
  const double d2 = wrap(pb - pm);
  if (std::abs(d1) <= kPi / 4 && std::abs(d2) <= kPi / 4 &&
      std::abs(d1 + d2 - d) <= 1e-9) {
    return d;
  }
  if (depth == 0) {
    throw Error(ErrorKind::NumericalFailure,
                "phi sweep: curve too steep near theta=" + std::to_string(ta) +
                    "; increase steps");
  }
  return increment(lambda, k, ta, pa, tm, pm, depth - 1) +
         increment(lambda, k, tm, pm, tb, pb, depth - 1);
}

double sweep_max(double lambda, int k) {
  return phi_sweep(lambda, k, kPi, kSolveGrid).max_phi();
}

}  // namespace

Matrix rotation2(double theta) { return rot(theta); }

void ChainParams::validate() const {
  check_scheme(lambda, k);
  if (!std::isfinite(theta)) {
    throw Error(ErrorKind::InvalidParams, "theta must be finite");
  }
}

Matrix FactorChain::product() const {
  Matrix p = Matrix::Identity(n, n);
  for (const auto& f : factors) p = f.matrix() * p;
  return p;
}

double SweepTable::max_phi() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& r : rows) m = std::max(m, r.phi);
  return m;
}

std::vector<SpdMatrix> chain_covariances(const ChainParams& p) {
  p.validate();
  const double mid = 0.5 * (p.lambda + 1.0 / p.lambda);
  const double half = 0.5 * (p.lambda - 1.0 / p.lambda);
  std::vector<SpdMatrix> out;
  out.reserve(static_cast<std::size_t>(p.k) + 1);
  out.push_back(SpdMatrix::identity(2));
  for (int j = 1; j < p.k; ++j) {
    // U_a diag(lambda, 1/lambda) U_a^T with a = (j - 1) theta; written in
    // double-angle form so lambda = 1 gives the identity exactly.
    const double a = (j - 1) * p.theta;
    const double c2 = std::cos(2.0 * a);
    const double s2 = std::sin(2.0 * a);
    Matrix s(2, 2);
    s << mid + half * c2, -half * s2, -half * s2, mid - half * c2;
    out.push_back(SpdMatrix::certify(s));
  }
  out.push_back(SpdMatrix::identity(2));
  return out;
}

FactorChain build_chain(const ChainParams& p) {
  const auto covs = chain_covariances(p);
  FactorChain chain{2, {}, p};
  chain.factors.reserve(static_cast<std::size_t>(p.k));
  try {
    for (int j = 1; j <= p.k; ++j) {
      chain.factors.push_back(ot_map(covs[j - 1], covs[j]));
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotPositiveDefinite) throw;
    throw Error(ErrorKind::NumericalFailure,
                std::string("build_chain: ") + e.what());
  }
  return chain;
}

double net_rotation(const FactorChain& c, double tolerance) {
  if (c.n != 2) {
    throw Error(ErrorKind::DimensionMismatch, "net_rotation needs a 2x2 chain");
  }
  const Matrix p = c.product();
  const double orth = frobenius(p * p.transpose() - Matrix::Identity(2, 2));
  const double det = p.determinant();
  if (!(orth <= tolerance) || !(std::abs(det - 1.0) <= tolerance)) {
    throw Error(ErrorKind::NotARotation,
                "chain product is not a proper rotation (orthogonality defect " +
                    std::to_string(orth) + ", det " + std::to_string(det) +
                    ")");
  }
  return std::atan2(p(0, 1), p(0, 0));
}

double chain_angle(double lambda, double theta, int k) {
  check_scheme(lambda, k);
  const double s = std::sqrt(lambda);
  const Eigen::Vector2d half(s, 1.0 / s);
  const Eigen::Vector2d inv_half(1.0 / s, s);
  const Eigen::Matrix2d u = rot(theta);

  // Middle factor between diag(lambda, 1/lambda) and its rotation. The inner
  // matrix C has det 1, so sqrt(C) = (C + I) / sqrt(tr C + 2).
  const Eigen::Matrix2d d = Eigen::Vector2d(lambda, 1.0 / lambda).asDiagonal();
  const Eigen::Matrix2d c =
      half.asDiagonal() * (u * d * u.transpose()) * half.asDiagonal();
  const Eigen::Matrix2d root =
      (c + Eigen::Matrix2d::Identity()) / std::sqrt(c.trace() + 2.0);
  const Eigen::Matrix2d middle =
      inv_half.asDiagonal() * root * inv_half.asDiagonal();

  Eigen::Matrix2d p = half.asDiagonal();
  Eigen::Matrix2d frame = Eigen::Matrix2d::Identity();  // U_theta^{j-2}
  for (int j = 2; j <= k - 1; ++j) {
    p = frame * middle * frame.transpose() * p;
    frame = u * frame;
  }
  // frame is now U_theta^{k-2}; the last factor undoes S_{k-1}.
  const Eigen::Matrix2d last =
      frame * inv_half.asDiagonal() * frame.transpose();
  p = last * p;
  return std::atan2(p(0, 1), p(0, 0));
}

SweepTable phi_sweep(double lambda, int k, double theta_max, int steps) {
  check_scheme(lambda, k);
  if (steps < 2) throw Error(ErrorKind::InvalidParams, "steps must be >= 2");
  if (!std::isfinite(theta_max) || theta_max <= 0.0) {
    throw Error(ErrorKind::InvalidParams, "theta_max must be positive");
  }
  SweepTable table{lambda, k, {}};
  table.rows.reserve(static_cast<std::size_t>(steps));
  double prev_theta = 0.0;
  double prev_raw = chain_angle(lambda, 0.0, k);
  double phi = 0.0;
  table.rows.push_back({0.0, 0.0});
  for (int i = 1; i < steps; ++i) {
    const double theta = theta_max * i / (steps - 1);
    const double raw = chain_angle(lambda, theta, k);
    phi += increment(lambda, k, prev_theta, prev_raw, theta, raw,
                     kMaxRefineDepth);
    table.rows.push_back({theta, phi});
    prev_theta = theta;
    prev_raw = raw;
  }
  return table;
}

double solve_theta(double lambda, int k, double target) {
  check_scheme(lambda, k);
  if (!std::isfinite(target) || target < 0.0) {
    throw Error(ErrorKind::InvalidParams, "target angle must be >= 0");
  }
  if (target == 0.0) return 0.0;

  const SweepTable sweep = phi_sweep(lambda, k, kPi, kSolveGrid);
  std::size_t hit = 0;
  for (std::size_t i = 1; i < sweep.rows.size(); ++i) {
    if (sweep.rows[i].phi >= target) {
      hit = i;
      break;
    }
  }
  if (hit == 0) {
    const double best = sweep.max_phi();
    throw Error(ErrorKind::TargetUnreachable,
                "target " + std::to_string(target) + " rad exceeds maximum " +
                    std::to_string(best) + " rad for lambda=" +
                    std::to_string(lambda) + ", k=" + std::to_string(k),
                best);
  }

  const double base_theta = sweep.rows[hit - 1].theta;
  const double base_phi = sweep.rows[hit - 1].phi;
  const double base_raw = chain_angle(lambda, base_theta, k);
  auto phi_at = [&](double theta) {
    return base_phi + increment(lambda, k, base_theta, base_raw, theta,
                                chain_angle(lambda, theta, k),
                                kMaxRefineDepth);
  };

  double lo = base_theta;
  double hi = sweep.rows[hit].theta;
  double phi_lo = base_phi;
  double phi_hi = sweep.rows[hit].phi;
  for (int it = 0; it < kBisections; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double phi_mid = phi_at(mid);
    if (phi_mid >= target) {
      hi = mid;
      phi_hi = phi_mid;
    } else {
      lo = mid;
      phi_lo = phi_mid;
    }
  }
  const double err_lo = std::abs(phi_lo - target);
  const double err_hi = std::abs(phi_hi - target);
  const double theta = err_lo <= err_hi ? lo : hi;
  if (std::min(err_lo, err_hi) > 1e-9) {
    throw Error(ErrorKind::NumericalFailure,
                "solve_theta: bisection did not reach 1e-9 rad");
  }
  return theta;
}

ChainParams plan_scheme(double target, int k, double lambda_budget) {
  if (!std::isfinite(target) || target < 0.0 || target > kPi) {
    throw Error(ErrorKind::InvalidParams, "target angle must lie in [0, pi]");
  }
  if (k < 3) throw Error(ErrorKind::InvalidParams, "k must be >= 3");
  if (!std::isfinite(lambda_budget) || lambda_budget < 1.0) {
    throw Error(ErrorKind::InvalidParams, "lambda budget must be >= 1");
  }
  if (target == 0.0) return ChainParams{1.0, 0.0, k};

  // Four factors only approach pi as lambda grows without bound.
  if (k < 5 && target >= kPi) {
    const double best = sweep_max(lambda_budget, k);
    throw Error(ErrorKind::TargetUnreachable,
                "a half turn needs at least 5 factors", std::min(best, kPi));
  }

  for (int i = 0;; ++i) {
    const double lambda = std::pow(kLambdaRatio, i);
    if (lambda > lambda_budget * (1.0 + 1e-12)) break;
    if (sweep_max(lambda, k) >= target) {
      return ChainParams{lambda, solve_theta(lambda, k, target), k};
    }
  }
  const double best = sweep_max(lambda_budget, k);
  throw Error(ErrorKind::TargetUnreachable,
              "target " + std::to_string(target) +
                  " rad not reachable within lambda budget " +
                  std::to_string(lambda_budget) + " (max " +
                  std::to_string(best) + " rad)",
              best);
}

SymMatrix gradient_generator(const SpdMatrix& sigma0, double theta,
                             double t_fn) {
  if (sigma0.dim() != 2) {
    throw Error(ErrorKind::DimensionMismatch,
                "gradient_generator works on 2x2 covariances");
  }
  if (!std::isfinite(t_fn) || t_fn <= 0.0) {
    throw Error(ErrorKind::InvalidParams, "t_fn must be positive");
  }
  const Matrix u = rotation2(theta);
  const SpdMatrix rotated =
      SpdMatrix::certify(symmetrize(u * sigma0.matrix() * u.transpose()));
  const SymMatrix log_map = spd_log(ot_map(sigma0, rotated));
  return SymMatrix::from(log_map.matrix() / t_fn);
}

}  // namespace pdfactor
