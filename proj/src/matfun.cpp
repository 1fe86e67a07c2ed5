#include "pdfactor/matfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pdfactor/error.hpp"

namespace pdfactor {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorKind::InvalidInput,
                std::string(what) + ": matrix must be square and non-empty");
  }
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw Error(ErrorKind::InvalidInput,
                std::string(what) + ": matrix has non-finite entries");
  }
}

// Sort eigenpairs descending and fix the sign of every eigenvector so that its
// largest-magnitude component is positive (first index wins ties).
EigenPair normalize(const Matrix& q, const Vector& d) {
  const Eigen::Index n = d.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return d(a) > d(b); });
  EigenPair out{Matrix(q.rows(), n), Vector(n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index src = order[static_cast<std::size_t>(j)];
    out.d(j) = d(src);
    out.q.col(j) = q.col(src);
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < q.rows(); ++i) {
      if (std::abs(out.q(i, j)) > std::abs(out.q(arg, j))) arg = i;
    }
    if (out.q(arg, j) < 0.0) out.q.col(j) = -out.q.col(j);
  }
  return out;
}

Matrix compose(const Matrix& q, const Vector& d) {
  return symmetrize(q * d.asDiagonal() * q.transpose());
}

template <typename F>
SpdMatrix spd_apply(const SpdMatrix& s, F f) {
  const auto& e = s.eigen();
  Vector d = e.d.unaryExpr(f);
  return SpdMatrix::from_spectrum(e.q, std::move(d));
}

}  // namespace

double frobenius(const Matrix& m) { return m.norm(); }

double symmetry_defect(const Matrix& m) {
  return (m - m.transpose()).norm();
}

Matrix symmetrize(const Matrix& m) {
  return 0.5 * (m + m.transpose());
}

bool passes_spd_certification(const Vector& d) {
  if (d.size() == 0 || !d.allFinite()) return false;
  const double hi = d.maxCoeff();
  const double lo = d.minCoeff();
  return lo > kSpdTolerance * std::max(1.0, hi);
}

// ---------------------------------------------------------------- SymMatrix

SymMatrix SymMatrix::from(const Matrix& m) {
  require_square(m, "SymMatrix");
  require_finite(m, "SymMatrix");
  if (symmetry_defect(m) > kSymmetryTolerance * (1.0 + frobenius(m))) {
    throw Error(ErrorKind::InvalidInput, "matrix is not symmetric");
  }
  return SymMatrix(symmetrize(m));
}

SymMatrix SymMatrix::zero(Eigen::Index n) {
  return SymMatrix(Matrix::Zero(n, n));
}

// ---------------------------------------------------------------- SpdMatrix

SpdMatrix SpdMatrix::certify(const Matrix& m) {
  SymMatrix s = SymMatrix::from(m);
  EigenPair e = sym_eig(s);
  if (!passes_spd_certification(e.d)) {
    throw Error(ErrorKind::NotPositiveDefinite,
                "smallest eigenvalue " + std::to_string(e.d.minCoeff()) +
                    " fails SPD certification");
  }
  return SpdMatrix(s.matrix(), std::move(e));
}

SpdMatrix SpdMatrix::from_spectrum(Matrix q, Vector d) {
  if (!d.allFinite() || d.size() == 0 || d.minCoeff() <= 0.0) {
    throw Error(ErrorKind::NotPositiveDefinite,
                "spectrum must be finite and strictly positive");
  }
  EigenPair e = normalize(q, d);
  Matrix m = compose(e.q, e.d);
  return SpdMatrix(std::move(m), std::move(e));
}

SpdMatrix SpdMatrix::identity(Eigen::Index n) {
  return SpdMatrix(Matrix::Identity(n, n),
                   EigenPair{Matrix::Identity(n, n), Vector::Ones(n)});
}

// ---------------------------------------------------------------- Jacobi

EigenPair sym_eig(const SymMatrix& s) {
  Matrix a = s.matrix();
  const Eigen::Index n = a.rows();
  Matrix v = Matrix::Identity(n, n);

  // The Frobenius threshold alone leaves absolute errors that swamp small
  // eigenvalues of ill-conditioned matrices, so an element is only left alone
  // once it is negligible next to its own diagonal pair as well.
  const double threshold = 1e-14 * a.norm();
  constexpr double kFloor = std::numeric_limits<double>::min();
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  auto off_norm = [&] {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (i != j) sum += a(i, j) * a(i, j);
    return std::sqrt(sum);
  };

  constexpr int kMaxSweeps = 30;
  bool converged = false;
  for (int sweep = 0; sweep <= kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= kEps * std::sqrt(std::abs(a(p, p) * a(q, q))) ||
            std::abs(apq) <= kFloor) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        rotated = true;
        if (sweep == kMaxSweeps) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(tau) > 1e150) {
          t = 0.5 / tau;
        } else {
          t = (tau >= 0.0 ? 1.0 : -1.0) /
              (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = t * c;
        // a <- J^T a J with J = [[c, sn], [-sn, c]] acting on (p, q).
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
    if (!rotated && off_norm() <= threshold) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw Error(ErrorKind::NumericalFailure,
                "Jacobi eigensolver did not converge in 30 sweeps");
  }
  return normalize(v, a.diagonal());
}

// ---------------------------------------------------------------- functions

SpdMatrix spd_sqrt(const SpdMatrix& s) {
  return spd_apply(s, [](double x) { return std::sqrt(x); });
}

SpdMatrix spd_inv_sqrt(const SpdMatrix& s) {
  return spd_apply(s, [](double x) { return 1.0 / std::sqrt(x); });
}

SpdMatrix spd_inverse(const SpdMatrix& s) {
  return spd_apply(s, [](double x) { return 1.0 / x; });
}

SymMatrix spd_log(const SpdMatrix& s) {
  const auto& e = s.eigen();
  Vector d = e.d.unaryExpr([](double x) { return std::log(x); });
  return SymMatrix::from(compose(e.q, d));
}

SpdMatrix sym_exp(const SymMatrix& a) {
  EigenPair e = sym_eig(a);
  Vector d = e.d.unaryExpr([](double x) { return std::exp(x); });
  return SpdMatrix::from_spectrum(std::move(e.q), std::move(d));
}

double cond(const SpdMatrix& s) {
  return s.max_eigenvalue() / s.min_eigenvalue();
}

double determinant(const Matrix& m) {
  require_square(m, "determinant");
  return m.partialPivLu().determinant();
}

// ---------------------------------------------------------------- expm

namespace {

constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0,
                                          420.0,   30.0,    1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0,
                                          277200.0,   25200.0,   1512.0,
                                          56.0,       1.0};
constexpr std::array<double, 10> kPade9 = {
    17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
    2162160.0,     110880.0,     3960.0,       90.0,        1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};

// Largest 1-norm for which each Pade degree meets unit roundoff.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

template <std::size_t N>
Matrix pade_low(const Matrix& a, const std::array<double, N>& b) {
  const Eigen::Index n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  Matrix power = id;
  Matrix u_inner = Matrix::Zero(n, n);
  Matrix v = Matrix::Zero(n, n);
  for (std::size_t k = 0; k + 1 < N; k += 2) {
    v += b[k] * power;
    u_inner += b[k + 1] * power;
    power = power * a2;
  }
  const Matrix u = a * u_inner;
  return (v - u).partialPivLu().solve(v + u);
}

Matrix pade13(const Matrix& a) {
  const auto& b = kPade13;
  const Eigen::Index n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
           b[5] * a4 + b[3] * a2 + b[1] * id);
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                   b[4] * a4 + b[2] * a2 + b[0] * id;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

Matrix expm(const Matrix& a) {
  require_square(a, "expm");
  require_finite(a, "expm");
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 <= kTheta3) return pade_low(a, kPade3);
  if (norm1 <= kTheta5) return pade_low(a, kPade5);
  if (norm1 <= kTheta7) return pade_low(a, kPade7);
  if (norm1 <= kTheta9) return pade_low(a, kPade9);
  const int squarings =
      std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / kTheta13))));
  Matrix r = pade13(a / std::ldexp(1.0, squarings));
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

// ---------------------------------------------------------------- polar

PolarFactors polar(const Matrix& phi) {
  require_square(phi, "polar");
  require_finite(phi, "polar");
  const double det = determinant(phi);
  if (!(std::abs(det) >= 1e-300)) {
    throw Error(ErrorKind::SingularInput, "polar: matrix is singular");
  }

  // Scaled Newton iteration X <- (g X + X^{-T} / g) / 2 converging to the
  // orthogonal polar factor; scaling is dropped once the iterates settle so
  // the last steps converge quadratically.
  Matrix x = phi;
  bool scaled = true;
  constexpr int kMaxIterations = 100;
  bool final_step = false;
  int it = 0;
  for (; it < kMaxIterations; ++it) {
    const Matrix xinv_t = x.partialPivLu().inverse().transpose();
    double g = 1.0;
    if (scaled) g = std::sqrt(xinv_t.norm() / x.norm());
    Matrix next = 0.5 * (g * x + xinv_t / g);
    const double delta = (next - x).norm();
    x = std::move(next);
    if (final_step) break;
    if (delta <= 1e-2 * x.norm()) scaled = false;
    // Quadratic convergence: one more step after 1e-8 reaches roundoff.
    if (!scaled && delta <= 1e-8 * x.norm()) final_step = true;
  }
  if (it == kMaxIterations || !x.allFinite()) {
    throw Error(ErrorKind::NumericalFailure, "polar: Newton iteration failed");
  }

  Matrix s = symmetrize(x.transpose() * phi);
  try {
    return PolarFactors{std::move(x), SpdMatrix::certify(s)};
  } catch (const Error&) {
    throw Error(ErrorKind::SingularInput,
                "polar: matrix is numerically singular");
  }
}

}  // namespace pdfactor
