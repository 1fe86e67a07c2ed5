#include "pdfactor/ballantine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pdfactor/error.hpp"
#include "pdfactor/spectral.hpp"

namespace pdfactor {

void FactorOptions::validate() const {
  if (k_rotation < 3) {
    throw Error(ErrorKind::InvalidParams, "k_rotation must be >= 3");
  }
  if (!std::isfinite(lambda_budget) || lambda_budget < 1.0) {
    throw Error(ErrorKind::InvalidParams, "lambda budget must be >= 1");
  }
  if (!std::isfinite(tol_verify) || tol_verify <= 0.0) {
    throw Error(ErrorKind::InvalidParams, "verification tolerance must be > 0");
  }
}

FactorChain factor_rotation2(double psi, const FactorOptions& opts) {
  opts.validate();
  constexpr double pi = std::numbers::pi;
  if (!std::isfinite(psi) || psi <= -pi || psi > pi) {
    throw Error(ErrorKind::InvalidParams, "rotation angle must lie in (-pi, pi]");
  }
  if (psi == 0.0) return FactorChain{2, {SpdMatrix::identity(2)}, std::nullopt};

  const ChainParams params =
      plan_scheme(std::abs(psi), opts.k_rotation, opts.lambda_budget);
  FactorChain chain = build_chain(params);
  if (psi < 0.0) {
    // (M_k ... M_1)^T = M_1 ... M_k, i.e. the reversed list rotates by -psi.
    std::reverse(chain.factors.begin(), chain.factors.end());
    chain.params.reset();
  }
  return chain;
}

FactorChain factor_orthogonal(const Matrix& v, const FactorOptions& opts) {
  opts.validate();
  const OrthogonalDecomposition decomp = block_diagonalize(v);
  const Eigen::Index n = v.rows();

  struct Planned {
    Eigen::Index first;
    FactorChain chain;
  };
  std::vector<Planned> planned;
  std::size_t stages = 0;
  for (const auto& b : decomp.blocks) {
    if (const auto* r = std::get_if<RotationBlock>(&b)) {
      planned.push_back({r->first, factor_rotation2(r->theta, opts)});
      stages = std::max(stages, planned.back().chain.size());
    }
  }
  if (stages == 0) return FactorChain{n, {SpdMatrix::identity(n)}, std::nullopt};

  FactorChain out{n, {}, std::nullopt};
  out.factors.reserve(stages);
  for (std::size_t s = 0; s < stages; ++s) {
    Matrix m = Matrix::Identity(n, n);
    for (const auto& p : planned) {
      if (s < p.chain.size()) {
        m.block(p.first, p.first, 2, 2) = p.chain.factors[s].matrix();
      }
    }
    const Matrix conj = decomp.u * m * decomp.u.transpose();
    try {
      out.factors.push_back(SpdMatrix::certify(symmetrize(conj)));
    } catch (const Error& e) {
      throw Error(ErrorKind::NumericalFailure,
                  std::string("conjugated factor lost definiteness: ") +
                      e.what());
    }
  }
  return out;
}

FactorChain factor_matrix(const Matrix& phi, const FactorOptions& opts) {
  opts.validate();
  if (phi.rows() != phi.cols() || phi.rows() == 0 || !phi.allFinite()) {
    throw Error(ErrorKind::InvalidInput,
                "matrix must be square, non-empty and finite");
  }
  const double det = determinant(phi);
  if (!(std::abs(det) >= 1e-300)) {
    throw Error(ErrorKind::SingularInput, "matrix is singular");
  }
  if (det < 0.0) {
    throw Error(ErrorKind::NonPositiveDeterminant,
                "determinant not positive (" + std::to_string(det) + ")");
  }

  const Eigen::Index n = phi.rows();
  PolarFactors pf = polar(phi);
  const Matrix id = Matrix::Identity(n, n);
  if (frobenius(pf.v - id) <= 1e-12) {
    return FactorChain{n, {std::move(pf.s)}, std::nullopt};
  }
  FactorChain rotation = factor_orthogonal(pf.v, opts);
  if (frobenius(pf.s.matrix() - id) <= 1e-10) return rotation;

  FactorChain out{n, {std::move(pf.s)}, std::nullopt};
  for (auto& f : rotation.factors) out.factors.push_back(std::move(f));
  return out;
}

VerificationReport verify(const FactorChain& chain, const Matrix& target,
                          double tol) {
  if (target.rows() != target.cols() || target.rows() != chain.n) {
    throw Error(ErrorKind::DimensionMismatch,
                "target and chain dimensions differ");
  }
  for (const auto& f : chain.factors) {
    if (f.dim() != chain.n) {
      throw Error(ErrorKind::DimensionMismatch,
                  "factor dimension differs from chain dimension");
    }
  }
  VerificationReport report;
  report.tolerance = tol;
  report.factor_count = chain.size();
  const double scale = frobenius(target);
  const double diff = frobenius(chain.product() - target);
  report.residual = scale > 0.0 ? diff / scale : diff;

  bool all_spd = true;
  for (const auto& f : chain.factors) {
    FactorDiagnostics d;
    d.symmetry_defect = symmetry_defect(f.matrix());
    d.min_eigenvalue = f.min_eigenvalue();
    d.condition = cond(f);
    d.spd = passes_spd_certification(f.eigen().d) &&
            d.symmetry_defect <= kSymmetryTolerance * (1.0 + frobenius(f.matrix()));
    all_spd = all_spd && d.spd;
    report.factors.push_back(d);
  }
  report.pass = report.residual <= tol && all_spd;
  return report;
}

}  // namespace pdfactor
