#include "pdfactor/transport.hpp"

#include "pdfactor/error.hpp"

namespace pdfactor {

namespace {

void require_same_dim(Eigen::Index a, Eigen::Index b) {
  if (a != b) {
    throw Error(ErrorKind::DimensionMismatch,
                "covariances have dimensions " + std::to_string(a) + " and " +
                    std::to_string(b));
  }
}

}  // namespace

SpdMatrix ot_map(const SpdMatrix& from, const SpdMatrix& to) {
  require_same_dim(from.dim(), to.dim());
  // (A^{1/2} B A^{1/2})^{1/2} is the SPD polar factor of B^{1/2} A^{1/2}, so
  // M = A^{-1/2} W^T B^{1/2} with W the orthogonal factor. This never forms
  // the middle product, whose condition number is the square of the factor's.
  const Matrix ra = spd_sqrt(from).matrix();
  const Matrix rb = spd_sqrt(to).matrix();
  const Matrix w = polar(rb * ra).v;
  return SpdMatrix::certify(
      symmetrize(spd_inv_sqrt(from).matrix() * w.transpose() * rb));
}

double ot_residual(const SpdMatrix& m, const SpdMatrix& from,
                   const SpdMatrix& to) {
  require_same_dim(m.dim(), from.dim());
  require_same_dim(m.dim(), to.dim());
  return frobenius(m.matrix() * from.matrix() * m.matrix() - to.matrix());
}

}  // namespace pdfactor
