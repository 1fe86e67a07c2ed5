#pragma once

#include "pdfactor/matfun.hpp"

namespace pdfactor {

// Monge map between centered Gaussians N(0, from) and N(0, to): the unique SPD
// M with M * from * M = to, computed as
//   from^{-1/2} (from^{1/2} to from^{1/2})^{1/2} from^{-1/2}.
SpdMatrix ot_map(const SpdMatrix& from, const SpdMatrix& to);

// |M * from * M - to|_F
double ot_residual(const SpdMatrix& m, const SpdMatrix& from,
                   const SpdMatrix& to);

}  // namespace pdfactor
