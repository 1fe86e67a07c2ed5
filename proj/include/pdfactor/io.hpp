#pragma once

// File formats.
//   MatrixFile  {"n": n, "data": [n*n numbers, row-major]}
//   ChainFile   {"n": n, "factors": [[n*n], ...],
//                "meta": {"lambda": .., "theta_rad": .., "k": ..}}  (meta optional)
//   particles   CSV with header x1,...,xn
//   sweep       CSV theta_deg,lambda,phi_deg
// Malformed input throws Error(InvalidInput).

#include <filesystem>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "pdfactor/ballantine.hpp"
#include "pdfactor/flowsim.hpp"

namespace pdfactor::io {

using json = nlohmann::json;

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);

json chain_to_json(const FactorChain& chain);
// Every factor is SPD-certified on load.
FactorChain chain_from_json(const json& j);

json report_to_json(const VerificationReport& report);

json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

Matrix read_matrix_file(const std::filesystem::path& path);
FactorChain read_chain_file(const std::filesystem::path& path);

ParticleCloud read_particles_csv(std::istream& is);

void write_sweep_csv(const std::vector<SweepTable>& tables, std::ostream& os);

}  // namespace pdfactor::io
