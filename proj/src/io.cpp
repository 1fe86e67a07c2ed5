#include "pdfactor/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "pdfactor/error.hpp"

namespace pdfactor::io {

namespace {

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorKind::InvalidInput, what);
}

Eigen::Index read_dim(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j["n"].is_number_integer()) {
    bad("expected an object with integer field \"n\"");
  }
  const auto n = j["n"].get<long long>();
  if (n <= 0) bad("\"n\" must be positive");
  return static_cast<Eigen::Index>(n);
}

Matrix flat_to_matrix(const json& data, Eigen::Index n) {
  if (!data.is_array() || data.size() != static_cast<std::size_t>(n * n)) {
    bad("matrix data must be an array of n*n numbers");
  }
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const json& x = data[static_cast<std::size_t>(i * n + k)];
      if (!x.is_number()) bad("matrix entries must be numbers");
      m(i, k) = x.get<double>();
    }
  }
  if (!m.allFinite()) bad("matrix entries must be finite");
  return m;
}

json matrix_to_flat(const Matrix& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) data.push_back(m(i, k));
  return data;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

json matrix_to_json(const Matrix& m) {
  return json{{"n", m.rows()}, {"data", matrix_to_flat(m)}};
}

Matrix matrix_from_json(const json& j) {
  const Eigen::Index n = read_dim(j);
  if (!j.contains("data")) bad("missing \"data\"");
  return flat_to_matrix(j["data"], n);
}

json chain_to_json(const FactorChain& chain) {
  json factors = json::array();
  for (const auto& f : chain.factors) factors.push_back(matrix_to_flat(f.matrix()));
  json j{{"n", chain.n}, {"factors", factors}};
  if (chain.params) {
    j["meta"] = {{"lambda", chain.params->lambda},
                 {"theta_rad", chain.params->theta},
                 {"k", chain.params->k}};
  }
  return j;
}

FactorChain chain_from_json(const json& j) {
  const Eigen::Index n = read_dim(j);
  if (!j.contains("factors") || !j["factors"].is_array()) {
    bad("missing \"factors\" array");
  }
  FactorChain chain{n, {}, std::nullopt};
  for (const auto& f : j["factors"]) {
    const Matrix m = flat_to_matrix(f, n);
    try {
      chain.factors.push_back(SpdMatrix::certify(m));
    } catch (const Error& e) {
      bad(std::string("factor fails SPD certification: ") + e.what());
    }
  }
  if (chain.factors.empty()) bad("\"factors\" must not be empty");
  if (j.contains("meta") && !j["meta"].is_null()) {
    const json& meta = j["meta"];
    try {
      chain.params = ChainParams{meta.at("lambda").get<double>(),
                                 meta.at("theta_rad").get<double>(),
                                 meta.at("k").get<int>()};
    } catch (const json::exception& e) {
      bad(std::string("malformed \"meta\": ") + e.what());
    }
  }
  return chain;
}

json report_to_json(const VerificationReport& report) {
  json factors = json::array();
  for (const auto& f : report.factors) {
    factors.push_back({{"symmetry_defect", f.symmetry_defect},
                       {"min_eigenvalue", f.min_eigenvalue},
                       {"condition", f.condition},
                       {"spd", f.spd}});
  }
  return json{{"pass", report.pass},
              {"residual", report.residual},
              {"tolerance", report.tolerance},
              {"factor_count", report.factor_count},
              {"factors", factors}};
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    bad(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) bad("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

Matrix read_matrix_file(const std::filesystem::path& path) {
  return matrix_from_json(read_json(path));
}

FactorChain read_chain_file(const std::filesystem::path& path) {
  return chain_from_json(read_json(path));
}

ParticleCloud read_particles_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) bad("particle CSV is empty");
  const auto header = split_csv(line);
  const auto n = static_cast<Eigen::Index>(header.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (header[static_cast<std::size_t>(i)] != "x" + std::to_string(i + 1)) {
      bad("particle CSV header must be x1,...,xn");
    }
  }
  if (n == 0) bad("particle CSV header must be x1,...,xn");

  ParticleCloud cloud{n, {}, 0.0};
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (static_cast<Eigen::Index>(cells.size()) != n) {
      bad("particle CSV row has " + std::to_string(cells.size()) +
          " columns, expected " + std::to_string(n));
    }
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::string& c = cells[static_cast<std::size_t>(i)];
      std::size_t used = 0;
      try {
        x(i) = std::stod(c, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != c.size() || !std::isfinite(x(i))) {
        bad("bad particle coordinate \"" + c + "\"");
      }
    }
    cloud.positions.push_back(std::move(x));
  }
  if (cloud.positions.empty()) bad("particle CSV has no rows");
  return cloud;
}

void write_sweep_csv(const std::vector<SweepTable>& tables, std::ostream& os) {
  constexpr double deg = 180.0 / std::numbers::pi;
  os << "theta_deg,lambda,phi_deg\n";
  for (const auto& t : tables) {
    for (const auto& r : t.rows) {
      os << fmt17(r.theta * deg) << ',' << fmt17(t.lambda) << ','
         << fmt17(r.phi * deg) << '\n';
    }
  }
}

}  // namespace pdfactor::io
