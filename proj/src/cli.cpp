#include "pdfactor/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <numbers>
#include <ostream>

#include "pdfactor/ballantine.hpp"
#include "pdfactor/error.hpp"
#include "pdfactor/flowsim.hpp"
#include "pdfactor/io.hpp"

namespace pdfactor::cli {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Failures of the numerical pipeline itself map to 2; everything that points
// at the caller's input maps to 1.
int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NumericalFailure:
    case ErrorKind::TargetUnreachable:
    case ErrorKind::NotARotation:
    case ErrorKind::NotPositiveDefinite:
      return kNumericalFailure;
    default:
      return kInvalidInput;
  }
}

struct FactorArgs {
  std::string input;
  std::string output;
  int k = 5;
  double max_cond = 1000.0;
  double tol = 1e-8;
};

struct SweepArgs {
  int k = 3;
  std::vector<double> lambdas;
  double theta_max_deg = 90.0;
  int steps = 901;
  std::string output;
};

struct VerifyArgs {
  std::string chain;
  std::string target;
  double tol = 1e-8;
};

struct SimulateArgs {
  std::string chain;
  std::string particles;
  double dt = 1e-3;
  std::vector<double> durations;
  std::string out_prefix;
};

int cmd_factor(const FactorArgs& a, std::ostream& out) {
  const Matrix target = io::read_matrix_file(a.input);
  FactorOptions opts{a.k, a.max_cond, a.tol};
  const FactorChain chain = factor_matrix(target, opts);
  io::write_json(a.output, io::chain_to_json(chain));
  const VerificationReport report = verify(chain, target, a.tol);
  out << io::report_to_json(report).dump(2) << '\n';
  return report.pass ? kOk : kVerificationFailed;
}

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  std::vector<SweepTable> tables;
  for (double lambda : a.lambdas) {
    tables.push_back(
        phi_sweep(lambda, a.k, a.theta_max_deg * kDegToRad, a.steps));
  }
  if (a.output.empty()) {
    io::write_sweep_csv(tables, out);
  } else {
    std::ofstream file(a.output);
    if (!file) throw Error(ErrorKind::InvalidInput, "cannot write " + a.output);
    io::write_sweep_csv(tables, file);
  }
  return kOk;
}

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  const FactorChain chain = io::read_chain_file(a.chain);
  const Matrix target = io::read_matrix_file(a.target);
  const VerificationReport report = verify(chain, target, a.tol);
  out << io::report_to_json(report).dump(2) << '\n';
  return report.pass ? kOk : kVerificationFailed;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const FactorChain chain = io::read_chain_file(a.chain);
  std::ifstream pin(a.particles);
  if (!pin) throw Error(ErrorKind::InvalidInput, "cannot open " + a.particles);
  const ParticleCloud cloud = io::read_particles_csv(pin);
  if (cloud.n != chain.n) {
    throw Error(ErrorKind::DimensionMismatch,
                "particle and chain dimensions differ");
  }
  std::vector<double> durations = a.durations;
  if (durations.empty()) durations.assign(chain.size(), 1.0);

  const auto segments = segments_from_chain(chain, durations);
  const Trajectory traj = simulate(segments, cloud, a.dt);

  std::ofstream tfile(a.out_prefix + "_trajectory.csv");
  std::ofstream cfile(a.out_prefix + "_covariance.csv");
  if (!tfile || !cfile) {
    throw Error(ErrorKind::InvalidInput,
                "cannot write outputs with prefix " + a.out_prefix);
  }
  write_trajectory_csv(traj, tfile);
  write_covariance_csv(traj, cfile);
  out << io::matrix_to_json(transition_matrix(segments)).dump() << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Factor matrices with positive determinant into SPD products"};
  app.require_subcommand(1);

  FactorArgs fa;
  auto* factor = app.add_subcommand("factor", "factor a matrix into SPD factors");
  factor->add_option("input", fa.input, "MatrixFile (JSON)")->required();
  factor->add_option("--factors", fa.k, "factors per rotation stage")
      ->check(CLI::Range(3, 1000));
  factor->add_option("--max-cond", fa.max_cond, "largest scheme condition number")
      ->check(CLI::Range(1.0, 1e300));
  factor->add_option("--tol", fa.tol, "relative residual tolerance")
      ->check(CLI::PositiveNumber);
  factor->add_option("--output", fa.output, "ChainFile to write")->required();

  SweepArgs sa;
  auto* sweep = app.add_subcommand("sweep", "tabulate net rotation phi_k(theta, lambda)");
  sweep->add_option("--k", sa.k, "factor count")->check(CLI::Range(3, 1000));
  sweep->add_option("--lambda", sa.lambdas, "one or more lambda values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--theta-max", sa.theta_max_deg, "sweep end in degrees")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--steps", sa.steps, "grid points")->check(CLI::Range(2, 10000000));
  sweep->add_option("--output", sa.output, "CSV path (stdout if omitted)");

  VerifyArgs va;
  auto* verify_cmd = app.add_subcommand("verify", "check a chain against a target");
  verify_cmd->add_option("--chain", va.chain, "ChainFile")->required();
  verify_cmd->add_option("--target", va.target, "MatrixFile")->required();
  verify_cmd->add_option("--tol", va.tol, "relative residual tolerance")
      ->check(CLI::PositiveNumber);

  SimulateArgs ma;
  auto* simulate_cmd =
      app.add_subcommand("simulate", "simulate the gradient flow of a chain");
  simulate_cmd->add_option("--chain", ma.chain, "ChainFile")->required();
  simulate_cmd->add_option("--particles", ma.particles, "CSV with x1..xn")->required();
  simulate_cmd->add_option("--dt", ma.dt, "substep")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--durations", ma.durations, "segment durations")
      ->delimiter(',');
  simulate_cmd->add_option("--out-prefix", ma.out_prefix, "output path prefix")
      ->required();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInvalidInput;
  }

  try {
    if (*factor) return cmd_factor(fa, out);
    if (*sweep) return cmd_sweep(sa, out);
    if (*verify_cmd) return cmd_verify(va, out);
    return cmd_simulate(ma, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
}

}  // namespace pdfactor::cli
