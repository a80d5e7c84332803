#pragma once

#include "rtk/collocation.hpp"
#include "rtk/hmatrix.hpp"
#include "rtk/krylov.hpp"
#include "rtk/rbf.hpp"
#include "rtk/tensor.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtk {

enum class SolverKind { GGmres, GLsqr };
enum class Compression { Dense, HMatrix };

[[nodiscard]] SolverKind parse_solver(const std::string& name);
[[nodiscard]] std::string to_string(SolverKind s);
[[nodiscard]] Compression parse_compression(const std::string& name);
[[nodiscard]] std::string to_string(Compression c);

/// One experiment. Keys accepted by set() are the command-line flag names
/// without the leading dashes: domain, dist, dims, size, solver, epsilon,
/// wavenumber, boundary-a, boundary-b, exact, mu, restart, tau, tol, maxit,
/// compress, eta, aca-tol, leaf-threshold, seed, out, history.
struct ExperimentConfig {
  /// cube, sphere, casing or file:PATH
  std::string domain = "sphere";
  Distribution dist = Distribution::Random;
  Shape3 dims{10, 10, 10};
  SolverKind solver = SolverKind::GLsqr;
  double epsilon = 1.0;
  double wavenumber = 1.0;
  double boundary_a = 1.0;
  double boundary_b = 0.0;
  /// auto picks the example solution belonging to the domain.
  std::string exact = "auto";
  MuStrategy mu = MuStrategy::gcv();
  std::size_t restart = 10;
  double tau = 1e-12;
  /// Unset means the solver default (GMRES 1e-6, LSQR disabled).
  std::optional<double> tol;
  /// Unset means the solver default (GMRES 10 cycles, LSQR 200 steps).
  std::optional<std::size_t> maxit;
  Compression compress = Compression::Dense;
  double eta = 2.0;
  double aca_tol = 1e-6;
  std::size_t leaf_threshold = 0;
  std::uint64_t seed = 1;
  std::string out;
  /// Optional CSV of (iteration, relative_error).
  std::string history;

  /// Keys given explicitly through set().
  std::set<std::string> explicit_keys;

  void set(const std::string& key, const std::string& value);
  void validate() const;

  [[nodiscard]] SolverConfig solver_config() const;
  [[nodiscard]] HelmholtzProblem problem() const;
  [[nodiscard]] MQKernel kernel() const { return MQKernel(epsilon); }
  [[nodiscard]] HParams hparams() const { return {eta, aca_tol, leaf_threshold}; }
  [[nodiscard]] PointSet points() const;

  /// Fully resolved "key = value" lines, readable back through parse_config.
  [[nodiscard]] std::string str() const;
};

/// Reads "key = value" lines; '#' starts a comment.
[[nodiscard]] ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});

/// Like parse_config, but a value may be a comma-separated list. The result
/// is the cartesian product, earlier keys varying slowest.
[[nodiscard]] std::vector<ExperimentConfig> parse_config_matrix(std::istream& in, const ExperimentConfig& base = {});

/// An error raised inside run_experiment, carrying the resolved config.
class ExperimentError : public std::runtime_error {
 public:
  ExperimentError(const std::string& what, std::string config)
      : std::runtime_error(what), config_(std::move(config)) {}
  [[nodiscard]] const std::string& config() const noexcept { return config_; }

 private:
  std::string config_;
};

struct RunRecord {
  ExperimentConfig config;
  SolveReport report;
  double relative_error = 0.0;
  double assembly_seconds = 0.0;
  double solve_seconds = 0.0;
  /// Process CPU time of the whole run.
  double cpu_seconds = 0.0;
  std::optional<CompressionStats> compression;
  /// Relative error of every iterate, when requested.
  std::vector<double> error_history;

  /// Config followed by results as "key = value" lines.
  [[nodiscard]] std::string report_text() const;
};

/// |u_exact - u|_F / |u_exact|_F
[[nodiscard]] double compute_relative_error(const Tensor3& u, const Tensor3& u_exact);

/// points -> H and F -> solve H *_3 Y = F -> U = A *_3 Y -> relative error.
[[nodiscard]] RunRecord run_experiment(const ExperimentConfig& cfg, bool track_error_history = false);

struct TableRow {
  std::string distribution;
  /// M when M = N = P, otherwise "MxNxP".
  std::string size;
  std::string method;
  double relative_error = 0.0;
  double cpu_seconds = 0.0;
  std::size_t iterations = 0;
  double mu_final = 0.0;
  /// Empty for successful runs.
  std::string error;
};

[[nodiscard]] TableRow table_row(const RunRecord& rec);

/// Runs every config; a failing run becomes a row with the error column set.
[[nodiscard]] std::vector<TableRow> run_table(const std::vector<ExperimentConfig>& configs);

void write_table_csv(std::ostream& out, const std::vector<TableRow>& rows);
[[nodiscard]] std::vector<TableRow> read_table_csv(std::istream& in);

void write_history_csv(std::ostream& out, const std::vector<double>& errors);

/// %.17g, enough to round-trip any double.
[[nodiscard]] std::string format_double(double x);

}  // namespace rtk
