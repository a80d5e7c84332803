#include "rtk/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <istream>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

namespace rtk {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  // strtod rather than stod: subnormals must parse, not throw.
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || std::isspace(static_cast<unsigned char>(text[0]))) {
    throw std::invalid_argument(key + ": expected a number, got '" + text + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!text.empty() && text.front() != '-') v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw std::invalid_argument(key + ": expected a nonnegative integer, got '" + text + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) parts.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

// Strip a comment and split "key = value"; returns false for blank lines.
bool split_line(const std::string& raw, std::size_t lineno, std::string& key, std::string& value) {
  const std::string line = trim(raw.substr(0, raw.find('#')));
  if (line.empty()) return false;
  const auto eq = line.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected 'key = value'");
  }
  key = trim(line.substr(0, eq));
  value = trim(line.substr(eq + 1));
  if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
  return true;
}

double cpu_now() { return static_cast<double>(std::clock()) / CLOCKS_PER_SEC; }

std::string join(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ' ';
    s += format_double(xs[i]);
  }
  return s;
}

}  // namespace

SolverKind parse_solver(const std::string& name) {
  if (name == "ggmres") return SolverKind::GGmres;
  if (name == "glsqr") return SolverKind::GLsqr;
  throw std::invalid_argument("unknown solver '" + name + "' (expected ggmres or glsqr)");
}

std::string to_string(SolverKind s) { return s == SolverKind::GGmres ? "ggmres" : "glsqr"; }

Compression parse_compression(const std::string& name) {
  if (name == "dense") return Compression::Dense;
  if (name == "hmatrix") return Compression::HMatrix;
  throw std::invalid_argument("unknown compression '" + name + "' (expected dense or hmatrix)");
}

std::string to_string(Compression c) { return c == Compression::Dense ? "dense" : "hmatrix"; }

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "domain") {
    if (value != "cube" && value != "sphere" && value != "casing" && value.rfind("file:", 0) != 0) {
      throw std::invalid_argument("domain: expected cube, sphere, casing or file:PATH, got '" + value + "'");
    }
    domain = value;
  } else if (key == "dist") {
    dist = parse_distribution(value);
  } else if (key == "dims") {
    std::istringstream is(value);
    std::string a, b, c, extra;
    if (!(is >> a >> b >> c) || (is >> extra)) throw std::invalid_argument("dims: expected 'M N P', got '" + value + "'");
    dims = Shape3(parse_unsigned(key, a), parse_unsigned(key, b), parse_unsigned(key, c));
  } else if (key == "size") {
    const auto n = parse_unsigned(key, value);
    dims = Shape3(n, n, n);
  } else if (key == "solver") {
    solver = parse_solver(value);
  } else if (key == "epsilon") {
    epsilon = parse_double(key, value);
  } else if (key == "wavenumber") {
    wavenumber = parse_double(key, value);
  } else if (key == "boundary-a") {
    boundary_a = parse_double(key, value);
  } else if (key == "boundary-b") {
    boundary_b = parse_double(key, value);
  } else if (key == "exact") {
    if (value != "auto" && value != "sphere" && value != "cube" && value != "casing") {
      throw std::invalid_argument("exact: expected auto, sphere, cube or casing, got '" + value + "'");
    }
    exact = value;
  } else if (key == "mu") {
    mu = MuStrategy::parse(value);
  } else if (key == "restart") {
    restart = parse_unsigned(key, value);
  } else if (key == "tau") {
    tau = parse_double(key, value);
  } else if (key == "tol") {
    tol = parse_double(key, value);
  } else if (key == "maxit") {
    maxit = parse_unsigned(key, value);
  } else if (key == "compress") {
    compress = parse_compression(value);
  } else if (key == "eta") {
    eta = parse_double(key, value);
  } else if (key == "aca-tol") {
    aca_tol = parse_double(key, value);
  } else if (key == "leaf-threshold") {
    leaf_threshold = parse_unsigned(key, value);
  } else if (key == "seed") {
    seed = parse_unsigned(key, value);
  } else if (key == "out") {
    out = value;
  } else if (key == "history") {
    history = value;
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
  explicit_keys.insert(key == "size" ? "dims" : key);
}

void ExperimentConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("epsilon must be positive");
  if (!std::isfinite(wavenumber)) throw std::invalid_argument("wavenumber must be finite");
  if (restart < 1) throw std::invalid_argument("restart must be at least 1");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (tol && !(*tol >= 0.0)) throw std::invalid_argument("tol must be nonnegative");
  if (maxit && *maxit < 1) throw std::invalid_argument("maxit must be at least 1");
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (!(aca_tol > 0.0)) throw std::invalid_argument("aca-tol must be positive");
  problem().validate();
  solver_config().validate();
}

SolverConfig ExperimentConfig::solver_config() const {
  SolverConfig s = solver == SolverKind::GGmres ? SolverConfig::gmres_defaults() : SolverConfig::lsqr_defaults();
  s.restart = restart;
  s.tau = tau;
  if (tol) s.tol = *tol;
  if (maxit) s.maxit = *maxit;
  s.mu = mu;
  return s;
}

HelmholtzProblem ExperimentConfig::problem() const {
  HelmholtzProblem p;
  p.wavenumber = wavenumber;
  p.boundary_a = boundary_a;
  p.boundary_b = boundary_b;
  std::string which = exact;
  if (which == "auto") which = domain == "cube" ? "cube" : domain == "sphere" ? "sphere" : "casing";
  if (which == "cube") {
    p.exact = ExactSolution::cube_example();
  } else if (which == "sphere") {
    p.exact = ExactSolution::sphere_example();
  } else {
    p.exact = ExactSolution::casing_example();
  }
  return p;
}

PointSet ExperimentConfig::points() const {
  if (domain == "cube") return gen_cube(dims, dist, seed);
  if (domain == "sphere") return gen_sphere(dims, dist, seed);
  if (domain == "casing") return gen_casing(dims, dist, seed);
  return load_points(domain.substr(5));
}

std::string ExperimentConfig::str() const {
  const SolverConfig s = solver_config();
  std::ostringstream os;
  os << "domain = " << domain << '\n'
     << "dist = " << to_string(dist) << '\n'
     << "dims = " << dims.m << ' ' << dims.n << ' ' << dims.p << '\n'
     << "solver = " << to_string(solver) << '\n'
     << "epsilon = " << format_double(epsilon) << '\n'
     << "wavenumber = " << format_double(wavenumber) << '\n'
     << "boundary-a = " << format_double(boundary_a) << '\n'
     << "boundary-b = " << format_double(boundary_b) << '\n'
     << "exact = " << exact << '\n'
     << "mu = " << mu.str() << '\n'
     << "restart = " << s.restart << '\n'
     << "tau = " << format_double(s.tau) << '\n'
     << "tol = " << format_double(s.tol) << '\n'
     << "maxit = " << s.maxit << '\n'
     << "compress = " << to_string(compress) << '\n'
     << "eta = " << format_double(eta) << '\n'
     << "aca-tol = " << format_double(aca_tol) << '\n'
     << "leaf-threshold = " << leaf_threshold << '\n'
     << "seed = " << seed << '\n';
  if (!out.empty()) os << "out = " << out << '\n';
  if (!history.empty()) os << "history = " << history << '\n';
  return os.str();
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::string line, key, value;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (split_line(line, lineno, key, value)) base.set(key, value);
  }
  return base;
}

std::vector<ExperimentConfig> parse_config_matrix(std::istream& in, const ExperimentConfig& base) {
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  std::string line, key, value;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!split_line(line, lineno, key, value)) continue;
    auto values = split(value, ',');
    for (const auto& v : values) {
      if (v.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty list entry");
    }
    axes.emplace_back(key, std::move(values));
  }

  std::vector<ExperimentConfig> out{base};
  for (const auto& [k, values] : axes) {
    std::vector<ExperimentConfig> next;
    next.reserve(out.size() * values.size());
    for (const auto& cfg : out) {
      for (const auto& v : values) {
        ExperimentConfig c = cfg;
        c.set(k, v);
        next.push_back(std::move(c));
      }
    }
    out = std::move(next);
  }
  return out;
}

double compute_relative_error(const Tensor3& u, const Tensor3& u_exact) {
  require_same_shape(u.shape(), u_exact.shape(), "compute_relative_error");
  const double ref = fro_norm(u_exact);
  if (!(ref > 0.0)) throw std::invalid_argument("compute_relative_error: exact solution has zero norm");
  Tensor3 d = u_exact;
  d -= u;
  return fro_norm(d) / ref;
}

RunRecord run_experiment(const ExperimentConfig& cfg, bool track_error_history) {
  using clock = std::chrono::steady_clock;
  try {
    cfg.validate();
    RunRecord rec;
    rec.config = cfg;
    const double cpu0 = cpu_now();
    const auto t0 = clock::now();

    const PointSet pts = cfg.points();
    const MQKernel kernel = cfg.kernel();
    const HelmholtzProblem problem = cfg.problem();
    const Shape3 shape = pts.shape();

    std::unique_ptr<LinearMap> h;
    std::unique_ptr<LinearMap> a;
    if (cfg.compress == Compression::Dense) {
      h = std::make_unique<Operator6>(assemble_H(pts, kernel, problem));
      a = std::make_unique<Operator6>(assemble_A(pts, kernel));
    } else {
      auto hop = std::make_unique<HOperator>(assemble_h(pts, kernel, problem, cfg.hparams()));
      rec.compression = hop->stats();
      h = std::move(hop);
      // A is only needed per iterate for the convergence curve.
      if (track_error_history) a = std::make_unique<HOperator>(assemble_h(pts, kernel, cfg.hparams()));
    }
    const Tensor3 f = assemble_F(pts, problem);
    const Tensor3 u_exact = sample_exact(pts, problem.exact);
    const auto t1 = clock::now();
    rec.assembly_seconds = std::chrono::duration<double>(t1 - t0).count();

    SolverConfig scfg = cfg.solver_config();
    if (track_error_history) {
      scfg.on_iterate = [&](std::size_t, const Tensor3& y) {
        rec.error_history.push_back(compute_relative_error(a->apply(y), u_exact));
      };
    }
    rec.report = cfg.solver == SolverKind::GGmres ? gmres_tikhonov(*h, f, Tensor3::zeros(shape), scfg)
                                                  : lsqr_tikhonov(*h, f, scfg);

    const Tensor3 u = cfg.compress == Compression::Dense ? a->apply(rec.report.solution)
                                                         : evaluate_U_direct(pts, kernel, rec.report.solution);
    rec.relative_error = compute_relative_error(u, u_exact);
    rec.solve_seconds = std::chrono::duration<double>(clock::now() - t1).count();
    rec.cpu_seconds = cpu_now() - cpu0;
    return rec;
  } catch (const ExperimentError&) {
    throw;
  } catch (const std::exception& e) {
    throw ExperimentError(e.what(), cfg.str());
  }
}

std::string RunRecord::report_text() const {
  std::ostringstream os;
  os << config.str();
  // Physical parameters with no canonical value; flag those left at their defaults.
  std::string unstated;
  for (const char* k : {"epsilon", "wavenumber", "restart", "tol"}) {
    if (!config.explicit_keys.count(k)) unstated += unstated.empty() ? k : std::string(" ") + k;
  }
  if (!unstated.empty()) os << "defaulted_unstated = " << unstated << '\n';
  os << "relative_error = " << format_double(relative_error) << '\n'
     << "iterations = " << report.outer_iterations << '\n'
     << "inner_steps = " << report.inner_steps << '\n'
     << "termination = " << to_string(report.termination) << '\n'
     << "mu_final = " << format_double(report.mu_history.empty() ? 0.0 : report.mu_history.back()) << '\n'
     << "assembly_seconds = " << format_double(assembly_seconds) << '\n'
     << "solve_seconds = " << format_double(solve_seconds) << '\n'
     << "cpu_seconds = " << format_double(cpu_seconds) << '\n'
     << "mu_history = " << join(report.mu_history) << '\n'
     << "residual_history = " << join(report.residual_history) << '\n'
     << "relchange_history = " << join(report.relchange_history) << '\n';
  if (!error_history.empty()) os << "error_history = " << join(error_history) << '\n';
  if (compression) os << compression->report();
  return os.str();
}

TableRow table_row(const RunRecord& rec) {
  TableRow row;
  const ExperimentConfig& c = rec.config;
  row.distribution = to_string(c.dist);
  const Shape3& d = c.dims;
  row.size = d.m == d.n && d.n == d.p ? std::to_string(d.m)
                                      : std::to_string(d.m) + "x" + std::to_string(d.n) + "x" + std::to_string(d.p);
  row.method = to_string(c.solver);
  row.relative_error = rec.relative_error;
  row.cpu_seconds = rec.cpu_seconds;
  row.iterations = rec.report.outer_iterations;
  row.mu_final = rec.report.mu_history.empty() ? 0.0 : rec.report.mu_history.back();
  return row;
}

std::vector<TableRow> run_table(const std::vector<ExperimentConfig>& configs) {
  if (configs.empty()) throw std::invalid_argument("run_table: no configurations");
  std::vector<TableRow> rows;
  rows.reserve(configs.size());
  for (const auto& cfg : configs) {
    try {
      rows.push_back(table_row(run_experiment(cfg)));
    } catch (const std::exception& e) {
      RunRecord failed;
      failed.config = cfg;
      TableRow row = table_row(failed);
      row.relative_error = std::numeric_limits<double>::quiet_NaN();
      row.cpu_seconds = std::numeric_limits<double>::quiet_NaN();
      row.mu_final = std::numeric_limits<double>::quiet_NaN();
      row.error = e.what();
      // Keep the CSV one record per line.
      for (char& ch : row.error) {
        if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_table_csv(std::ostream& out, const std::vector<TableRow>& rows) {
  out << "distribution,M=N=P,method,relative_error,cpu_seconds,iterations,mu_final,error\n";
  for (const auto& r : rows) {
    out << r.distribution << ',' << r.size << ',' << r.method << ',' << format_double(r.relative_error) << ','
        << format_double(r.cpu_seconds) << ',' << r.iterations << ',' << format_double(r.mu_final) << ',' << r.error
        << '\n';
  }
}

std::vector<TableRow> read_table_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("read_table_csv: missing header");
  std::vector<TableRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 8) {
      throw std::invalid_argument("read_table_csv: line " + std::to_string(lineno) + " has " +
                                  std::to_string(f.size()) + " fields, expected 8");
    }
    TableRow r;
    r.distribution = f[0];
    r.size = f[1];
    r.method = f[2];
    r.relative_error = parse_double("relative_error", f[3]);
    r.cpu_seconds = parse_double("cpu_seconds", f[4]);
    r.iterations = parse_unsigned("iterations", f[5]);
    r.mu_final = parse_double("mu_final", f[6]);
    r.error = f[7];
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_history_csv(std::ostream& out, const std::vector<double>& errors) {
  out << "iteration,relative_error\n";
  for (std::size_t i = 0; i < errors.size(); ++i) out << i + 1 << ',' << format_double(errors[i]) << '\n';
}

}  // namespace rtk
