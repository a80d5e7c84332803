#include "rtk/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

namespace {

// Flags shared by `solve` and the config file, in the order they are applied.
const char* const kSolveKeys[] = {"domain",  "dist", "solver", "epsilon",  "wavenumber", "boundary-a",
                                  "boundary-b", "exact", "mu", "restart", "tau",        "tol",
                                  "maxit",   "compress", "eta", "aca-tol", "leaf-threshold", "seed",
                                  "out",     "history"};

int write_or_print(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream os(path);
  if (!os) {
    std::cerr << "error: cannot write " << path << '\n';
    return 1;
  }
  os << text;
  return 0;
}

int run_solve(const std::string& config_path, const std::map<std::string, std::string>& flags,
              const std::vector<std::size_t>& dims) {
  rtk::ExperimentConfig cfg;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config file " + config_path);
    cfg = rtk::parse_config(in);
  }
  for (const char* key : kSolveKeys) {
    if (auto it = flags.find(key); it != flags.end()) cfg.set(key, it->second);
  }
  if (!dims.empty()) {
    cfg.set("dims", std::to_string(dims[0]) + ' ' + std::to_string(dims[1]) + ' ' + std::to_string(dims[2]));
  }

  const rtk::RunRecord rec = rtk::run_experiment(cfg, !cfg.history.empty());
  if (!cfg.history.empty()) {
    std::ofstream hs(cfg.history);
    if (!hs) throw std::runtime_error("cannot write " + cfg.history);
    rtk::write_history_csv(hs, rec.error_history);
  }
  return write_or_print(cfg.out, rec.report_text());
}

int run_table(const std::string& config_path, const std::string& out) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open config file " + config_path);
  const auto configs = rtk::parse_config_matrix(in);
  const auto rows = rtk::run_table(configs);
  std::ostringstream os;
  rtk::write_table_csv(os, rows);
  return write_or_print(out, os.str());
}

int run_points(const std::string& domain, const std::string& dist, const std::vector<std::size_t>& dims,
               std::uint64_t seed, const std::string& out) {
  const rtk::Shape3 shape(dims[0], dims[1], dims[2]);
  const rtk::Distribution d = rtk::parse_distribution(dist);
  rtk::PointSet pts = domain == "cube"     ? rtk::gen_cube(shape, d, seed)
                      : domain == "sphere" ? rtk::gen_sphere(shape, d, seed)
                                           : rtk::gen_casing(shape, d, seed);
  rtk::save_points(pts, out);
  std::cout << "wrote " << pts.size() << " points (" << pts.n_boundary() << " boundary) to " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor Krylov solvers for MQ-RBF Helmholtz collocation"};
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "Run one experiment and print a key = value report");
  std::string solve_config;
  std::map<std::string, std::string> flags;
  std::vector<std::size_t> dims;
  solve->add_option("--config", solve_config, "key = value file; flags override it")->check(CLI::ExistingFile);
  solve->add_option("--dims", dims, "Extents M N P")->expected(3);
  for (const char* key : kSolveKeys) {
    solve->add_option_function<std::string>(
        std::string("--") + key, [&flags, key](const std::string& v) { flags[key] = v; }, key);
  }

  auto* table = app.add_subcommand("table", "Run a grid of experiments and write one CSV row per run");
  std::string table_config;
  std::string table_out;
  table->add_option("--config", table_config, "key = value file; comma-separated values expand")
      ->required()
      ->check(CLI::ExistingFile);
  table->add_option("--out", table_out, "CSV path (default stdout)");

  auto* points = app.add_subcommand("points", "Generate a collocation point file");
  std::string pdomain = "casing";
  std::string pdist = "halton";
  std::vector<std::size_t> pdims{17, 17, 17};
  std::uint64_t pseed = 1;
  std::string pout;
  points->add_option("--domain", pdomain)->check(CLI::IsMember({"cube", "sphere", "casing"}));
  points->add_option("--dist", pdist)->check(CLI::IsMember({"uniform", "random", "halton"}));
  points->add_option("--dims", pdims)->expected(3);
  points->add_option("--seed", pseed);
  points->add_option("--out", pout)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return run_solve(solve_config, flags, dims);
    if (*table) return run_table(table_config, table_out);
    return run_points(pdomain, pdist, pdims, pseed, pout);
  } catch (const rtk::ExperimentError& e) {
    std::cerr << "error: " << e.what() << "\n" << e.config();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return 1;
}
