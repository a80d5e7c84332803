#include "rtk/experiment.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

using namespace rtk;

TEST(RelativeError, Basics) {
  const Shape3 s(2, 2, 2);
  Tensor3 u(s, {1, 2, 3, 4, 5, 6, 7, 8});
  EXPECT_EQ(compute_relative_error(u, u), 0.0);
  EXPECT_EQ(compute_relative_error(Tensor3::zeros(s), u), 1.0);
  EXPECT_THROW((void)compute_relative_error(u, Tensor3::zeros(s)), std::invalid_argument);
  EXPECT_THROW((void)compute_relative_error(u, Tensor3(Shape3(2, 2, 1))), DimensionError);
}

TEST(RelativeError, MatchesIndependentSum) {
  const Shape3 s(3, 2, 2);
  Tensor3 a(s), b(s);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = std::sin(1.0 + static_cast<double>(i));
    b[i] = std::cos(2.0 * static_cast<double>(i));
    num += (b[i] - a[i]) * (b[i] - a[i]);
    den += b[i] * b[i];
  }
  EXPECT_NEAR(compute_relative_error(a, b), std::sqrt(num / den), 1e-15);
}

TEST(Config, SetAndPrintRoundTrip) {
  ExperimentConfig c;
  c.set("domain", "cube");
  c.set("dist", "halton");
  c.set("dims", "4 5 6");
  c.set("solver", "ggmres");
  c.set("mu", "fixed:0.001");
  c.set("aca-tol", "1e-7");
  c.set("seed", "42");
  std::istringstream in(c.str());
  const ExperimentConfig back = parse_config(in);
  EXPECT_EQ(back.str(), c.str());
  EXPECT_EQ(back.dims, Shape3(4, 5, 6));
  EXPECT_EQ(back.solver_config().maxit, 10u);
  EXPECT_EQ(back.aca_tol, 1e-7);
}

TEST(Config, RejectsBadInput) {
  ExperimentConfig c;
  EXPECT_THROW(c.set("colour", "red"), std::invalid_argument);
  EXPECT_THROW(c.set("epsilon", "abc"), std::invalid_argument);
  EXPECT_THROW(c.set("maxit", "-3"), std::invalid_argument);
  EXPECT_THROW(c.set("dims", "3 3"), std::invalid_argument);
  EXPECT_THROW(c.set("domain", "torus"), std::invalid_argument);
  c.set("epsilon", "-1");
  EXPECT_THROW(c.validate(), std::invalid_argument);
  std::istringstream bad("epsilon 2\n");
  EXPECT_THROW((void)parse_config(bad), std::invalid_argument);
}

TEST(Config, SolverDependentDefaults) {
  ExperimentConfig c;
  c.solver = SolverKind::GLsqr;
  EXPECT_EQ(c.solver_config().maxit, 200u);
  EXPECT_EQ(c.solver_config().tol, 0.0);
  c.solver = SolverKind::GGmres;
  EXPECT_EQ(c.solver_config().maxit, 10u);
  EXPECT_EQ(c.solver_config().tol, 1e-6);
  c.set("maxit", "3");
  EXPECT_EQ(c.solver_config().maxit, 3u);
}

TEST(Config, MatrixExpandsCartesianProduct) {
  std::istringstream in(
      "domain = sphere\n"
      "dist = random, uniform, halton  # three\n"
      "size = 8, 10\n"
      "solver = ggmres, glsqr\n");
  const auto cfgs = parse_config_matrix(in);
  ASSERT_EQ(cfgs.size(), 12u);
  EXPECT_EQ(cfgs[0].dist, Distribution::Random);
  EXPECT_EQ(cfgs[0].dims, Shape3(8, 8, 8));
  EXPECT_EQ(cfgs[0].solver, SolverKind::GGmres);
  EXPECT_EQ(cfgs[1].solver, SolverKind::GLsqr);
  EXPECT_EQ(cfgs[2].dims, Shape3(10, 10, 10));
  EXPECT_EQ(cfgs[11].dist, Distribution::Halton);
}

TEST(Experiment, DirichletCubeMatchesDirectSolve) {
  // 3x3x3 cube with Dirichlet data only on 26 of 27 points; a small system
  // that LSQR over the full subspace solves like a direct method.
  ExperimentConfig c;
  c.domain = "cube";
  c.dist = Distribution::Uniform;
  c.dims = Shape3(3, 3, 3);
  c.mu = MuStrategy::fixed(0.0);
  c.maxit = 27;
  const RunRecord rec = run_experiment(c);

  const PointSet ps = c.points();
  const HelmholtzProblem pr = c.problem();
  const Operator6 h = assemble_H(ps, c.kernel(), pr);
  Tensor3 y(ps.shape());
  y.vec() = h.flat().partialPivLu().solve(assemble_F(ps, pr).vec());
  const Tensor3 u_direct = evaluate_U(assemble_A(ps, c.kernel()), y);
  const Tensor3 u_exact = sample_exact(ps, pr.exact);
  const double direct_error = compute_relative_error(u_direct, u_exact);
  EXPECT_LE(std::abs(rec.relative_error - direct_error), 1e-8);
  EXPECT_LE(rec.relative_error, 1e-2);
}

TEST(Experiment, DeterministicUpToTiming) {
  ExperimentConfig c;
  c.domain = "sphere";
  c.dims = Shape3(5, 5, 5);
  c.seed = 3;
  const RunRecord a = run_experiment(c, true);
  const RunRecord b = run_experiment(c, true);
  EXPECT_EQ(a.relative_error, b.relative_error);
  EXPECT_EQ(a.report.solution, b.report.solution);
  EXPECT_EQ(a.report.mu_history, b.report.mu_history);
  EXPECT_EQ(a.error_history, b.error_history);
  EXPECT_EQ(a.error_history.size(), a.report.outer_iterations);
  EXPECT_EQ(a.error_history.back(), a.relative_error);
}

TEST(Experiment, HierarchicalModeRecordsCompression) {
  ExperimentConfig c;
  c.domain = "cube";
  c.dist = Distribution::Halton;
  c.dims = Shape3(6, 6, 6);
  c.compress = Compression::HMatrix;
  c.leaf_threshold = 24;
  c.maxit = 20;
  const RunRecord rec = run_experiment(c);
  ASSERT_TRUE(rec.compression.has_value());
  EXPECT_EQ(rec.compression->n_points, 216u);
  EXPECT_GE(rec.relative_error, 0.0);
  const std::string text = rec.report_text();
  EXPECT_NE(text.find("compress = hmatrix"), std::string::npos);
  EXPECT_NE(text.find("lowrank_blocks = "), std::string::npos);
  EXPECT_NE(text.find("defaulted_unstated = epsilon wavenumber restart tol"), std::string::npos);
}

TEST(Experiment, FailuresCarryConfig) {
  ExperimentConfig c;
  c.domain = "file:/nonexistent/points.txt";
  try {
    (void)run_experiment(c);
    FAIL() << "expected ExperimentError";
  } catch (const ExperimentError& e) {
    EXPECT_NE(e.config().find("domain = file:/nonexistent/points.txt"), std::string::npos);
  }
}

TEST(Table, FailedRunsBecomeRowsAndCsvRoundTrips) {
  ExperimentConfig ok;
  ok.domain = "cube";
  ok.dims = Shape3(4, 4, 4);
  ok.solver = SolverKind::GGmres;
  ExperimentConfig bad = ok;
  bad.domain = "file:/nonexistent";
  const auto rows = run_table({ok, bad});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_TRUE(rows[0].error.empty());
  EXPECT_FALSE(rows[1].error.empty());
  EXPECT_EQ(rows[0].size, "4");
  EXPECT_EQ(rows[0].method, "ggmres");

  std::stringstream csv;
  write_table_csv(csv, rows);
  const auto back = read_table_csv(csv);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].relative_error, rows[0].relative_error);
  EXPECT_EQ(back[0].cpu_seconds, rows[0].cpu_seconds);
  EXPECT_EQ(back[0].mu_final, rows[0].mu_final);
  EXPECT_EQ(back[0].iterations, rows[0].iterations);
  EXPECT_TRUE(std::isnan(back[1].relative_error));
  EXPECT_EQ(back[1].error, rows[1].error);
  EXPECT_THROW((void)run_table({}), std::invalid_argument);
}

TEST(Table, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, -2.5}) {
    EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
  }
}

TEST(History, CsvLayout) {
  std::ostringstream os;
  write_history_csv(os, {0.5, 0.25});
  EXPECT_EQ(os.str(), "iteration,relative_error\n1,0.5\n2,0.25\n");
}
