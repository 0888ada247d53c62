#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "tdcshell/assembly.hpp"
#include "tdcshell/errors.hpp"
#include "tdcshell/linear_solver.hpp"
#include "tdcshell/postprocess.hpp"

using namespace tdcshell;

namespace {

SaddleSystem small_system(const Eigen::MatrixXd& dense, const Eigen::VectorXd& rhs) {
  SaddleSystem sys;
  sys.matrix = dense.sparseView();
  sys.matrix.makeCompressed();
  sys.rhs = rhs;
  return sys;
}

ShellProblem clamped_plate(int p, int n) {
  ShellProblem prob;
  prob.geom = make_analytic(FlatPlate{});
  prob.patch = field_patch_for(*prob.geom, p, n);
  prob.mat = Material{1000.0, 0.3, 1.0, 0.05};
  prob.f = [](const Vec3& x) { return Vec3(0.1, 0.0, -1.0 - x[0]); };
  prob.edge(Edge::r_min) = EdgeCondition::clamped();
  prob.edge(Edge::s_max) = EdgeCondition::simply_supported();
  return prob;
}

}  // namespace

TEST(LinearSolver, TwoByTwoSaddle) {
  Eigen::MatrixXd m(2, 2);
  m << 1, 1, 1, 0;
  const SolveReport rep = solve(small_system(m, Eigen::Vector2d(2, 1)));
  EXPECT_NEAR(rep.solution[0], 1.0, 1e-14);
  EXPECT_NEAR(rep.solution[1], 1.0, 1e-14);
  EXPECT_LT(rep.residual_norm_rel, 1e-14);
}

TEST(LinearSolver, ClampedPlateResidualAndConstraints) {
  auto prob = std::make_shared<ShellProblem>(clamped_plate(3, 6));
  const SolvedProblem solved = solve_problem(prob);
  EXPECT_LT(solved.report.residual_norm_rel, 1e-10);
  EXPECT_FALSE(solved.report.factorization_kind.empty());
  const ConstraintQuality cq = constraint_quality(solved.solution, solved.system);
  EXPECT_LT(cq.lambda_n_residual, 1e-8);
  EXPECT_LT(cq.boundary_u_residual, 1e-8);
}

TEST(LinearSolver, SolvingTwiceIsBitIdentical) {
  const SaddleSystem sys = assemble(apply_load_case(BenchmarkCase::scordelis_lo, 3, 4));
  const SolveReport a = solve(sys);
  const SolveReport b = solve(sys);
  ASSERT_EQ(a.solution.size(), b.solution.size());
  EXPECT_TRUE(a.solution == b.solution);
}

TEST(LinearSolver, FreeFloatingShellIsSingular) {
  ShellProblem prob = clamped_plate(2, 2);
  for (Edge e : {Edge::r_min, Edge::r_max, Edge::s_min, Edge::s_max}) prob.edge(e) = EdgeCondition::free();
  const SaddleSystem sys = assemble(prob);
  try {
    solve(sys);
    FAIL() << "expected SingularSystemError";
  } catch (const SingularSystemError& e) {
    EXPECT_GE(e.null_space_estimate(), 1);
    EXPECT_NE(std::string(e.what()).find("null direction"), std::string::npos);
  }
}

TEST(LinearSolver, ExactlySingularMatrixIsReported) {
  Eigen::MatrixXd m(3, 3);
  m << 1, 2, 0, 2, 4, 0, 0, 0, 1;
  EXPECT_THROW(solve(small_system(m, Eigen::Vector3d(1, 2, 3))), SingularSystemError);
}

TEST(LinearSolver, RejectsMismatchedSystems) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_THROW(solve(small_system(m, Eigen::Vector2d(1, 1))), ArgumentError);
}

TEST(LinearSolver, MatrixMarketDump) {
  Eigen::MatrixXd m(2, 2);
  m << 1, 1, 1, 0;
  const SaddleSystem sys = small_system(m, Eigen::Vector2d(2, 1));
  const auto dir = std::filesystem::temp_directory_path() / "tdcshell_mm_test";
  std::filesystem::create_directories(dir);
  write_matrix_market(sys, (dir / "m.mtx").string(), (dir / "b.mtx").string());
  std::ifstream is(dir / "m.mtx");
  std::string header;
  std::getline(is, header);
  EXPECT_EQ(header, "%%MatrixMarket matrix coordinate real general");
  int rows = 0, cols = 0, nnz = 0;
  is >> rows >> cols >> nnz;
  EXPECT_EQ(rows, 2);
  EXPECT_EQ(cols, 2);
  EXPECT_EQ(nnz, 3);
  std::filesystem::remove_all(dir);
}
