#include <cmath>
#include <cstdlib>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "tdcshell/assembly.hpp"
#include "tdcshell/errors.hpp"
#include "tdcshell/linear_solver.hpp"
#include "tdcshell/postprocess.hpp"
#include "tdcshell/quadrature.hpp"

#include "oracles.hpp"

using namespace tdcshell;

namespace {

ShellProblem plate_problem(int p, int n, double lx = 1.0, double ly = 1.0) {
  ShellProblem prob;
  prob.case_id = "plate";
  prob.geom = make_analytic(FlatPlate{lx, ly});
  prob.patch = field_patch_for(*prob.geom, p, n);
  prob.mat = Material{1000.0, 0.25, 1.0, 0.1};
  return prob;
}

VectorField constant(const Vec3& v) {
  return [v](const Vec3&) { return v; };
}

double max_asymmetry(const SparseMatrixR& m) {
  const SparseMatrixR d = m - SparseMatrixR(m.transpose());
  double mx = 0.0;
  for (int i = 0; i < d.outerSize(); ++i) {
    for (SparseMatrixR::InnerIterator it(d, i); it; ++it) mx = std::max(mx, std::abs(it.value()));
  }
  return mx;
}

double max_abs(const SparseMatrixR& m) {
  double mx = 0.0;
  for (int i = 0; i < m.outerSize(); ++i) {
    for (SparseMatrixR::InnerIterator it(m, i); it; ++it) mx = std::max(mx, std::abs(it.value()));
  }
  return mx;
}

// integral of t^k over [0, 1]
double monomial_integral(int k) { return 1.0 / (k + 1); }

}  // namespace

TEST(Quadrature, RuleSizesAndWeights) {
  const auto rule = quadrature_rule(1, 1, 0);
  ASSERT_EQ(rule.size(), 4u);
  double sum = 0.0;
  for (const auto& q : rule) {
    EXPECT_GT(q.weight, 0.0);
    sum += q.weight;
  }
  EXPECT_NEAR(sum, 1.0, 1e-15);
  EXPECT_EQ(quadrature_rule(3, 2, 2).size(), 6u * 5u);
  EXPECT_THROW(quadrature_rule(0, 2, 0), ArgumentError);
}

TEST(Quadrature, MonomialExactness) {
  // p + 1 + bump points integrate degree 2 (p + 1 + bump) - 1 exactly
  for (int p = 1; p <= 6; ++p) {
    for (int bump : {0, 2}) {
      const int exact = 2 * (p + 1 + bump) - 1;
      const auto rule = quadrature_rule(p, p, bump);
      for (int a = 0; a <= exact; ++a) {
        const int b = exact - a;
        double q = 0.0;
        for (const auto& pt : rule) q += pt.weight * std::pow(pt.rs[0], a) * std::pow(pt.rs[1], b);
        EXPECT_NEAR(q, monomial_integral(a) * monomial_integral(b), 1e-14) << "p=" << p << " a=" << a;
      }
      // one degree more is no longer exact in a single direction
      double q = 0.0;
      for (const auto& pt : rule) q += pt.weight * std::pow(pt.rs[0], exact + 1);
      EXPECT_GT(std::abs(q - monomial_integral(exact + 1)), 1e-12);
    }
  }
}

TEST(Assembly, DofBlocksAreContiguous) {
  ShellProblem prob = plate_problem(2, 3);
  prob.edge(Edge::r_min) = EdgeCondition::clamped();
  prob.edge(Edge::s_max) = EdgeCondition::symmetry();
  const DofMap d = build_dof_map(prob);
  EXPECT_EQ(d.num_nodes, 25);
  EXPECT_EQ(d.u_offset, 0);
  EXPECT_EQ(d.w_offset, 3 * d.num_nodes);
  EXPECT_EQ(d.lambda_n_offset, 6 * d.num_nodes);
  EXPECT_EQ(d.num_lambda_n, d.num_nodes);
  EXPECT_EQ(d.lambda_u_offset, d.lambda_n_offset + d.num_lambda_n);
  EXPECT_EQ(d.lambda_w_offset, d.lambda_u_offset + d.num_lambda_u_rows());
  EXPECT_EQ(d.total_dofs, d.lambda_w_offset + static_cast<int>(d.lambda_w.size()));
  // clamped edge: 5 functions x 3 directions for u; symmetry edge adds conormal rows except at the
  // shared corner, where x, y and z are already fixed
  EXPECT_EQ(d.lambda_u.size(), 15u + 4u);
  // clamped edge: tangent and conormal for w span the tangent plane at the corner
  EXPECT_EQ(d.lambda_w.size(), 10u + 4u);
  EXPECT_EQ(d.u_slot_of.at({Edge::s_max, d.basis_to_node[prob.patch.id(0, 4)], Direction::conormal}), -1);
  EXPECT_EQ(d.u_slot_of.at({Edge::s_max, d.basis_to_node[prob.patch.id(4, 4)], Direction::conormal}), 19 - 1);
}

TEST(Assembly, PenaltyModeHasNoSurfaceMultiplier) {
  ShellProblem prob = plate_problem(2, 2);
  prob.edge(Edge::r_min) = EdgeCondition::clamped();
  prob.mode = ConstraintMode::penalty;
  const DofMap d = build_dof_map(prob);
  EXPECT_EQ(d.num_lambda_n, 0);
  EXPECT_EQ(d.lambda_u_offset, d.lambda_n_offset);
}

TEST(Assembly, SeamNodesAreShared) {
  ShellProblem prob;
  prob.geom = make_analytic(FlowerShell{});
  prob.patch = field_patch_for(*prob.geom, 3, 4);
  prob.mat = Material{10.0, 0.3, 1.0, 0.1};
  prob.edge(Edge::s_min) = EdgeCondition::clamped();
  const DofMap d = build_dof_map(prob);
  EXPECT_EQ(d.num_nodes, (prob.patch.n_r() - 1) * prob.patch.n_s());
  for (int j = 0; j < prob.patch.n_s(); ++j) {
    EXPECT_EQ(d.basis_to_node[prob.patch.id(0, j)], d.basis_to_node[prob.patch.id(prob.patch.n_r() - 1, j)]);
  }
}

TEST(Assembly, MatrixIsSymmetricWithZeroMultiplierBlock) {
  for (BenchmarkCase c : {BenchmarkCase::scordelis_lo, BenchmarkCase::hyperbolic_paraboloid, BenchmarkCase::flower}) {
    const ShellProblem prob = apply_load_case(c, 3, 4);
    const SaddleSystem sys = assemble(prob);
    const double scale = max_abs(sys.matrix);
    EXPECT_LT(max_asymmetry(sys.matrix), 1e-10 * scale) << case_name(c);
    const int np = sys.dofs.num_primal();
    const SparseMatrixR lower = sys.matrix.bottomRightCorner(sys.dofs.total_dofs - np, sys.dofs.total_dofs - np);
    EXPECT_EQ(max_abs(lower), 0.0) << case_name(c);
  }
}

TEST(Assembly, PrimalStiffnessIsPositiveSemidefinite) {
  const ShellProblem prob = apply_load_case(BenchmarkCase::hyperbolic_paraboloid, 2, 2);
  const SaddleSystem sys = assemble(prob);
  const int np = sys.dofs.num_primal();
  const Eigen::MatrixXd k = Eigen::MatrixXd(sys.matrix).topLeftCorner(np, np);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
  EXPECT_GT(es.eigenvalues().minCoeff(), -1e-10 * es.eigenvalues().maxCoeff());
}

TEST(Assembly, FreeFlatPatchHasSixRigidModes) {
  // translations, the in-plane rotation and the two bending rotations (u = theta x X, w = theta x n)
  const ShellProblem prob = plate_problem(2, 2);
  const SaddleSystem sys = assemble(prob);
  const int np = sys.dofs.num_primal();
  const Eigen::MatrixXd k = Eigen::MatrixXd(sys.matrix).topLeftCorner(np, np);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
  const double tol = 1e-10 * k.trace();
  int zero = 0;
  for (int i = 0; i < np; ++i) zero += std::abs(es.eigenvalues()[i]) < tol;
  EXPECT_EQ(zero, 6);
}

TEST(Assembly, LoadVectorIntegratesConstantLoad) {
  const Vec3 f(0.3, -1.7, 2.2);
  ShellProblem plate = plate_problem(3, 3, 2.0, 0.5);
  plate.f = constant(f);
  ShellProblem roof = apply_load_case(BenchmarkCase::scordelis_lo, 3, 3);
  const CylinderRoof geo;
  const double roof_area = geo.radius * 2.0 * geo.half_angle * geo.length;
  for (const auto& [prob, area, load] :
       {std::tuple<const ShellProblem&, double, Vec3>{plate, 1.0, f},
        std::tuple<const ShellProblem&, double, Vec3>{roof, roof_area, Vec3(0.0, 0.0, -90.0)}}) {
    const SaddleSystem sys = assemble(prob);
    for (int c = 0; c < 3; ++c) {
      double total = 0.0;
      for (int node = 0; node < sys.dofs.num_nodes; ++node) total += sys.rhs[sys.dofs.u_dof(node, c)];
      EXPECT_NEAR(total, load[c] * area, 1e-10 * std::max(1.0, std::abs(load[c] * area)));
    }
  }
}

TEST(Assembly, ZeroLoadClampedPlateHasZeroSolution) {
  ShellProblem prob = plate_problem(3, 3);
  for (Edge e : {Edge::r_min, Edge::r_max, Edge::s_min, Edge::s_max}) prob.edge(e) = EdgeCondition::clamped();
  const SaddleSystem sys = assemble(prob);
  EXPECT_EQ(sys.rhs.norm(), 0.0);
  const SolveReport rep = solve(sys);
  EXPECT_EQ(rep.solution.lpNorm<Eigen::Infinity>(), 0.0);
}

TEST(Assembly, MembranePatchTestIsExact) {
  for (int p : {2, 3, 4}) {
    for (int n : {1, 3}) EXPECT_LT(oracle::membrane_patch_error(p, n), 1e-10) << "p=" << p << " n=" << n;
  }
}

TEST(Assembly, QuarterPlateWithSymmetryEdgesMatchesFullPlate) {
  auto center_deflection = [](double size, int n, bool quarter) {
    ShellProblem prob = plate_problem(4, n, size, size);
    prob.f = constant(Vec3(0.0, 0.0, -1.0));
    prob.edge(Edge::r_min) = EdgeCondition::simply_supported();
    prob.edge(Edge::s_min) = EdgeCondition::simply_supported();
    prob.edge(Edge::r_max) = quarter ? EdgeCondition::symmetry() : EdgeCondition::simply_supported();
    prob.edge(Edge::s_max) = quarter ? EdgeCondition::symmetry() : EdgeCondition::simply_supported();
    const SolvedProblem solved = solve_problem(std::make_shared<ShellProblem>(prob));
    const double c = quarter ? size : 0.5 * size;
    return evaluate_solution(solved.solution, c, c).state.u[2];
  };
  const double full = center_deflection(2.0, 16, false);
  const double quarter = center_deflection(1.0, 8, true);
  EXPECT_LT(full, 0.0);
  EXPECT_NEAR(quarter, full, 1e-4 * std::abs(full));
}

TEST(Assembly, DeterministicAcrossRunsAndThreadCounts) {
  const ShellProblem prob = apply_load_case(BenchmarkCase::flower, 3, 4);
  const SaddleSystem a = assemble(prob);
  const SaddleSystem b = assemble(prob);
  ::setenv("TDCSHELL_THREADS", "3", 1);
  const SaddleSystem c = assemble(prob);
  const SaddleSystem d = assemble(prob);
  ::unsetenv("TDCSHELL_THREADS");
  ASSERT_EQ(a.matrix.nonZeros(), b.matrix.nonZeros());
  for (const SaddleSystem* other : {&b, &c, &d}) {
    ASSERT_EQ(a.matrix.nonZeros(), other->matrix.nonZeros());
    EXPECT_TRUE(std::equal(a.matrix.valuePtr(), a.matrix.valuePtr() + a.matrix.nonZeros(), other->matrix.valuePtr()));
    EXPECT_TRUE(std::equal(a.matrix.innerIndexPtr(), a.matrix.innerIndexPtr() + a.matrix.nonZeros(),
                           other->matrix.innerIndexPtr()));
    EXPECT_TRUE(a.rhs == other->rhs);
  }
}

TEST(Assembly, RejectsInvalidProblems) {
  ShellProblem prob = plate_problem(2, 2);
  prob.mode = ConstraintMode::penalty;
  prob.alpha = 1e3;
  EXPECT_THROW(assemble(prob), ConfigError);
  prob.alpha = 1e8;
  prob.quad_bump = -1;
  EXPECT_THROW(assemble(prob), ArgumentError);

  ShellProblem closed;
  closed.geom = make_analytic(FlowerShell{});
  closed.patch = field_patch_for(*closed.geom, 2, 2);
  closed.mat = Material{10.0, 0.3, 1.0, 0.1};
  closed.edge(Edge::r_min) = EdgeCondition::clamped();
  EXPECT_THROW(assemble(closed), ConfigError);

  EXPECT_THROW(parse_case("dome"), ConfigError);
}

TEST(Assembly, BenchmarkDefinitions) {
  const ShellProblem s = apply_load_case(BenchmarkCase::scordelis_lo, 2, 2);
  EXPECT_DOUBLE_EQ(s.mat.E, 4.32e8);
  EXPECT_DOUBLE_EQ(s.mat.nu, 0.0);
  EXPECT_DOUBLE_EQ(s.mat.t, 0.25);
  EXPECT_DOUBLE_EQ(s.mat.alpha_s, 1.0);
  EXPECT_TRUE(s.f(Vec3::Zero()).isApprox(Vec3(0, 0, -90)));
  EXPECT_EQ(s.c(Vec3::Zero()), Vec3::Zero());
  // free edges along the roof, diaphragms at the ends
  EXPECT_FALSE(s.edge(Edge::r_min).is_dirichlet());
  EXPECT_FALSE(s.edge(Edge::r_max).is_dirichlet());
  EXPECT_EQ(s.edge(Edge::s_min).constrained_u(), (std::vector<Direction>{Direction::x, Direction::z}));
  EXPECT_TRUE(s.edge(Edge::s_min).constrained_w().empty());
  const Vec3 corner = s.geom->point(1.0, 0.5);
  EXPECT_NEAR(corner[0], 25.0 * std::cos(50.0 * std::numbers::pi / 180.0), 1e-12);
  EXPECT_NEAR(corner[1], 25.0, 1e-12);
  EXPECT_NEAR(corner[2], 25.0 * std::sin(50.0 * std::numbers::pi / 180.0), 1e-12);

  const ShellProblem h = apply_load_case(BenchmarkCase::hyperbolic_paraboloid, 2, 2);
  EXPECT_DOUBLE_EQ(h.mat.E, 2.0e11);
  EXPECT_DOUBLE_EQ(h.mat.nu, 0.3);
  EXPECT_DOUBLE_EQ(h.mat.t, 0.01);
  EXPECT_TRUE(h.f(Vec3::Zero()).isApprox(Vec3(0, 0, -80)));
  EXPECT_EQ(h.edge(Edge::r_min).kind, EdgeKind::clamped);
  EXPECT_NEAR(h.geom->domain().r0, -0.5, 0.0);
  const Vec3 probe = h.geom->point(0.5, 0.0);
  EXPECT_TRUE(probe.isApprox(Vec3(0.5, 0.0, 0.25)));
  for (Edge e : {Edge::r_max, Edge::s_min, Edge::s_max}) EXPECT_FALSE(h.edge(e).is_dirichlet());

  const ShellProblem f = apply_load_case(BenchmarkCase::flower, 2, 2);
  EXPECT_DOUBLE_EQ(f.mat.E, 10.0);
  EXPECT_DOUBLE_EQ(f.mat.nu, 0.3);
  EXPECT_DOUBLE_EQ(f.mat.t, 0.1);
  EXPECT_TRUE(f.f(Vec3::Zero()).isApprox(Vec3(-1e-3, -2e-3, -3e-3)));
  EXPECT_EQ(f.edge(Edge::s_min).kind, EdgeKind::clamped);
  EXPECT_EQ(f.edge(Edge::s_max).kind, EdgeKind::clamped);
  EXPECT_TRUE(f.geom->closed_in_r());
}
