#pragma once

// Field reconstruction, strong-form residuals, energies and convergence tables.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tdcshell/assembly.hpp"
#include "tdcshell/linear_solver.hpp"
#include "tdcshell/problem.hpp"
#include "tdcshell/shell_mechanics.hpp"

namespace tdcshell {

struct DiscreteSolution {
  std::shared_ptr<const ShellProblem> problem;
  DofMap dofs;
  Eigen::VectorXd coeffs;  // full saddle-point solution vector
};

/// Assembles and solves a problem.
struct SolvedProblem {
  DiscreteSolution solution;
  SaddleSystem system;
  SolveReport report;
  double assembly_seconds = 0.0;
};
SolvedProblem solve_problem(std::shared_ptr<const ShellProblem> prob, const SolverOptions& opts = {});

struct PointEvaluation {
  SurfaceFrame frame;
  FieldPointState<double> state;
  StressResultants<double> resultants;
};

PointEvaluation evaluate_solution(const DiscreteSolution& sol, double r, double s);

struct ResidualNorms {
  double eps_force_rel = 0.0;   // relative force residual
  double eps_moment_abs = 0.0;  // absolute moment residual
  bool force_defined = true;    // false when the load vanishes, eps_force_rel is then NaN
  double route_difference_rel = 0.0;  // n_real form vs expanded form, relative to the force residual
  double split_recombination_max = 0.0;  // max pointwise |full - (tangential + n normal)|
  double load_norm_sq = 0.0;    // integral of f.f
};

/// Strong-form equilibrium residuals integrated with `bump` extra Gauss points per direction.
/// Throws CapabilityError when the field basis has degree < 2.
ResidualNorms residual_norms(const DiscreteSolution& sol, int bump = 2);

struct EnergyReport {
  double elastic_energy = 0.0;
  double membrane = 0.0;
  double bending = 0.0;
  double shear = 0.0;
  double penalty = 0.0;  // 1/2 alpha int (w.n)^2, penalty mode only
};

/// Quadrature of 1/2 (eps_m : n + eps_b : m + eps_s : q).
EnergyReport stored_energy(const DiscreteSolution& sol, int bump = 0);

/// 1/2 x^T K x over the displacement and difference-vector blocks.
double bilinear_energy(const SaddleSystem& sys, const Eigen::VectorXd& x);

/// 1/2 b^T x over the displacement and difference-vector blocks.
double external_work_half(const SaddleSystem& sys, const Eigen::VectorXd& x);

struct PrincipalMoments {
  double m1 = 0.0;
  double m2 = 0.0;
  double dropped = 0.0;     // eigenvalue closest to zero
  bool consistent = true;   // |dropped| < 1e-8 max |eigenvalue|
};

PrincipalMoments principal_moments(const Mat3& m);

struct ConstraintQuality {
  double tangentiality = 0.0;  // int (w.n)^2 / int |w|^2
  double boundary_u_residual = 0.0;  // |L_u^T x - b| / max(|b|, |L_u| |u|)
  double lambda_n_residual = 0.0;    // |L_n^T w| / |w| over coefficients, Lagrange mode only
};

ConstraintQuality constraint_quality(const DiscreteSolution& sol, const SaddleSystem& sys);

struct ConvergenceRow {
  std::string case_id;
  int p = 0;
  int n = 0;
  double h = 0.0;
  int dofs = 0;
  std::optional<double> qoi;
  std::optional<double> qoi_normalized;
  double eps_force_rel = 0.0;
  double eps_moment_abs = 0.0;
  double energy = 0.0;
  double tangentiality = 0.0;
  double solver_residual = 0.0;
  std::optional<double> observed_order_force;
  std::optional<double> observed_order_moment;
  bool pre_asymptotic = false;
  double seconds = 0.0;
  double assembly_seconds = 0.0;
  double solve_seconds = 0.0;
  std::string error;  // nonempty when the cell failed
};

/// A family of problems indexed by (p, n) plus the quantity reported per cell.
struct StudyCase {
  std::string id;
  std::function<ShellProblem(int p, int n)> make;
  std::optional<Vec2> probe;       // report u_z at this parameter point, else the elastic energy
  std::optional<double> reference; // normalizes the quantity of interest
  int pre_asymptotic_max_n = 0;    // rows with n <= this are flagged
};

StudyCase benchmark_study(BenchmarkCase c, const CaseOptions& opts = {});

struct StudyOptions {
  ConstraintMode mode = ConstraintMode::lagrange;
  double alpha = 1e8;
  int quad_bump = 0;
  bool residuals = true;
  SolverOptions solver;
  // called after each successful cell, e.g. to export fields
  std::function<void(const ConvergenceRow&, const SolvedProblem&)> on_solved;
};

/// Quantity of interest: u_z at the probe point, or the elastic energy.
double quantity_of_interest(const StudyCase& c, const DiscreteSolution& sol, const EnergyReport& energy);

/// One row per (p, n) in p-major order; failures are recorded in the row and the study continues.
std::vector<ConvergenceRow> convergence_study(const StudyCase& c, const std::vector<int>& p_list,
                                              const std::vector<int>& n_list, const StudyOptions& opts = {});

/// log(e1 / e2) / log(n2 / n1) for successive n at equal p.
void fill_observed_orders(std::vector<ConvergenceRow>& rows);

/// Richardson extrapolation of a sequence on meshes refined by a constant factor.
double richardson_extrapolate(double coarse, double medium, double fine);

}  // namespace tdcshell
