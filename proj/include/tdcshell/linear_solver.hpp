#pragma once

#include <string>

#include <Eigen/Core>

#include "tdcshell/assembly.hpp"

namespace tdcshell {

struct SolveReport {
  Eigen::VectorXd solution;
  double residual_norm_rel = 0.0;  // |M x - b| / |b|, computed after the solve
  std::string factorization_kind;
  int pivot_perturbations = 0;
  double rcond_estimate = 0.0;  // of the equilibrated matrix
  int refinement_steps = 0;
  double seconds = 0.0;
};

struct SolverOptions {
  double residual_tolerance = 1e-8;
  /// Pivots of the equilibrated matrix below this fraction of the largest pivot count as null directions.
  double null_pivot_tolerance = 1e-13;
  int max_refinement_steps = 3;
};

/// Sparse LU with symmetric equilibration. Throws SingularSystemError when the
/// factorization exposes null directions and std::runtime_error when the
/// residual check fails.
SolveReport solve(const SaddleSystem& system, const SolverOptions& opts = {});

/// Writes the matrix and right-hand side in MatrixMarket coordinate / array format.
void write_matrix_market(const SaddleSystem& system, const std::string& matrix_path, const std::string& rhs_path);

}  // namespace tdcshell
