#pragma once

// Discrete saddle-point system: stiffness blocks for (u, w), the weak
// tangentiality constraint on w and boundary multipliers, in the block order
// [u, w, lambda_n, lambda_u, lambda_w].

#include <map>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "tdcshell/problem.hpp"

namespace tdcshell {

/// Scalar boundary multiplier: basis function of `node` restricted to the
/// Dirichlet edges on which `dir` is constrained.
struct MultiplierSlot {
  int node = 0;
  Direction dir = Direction::x;
};

struct DofMap {
  int num_nodes = 0;
  std::vector<int> basis_to_node;  // basis id -> node; seams share nodes

  int u_offset = 0;
  int w_offset = 0;
  int lambda_n_offset = 0;
  int lambda_u_offset = 0;
  int lambda_w_offset = 0;
  int total_dofs = 0;

  int num_lambda_n = 0;
  std::vector<MultiplierSlot> lambda_u;  // edge multipliers of u
  std::vector<Vec3> pinned_axes;         // global rows appended after lambda_u
  std::vector<MultiplierSlot> lambda_w;
  // slot index per (edge, node, direction); -1 where another edge already fixes that direction at a corner
  std::map<std::tuple<Edge, int, Direction>, int> u_slot_of, w_slot_of;

  int u_dof(int node, int c) const { return u_offset + 3 * node + c; }
  int w_dof(int node, int c) const { return w_offset + 3 * node + c; }
  int lambda_n_dof(int node) const { return lambda_n_offset + node; }
  int lambda_u_dof(int k) const { return lambda_u_offset + k; }
  int pinned_dof(int k) const { return lambda_u_offset + static_cast<int>(lambda_u.size()) + k; }
  int lambda_w_dof(int k) const { return lambda_w_offset + k; }
  int num_primal() const { return lambda_n_offset; }
  int num_lambda_u_rows() const { return static_cast<int>(lambda_u.size() + pinned_axes.size()); }
};

/// Builds the node numbering and multiplier slots for a problem.
DofMap build_dof_map(const ShellProblem& prob);

using SparseMatrixR = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

struct SaddleSystem {
  SparseMatrixR matrix;
  Eigen::VectorXd rhs;
  DofMap dofs;
  ConstraintMode mode = ConstraintMode::lagrange;
};

/// Knot-span element of the field patch.
struct SpanElement {
  int i = 0, j = 0;  // span indices in r and s
  double r0 = 0, r1 = 0, s0 = 0, s1 = 0;
};

std::vector<SpanElement> span_elements(const NurbsPatch& patch);

/// Basis ids with support on an edge, in edge order.
std::vector<int> edge_basis(const NurbsPatch& patch, Edge e);

SaddleSystem assemble(const ShellProblem& prob);

/// Number of threads used for element computations (TDCSHELL_THREADS, default 1).
int assembly_threads();

}  // namespace tdcshell
