#include "tdcshell/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "tdcshell/errors.hpp"
#include "tdcshell/quadrature.hpp"

namespace tdcshell {

namespace {

constexpr int kStrainRows = 9;  // membrane (3), bending (3), shear (3)

bool is_edge_along_r(Edge e) { return e == Edge::s_min || e == Edge::s_max; }

// Lower Cholesky factor of the plane-stress matrix [[1, nu, 0], [nu, 1, 0], [0, 0, (1 - nu)/2]].
Eigen::Matrix3d plane_stress_factor(double nu) {
  Eigen::Matrix3d d;
  d << 1.0, nu, 0.0, nu, 1.0, 0.0, 0.0, 0.0, 0.5 * (1.0 - nu);
  return d.llt().matrixL();
}

// Row-wise transpose of the constitutive square root, so that B^T D B = (F B)^T (F B).
Eigen::Matrix<double, kStrainRows, kStrainRows> constitutive_root(const Material& mat) {
  Eigen::Matrix<double, kStrainRows, kStrainRows> f = Eigen::Matrix<double, kStrainRows, kStrainRows>::Zero();
  const Eigen::Matrix3d l = plane_stress_factor(mat.nu);
  f.block<3, 3>(0, 0) = std::sqrt(mat.D_M()) * l.transpose();
  f.block<3, 3>(3, 3) = std::sqrt(mat.D_B()) * l.transpose();
  const double ds = std::sqrt(mat.D_shear());
  f(6, 6) = ds;
  f(7, 7) = ds;
  f(8, 8) = std::sqrt(2.0) * ds;
  return f;
}

// Strain operator of one basis function at a point: columns u_x, u_y, u_z, w_x, w_y, w_z,
// rows in the local orthonormal frame (t1, t2, n):
//   membrane  [e11, e22, 2 e12], bending [e11, e22, 2 e12], shear [2 e1n, 2 e2n, enn].
using StrainColumns = Eigen::Matrix<double, kStrainRows, 6>;

struct LocalFrame {
  Vec3 t1, t2, n, h1, h2;
};

LocalFrame local_frame(const SurfaceFrame& f) {
  LocalFrame lf;
  lf.n = f.n;
  lf.t1 = f.J.col(0).normalized();
  lf.t2 = f.n.cross(lf.t1);
  lf.h1 = f.H * lf.t1;
  lf.h2 = f.H * lf.t2;
  return lf;
}

StrainColumns strain_columns(const LocalFrame& lf, double N, const Vec3& grad) {
  StrainColumns b = StrainColumns::Zero();
  const double g1 = grad.dot(lf.t1), g2 = grad.dot(lf.t2);
  for (int c = 0; c < 3; ++c) {
    // displacement component c
    b(0, c) = lf.t1[c] * g1;
    b(1, c) = lf.t2[c] * g2;
    b(2, c) = lf.t1[c] * g2 + lf.t2[c] * g1;
    b(3, c) = lf.h1[c] * g1;
    b(4, c) = lf.h2[c] * g2;
    b(5, c) = lf.h1[c] * g2 + lf.h2[c] * g1;
    b(6, c) = lf.n[c] * g1;
    b(7, c) = lf.n[c] * g2;
    // difference vector component c
    b(3, 3 + c) = lf.t1[c] * g1;
    b(4, 3 + c) = lf.t2[c] * g2;
    b(5, 3 + c) = lf.t1[c] * g2 + lf.t2[c] * g1;
    b(6, 3 + c) = N * lf.t1[c];
    b(7, 3 + c) = N * lf.t2[c];
    b(8, 3 + c) = N * lf.n[c];
  }
  return b;
}

Vec3 eval_field(const VectorField& f, const Vec3& x) { return f ? f(x) : Vec3::Zero(); }

struct ElementContribution {
  std::vector<int> dofs;  // 6 per active basis: u(3), w(3)
  Eigen::MatrixXd k;
  Eigen::VectorXd rhs;
  // lambda_n coupling: rows follow dofs (w part only is nonzero), columns follow lambda_nodes
  std::vector<int> lambda_nodes;
  Eigen::MatrixXd l_n;
  // pinned mean rows: (pin index) x dofs
  Eigen::MatrixXd pins;
};

class SparseAccumulator {
 public:
  SparseAccumulator(int n, std::vector<std::vector<int>>& cols) : m_(n, n) {
    Eigen::VectorXi sizes(n);
    for (int i = 0; i < n; ++i) {
      auto& c = cols[i];
      std::sort(c.begin(), c.end());
      c.erase(std::unique(c.begin(), c.end()), c.end());
      sizes[i] = static_cast<int>(c.size());
    }
    m_.reserve(sizes);
    for (int i = 0; i < n; ++i) {
      for (int j : cols[i]) m_.insert(i, j) = 0.0;
      std::vector<int>().swap(cols[i]);
    }
    m_.makeCompressed();
  }

  // Adds v to entries (row, cols[k]); cols sorted ascending.
  void add_row(int row, const std::vector<int>& sorted_cols, const double* values, const std::vector<int>& perm) {
    const int* inner = m_.innerIndexPtr();
    double* val = m_.valuePtr();
    int pos = m_.outerIndexPtr()[row];
    const int end = m_.outerIndexPtr()[row + 1];
    for (std::size_t k = 0; k < sorted_cols.size(); ++k) {
      const int col = sorted_cols[k];
      pos = static_cast<int>(std::lower_bound(inner + pos, inner + end, col) - inner);
      if (pos >= end || inner[pos] != col) throw std::logic_error("sparsity pattern misses an entry");
      val[pos] += values[perm[k]];
    }
  }

  void add(int row, int col, double v) {
    const int* inner = m_.innerIndexPtr();
    const int start = m_.outerIndexPtr()[row], end = m_.outerIndexPtr()[row + 1];
    const int pos = static_cast<int>(std::lower_bound(inner + start, inner + end, col) - inner);
    if (pos >= end || inner[pos] != col) throw std::logic_error("sparsity pattern misses an entry");
    m_.valuePtr()[pos] += v;
  }

  SparseMatrixR take() { return std::move(m_); }

 private:
  SparseMatrixR m_;
};

struct BoundaryPoint {
  Edge edge;
  BasisEval basis;
  BoundaryFrame frame;
  double weight = 0.0;  // includes ds
};

// All Gauss points on Dirichlet or loaded edges.
std::vector<BoundaryPoint> boundary_points(const ShellProblem& prob, Edge e) {
  std::vector<BoundaryPoint> pts;
  const NurbsPatch& patch = prob.patch;
  const bool along_r = is_edge_along_r(e);
  const KnotVector& kv = along_r ? patch.kv_r : patch.kv_s;
  const auto bp = kv.breakpoints();
  const int npts = kv.degree() + 1 + prob.quad_bump;
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    for (const auto& [t, w] : gauss_on_interval(npts, bp[k], bp[k + 1])) {
      const Vec2 rs = edge_point(patch.domain(), e, t);
      BoundaryPoint p{e, eval_basis(patch, rs[0], rs[1], 0), boundary_frame_at(*prob.geom, e, t), 0.0};
      p.weight = w * p.frame.ds_scale;
      pts.push_back(std::move(p));
    }
  }
  return pts;
}

}  // namespace

int assembly_threads() {
  if (const char* env = std::getenv("TDCSHELL_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

std::vector<SpanElement> span_elements(const NurbsPatch& patch) {
  const auto br = patch.kv_r.breakpoints();
  const auto bs = patch.kv_s.breakpoints();
  std::vector<SpanElement> out;
  out.reserve((br.size() - 1) * (bs.size() - 1));
  for (std::size_t j = 0; j + 1 < bs.size(); ++j) {
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
      out.push_back({static_cast<int>(i), static_cast<int>(j), br[i], br[i + 1], bs[j], bs[j + 1]});
    }
  }
  return out;
}

std::vector<int> edge_basis(const NurbsPatch& patch, Edge e) {
  std::vector<int> ids;
  const int nr = patch.n_r(), ns = patch.n_s();
  switch (e) {
    case Edge::r_min:
      for (int j = 0; j < ns; ++j) ids.push_back(patch.id(0, j));
      break;
    case Edge::r_max:
      for (int j = 0; j < ns; ++j) ids.push_back(patch.id(nr - 1, j));
      break;
    case Edge::s_min:
      for (int i = 0; i < nr; ++i) ids.push_back(patch.id(i, 0));
      break;
    case Edge::s_max:
      for (int i = 0; i < nr; ++i) ids.push_back(patch.id(i, ns - 1));
      break;
  }
  return ids;
}

DofMap build_dof_map(const ShellProblem& prob) {
  const NurbsPatch& patch = prob.patch;
  DofMap d;
  d.basis_to_node.assign(patch.num_basis(), -1);
  // closed surfaces: the interpolatory end functions in r share one node
  const bool seam = prob.geom->closed_in_r();
  int next = 0;
  for (int j = 0; j < patch.n_s(); ++j) {
    for (int i = 0; i < patch.n_r(); ++i) {
      if (seam && i == patch.n_r() - 1) {
        d.basis_to_node[patch.id(i, j)] = d.basis_to_node[patch.id(0, j)];
      } else {
        d.basis_to_node[patch.id(i, j)] = next++;
      }
    }
  }
  d.num_nodes = next;

  // Slots are shared across edges when a corner node carries the same direction on both; a direction
  // that is a combination of those already constrained at a corner would make the rows dependent.
  struct Accepted {
    Direction dir;
    Vec3 v;
    int slot;
  };
  const ParamDomain dom = prob.geom->domain();
  auto place = [&](Edge e, const std::vector<int>& ids, const std::vector<Direction>& dirs,
                   std::vector<MultiplierSlot>& slots, std::map<int, std::vector<Accepted>>& at_corner,
                   std::map<std::tuple<Edge, int, Direction>, int>& slot_of) {
    const bool along_r = e == Edge::s_min || e == Edge::s_max;
    const double t0 = along_r ? dom.r0 : dom.s0, t1 = along_r ? dom.r1 : dom.s1;
    for (Direction dir : dirs) {
      for (std::size_t k = 0; k < ids.size(); ++k) {
        const int node = d.basis_to_node[ids[k]];
        const auto key = std::make_tuple(e, node, dir);
        if (slot_of.count(key)) continue;  // seam node seen at the other end of the edge
        const bool end = k == 0 || k + 1 == ids.size();
        int slot = static_cast<int>(slots.size());
        bool fresh = true;
        Vec3 v = Vec3::Zero();
        if (end) {
          v = direction_vector(dir, boundary_frame_at(*prob.geom, e, k == 0 ? t0 : t1));
          auto& acc = at_corner[node];
          for (const Accepted& a : acc) {
            if (a.dir == dir && (a.v - v).norm() < 1e-10) {
              slot = a.slot;
              fresh = false;
            }
          }
          if (fresh && !acc.empty()) {
            Eigen::Matrix<double, 3, Eigen::Dynamic> m(3, acc.size() + 1);
            for (std::size_t i = 0; i < acc.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = acc[i].v;
            m.col(static_cast<Eigen::Index>(acc.size())) = v;
            Eigen::ColPivHouseholderQR<Eigen::Matrix<double, 3, Eigen::Dynamic>> qr(m);
            qr.setThreshold(1e-8);
            if (qr.rank() < m.cols()) {
              slot = -1;
              fresh = false;
            }
          }
          if (slot >= 0) acc.push_back({dir, v, slot});
        }
        if (fresh) slots.push_back({node, dir});
        slot_of[key] = slot;
      }
    }
  };
  std::map<int, std::vector<Accepted>> corner_u, corner_w;
  for (Edge e : {Edge::r_min, Edge::r_max, Edge::s_min, Edge::s_max}) {
    const EdgeCondition& ec = prob.edge(e);
    const auto ids = edge_basis(patch, e);
    place(e, ids, ec.constrained_u(), d.lambda_u, corner_u, d.u_slot_of);
    place(e, ids, ec.constrained_w(), d.lambda_w, corner_w, d.w_slot_of);
  }
  for (const Vec3& a : prob.pinned_mean_translations) d.pinned_axes.push_back(a.normalized());

  d.u_offset = 0;
  d.w_offset = 3 * d.num_nodes;
  d.lambda_n_offset = 6 * d.num_nodes;
  d.num_lambda_n = prob.mode == ConstraintMode::lagrange ? d.num_nodes : 0;
  d.lambda_u_offset = d.lambda_n_offset + d.num_lambda_n;
  d.lambda_w_offset = d.lambda_u_offset + d.num_lambda_u_rows();
  d.total_dofs = d.lambda_w_offset + static_cast<int>(d.lambda_w.size());
  return d;
}

SaddleSystem assemble(const ShellProblem& prob) {
  prob.validate();
  const NurbsPatch& patch = prob.patch;
  SaddleSystem sys;
  sys.mode = prob.mode;
  sys.dofs = build_dof_map(prob);
  const DofMap& dm = sys.dofs;
  const int n = dm.total_dofs;
  const bool lagrange = prob.mode == ConstraintMode::lagrange;

  const auto elements = span_elements(patch);
  const auto rule = quadrature_rule(patch.degree_r(), patch.degree_s(), prob.quad_bump);
  const auto froot = constitutive_root(prob.mat);
  const double sqrt_alpha = std::sqrt(prob.alpha);
  const int npin = static_cast<int>(dm.pinned_axes.size());

  auto compute_element = [&](const SpanElement& el) {
    ElementContribution out;
    const double jr = el.r1 - el.r0, js = el.s1 - el.s0;
    const int rows_per_qp = kStrainRows + (lagrange ? 0 : 1);
    Eigen::MatrixXd cmat;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double r = el.r0 + jr * rule[q].rs[0];
      const double s = el.s0 + js * rule[q].rs[1];
      const BasisEval be = eval_basis(patch, r, s, 1);
      const SurfaceFrame f = frame_at(*prob.geom, r, s, false);
      const double wda = rule[q].weight * jr * js * f.area_element;
      const int na = be.size();
      if (q == 0) {
        out.dofs.resize(6 * na);
        for (int a = 0; a < na; ++a) {
          const int node = dm.basis_to_node[be.active[a]];
          for (int c = 0; c < 3; ++c) {
            out.dofs[6 * a + c] = dm.u_dof(node, c);
            out.dofs[6 * a + 3 + c] = dm.w_dof(node, c);
          }
          out.lambda_nodes.push_back(node);
        }
        cmat = Eigen::MatrixXd::Zero(rows_per_qp * static_cast<Eigen::Index>(rule.size()), 6 * na);
        out.rhs = Eigen::VectorXd::Zero(6 * na);
        out.l_n = Eigen::MatrixXd::Zero(6 * na, lagrange ? na : 0);
        out.pins = Eigen::MatrixXd::Zero(npin, 6 * na);
      }
      const LocalFrame lf = local_frame(f);
      const double sw = std::sqrt(wda);
      const Vec3 fx = eval_field(prob.f, f.x);
      const Vec3 cx = eval_field(prob.c, f.x);
      for (int a = 0; a < na; ++a) {
        const double N = be.value(a);
        const Vec3 grad = f.J_G_inv * Vec2(be.d(1, 0, a), be.d(0, 1, a));
        cmat.block(rows_per_qp * q, 6 * a, kStrainRows, 6) = sw * (froot * strain_columns(lf, N, grad));
        if (!lagrange) {
          for (int c = 0; c < 3; ++c) cmat(rows_per_qp * q + kStrainRows, 6 * a + 3 + c) = sw * sqrt_alpha * N * f.n[c];
        }
        for (int c = 0; c < 3; ++c) {
          out.rhs[6 * a + c] += wda * N * fx[c];
          out.rhs[6 * a + 3 + c] += wda * N * cx[c];
        }
        if (lagrange) {
          for (int b = 0; b < na; ++b) {
            const double nb = be.value(b) * N * wda;
            for (int c = 0; c < 3; ++c) out.l_n(6 * a + 3 + c, b) += nb * f.n[c];
          }
        }
        for (int k = 0; k < npin; ++k) {
          for (int c = 0; c < 3; ++c) out.pins(k, 6 * a + c) += wda * N * dm.pinned_axes[k][c];
        }
      }
    }
    out.k = Eigen::MatrixXd::Zero(cmat.cols(), cmat.cols());
    out.k.selfadjointView<Eigen::Lower>().rankUpdate(cmat.transpose());
    out.k.triangularView<Eigen::StrictlyUpper>() = out.k.transpose();
    return out;
  };

  // Sparsity pattern: node adjacency through shared elements plus boundary couplings.
  std::vector<std::vector<int>> cols(n);
  std::vector<std::vector<int>> elem_nodes(elements.size());
  for (std::size_t e = 0; e < elements.size(); ++e) {
    const SpanElement& el = elements[e];
    const BasisEval be = eval_basis(patch, 0.5 * (el.r0 + el.r1), 0.5 * (el.s0 + el.s1), 0);
    for (int id : be.active) elem_nodes[e].push_back(dm.basis_to_node[id]);
  }
  {
    std::vector<std::vector<int>> adj(dm.num_nodes);
    for (const auto& nodes : elem_nodes) {
      for (int a : nodes) adj[a].insert(adj[a].end(), nodes.begin(), nodes.end());
    }
    for (int a = 0; a < dm.num_nodes; ++a) {
      auto& v = adj[a];
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
      for (int c = 0; c < 3; ++c) {
        auto& ru = cols[dm.u_dof(a, c)];
        auto& rw = cols[dm.w_dof(a, c)];
        for (int b : v) {
          for (int cc = 0; cc < 3; ++cc) {
            ru.push_back(dm.u_dof(b, cc));
            ru.push_back(dm.w_dof(b, cc));
            rw.push_back(dm.u_dof(b, cc));
            rw.push_back(dm.w_dof(b, cc));
          }
          if (lagrange) {
            rw.push_back(dm.lambda_n_dof(b));
            cols[dm.lambda_n_dof(b)].push_back(dm.w_dof(a, c));
          }
        }
      }
    }
  }
  for (int k = 0; k < npin; ++k) {
    const int row = dm.pinned_dof(k);
    for (int a = 0; a < dm.num_nodes; ++a) {
      for (int c = 0; c < 3; ++c) {
        if (dm.pinned_axes[k][c] == 0.0) continue;
        cols[row].push_back(dm.u_dof(a, c));
        cols[dm.u_dof(a, c)].push_back(row);
      }
    }
  }

  std::array<std::vector<BoundaryPoint>, 4> bpts;
  for (Edge e : {Edge::r_min, Edge::r_max, Edge::s_min, Edge::s_max}) {
    const EdgeCondition& ec = prob.edge(e);
    if (ec.is_dirichlet() || ec.traction || ec.moment) bpts[static_cast<int>(e)] = boundary_points(prob, e);
  }
  // Couplings between all basis functions active at an edge point, for each constrained direction.
  auto for_each_boundary_coupling = [&](auto&& fn) {
    for (Edge e : {Edge::r_min, Edge::r_max, Edge::s_min, Edge::s_max}) {
      const EdgeCondition& ec = prob.edge(e);
      const auto udirs = ec.constrained_u();
      const auto wdirs = ec.constrained_w();
      if (udirs.empty() && wdirs.empty()) continue;
      for (const BoundaryPoint& bp : bpts[static_cast<int>(e)]) {
        for (int b = 0; b < bp.basis.size(); ++b) {
          // functions without support on the edge vanish there up to rounding
          if (std::abs(bp.basis.value(b)) < 1e-13) continue;
          const int node_b = dm.basis_to_node[bp.basis.active[b]];
          for (Direction dir : udirs) {
            const int slot = dm.u_slot_of.at({e, node_b, dir});
            if (slot >= 0) fn(bp, b, dm.lambda_u_dof(slot), dir, false);
          }
          for (Direction dir : wdirs) {
            const int slot = dm.w_slot_of.at({e, node_b, dir});
            if (slot >= 0) fn(bp, b, dm.lambda_w_dof(slot), dir, true);
          }
        }
      }
    }
  };
  for_each_boundary_coupling([&](const BoundaryPoint& bp, int, int row, Direction, bool on_w) {
    for (int a = 0; a < bp.basis.size(); ++a) {
      if (std::abs(bp.basis.value(a)) < 1e-13) continue;
      const int node_a = dm.basis_to_node[bp.basis.active[a]];
      for (int c = 0; c < 3; ++c) {
        const int col = on_w ? dm.w_dof(node_a, c) : dm.u_dof(node_a, c);
        cols[row].push_back(col);
        cols[col].push_back(row);
      }
    }
  });
  SparseAccumulator acc(n, cols);
  sys.rhs = Eigen::VectorXd::Zero(n);

  // Element loop: parallel element computation in fixed-size batches, serialized insertion in element order.
  const int threads = assembly_threads();
  const std::size_t batch = static_cast<std::size_t>(std::max(1, threads)) * 8;
  std::vector<ElementContribution> results(std::min(batch, elements.size()));
  for (std::size_t start = 0; start < elements.size(); start += batch) {
    const std::size_t count = std::min(batch, elements.size() - start);
    if (threads > 1) {
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errors(threads);
      for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
          try {
            for (std::size_t k = t; k < count; k += threads) results[k] = compute_element(elements[start + k]);
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      for (auto& err : errors) {
        if (err) std::rethrow_exception(err);
      }
    } else {
      for (std::size_t k = 0; k < count; ++k) results[k] = compute_element(elements[start + k]);
    }
    for (std::size_t k = 0; k < count; ++k) {
      const ElementContribution& ec = results[k];
      const int m = static_cast<int>(ec.dofs.size());
      std::vector<int> perm(m);
      for (int i = 0; i < m; ++i) perm[i] = i;
      std::sort(perm.begin(), perm.end(), [&](int a, int b) { return ec.dofs[a] < ec.dofs[b]; });
      std::vector<int> sorted(m);
      for (int i = 0; i < m; ++i) sorted[i] = ec.dofs[perm[i]];
      // merged seam nodes can repeat a dof within one element
      const bool unique = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
      Eigen::VectorXd rowbuf(m);
      for (int i = 0; i < m; ++i) {
        const int row = ec.dofs[i];
        sys.rhs[row] += ec.rhs[i];
        if (unique) {
          rowbuf = ec.k.row(i).transpose();
          acc.add_row(row, sorted, rowbuf.data(), perm);
        } else {
          for (int j = 0; j < m; ++j) acc.add(row, ec.dofs[j], ec.k(i, j));
        }
        for (int b = 0; b < ec.l_n.cols(); ++b) {
          const double v = ec.l_n(i, b);
          if (v == 0.0) continue;
          acc.add(row, dm.lambda_n_dof(ec.lambda_nodes[b]), v);
          acc.add(dm.lambda_n_dof(ec.lambda_nodes[b]), row, v);
        }
        for (int p = 0; p < npin; ++p) {
          const double v = ec.pins(p, i);
          if (v == 0.0) continue;
          acc.add(row, dm.pinned_dof(p), v);
          acc.add(dm.pinned_dof(p), row, v);
        }
      }
    }
  }

  // Boundary multipliers and prescribed values.
  for_each_boundary_coupling([&](const BoundaryPoint& bp, int b, int row, Direction dir, bool on_w) {
    const Vec3 d = direction_vector(dir, bp.frame);
    const double wnb = bp.weight * bp.basis.value(b);
    const EdgeCondition& ec = prob.edge(bp.edge);
    const VectorField& g = on_w ? ec.g_w : ec.g_u;
    if (g) sys.rhs[row] += wnb * g(bp.frame.x).dot(d);
    for (int a = 0; a < bp.basis.size(); ++a) {
      const double na = bp.basis.value(a);
      if (std::abs(na) < 1e-13) continue;
      const int node_a = dm.basis_to_node[bp.basis.active[a]];
      for (int c = 0; c < 3; ++c) {
        const double v = wnb * na * d[c];
        if (v == 0.0) continue;
        const int col = on_w ? dm.w_dof(node_a, c) : dm.u_dof(node_a, c);
        acc.add(row, col, v);
        acc.add(col, row, v);
      }
    }
  });

  // Neumann data on edges.
  for (Edge e : {Edge::r_min, Edge::r_max, Edge::s_min, Edge::s_max}) {
    const EdgeCondition& ec = prob.edge(e);
    if (!ec.traction && !ec.moment) continue;
    for (const BoundaryPoint& bp : bpts[static_cast<int>(e)]) {
      const Vec3 p = eval_field(ec.traction, bp.frame.x);
      const Vec3 m = eval_field(ec.moment, bp.frame.x);
      for (int a = 0; a < bp.basis.size(); ++a) {
        const double wn = bp.weight * bp.basis.value(a);
        if (wn == 0.0) continue;
        const int node = dm.basis_to_node[bp.basis.active[a]];
        for (int c = 0; c < 3; ++c) {
          sys.rhs[dm.u_dof(node, c)] += wn * p[c];
          sys.rhs[dm.w_dof(node, c)] += wn * m[c];
        }
      }
    }
  }

  sys.matrix = acc.take();
  return sys;
}

}  // namespace tdcshell
