#include "tdcshell/postprocess.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "tdcshell/errors.hpp"
#include "tdcshell/quadrature.hpp"

namespace tdcshell {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct FieldJets {
  JetVec3 u, w;
};

// u and w as Jets of the given order, from the rational basis partials.
FieldJets field_jets(const DiscreteSolution& sol, const BasisEval& be, int order) {
  const DofMap& dm = sol.dofs;
  FieldJets out;
  for (int c = 0; c < 3; ++c) {
    std::array<double, Jet::kSize> pu{}, pw{};
    for (int a = 0; a < be.size(); ++a) {
      const int node = dm.basis_to_node[be.active[a]];
      const double cu = sol.coeffs[dm.u_dof(node, c)];
      const double cw = sol.coeffs[dm.w_dof(node, c)];
      for (int k = 0; k < Jet::kSize; ++k) {
        if (Jet::degree(k) > order) continue;
        pu[k] += be.partials(k, a) * cu;
        pw[k] += be.partials(k, a) * cw;
      }
    }
    out.u[c] = Jet::from_partials(pu, order);
    out.w[c] = Jet::from_partials(pw, order);
  }
  return out;
}

FieldPointState<double> state_at(const DiscreteSolution& sol, const SurfaceFrame& f, const BasisEval& be) {
  const DofMap& dm = sol.dofs;
  FieldPointState<double> st;
  Mat32 gu = Mat32::Zero(), gw = Mat32::Zero();
  for (int a = 0; a < be.size(); ++a) {
    const int node = dm.basis_to_node[be.active[a]];
    const Vec3 cu = sol.coeffs.segment<3>(dm.u_dof(node, 0));
    const Vec3 cw = sol.coeffs.segment<3>(dm.w_dof(node, 0));
    const double n0 = be.value(a), nr = be.d(1, 0, a), ns = be.d(0, 1, a);
    st.u += n0 * cu;
    st.w += n0 * cw;
    gu.col(0) += nr * cu;
    gu.col(1) += ns * cu;
    gw.col(0) += nr * cw;
    gw.col(1) += ns * cw;
  }
  st.grad_u_dir = surface_grad_vector_dir(f, gu);
  st.grad_w_dir = surface_grad_vector_dir(f, gw);
  return st;
}

Vec3 eval_field(const VectorField& f, const Vec3& x) { return f ? f(x) : Vec3::Zero(); }

template <typename Fn>
void for_each_quadrature_point(const ShellProblem& prob, int bump, Fn&& fn) {
  const auto rule = quadrature_rule(prob.patch.degree_r(), prob.patch.degree_s(), bump);
  for (const SpanElement& el : span_elements(prob.patch)) {
    const double jr = el.r1 - el.r0, js = el.s1 - el.s0;
    for (const QuadPoint& q : rule) {
      fn(el.r0 + jr * q.rs[0], el.s0 + js * q.rs[1], q.weight * jr * js);
    }
  }
}

}  // namespace

SolvedProblem solve_problem(std::shared_ptr<const ShellProblem> prob, const SolverOptions& opts) {
  if (!prob) throw ArgumentError("null problem");
  SolvedProblem out;
  const auto t0 = Clock::now();
  out.system = assemble(*prob);
  out.assembly_seconds = seconds_since(t0);
  out.report = solve(out.system, opts);
  out.solution.problem = std::move(prob);
  out.solution.dofs = out.system.dofs;
  out.solution.coeffs = out.report.solution;
  return out;
}

PointEvaluation evaluate_solution(const DiscreteSolution& sol, double r, double s) {
  const ShellProblem& prob = *sol.problem;
  PointEvaluation ev;
  ev.frame = frame_at(*prob.geom, r, s, false);
  ev.state = state_at(sol, ev.frame, eval_basis(prob.patch, r, s, 1));
  ev.resultants = stress_resultants(ev.frame, prob.mat, ev.state);
  return ev;
}

ResidualNorms residual_norms(const DiscreteSolution& sol, int bump) {
  const ShellProblem& prob = *sol.problem;
  if (prob.patch.degree_r() < 2 || prob.patch.degree_s() < 2) {
    throw CapabilityError("strong-form residuals need second derivatives of the fields (degree >= 2)");
  }
  ResidualNorms out;
  double force_sq = 0.0, moment_sq = 0.0, diff_sq = 0.0;
  for_each_quadrature_point(prob, bump, [&](double r, double s, double w) {
    const FrameJet fj = frame_jet(prob.geom->jet(r, s));
    const SurfaceFrame f = frame_from_jet(fj, true);
    const BasisEval be = eval_basis(prob.patch, r, s, 2);
    const FieldJets fields = field_jets(sol, be, 2);

    FieldPointState<Jet> st;
    st.u = fields.u;
    st.w = fields.w;
    st.grad_u_dir = surface_grad_vector_dir(fj, fields.u);
    st.grad_w_dir = surface_grad_vector_dir(fj, fields.w);
    const StressResultants<Jet> res = stress_resultants(fj, prob.mat, st);

    const Vec3 div_nreal = surface_div(fj, res.n_real);
    const Vec3 div_neff = surface_div(fj, res.n_eff);
    const Vec3 div_m = surface_div(fj, res.m);
    const Vec3 div_q = surface_div(fj, res.q);
    const Mat3 m = values_of(res.m);
    const Mat3 q = values_of(res.q);
    const Mat3 n_real = values_of(res.n_real);
    const Vec3 qn = q * f.n;
    const Vec3 fx = eval_field(prob.f, f.x);
    const Vec3 cx = eval_field(prob.c, f.x);

    const Vec3 force = div_nreal + f.Q * div_q + f.H * qn + fx;
    Vec3 curvature_term = Vec3::Zero();
    for (int k = 0; k < 3; ++k) {
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) curvature_term[k] += f.dH[i](j, k) * m(j, i);
      }
    }
    const Vec3 force_expanded = div_neff + f.H * div_m + curvature_term + f.Q * div_q + f.H * qn + fx;
    const Vec3 moment = f.P * div_m - qn + cx;

    const Vec3 tangential = f.P * div_nreal + f.H * qn;
    const double normal = -(f.H.cwiseProduct(n_real)).sum() + f.n.dot(div_q);
    const Vec3 recombined = f.P * tangential + normal * f.n + fx;
    out.split_recombination_max = std::max(out.split_recombination_max, (force - recombined).norm());

    const double da = w * f.area_element;
    force_sq += force.squaredNorm() * da;
    diff_sq += (force - force_expanded).squaredNorm() * da;
    moment_sq += moment.squaredNorm() * da;
    out.load_norm_sq += fx.squaredNorm() * da;
  });
  out.eps_moment_abs = std::sqrt(moment_sq);
  if (out.load_norm_sq > 0.0) {
    out.eps_force_rel = std::sqrt(force_sq / out.load_norm_sq);
  } else {
    out.eps_force_rel = std::numeric_limits<double>::quiet_NaN();
    out.force_defined = false;
  }
  out.route_difference_rel = force_sq > 0.0 ? std::sqrt(diff_sq / force_sq) : std::sqrt(diff_sq);
  return out;
}

EnergyReport stored_energy(const DiscreteSolution& sol, int bump) {
  const ShellProblem& prob = *sol.problem;
  EnergyReport e;
  for_each_quadrature_point(prob, bump, [&](double r, double s, double w) {
    const SurfaceFrame f = frame_at(*prob.geom, r, s, false);
    const FieldPointState<double> st = state_at(sol, f, eval_basis(prob.patch, r, s, 1));
    const EnergyDensity d = energy_density(f, prob.mat, st);
    const double da = w * f.area_element;
    e.membrane += d.membrane * da;
    e.bending += d.bending * da;
    e.shear += d.shear * da;
    if (prob.mode == ConstraintMode::penalty) {
      const double wn = st.w.dot(f.n);
      e.penalty += 0.5 * prob.alpha * wn * wn * da;
    }
  });
  e.elastic_energy = e.membrane + e.bending + e.shear;
  return e;
}

double bilinear_energy(const SaddleSystem& sys, const Eigen::VectorXd& x) {
  const int np = sys.dofs.num_primal();
  const Eigen::VectorXd xp = x.head(np);
  const SparseMatrixR k = sys.matrix.topLeftCorner(np, np);
  return 0.5 * xp.dot(k * xp);
}

double external_work_half(const SaddleSystem& sys, const Eigen::VectorXd& x) {
  const int np = sys.dofs.num_primal();
  return 0.5 * sys.rhs.head(np).dot(x.head(np));
}

PrincipalMoments principal_moments(const Mat3& m) {
  PrincipalMoments pm;
  const Mat3 sym_m = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Mat3> es(sym_m, Eigen::EigenvaluesOnly);
  Vec3 ev = es.eigenvalues();
  std::array<double, 3> v{ev[0], ev[1], ev[2]};
  std::sort(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  pm.dropped = v[0];
  // the two remaining eigenvalues, larger magnitude first
  pm.m1 = v[2];
  pm.m2 = v[1];
  const double scale = std::abs(v[2]);
  pm.consistent = scale == 0.0 || std::abs(v[0]) < 1e-8 * scale;
  return pm;
}

ConstraintQuality constraint_quality(const DiscreteSolution& sol, const SaddleSystem& sys) {
  const ShellProblem& prob = *sol.problem;
  ConstraintQuality cq;
  double wn_sq = 0.0, w_sq = 0.0;
  for_each_quadrature_point(prob, 0, [&](double r, double s, double w) {
    const SurfaceFrame f = frame_at(*prob.geom, r, s, false);
    const BasisEval be = eval_basis(prob.patch, r, s, 0);
    Vec3 wv = Vec3::Zero();
    for (int a = 0; a < be.size(); ++a) {
      wv += be.value(a) * sol.coeffs.segment<3>(sol.dofs.w_dof(sol.dofs.basis_to_node[be.active[a]], 0));
    }
    const double da = w * f.area_element;
    wn_sq += std::pow(wv.dot(f.n), 2) * da;
    w_sq += wv.squaredNorm() * da;
  });
  cq.tangentiality = w_sq > 0.0 ? wn_sq / w_sq : 0.0;

  const DofMap& dm = sol.dofs;
  if (dm.num_lambda_n > 0) {
    const SparseMatrixR ln = sys.matrix.middleRows(dm.lambda_n_offset, dm.num_lambda_n);
    const double wnorm = sol.coeffs.segment(dm.w_offset, 3 * dm.num_nodes).norm();
    const double r = (ln * sol.coeffs).norm();
    cq.lambda_n_residual = wnorm > 0.0 ? r / wnorm : r;
  }
  const int rows = dm.num_lambda_u_rows();
  if (rows > 0) {
    const SparseMatrixR lu = sys.matrix.middleRows(dm.lambda_u_offset, rows);
    const Eigen::VectorXd xu = sol.coeffs;
    const Eigen::VectorXd r = lu * xu - sys.rhs.segment(dm.lambda_u_offset, rows);
    const double scale = std::max(sys.rhs.segment(dm.lambda_u_offset, rows).norm(),
                                  (lu.cwiseAbs() * xu.cwiseAbs()).norm());
    cq.boundary_u_residual = scale > 0.0 ? r.norm() / scale : r.norm();
  }
  return cq;
}

StudyCase benchmark_study(BenchmarkCase c, const CaseOptions& opts) {
  const CaseReference ref = case_reference(c);
  StudyCase sc;
  sc.id = case_name(c);
  sc.make = [c, opts](int p, int n) { return apply_load_case(c, p, n, opts); };
  sc.probe = ref.point;
  sc.reference = ref.value;
  if (c == BenchmarkCase::flower) sc.pre_asymptotic_max_n = 4;
  return sc;
}

double quantity_of_interest(const StudyCase& c, const DiscreteSolution& sol, const EnergyReport& energy) {
  if (c.probe) return evaluate_solution(sol, (*c.probe)[0], (*c.probe)[1]).state.u[2];
  return energy.elastic_energy;
}

void fill_observed_orders(std::vector<ConvergenceRow>& rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = i; j-- > 0;) {
      const ConvergenceRow& prev = rows[j];
      if (prev.p != rows[i].p || prev.case_id != rows[i].case_id || !prev.error.empty() || !rows[i].error.empty())
        continue;
      if (prev.n >= rows[i].n) continue;
      const double ratio = std::log(static_cast<double>(rows[i].n) / prev.n);
      auto order = [&](double e1, double e2) -> std::optional<double> {
        if (!(e1 > 0.0) || !(e2 > 0.0) || !std::isfinite(e1) || !std::isfinite(e2)) return std::nullopt;
        return std::log(e1 / e2) / ratio;
      };
      rows[i].observed_order_force = order(prev.eps_force_rel, rows[i].eps_force_rel);
      rows[i].observed_order_moment = order(prev.eps_moment_abs, rows[i].eps_moment_abs);
      break;
    }
  }
}

double richardson_extrapolate(double coarse, double medium, double fine) {
  const double d1 = medium - coarse, d2 = fine - medium;
  const double denom = d2 - d1;
  if (denom == 0.0) return fine;
  return fine - d2 * d2 / denom;
}

std::vector<ConvergenceRow> convergence_study(const StudyCase& c, const std::vector<int>& p_list,
                                              const std::vector<int>& n_list, const StudyOptions& opts) {
  if (p_list.empty() || n_list.empty()) throw ArgumentError("convergence study needs nonempty p and n lists");
  if (!c.make) throw ArgumentError("study case has no problem factory");
  std::vector<ConvergenceRow> rows;
  for (int p : p_list) {
    for (int n : n_list) {
      ConvergenceRow row;
      row.case_id = c.id;
      row.p = p;
      row.n = n;
      row.h = 1.0 / n;
      row.pre_asymptotic = n <= c.pre_asymptotic_max_n;
      const auto t0 = Clock::now();
      try {
        auto prob = std::make_shared<ShellProblem>(c.make(p, n));
        prob->mode = opts.mode;
        prob->alpha = opts.alpha;
        prob->quad_bump = opts.quad_bump;
        const SolvedProblem solved = solve_problem(prob, opts.solver);
        row.dofs = solved.system.dofs.total_dofs;
        row.solver_residual = solved.report.residual_norm_rel;
        row.assembly_seconds = solved.assembly_seconds;
        row.solve_seconds = solved.report.seconds;
        const EnergyReport energy = stored_energy(solved.solution);
        row.energy = energy.elastic_energy;
        row.qoi = quantity_of_interest(c, solved.solution, energy);
        if (c.reference && *c.reference != 0.0) row.qoi_normalized = *row.qoi / *c.reference;
        if (opts.residuals && p >= 2) {
          const ResidualNorms rn = residual_norms(solved.solution);
          row.eps_force_rel = rn.eps_force_rel;
          row.eps_moment_abs = rn.eps_moment_abs;
        } else {
          row.eps_force_rel = row.eps_moment_abs = std::numeric_limits<double>::quiet_NaN();
        }
        row.tangentiality = constraint_quality(solved.solution, solved.system).tangentiality;
        row.seconds = seconds_since(t0);
        if (opts.on_solved) opts.on_solved(row, solved);
      } catch (const std::exception& ex) {
        row.error = ex.what();
        row.seconds = seconds_since(t0);
      }
      rows.push_back(std::move(row));
    }
  }
  fill_observed_orders(rows);
  return rows;
}

}  // namespace tdcshell
