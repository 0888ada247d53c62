#include "tdcshell/io.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <set>

#include "tdcshell/errors.hpp"

namespace tdcshell {

namespace {

void require_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double get_number(const Json& j, const std::string& key, double fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError(where + "." + key + " must be a number");
  return j.at(key).get<double>();
}

Vec3 to_vec3(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(where + " must be an array of 3 numbers");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw ConfigError(where + " must be an array of 3 numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

Json from_vec3(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }

std::vector<double> to_doubles(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + " must be an array of numbers");
  std::vector<double> out;
  for (const Json& x : j) {
    if (!x.is_number()) throw ConfigError(where + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

VectorField constant_field(const Vec3& v) {
  return [v](const Vec3&) { return v; };
}

const std::array<Edge, 4> kEdges{Edge::r_min, Edge::r_max, Edge::s_min, Edge::s_max};

EdgeKind parse_edge_kind(const std::string& name) {
  for (EdgeKind k : {EdgeKind::free, EdgeKind::clamped, EdgeKind::simply_supported, EdgeKind::symmetry,
                     EdgeKind::custom}) {
    if (name == edge_kind_name(k)) return k;
  }
  throw ConfigError("unknown edge kind '" + name + "'");
}

EdgeCondition edge_from_json(const Json& j, const std::string& where) {
  if (j.is_null()) return EdgeCondition::free();
  require_keys(j, {"kind", "u", "w", "g_u", "g_w", "traction", "moment"}, where);
  if (!j.contains("kind") || !j.at("kind").is_string()) throw ConfigError(where + ".kind must be a string");
  EdgeCondition ec;
  ec.kind = parse_edge_kind(j.at("kind").get<std::string>());
  auto dirs = [&](const char* key) {
    std::vector<Direction> out;
    if (!j.contains(key)) return out;
    if (ec.kind != EdgeKind::custom) throw ConfigError(where + "." + key + " is only allowed for kind 'custom'");
    if (!j.at(key).is_array()) throw ConfigError(where + "." + key + " must be an array of direction names");
    for (const Json& d : j.at(key)) {
      if (!d.is_string()) throw ConfigError(where + "." + key + " must be an array of direction names");
      out.push_back(parse_direction(d.get<std::string>()));
    }
    return out;
  };
  ec.u_dirs = dirs("u");
  ec.w_dirs = dirs("w");
  if (j.contains("g_u")) ec.g_u = constant_field(to_vec3(j.at("g_u"), where + ".g_u"));
  if (j.contains("g_w")) ec.g_w = constant_field(to_vec3(j.at("g_w"), where + ".g_w"));
  if (j.contains("traction")) ec.traction = constant_field(to_vec3(j.at("traction"), where + ".traction"));
  if (j.contains("moment")) ec.moment = constant_field(to_vec3(j.at("moment"), where + ".moment"));
  return ec;
}

std::shared_ptr<const GeometryMap> geometry_from_json(const Json& g) {
  if (!g.is_object() || !g.contains("type") || !g.at("type").is_string()) {
    throw ConfigError("problem.geometry needs a string 'type'");
  }
  const std::string type = g.at("type").get<std::string>();
  const std::string where = "problem.geometry";
  if (type == "plate") {
    require_keys(g, {"type", "lx", "ly"}, where);
    return make_analytic(FlatPlate{get_number(g, "lx", 1.0, where), get_number(g, "ly", 1.0, where)});
  }
  if (type == "cylinder") {
    require_keys(g, {"type", "radius", "length", "half_angle_deg"}, where);
    CylinderRoof c;
    c.radius = get_number(g, "radius", c.radius, where);
    c.length = get_number(g, "length", c.length, where);
    c.half_angle = get_number(g, "half_angle_deg", 40.0, where) * std::numbers::pi / 180.0;
    return make_analytic(c);
  }
  if (type == "hyperbolic_paraboloid") {
    require_keys(g, {"type", "lx", "ly"}, where);
    return make_analytic(HyperbolicParaboloid{get_number(g, "lx", 1.0, where), get_number(g, "ly", 1.0, where)});
  }
  if (type == "flower") {
    require_keys(g, {"type", "a", "b"}, where);
    return make_analytic(FlowerShell{get_number(g, "a", 2.3, where), get_number(g, "b", 0.8, where)});
  }
  if (type == "sphere") {
    require_keys(g, {"type", "radius", "theta0", "theta1", "phi0", "phi1"}, where);
    SpherePatch s;
    s.radius = get_number(g, "radius", s.radius, where);
    s.t0 = get_number(g, "theta0", s.t0, where);
    s.t1 = get_number(g, "theta1", s.t1, where);
    s.p0 = get_number(g, "phi0", s.p0, where);
    s.p1 = get_number(g, "phi1", s.p1, where);
    return make_analytic(s);
  }
  if (type == "nurbs") {
    require_keys(g, {"type", "patch"}, where);
    if (!g.contains("patch")) throw ConfigError("nurbs geometry needs a 'patch'");
    return std::make_shared<NurbsGeometry>(patch_from_json(g.at("patch")));
  }
  throw ConfigError("unknown geometry type '" + type + "'");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

}  // namespace

Json patch_to_json(const NurbsPatch& patch) {
  Json j;
  j["degree_r"] = patch.degree_r();
  j["degree_s"] = patch.degree_s();
  j["knots_r"] = patch.kv_r.knots();
  j["knots_s"] = patch.kv_s.knots();
  j["n_r"] = patch.n_r();
  j["n_s"] = patch.n_s();
  Json pts = Json::array();
  for (const Vec3& p : patch.control_points) pts.push_back(from_vec3(p));
  j["control_points"] = std::move(pts);
  j["weights"] = patch.weights;
  return j;
}

NurbsPatch patch_from_json(const Json& j) {
  const std::string where = "patch";
  require_keys(j, {"degree_r", "degree_s", "knots_r", "knots_s", "n_r", "n_s", "control_points", "weights"}, where);
  for (const char* key : {"degree_r", "degree_s", "knots_r", "knots_s", "control_points"}) {
    if (!j.contains(key)) throw ConfigError(std::string("patch is missing '") + key + "'");
  }
  if (!j.at("degree_r").is_number_integer() || !j.at("degree_s").is_number_integer()) {
    throw ConfigError("patch degrees must be integers");
  }
  try {
    KnotVector kr(j.at("degree_r").get<int>(), to_doubles(j.at("knots_r"), "patch.knots_r"));
    KnotVector ks(j.at("degree_s").get<int>(), to_doubles(j.at("knots_s"), "patch.knots_s"));
    if (j.contains("n_r") && j.at("n_r") != kr.num_basis()) throw ConfigError("patch.n_r disagrees with knots_r");
    if (j.contains("n_s") && j.at("n_s") != ks.num_basis()) throw ConfigError("patch.n_s disagrees with knots_s");
    std::vector<Vec3> pts;
    if (!j.at("control_points").is_array()) throw ConfigError("patch.control_points must be an array");
    for (const Json& p : j.at("control_points")) pts.push_back(to_vec3(p, "patch.control_points[]"));
    std::vector<double> w = j.contains("weights") ? to_doubles(j.at("weights"), "patch.weights")
                                                  : std::vector<double>(pts.size(), 1.0);
    NurbsPatch patch(std::move(kr), std::move(ks), std::move(pts), std::move(w));
    patch.validate();
    return patch;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("invalid patch: ") + ex.what());
  }
}

ShellProblem ProblemDefinition::build(int p, int n) const {
  if (benchmark) return apply_load_case(*benchmark, p, n, case_options);
  ShellProblem prob;
  prob.case_id = id;
  prob.geom = geometry_from_json(geometry);
  if (const auto* ng = dynamic_cast<const NurbsGeometry*>(prob.geom.get())) {
    // isoparametric: the field basis is the refined geometry basis
    NurbsPatch fine = refine_uniform(elevate_degree(ng->patch(), p), n);
    prob.geom = std::make_shared<NurbsGeometry>(fine);
    prob.patch = std::move(fine);
  } else {
    prob.patch = field_patch_for(*prob.geom, p, n);
  }
  prob.mat = mat;
  prob.f = constant_field(f);
  prob.c = constant_field(c);
  for (int k = 0; k < 4; ++k) {
    prob.edges[k] = edge_from_json(edges[k], std::string("problem.edges.") + edge_name(kEdges[k]));
  }
  prob.pinned_mean_translations = pinned_mean_translations;
  return prob;
}

StudyCase ProblemDefinition::study() const {
  if (benchmark) return benchmark_study(*benchmark, case_options);
  StudyCase sc;
  sc.id = id;
  ProblemDefinition copy = *this;
  sc.make = [copy](int p, int n) { return copy.build(p, n); };
  sc.probe = probe;
  sc.reference = reference;
  return sc;
}

ProblemDefinition problem_from_json(const Json& j) {
  ProblemDefinition def;
  if (j.contains("case")) {
    require_keys(j, {"case", "nurbs_geometry"}, "problem");
    if (!j.at("case").is_string()) throw ConfigError("problem.case must be a string");
    def.benchmark = parse_case(j.at("case").get<std::string>());
    def.id = case_name(*def.benchmark);
    if (j.contains("nurbs_geometry")) {
      if (!j.at("nurbs_geometry").is_boolean()) throw ConfigError("problem.nurbs_geometry must be a boolean");
      def.case_options.nurbs_geometry = j.at("nurbs_geometry").get<bool>();
      if (def.case_options.nurbs_geometry && *def.benchmark != BenchmarkCase::scordelis_lo) {
        throw ConfigError("nurbs_geometry is only available for scordelis_lo");
      }
    }
    return def;
  }
  require_keys(j, {"id", "geometry", "material", "load", "edges", "pinned_mean_translations", "probe", "reference"},
               "problem");
  if (j.contains("id")) {
    if (!j.at("id").is_string()) throw ConfigError("problem.id must be a string");
    def.id = j.at("id").get<std::string>();
  }
  if (!j.contains("geometry")) throw ConfigError("problem needs a 'case' or a 'geometry'");
  def.geometry = j.at("geometry");
  geometry_from_json(def.geometry);  // validate early

  if (!j.contains("material")) throw ConfigError("problem needs a 'material'");
  const Json& m = j.at("material");
  require_keys(m, {"E", "nu", "t", "alpha_s"}, "problem.material");
  for (const char* key : {"E", "nu", "t"}) {
    if (!m.contains(key)) throw ConfigError(std::string("problem.material is missing '") + key + "'");
  }
  def.mat.E = get_number(m, "E", 0.0, "problem.material");
  def.mat.nu = get_number(m, "nu", 0.0, "problem.material");
  def.mat.t = get_number(m, "t", 0.0, "problem.material");
  def.mat.alpha_s = get_number(m, "alpha_s", 1.0, "problem.material");
  try {
    def.mat.validate();
  } catch (const ArgumentError& ex) {
    throw ConfigError(ex.what());
  }

  if (j.contains("load")) {
    const Json& l = j.at("load");
    require_keys(l, {"f", "c"}, "problem.load");
    if (l.contains("f")) def.f = to_vec3(l.at("f"), "problem.load.f");
    if (l.contains("c")) def.c = to_vec3(l.at("c"), "problem.load.c");
  }
  if (j.contains("edges")) {
    const Json& e = j.at("edges");
    require_keys(e, {"r_min", "r_max", "s_min", "s_max"}, "problem.edges");
    for (int k = 0; k < 4; ++k) {
      const std::string name = edge_name(kEdges[k]);
      if (e.contains(name)) {
        def.edges[k] = e.at(name);
        edge_from_json(def.edges[k], "problem.edges." + name);
      }
    }
  }
  if (j.contains("pinned_mean_translations")) {
    if (!j.at("pinned_mean_translations").is_array()) {
      throw ConfigError("problem.pinned_mean_translations must be an array of 3-vectors");
    }
    for (const Json& a : j.at("pinned_mean_translations")) {
      def.pinned_mean_translations.push_back(to_vec3(a, "problem.pinned_mean_translations[]"));
    }
  }
  if (j.contains("probe")) {
    const auto v = to_doubles(j.at("probe"), "problem.probe");
    if (v.size() != 2) throw ConfigError("problem.probe must be a parameter point [r, s]");
    def.probe = Vec2(v[0], v[1]);
  }
  if (j.contains("reference")) def.reference = get_number(j, "reference", 0.0, "problem");
  return def;
}

Json problem_to_json(const ProblemDefinition& def) {
  Json j;
  if (def.benchmark) {
    j["case"] = case_name(*def.benchmark);
    if (def.case_options.nurbs_geometry) j["nurbs_geometry"] = true;
    return j;
  }
  j["id"] = def.id;
  j["geometry"] = def.geometry;
  j["material"] = {{"E", def.mat.E}, {"nu", def.mat.nu}, {"t", def.mat.t}, {"alpha_s", def.mat.alpha_s}};
  j["load"] = {{"f", from_vec3(def.f)}, {"c", from_vec3(def.c)}};
  Json edges = Json::object();
  for (int k = 0; k < 4; ++k) {
    if (!def.edges[k].is_null()) edges[edge_name(kEdges[k])] = def.edges[k];
  }
  j["edges"] = std::move(edges);
  if (!def.pinned_mean_translations.empty()) {
    Json a = Json::array();
    for (const Vec3& v : def.pinned_mean_translations) a.push_back(from_vec3(v));
    j["pinned_mean_translations"] = std::move(a);
  }
  if (def.probe) j["probe"] = {(*def.probe)[0], (*def.probe)[1]};
  if (def.reference) j["reference"] = *def.reference;
  return j;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "case",          "p",           "n",          "h",           "dofs",           "qoi",
      "qoi_normalized", "eps_force_rel", "eps_moment_abs", "energy",  "tangentiality", "solver_residual",
      "order_force",   "order_moment", "pre_asymptotic", "error"};
  return cols;
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const ConvergenceRow& r : rows) {
    const bool ok = r.error.empty();
    auto num = [ok](double v) { return ok ? format_double(v) : std::string(); };
    os << csv_quote(r.case_id) << ',' << r.p << ',' << r.n << ',' << format_double(r.h) << ','
       << (ok ? std::to_string(r.dofs) : std::string()) << ',' << format_optional(r.qoi) << ','
       << format_optional(r.qoi_normalized) << ',' << num(r.eps_force_rel) << ',' << num(r.eps_moment_abs) << ','
       << num(r.energy) << ',' << num(r.tangentiality) << ',' << num(r.solver_residual) << ','
       << format_optional(r.observed_order_force) << ',' << format_optional(r.observed_order_moment) << ','
       << (r.pre_asymptotic ? 1 : 0) << ',' << csv_quote(r.error) << '\n';
  }
}

void write_vtk(std::ostream& os, const DiscreteSolution& sol, const VtkOptions& opts) {
  if (opts.samples_per_span < 1) throw ArgumentError("samples_per_span must be >= 1");
  const NurbsPatch& patch = sol.problem->patch;
  auto samples = [&](const KnotVector& kv) {
    const auto bp = kv.breakpoints();
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
      for (int k = 0; k < opts.samples_per_span; ++k) {
        out.push_back(bp[i] + (bp[i + 1] - bp[i]) * k / opts.samples_per_span);
      }
    }
    out.push_back(bp.back());
    return out;
  };
  const std::vector<double> rs = samples(patch.kv_r), ss = samples(patch.kv_s);
  const std::size_t nr = rs.size(), ns = ss.size();

  std::vector<PointEvaluation> evals;
  evals.reserve(nr * ns);
  for (double s : ss) {
    for (double r : rs) evals.push_back(evaluate_solution(sol, r, s));
  }

  char buf[128];
  auto vec = [&](const Vec3& v) {
    std::snprintf(buf, sizeof buf, "%.10e %.10e %.10e\n", v[0], v[1], v[2]);
    os << buf;
  };
  auto scalar = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.10e\n", v);
    os << buf;
  };

  os << "# vtk DataFile Version 3.0\n";
  os << "tdcshell " << sol.problem->case_id << " p=" << patch.degree_r() << " n=" << patch.kv_r.num_spans() << '\n';
  os << "ASCII\nDATASET POLYDATA\n";
  os << "POINTS " << evals.size() << " double\n";
  for (const auto& e : evals) vec(e.frame.x);
  const std::size_t quads = (nr - 1) * (ns - 1);
  os << "POLYGONS " << quads << ' ' << 5 * quads << '\n';
  for (std::size_t j = 0; j + 1 < ns; ++j) {
    for (std::size_t i = 0; i + 1 < nr; ++i) {
      const std::size_t a = i + nr * j;
      os << "4 " << a << ' ' << a + 1 << ' ' << a + 1 + nr << ' ' << a + nr << '\n';
    }
  }
  os << "POINT_DATA " << evals.size() << '\n';
  os << "VECTORS u double\n";
  for (const auto& e : evals) vec(e.state.u);
  os << "VECTORS w double\n";
  for (const auto& e : evals) vec(e.state.w);
  std::vector<PrincipalMoments> pm;
  pm.reserve(evals.size());
  for (const auto& e : evals) pm.push_back(principal_moments(e.resultants.m));
  os << "SCALARS m1 double 1\nLOOKUP_TABLE default\n";
  for (const auto& m : pm) scalar(m.m1);
  os << "SCALARS m2 double 1\nLOOKUP_TABLE default\n";
  for (const auto& m : pm) scalar(m.m2);
}

}  // namespace tdcshell
