#include "hardy/cli.hpp"

#include "hardy/errors.hpp"
#include "hardy/map_functionals.hpp"
#include "hardy/parallel.hpp"
#include "hardy/shape_derivative.hpp"
#include "hardy/stability.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace hardy {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &pos);
  } catch (const std::exception&) {
    throw Error(ErrorKind::parameter, "not a number for " + what + ": '" + text + "'");
  }
  if (pos != t.size() || !std::isfinite(v))
    throw Error(ErrorKind::parameter, "not a number for " + what + ": '" + text + "'");
  return v;
}

long to_integer(const std::string& text, const std::string& what) {
  const double v = to_double(text, what);
  if (v != std::floor(v)) throw Error(ErrorKind::parameter, what + " must be an integer");
  return static_cast<long>(v);
}

bool to_bool(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw Error(ErrorKind::parameter, what + " must be a boolean");
}

Vec2 to_vec2(const std::string& text, const std::string& what) {
  const auto v = parse_list(text);
  if (v.size() != 2) throw Error(ErrorKind::parameter, what + " needs two comma-separated numbers");
  return Vec2(v[0], v[1]);
}

std::vector<double> numbers(const std::string& text, std::size_t n, const std::string& what) {
  const auto v = parse_list(text);
  if (v.size() != n)
    throw Error(ErrorKind::parameter, what + " needs " + std::to_string(n) + " comma-separated numbers");
  return v;
}

Json json_list(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

std::string fixed(double x, int digits = 10) {
  if (!std::isfinite(x)) return "nan";
  std::ostringstream os;
  os << std::setprecision(digits) << x;
  return os.str();
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::applicability:
    case ErrorKind::focal_point:
      return exit_inapplicable;
    case ErrorKind::convergence_failure:
    case ErrorKind::mesh_failure:
    case ErrorKind::geometry_failure:
    case ErrorKind::degenerate_map:
    case ErrorKind::degenerate_field:
    case ErrorKind::construction_failure:
    case ErrorKind::sampling:
      return exit_solver;
    default:
      return exit_validation;
  }
}

const std::map<std::string, std::string>& config_keys() {
  static const std::map<std::string, std::string> keys = {
      {"command", "run"},          {"seed", "run"},
      {"domain", "domain"},        {"boundary-points", "domain"},
      {"other-domain", "domain"},  {"point", "domain"},
      {"p", "solver"},             {"tol", "solver"},
      {"max-iterations", "solver"}, {"krylov-dim", "solver"},
      {"H", "solver"},             {"h", "mesh"},
      {"levels", "mesh"},          {"grading", "mesh"},
      {"layers", "mesh"},          {"boundary-factor", "mesh"},
      {"quality-angle", "mesh"},   {"psi", "perturbation"},
      {"fd-steps", "perturbation"}, {"formula-only", "perturbation"},
      {"force", "perturbation"},   {"t-grid", "sweep"},
      {"amplitudes", "sweep"},     {"check", "sweep"},
      {"r", "sweep"},              {"s", "sweep"},
      {"cylinder", "sweep"},       {"rho", "sweep"},
      {"M", "sweep"},              {"delta", "sweep"},
      {"trials", "sweep"},
  };
  return keys;
}

Settings read_config(std::istream& in) {
  CLI::ConfigINI parser;
  std::vector<CLI::ConfigItem> items;
  try {
    items = parser.from_config(in);
  } catch (const CLI::Error& e) {
    throw Error(ErrorKind::parameter, std::string("config file: ") + e.what());
  }
  Settings out;
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    const auto& keys = config_keys();
    const auto it = keys.find(item.name);
    if (it == keys.end()) throw Error(ErrorKind::parameter, "config file: unknown key '" + item.fullname() + "'");
    const std::string section = item.parents.empty() ? "" : item.parents.back();
    if (!section.empty() && section != it->second)
      throw Error(ErrorKind::parameter,
                  "config file: key '" + item.name + "' belongs in [" + it->second + "], found in [" + section + "]");
    std::string value;
    for (std::size_t i = 0; i < item.inputs.size(); ++i) value += (i ? "," : "") + item.inputs[i];
    out[item.name] = value;
  }
  return out;
}

Settings read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::parameter, "config file not found: " + path);
  return read_config(in);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const auto& part : split(text, ',')) out.push_back(to_double(part, "list '" + text + "'"));
  return out;
}

RunConfig resolve_config(const Settings& settings) {
  RunConfig c;
  for (const auto& [key, value] : settings) {
    if (key == "command") c.command = trim(value);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_integer(value, key));
    else if (key == "domain") c.domain = trim(value);
    else if (key == "boundary-points") c.boundary_points = static_cast<int>(to_integer(value, key));
    else if (key == "other-domain") c.other_domain = trim(value);
    else if (key == "point") c.point = trim(value);
    else if (key == "p") c.p = to_double(value, key);
    else if (key == "tol") c.solver.tol = to_double(value, key);
    else if (key == "max-iterations") c.solver.max_iterations = static_cast<int>(to_integer(value, key));
    else if (key == "krylov-dim") c.solver.krylov_dim = static_cast<int>(to_integer(value, key));
    else if (key == "H") c.H = to_double(value, key);
    else if (key == "h") c.mesh.h = to_double(value, key);
    else if (key == "levels") c.levels = static_cast<int>(to_integer(value, key));
    else if (key == "grading") c.mesh.grading = to_double(value, key);
    else if (key == "layers") c.mesh.layers = static_cast<int>(to_integer(value, key));
    else if (key == "boundary-factor") c.mesh.boundary_factor = to_double(value, key);
    else if (key == "quality-angle") c.mesh.quality_angle = to_double(value, key);
    else if (key == "psi") c.psi = trim(value);
    else if (key == "fd-steps") c.fd_steps = parse_list(value);
    else if (key == "formula-only") c.formula_only = to_bool(value, key);
    else if (key == "force") c.force = to_bool(value, key);
    else if (key == "t-grid") c.t_grid = parse_list(value);
    else if (key == "amplitudes") c.amplitudes = parse_list(value);
    else if (key == "check") c.check = trim(value);
    else if (key == "r") c.r = to_double(value, key);
    else if (key == "s") c.s = to_double(value, key);
    else if (key == "cylinder") c.cylinder = trim(value);
    else if (key == "rho") c.rho = to_double(value, key);
    else if (key == "M") c.M = to_double(value, key);
    else if (key == "delta") c.delta = to_double(value, key);
    else if (key == "trials") c.trials = static_cast<int>(to_integer(value, key));
    else throw Error(ErrorKind::parameter, "unknown setting '" + key + "'");
  }

  static const std::vector<std::string> commands = {"solve", "alpha", "derivative", "family", "stability", "geometry"};
  if (std::find(commands.begin(), commands.end(), c.command) == commands.end())
    throw Error(ErrorKind::parameter, "unknown command '" + c.command + "'");
  if (!(c.p > 1.0)) throw Error(ErrorKind::parameter, "p must exceed 1");
  if (c.levels < 1) throw Error(ErrorKind::parameter, "levels must be at least 1");
  if (!(c.mesh.h > 0.0)) throw Error(ErrorKind::parameter, "h must be positive");
  if (c.boundary_points < 16) throw Error(ErrorKind::parameter, "boundary-points must be at least 16");
  if (!(c.solver.tol > 0.0)) throw Error(ErrorKind::parameter, "tol must be positive");
  if (c.command == "derivative" || c.command == "family" ||
      (c.command == "stability" && (c.check == "minimizer" || c.check == "lipschitz" || c.check == "usc"))) {
    if (c.psi.empty()) throw Error(ErrorKind::parameter, c.command + " needs a perturbation field (psi)");
  }
  if (c.command == "stability") {
    static const std::vector<std::string> checks = {"minimizer", "lipschitz", "usc", "volume", "toperator"};
    if (std::find(checks.begin(), checks.end(), c.check) == checks.end())
      throw Error(ErrorKind::parameter, "unknown stability check '" + c.check + "'");
  }
  if (c.command == "alpha" && !(c.H > 0.0))
    throw Error(ErrorKind::parameter, "alpha needs H > 0");
  if (c.command == "family" && c.t_grid.empty()) throw Error(ErrorKind::parameter, "t-grid is empty");
  if (c.domain.rfind("polygon:", 0) == 0 && !std::filesystem::exists(c.domain.substr(8)))
    throw Error(ErrorKind::parameter, "polygon file not found: " + c.domain.substr(8));
  return c;
}

Json config_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  j["domain"] = Json{{"spec", c.domain}, {"boundary_points", c.boundary_points}};
  if (!c.other_domain.empty()) j["domain"]["other"] = c.other_domain;
  if (!c.point.empty()) j["domain"]["point"] = c.point;
  j["p"] = c.p;
  j["mesh"] = to_json(c.mesh);
  j["mesh"]["levels"] = c.levels;
  j["solver"] = Json{{"tol", c.solver.tol}, {"max_iterations", c.solver.max_iterations},
                     {"krylov_dim", c.solver.krylov_dim}};
  if (c.command == "alpha") j["H"] = c.H;
  if (!c.psi.empty()) j["psi"] = c.psi;
  if (c.command == "derivative") {
    j["fd_steps"] = json_list(c.fd_steps);
    j["formula_only"] = c.formula_only;
  }
  if (c.command == "family") j["t_grid"] = json_list(c.t_grid);
  if (c.command == "stability") {
    j["check"] = c.check;
    j["t_grid"] = json_list(c.t_grid);
    j["amplitudes"] = json_list(c.amplitudes);
    j["r"] = c.r;
    j["s"] = c.s;
    j["cylinder"] = c.cylinder;
    j["rho"] = c.rho;
    j["M"] = c.M;
    j["delta"] = c.delta;
    j["trials"] = c.trials;
  }
  j["force"] = c.force;
  j["seed"] = c.seed;
  return j;
}

Domain parse_domain(const std::string& spec, int boundary_points) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  CurvePtr curve;
  if (kind == "disk") {
    const double r = args.empty() ? 1.0 : to_double(args, "disk radius");
    if (!(r > 0)) throw Error(ErrorKind::parameter, "disk radius must be positive");
    curve = std::make_shared<Circle>(r);
  } else if (kind == "square") {
    if (!args.empty()) throw Error(ErrorKind::parameter, "square takes no arguments");
    curve = make_rectangle(1.0, 1.0);
  } else if (kind == "rectangle") {
    const auto v = numbers(args, 2, "rectangle");
    if (!(v[0] > 0 && v[1] > 0)) throw Error(ErrorKind::parameter, "rectangle sides must be positive");
    curve = make_rectangle(v[0], v[1]);
  } else if (kind == "ellipse") {
    const auto v = numbers(args, 2, "ellipse");
    if (!(v[0] > 0 && v[1] > 0)) throw Error(ErrorKind::parameter, "ellipse semi-axes must be positive");
    curve = std::make_shared<Ellipse>(v[0], v[1]);
  } else if (kind == "star" || kind == "peanut") {
    double beta = 0.55;
    int k = 2;
    if (kind == "star") {
      const auto v = numbers(args, 2, "star");
      beta = v[0];
      k = static_cast<int>(v[1]);
      if (k != v[1] || k < 1) throw Error(ErrorKind::parameter, "star k must be a positive integer");
    } else if (!args.empty()) {
      beta = to_double(args, "peanut beta");
    }
    if (!(beta >= 0 && beta < 1)) throw Error(ErrorKind::parameter, "star beta must lie in [0, 1)");
    curve = std::make_shared<StarCurve>(beta, k);
  } else if (kind == "cassini") {
    const auto v = numbers(args, 2, "cassini");
    if (!(v[1] > v[0] && v[0] >= 0)) throw Error(ErrorKind::parameter, "cassini needs c > a >= 0");
    curve = std::make_shared<CassiniOval>(v[0], v[1]);
  } else if (kind == "polygon") {
    if (!std::filesystem::exists(args)) throw Error(ErrorKind::parameter, "polygon file not found: " + args);
    curve = read_polygon_file(args);
  } else {
    throw Error(ErrorKind::parameter, "unknown domain '" + spec + "'");
  }
  return Domain(curve, boundary_points);
}

FieldPtr parse_field(const std::string& spec, const Domain& domain) {
  const auto parts = split(spec, ':');
  const std::string& kind = parts[0];
  auto center = [&](std::size_t i) { return parts.size() > i ? to_vec2(parts[i], kind + " centre") : Vec2::Zero(); };
  if (kind == "translation") {
    if (parts.size() != 2) throw Error(ErrorKind::parameter, "translation:cx,cy expected");
    return translation_field(center(1));
  }
  if (kind == "dilation") return dilation_field(center(1));
  if (kind == "rotation") return rotation_field(center(1));
  if (kind == "affine") {
    if (parts.size() < 2) throw Error(ErrorKind::parameter, "affine:a11,a12,a21,a22[:b1,b2] expected");
    const auto a = numbers(parts[1], 4, "affine matrix");
    Mat2 m;
    m << a[0], a[1], a[2], a[3];
    return affine_field(m, center(2));
  }
  if (kind == "bump") {
    if (parts.size() < 4 || parts.size() > 6)
      throw Error(ErrorKind::parameter, "bump:cx,cy:width:dx,dy[:amplitude[:cutoff]] expected");
    BumpSpec b;
    b.center = to_vec2(parts[1], "bump centre");
    b.width = to_double(parts[2], "bump width");
    b.direction = to_vec2(parts[3], "bump direction");
    if (parts.size() > 4) b.amplitude = to_double(parts[4], "bump amplitude");
    if (parts.size() > 5)
      b.cutoff = trim(parts[5]) == "auto" ? default_collar_depth(domain) : to_double(parts[5], "bump cutoff");
    return normal_bump_field(b, b.cutoff > 0 ? std::make_shared<const Domain>(domain) : nullptr);
  }
  throw Error(ErrorKind::parameter, "unknown field '" + spec + "'");
}

Cylinder parse_cylinder(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() > 3) throw Error(ErrorKind::parameter, "cylinder w0,w1,a,b[:ox,oy[:angle]] expected");
  const auto v = numbers(parts[0], 4, "cylinder");
  Cylinder c;
  c.w0 = v[0];
  c.w1 = v[1];
  c.a = v[2];
  c.b = v[3];
  if (!(c.w1 > c.w0 && c.b > c.a)) throw Error(ErrorKind::parameter, "cylinder needs w0 < w1 and a < b");
  if (parts.size() > 1) c.frame.origin = to_vec2(parts[1], "cylinder origin");
  if (parts.size() > 2) {
    const double th = to_double(parts[2], "cylinder angle");
    c.frame.tangent = Vec2(std::cos(th), std::sin(th));
    c.frame.normal = Vec2(-std::sin(th), std::cos(th));
  }
  return c;
}

namespace {

MeshParams level_mesh(const RunConfig& c, int level) {
  MeshParams m = c.mesh;
  m.h = c.mesh.h / std::pow(2.0, level);
  return m;
}

RunOutcome run_solve(const RunConfig& c, const Domain& domain) {
  RunOutcome o;
  Json levels = Json::array();
  double H_prev = NAN;
  for (int l = 0; l < c.levels; ++l) {
    const MeshParams m = level_mesh(c, l);
    HardyResult r;
    if (l == 0) {
      r = solve_domain(domain, c.p, m, c.solver).result;
    } else {
      r = minimize_hardy(discretize(domain, m), c.p, c.solver, existence_margin(0.0, 0.0));
      r.H_coarse = H_prev;
      r.margin = existence_margin(r.H, H_prev);
      r.existence_flag = r.H < convex_constant(c.p) - r.margin;
      r.alpha = r.existence_flag ? solve_alpha(c.p, r.H) : NAN;
    }
    H_prev = r.H;
    levels.push_back(to_json(r));
    o.summary.push_back("solve h=" + fixed(m.h, 6) + " H=" + fixed(r.H) + " alpha=" + fixed(r.alpha) +
                        " existence=" + (r.existence_flag ? "true" : "false") +
                        " vertices=" + std::to_string(r.n_vertices));
  }
  o.result["convex_constant"] = convex_constant(c.p);
  o.result["levels"] = levels;
  return o;
}

RunOutcome run_alpha(const RunConfig& c) {
  RunOutcome o;
  const double a = solve_alpha(c.p, c.H);
  o.result["p"] = c.p;
  o.result["H"] = c.H;
  o.result["alpha"] = a;
  o.summary.push_back(fixed(a, 15));
  return o;
}

RunOutcome run_derivative(const RunConfig& c, const Domain& domain) {
  RunOutcome o;
  const FieldPtr psi = parse_field(c.psi, domain);
  HadamardOptions opt;
  opt.solver.max_iterations = c.solver.max_iterations;
  opt.solver.krylov_dim = c.solver.krylov_dim;
  opt.solver.tol = std::min(c.solver.tol, 1e-11);
  opt.steps = c.fd_steps;
  opt.force = c.force;
  opt.formula_only = c.formula_only;
  Json levels = Json::array();
  bool applicable = true;
  for (int l = 0; l < c.levels; ++l) {
    const MeshParams m = level_mesh(c, l);
    const DerivativeReport r = hadamard_derivative(domain, psi, c.p, m, opt);
    Json j = to_json(r);
    j["h"] = m.h;
    levels.push_back(j);
    applicable = applicable && r.applicability;
    o.summary.push_back("derivative h=" + fixed(m.h, 6) + " formula=" + fixed(r.formula_value) +
                        " fd=" + fixed(r.fd_value) + " gap=" + fixed(r.relative_gap, 4) +
                        " applicable=" + (r.applicability ? "true" : "false"));
    if (!r.applicability && !c.force) break;
  }
  o.result["psi"] = psi->describe();
  o.result["levels"] = levels;
  if (!applicable && !c.force) o.status = exit_inapplicable;
  return o;
}

RunOutcome run_family(const RunConfig& c, const Domain& domain) {
  RunOutcome o;
  const FieldPtr psi = parse_field(c.psi, domain);
  const auto rows = hardy_family(domain, psi, c.t_grid, c.p, c.mesh, c.solver);
  Json a = Json::array();
  for (const auto& r : rows) {
    a.push_back(Json{{"t", r.t}, {"H", r.H}, {"min_det", r.min_det}, {"n_vertices", r.n_vertices}});
    o.summary.push_back("family t=" + fixed(r.t, 6) + " H=" + fixed(r.H));
  }
  o.result["rows"] = a;
  o.result["csv"] = to_csv(rows);
  return o;
}

SweepSpec sweep_spec(const RunConfig& c, const Domain& domain) {
  SweepSpec s{domain, nullptr, c.amplitudes, c.p, c.mesh, c.solver, c.force};
  if (!c.psi.empty()) s.field = parse_field(c.psi, domain);
  return s;
}

RunOutcome run_stability(const RunConfig& c, const Domain& domain) {
  RunOutcome o;
  bool applicable = true;
  if (c.check == "minimizer") {
    StabilityOptions opt;
    opt.solver = c.solver;
    opt.force = c.force;
    opt.jitter_seed = c.seed;
    const StabilityTable t = minimizer_stability(domain, parse_field(c.psi, domain), c.t_grid, c.p, c.mesh, opt);
    o.result = to_json(t);
    o.result["csv"] = to_csv(t);
    applicable = t.applicability;
    for (const auto& r : t.rows)
      o.summary.push_back("stability t=" + fixed(r.t, 6) + " pullback=" + fixed(r.pullback_gap, 6) +
                          " extension=" + fixed(r.extension_gap, 6) + " floor=" + fixed(t.noise_floor, 6));
  } else if (c.check == "toperator") {
    const double delta = c.delta > 0 ? c.delta : default_collar_depth(domain);
    const TOperatorReport t = t_operator_bound_check(domain, delta, c.r, c.trials, c.seed, c.mesh);
    o.result = to_json(t);
    o.summary.push_back("toperator delta=" + fixed(delta, 6) + " max_coarse=" + fixed(t.max_coarse, 6) +
                        " max_fine=" + fixed(t.max_fine, 6) + " pass=" + (t.pass ? "true" : "false"));
  } else {
    const SweepSpec spec = sweep_spec(c, domain);
    StabilityReport r;
    if (c.check == "lipschitz") r = lipschitz_continuity_check(spec);
    else if (c.check == "usc") r = upper_semicontinuity_check(spec, c.r);
    else r = volume_stability_check(spec, parse_cylinder(c.cylinder), c.rho, c.M, c.s);
    o.result = to_json(r);
    o.result["csv"] = to_csv(r);
    applicable = r.applicability;
    for (const auto& w : r.rows)
      o.summary.push_back(c.check + " eps=" + fixed(w.eps, 6) + " gap=" + fixed(w.gap, 6) +
                          " ratio=" + fixed(w.ratio, 6));
    o.summary.push_back(c.check + " pass=" + (r.pass ? "true" : "false") +
                        " inconclusive=" + (r.inconclusive ? "true" : "false"));
  }
  if (!applicable && !c.force) o.status = exit_inapplicable;
  return o;
}

RunOutcome run_geometry(const RunConfig& c, const Domain& domain) {
  RunOutcome o;
  Json g;
  g["curve"] = domain.curve().name();
  g["boundary_points"] = domain.size();
  g["area"] = domain.area();
  g["diameter"] = domain.diameter();
  const double inr = inradius(domain);
  g["inradius"] = inr;
  const double focal = focal_distance(domain);
  g["focal_distance"] = focal;
  const double collar = default_collar_depth(domain);
  g["collar_depth"] = collar;
  g["laplacian_bound"] = laplacian_bound(domain, collar);
  const Mesh mesh = build_mesh(domain, c.mesh);
  g["mesh"] = Json{{"h", c.mesh.h},
                   {"n_vertices", mesh.n_vertices()},
                   {"n_triangles", mesh.n_triangles()},
                   {"core_min_angle", min_angle(mesh, true)}};
  o.summary.push_back("geometry area=" + fixed(domain.area()) + " inradius=" + fixed(inr) +
                      " collar=" + fixed(collar) + " vertices=" + std::to_string(mesh.n_vertices()));
  if (!c.point.empty()) {
    const Vec2 x = to_vec2(c.point, "point");
    const DistanceQuery q = domain.distance(x);
    g["point"] = Json{{"x", json_list({x.x(), x.y()})},
                      {"d", q.d},
                      {"tau", json_list({q.tau.x(), q.tau.y()})},
                      {"grad", json_list({q.grad.x(), q.grad.y()})},
                      {"on_ridge", q.on_ridge}};
    o.summary.push_back("geometry d=" + fixed(q.d) + " on_ridge=" + (q.on_ridge ? "true" : "false"));
  }
  if (!c.other_domain.empty()) {
    const double sd = symmetric_difference_measure(domain, parse_domain(c.other_domain, c.boundary_points));
    g["symmetric_difference"] = sd;
    o.summary.push_back("geometry symmetric_difference=" + fixed(sd));
  }
  o.result = g;
  return o;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

RunOutcome execute(const RunConfig& c) {
  if (c.command == "alpha") return run_alpha(c);
  const Domain domain = parse_domain(c.domain, c.boundary_points);
  if (c.command == "solve") return run_solve(c, domain);
  if (c.command == "derivative") return run_derivative(c, domain);
  if (c.command == "family") return run_family(c, domain);
  if (c.command == "stability") return run_stability(c, domain);
  if (c.command == "geometry") return run_geometry(c, domain);
  throw Error(ErrorKind::parameter, "unknown command '" + c.command + "'");
}

Json error_record(const std::string& command, ErrorKind kind, const std::string& message) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["error"] = Json{{"kind", to_string(kind)}, {"exit_code", exit_code_for(kind)}, {"message", message}};
  return j;
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  const auto start = std::chrono::steady_clock::now();
  const std::string started = timestamp();
  set_num_threads(c.threads);
  const fs::path dir(c.out_dir);
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = c.command;
  doc["config"] = config_json(c);
  int status = exit_ok;
  try {
    RunOutcome o = execute(c);
    status = o.status;
    std::string csv;
    if (o.result.is_object() && o.result.contains("csv")) {
      csv = o.result["csv"].get<std::string>();
      o.result.erase("csv");
    }
    doc["status"] = status;
    doc["result"] = o.result;
    if (status == exit_inapplicable) {
      doc["error"] = error_record(c.command, ErrorKind::applicability, "no minimiser on the base domain")["error"];
      err << dump_json(error_record(c.command, ErrorKind::applicability, "no minimiser on the base domain"), 0);
    }
    write_atomic((dir / (c.command + ".json")).string(), dump_json(doc));
    if (!csv.empty()) write_atomic((dir / (c.command + ".csv")).string(), csv);
    for (const auto& line : o.summary) out << line << "\n";
  } catch (const Error& e) {
    status = exit_code_for(e.kind());
    const Json rec = error_record(c.command, e.kind(), e.what());
    err << dump_json(rec, 0);
    doc["status"] = status;
    doc["error"] = rec["error"];
    try {
      write_atomic((dir / (c.command + ".json")).string(), dump_json(doc));
    } catch (const Error&) {
    }
  }
  Json meta;
  meta["schema_version"] = kSchemaVersion;
  meta["command"] = c.command;
  meta["started"] = started;
  meta["finished"] = timestamp();
  meta["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  meta["threads"] = num_threads();
  meta["status"] = status;
  try {
    write_atomic((dir / (c.command + ".meta.json")).string(), dump_json(meta));
  } catch (const Error& e) {
    err << dump_json(error_record(c.command, ErrorKind::io, e.what()), 0);
    if (status == exit_ok) status = exit_validation;
  }
  return status;
}

}  // namespace hardy
