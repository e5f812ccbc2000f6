#include "hardy/shape_derivative.hpp"

#include "hardy/errors.hpp"
#include "hardy/parallel.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace hardy {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

MapPtr perturbed(const FieldPtr& psi, double t, const Domain& domain) {
  return std::make_shared<PerturbedIdentity>(psi, t, domain.diameter());
}

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

double relative_gap(double formula, double fd, double scale_floor) {
  const double den = std::max(std::abs(fd), scale_floor);
  if (!(den > 0)) return formula == fd ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(formula - fd) / den;
}

std::vector<FamilyRow> hardy_family(const Domain& domain, const FieldPtr& psi, const std::vector<double>& t_grid,
                                    double p, const MeshParams& mesh_params, const SolverParams& solver) {
  const std::vector<Vec2> samples = interior_samples(domain, 40);
  std::vector<FamilyRow> rows;
  for (double t : t_grid) {
    const MapPtr map = perturbed(psi, t, domain);
    const double det = min_jacobian_determinant(*map, samples);
    if (!(det > 0.1)) {
      std::ostringstream os;
      os << "t = " << t << " is outside the admissible range (min det " << det << ")";
      throw Error(ErrorKind::range, os.str());
    }
  }
  const Discretization base = discretize(domain, mesh_params);
  const HardyResult r0 = minimize_hardy(base, p, solver);
  for (double t : t_grid) {
    const MapPtr map = perturbed(psi, t, domain);
    const HardyResult r = t == 0.0 ? r0 : minimize_hardy(transport(base, map), p, solver, 0.005, &r0.minimizer);
    rows.push_back({t, r.H, min_jacobian_determinant(*map, samples), base.mesh.n_vertices()});
  }
  return rows;
}

DerivativeReport dist_family_derivative(const Domain& domain, const FieldPtr& psi, const Vec2& x, double t0,
                                        double p, double step) {
  auto image_at = [&](double t) { return t == 0.0 ? domain : transport_domain(domain, perturbed(psi, t, domain)); };
  const auto map0 = perturbed(psi, t0, domain);
  const Domain image0 = image_at(t0);
  const Vec2 y = map0->forward(x);
  const DistanceQuery q = image0.distance(y);
  if (q.on_ridge) throw Error(ErrorKind::ridge, "phi_t0(x) lies on the ridge");
  const Vec2 xt = t0 == 0.0 ? q.tau : map0->inverse(q.tau);
  const double V = q.grad.dot(psi->difference(x, xt)) / q.d;
  DerivativeReport r;
  r.t0 = t0;
  r.fd_step = step;
  r.formula_value = p * std::pow(q.d, p) * V;
  auto dp = [&](double t) {
    const Domain im = image_at(t);
    return std::pow(im.distance(perturbed(psi, t, domain)->forward(x)).d, p);
  };
  r.fd_value = (dp(t0 + step) - dp(t0 - step)) / (2.0 * step);
  r.relative_gap = relative_gap(r.formula_value, r.fd_value, 1e-5 * std::pow(q.d, p));
  return r;
}

double g_function(const Discretization& disc, const DiscreteField& u, const ScalarField& rho, const FieldPtr& psi,
                  double t, double p) {
  const auto& nodes = disc.quadrature.nodes();
  const bool identity = t == 0.0;
  const auto map = perturbed(psi, t, disc.domain);
  const Domain image = identity ? disc.domain : transport_domain(disc.domain, map);
  std::vector<double> term(nodes.size(), 0.0);
  parallel_for(static_cast<int>(nodes.size()), [&](int k) {
    const QuadNode& n = nodes[k];
    const double r = rho(n.x);
    if (r == 0.0) return;
    const double d = identity ? n.d : image.distance(map->forward(n.x)).d;
    term[k] = n.w * std::pow(std::abs(node_value(disc.mesh, u, n)) / d, p) * r;
  });
  return sum(term);
}

DerivativeReport g_function_derivative(const Discretization& disc, const DiscreteField& u, const ScalarField& rho,
                                       const FieldPtr& psi, double t0, double p, double step) {
  const auto& nodes = disc.quadrature.nodes();
  const auto map = perturbed(psi, t0, disc.domain);
  const Domain image = t0 == 0.0 ? disc.domain : transport_domain(disc.domain, map);
  std::vector<double> term(nodes.size(), 0.0), ridge(nodes.size(), 0.0);
  parallel_for(static_cast<int>(nodes.size()), [&](int k) {
    const QuadNode& n = nodes[k];
    const double r = rho(n.x);
    if (r == 0.0) return;
    double V, d;
    if (t0 == 0.0) {
      DistanceQuery q;
      q.d = n.d;
      q.tau = n.tau;
      q.grad = n.grad;
      V = v_identity(*psi, n.x, q);
      d = n.d;
      if (n.ridge) ridge[k] = n.w;
    } else {
      const DistanceQuery q = image.distance(map->forward(n.x));
      V = q.grad.dot(psi->difference(n.x, map->inverse(q.tau))) / q.d;
      d = q.d;
      if (q.on_ridge) ridge[k] = n.w;
    }
    term[k] = -p * n.w * std::pow(std::abs(node_value(disc.mesh, u, n)) / d, p) * r * V;
  });
  DerivativeReport rep;
  rep.t0 = t0;
  rep.fd_step = step;
  rep.formula_value = sum(term);
  rep.ridge_weight = sum(ridge);
  const double g0 = g_function(disc, u, rho, psi, t0, p);
  rep.fd_value = (g_function(disc, u, rho, psi, t0 + step, p) - g_function(disc, u, rho, psi, t0 - step, p)) /
                 (2.0 * step);
  rep.relative_gap = relative_gap(rep.formula_value, rep.fd_value, 1e-5 * std::abs(g0));
  return rep;
}

double hadamard_formula(const Discretization& disc, const DiscreteField& v, double H, double p,
                        const PerturbationField& psi, double* ridge_weight) {
  const auto grads = triangle_gradients(disc.mesh, v);
  const auto& nodes = disc.quadrature.nodes();
  std::vector<double> vol(nodes.size()), wt(nodes.size()), ridge(nodes.size(), 0.0);
  parallel_for(static_cast<int>(nodes.size()), [&](int k) {
    const QuadNode& n = nodes[k];
    const Vec2& g = grads[n.tri];
    const double gn = g.norm();
    const Mat2 J = psi.jacobian(n.x);
    const double div = J.trace();
    vol[k] = gn > 0 ? n.w * (std::pow(gn, p) * div - p * std::pow(gn, p - 2.0) * g.dot(J * g)) : 0.0;
    DistanceQuery q;
    q.d = n.d;
    q.tau = n.tau;
    q.grad = n.grad;
    const double V = v_identity(psi, n.x, q);
    const double val = std::abs(node_value(disc.mesh, v, n));
    wt[k] = n.w * std::pow(val / n.d, p) * (p * V - div);
    if (n.ridge) ridge[k] = n.w;
  });
  if (ridge_weight) *ridge_weight = sum(ridge);
  return sum(vol) + H * sum(wt);
}

DerivativeReport hadamard_derivative(const SolvedDomain& base, const FieldPtr& psi, double p,
                                     const HadamardOptions& options) {
  DerivativeReport rep;
  rep.H = base.result.H;
  rep.applicability = base.result.existence_flag;
  if (!rep.applicability) {
    std::ostringstream os;
    os.precision(10);
    os << "no minimiser: H_h = " << base.result.H << " is not below " << convex_constant(p) << " - margin "
       << base.result.margin;
    rep.note = os.str();
    if (!options.force) {
      rep.formula_value = rep.fd_value = rep.relative_gap = kNaN;
      return rep;
    }
  }
  const Discretization& disc = base.disc;
  const DiscreteField& v = base.result.minimizer;
  rep.formula_value = hadamard_formula(disc, v, base.result.H, p, *psi, &rep.ridge_weight);
  if (options.formula_only) {
    rep.fd_value = rep.relative_gap = kNaN;
    return rep;
  }
  auto H_at = [&](double t) {
    const Discretization dt = transport(disc, perturbed(psi, t, disc.domain));
    return minimize_hardy(dt, p, options.solver, base.result.margin, &v).H;
  };
  auto central = [&](double step) { return (H_at(step) - H_at(-step)) / (2.0 * step); };
  std::vector<double> fd;
  const auto& steps = options.steps;
  if (steps.empty()) throw Error(ErrorKind::parameter, "no finite-difference steps");
  fd.push_back(central(steps[0]));
  rep.fd_step = steps[0];
  rep.fd_value = fd[0];
  bool agreed = steps.size() == 1;
  for (std::size_t i = 1; i < steps.size(); ++i) {
    fd.push_back(central(steps[i]));
    rep.fd_step = steps[i];
    rep.fd_value = fd[i];
    if (std::abs(fd[i] - fd[i - 1]) <= 0.1 * std::max(std::abs(fd[i]), 1e-8 * std::max(1.0, rep.H))) {
      agreed = true;
      break;
    }
  }
  if (!agreed) rep.note += (rep.note.empty() ? "" : "; ") + std::string("no two FD steps agreed within 10%");
  rep.relative_gap = relative_gap(rep.formula_value, rep.fd_value, 1e-8 * std::max(1.0, rep.H));
  return rep;
}

DerivativeReport hadamard_derivative(const Domain& domain, const FieldPtr& psi, double p,
                                     const MeshParams& mesh_params, const HadamardOptions& options) {
  const SolvedDomain base = solve_domain(domain, p, mesh_params, options.solver);
  return hadamard_derivative(base, psi, p, options);
}

namespace {

// P1 values and gradients of a field on a mesh at arbitrary points.
class P1Sampler {
 public:
  P1Sampler(const Mesh& mesh, const DiscreteField& u)
      : mesh_(mesh), u_(u), locator_(mesh), grads_(triangle_gradients(mesh, u)) {}

  bool eval(const Vec2& x, double& value, Vec2& grad) const {
    Eigen::Vector3d b;
    const int t = locator_.locate(x, b);
    if (t < 0) {
      value = 0.0;
      grad = Vec2::Zero();
      return false;
    }
    const auto& tr = mesh_.triangles[t];
    value = b[0] * u_[tr[0]] + b[1] * u_[tr[1]] + b[2] * u_[tr[2]];
    grad = grads_[t];
    return true;
  }

 private:
  const Mesh& mesh_;
  const DiscreteField& u_;
  MeshLocator locator_;
  std::vector<Vec2> grads_;
};

struct Grid {
  Vec2 lo;
  double hs;
  int nx, ny;
  Vec2 point(int k) const { return lo + Vec2((k % nx + 0.5) * hs, (k / nx + 0.5) * hs); }
  int size() const { return nx * ny; }
};

Grid make_grid(const Mesh& a, const Mesh& b, double hs) {
  Vec2 lo = a.vertices[0], hi = a.vertices[0];
  for (const Mesh* m : {&a, &b})
    for (const auto& v : m->vertices) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
  Grid g{lo, hs, static_cast<int>(std::ceil((hi.x() - lo.x()) / hs)), static_cast<int>(std::ceil((hi.y() - lo.y()) / hs))};
  return g;
}

// (pullback gap, extension gap) of (mesh_t, v_t) against (mesh_0, v_0).
std::pair<double, double> gaps(const Mesh& m0, const DiscreteField& v0, const Mesh& mt, DiscreteField vt,
                               const DomainMap& phi, double p, double hs) {
  const Grid grid = make_grid(m0, mt, hs);
  const P1Sampler s0(m0, v0);
  // Sign alignment from the overlap integral.
  {
    const P1Sampler st(mt, vt);
    std::vector<double> prod(grid.size(), 0.0);
    parallel_for(grid.size(), [&](int k) {
      double a, b;
      Vec2 ga, gb;
      const Vec2 x = grid.point(k);
      if (s0.eval(x, a, ga) && st.eval(x, b, gb)) prod[k] = a * b;
    });
    if (sum(prod) < 0) vt = -vt;
  }
  const P1Sampler st(mt, vt);
  std::vector<double> pull(grid.size(), 0.0), ext(grid.size(), 0.0);
  parallel_for(grid.size(), [&](int k) {
    const Vec2 x = grid.point(k);
    double a, b;
    Vec2 ga, gb;
    const bool in0 = s0.eval(x, a, ga);
    const bool int_ = st.eval(x, b, gb);
    if (in0 || int_) ext[k] = std::pow((gb - ga).norm(), p) + std::pow(std::abs(b - a), p);
    if (in0) {
      double w;
      Vec2 gw;
      st.eval(phi.forward(x), w, gw);
      gw = phi.jacobian(x).transpose() * gw;
      pull[k] = std::pow((gw - ga).norm(), p) + std::pow(std::abs(w - a), p);
    }
  });
  const double cell = hs * hs;
  return {std::pow(sum(pull) * cell, 1.0 / p), std::pow(sum(ext) * cell, 1.0 / p)};
}

}  // namespace

StabilityTable minimizer_stability(const Domain& domain, const FieldPtr& psi, const std::vector<double>& t_seq,
                                   double p, const MeshParams& mesh_params, const StabilityOptions& options) {
  StabilityTable table;
  const SolvedDomain base = solve_domain(domain, p, mesh_params, options.solver);
  table.H_base = base.result.H;
  table.applicability = base.result.existence_flag;
  if (!table.applicability) {
    std::ostringstream os;
    os.precision(10);
    os << "no minimiser on the base domain: H_h = " << base.result.H << ", margin " << base.result.margin;
    table.note = os.str();
    if (!options.force) return table;
  }
  const double hs = options.grid_factor * mesh_params.h;
  const Mesh& m0 = base.disc.mesh;
  const DiscreteField& v0 = base.result.minimizer;
  for (double t : t_seq) {
    const MapPtr map = perturbed(psi, t, domain);
    const Domain image = transport_domain(domain, map);
    const Discretization dt = discretize(image, mesh_params);
    const HardyResult rt = minimize_hardy(dt, p, options.solver, base.result.margin);
    const auto [pg, eg] = gaps(m0, v0, dt.mesh, rt.minimizer, *map, p, hs);
    table.rows.push_back({t, pg, eg, rt.H, rt.existence_flag});
    if (!rt.existence_flag && table.applicability) {
      table.applicability = false;
      table.note = "no minimiser at t = " + std::to_string(t);
    }
  }
  // Translation baseline at the smallest t: v_t o phi_t = v_0 in exact arithmetic.
  const std::vector<Vec2> samples = interior_samples(domain, 40);
  double amp = 0.0;
  for (const auto& x : samples) amp = std::max(amp, psi->value(x).norm());
  if (!t_seq.empty() && amp > 0) {
    const double t = *std::min_element(t_seq.begin(), t_seq.end());
    const FieldPtr c = translation_field(amp * Vec2(0.6, 0.8));
    const MapPtr map = perturbed(c, t, domain);
    const Discretization dt = discretize(transport_domain(domain, map), mesh_params);
    const HardyResult rt = minimize_hardy(dt, p, options.solver, base.result.margin);
    table.translation_baseline = gaps(m0, v0, dt.mesh, rt.minimizer, *map, p, hs).first;
  }
  {
    MeshParams jittered = mesh_params;
    jittered.jitter = 0.1;
    jittered.seed = options.jitter_seed;
    const Discretization dj = discretize(domain, jittered);
    const HardyResult rj = minimize_hardy(dj, p, options.solver, base.result.margin);
    const SimilarityMap id = SimilarityMap::identity();
    table.remesh_baseline = gaps(m0, v0, dj.mesh, rj.minimizer, id, p, hs).second;
  }
  table.noise_floor = std::max(table.translation_baseline, table.remesh_baseline);
  return table;
}

}  // namespace hardy
