#include "hardy/hardy_solver.hpp"

#include "hardy/errors.hpp"
#include "hardy/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <limits>

namespace hardy {

using SpMat = Eigen::SparseMatrix<double>;
using Eigen::VectorXd;

namespace {

std::array<Vec2, 3> basis_gradients(const Mesh& mesh, int t) {
  const auto& tr = mesh.triangles[t];
  const Vec2& a = mesh.vertices[tr[0]];
  const Vec2& b = mesh.vertices[tr[1]];
  const Vec2& c = mesh.vertices[tr[2]];
  const double a2 = 2.0 * mesh.area(t);
  return {Vec2(b.y() - c.y(), c.x() - b.x()) / a2, Vec2(c.y() - a.y(), a.x() - c.x()) / a2,
          Vec2(a.y() - b.y(), b.x() - a.x()) / a2};
}

std::array<double, 3> node_basis(const QuadNode& n) { return {1.0 - n.l1 - n.l2, n.l1, n.l2}; }

// Assembles sum over triangles of local 3x3 blocks restricted to interior
// unknowns. Blocks are computed in parallel and summed in triangle order.
template <typename Local>
SpMat assemble(const Discretization& disc, Local&& local) {
  const Mesh& mesh = disc.mesh;
  const int nt = mesh.n_triangles();
  std::vector<Eigen::Matrix3d> blocks(nt);
  parallel_for(nt, [&](int t) { blocks[t] = local(t); });
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(nt) * 9);
  for (int t = 0; t < nt; ++t) {
    const auto& tr = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      const int di = disc.dof[tr[i]];
      if (di < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int dj = disc.dof[tr[j]];
        if (dj < 0) continue;
        trip.emplace_back(di, dj, blocks[t](i, j));
      }
    }
  }
  SpMat m(disc.n_dofs, disc.n_dofs);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

template <typename Local>
VectorXd assemble_vector(const Discretization& disc, Local&& local) {
  const Mesh& mesh = disc.mesh;
  const int nt = mesh.n_triangles();
  std::vector<Eigen::Vector3d> blocks(nt);
  parallel_for(nt, [&](int t) { blocks[t] = local(t); });
  VectorXd v = VectorXd::Zero(disc.n_dofs);
  for (int t = 0; t < nt; ++t) {
    const auto& tr = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      const int di = disc.dof[tr[i]];
      if (di >= 0) v[di] += blocks[t][i];
    }
  }
  return v;
}

VectorXd to_dofs(const Discretization& disc, const DiscreteField& u) {
  VectorXd x(disc.n_dofs);
  for (int i = 0; i < disc.mesh.n_vertices(); ++i)
    if (disc.dof[i] >= 0) x[disc.dof[i]] = u[i];
  return x;
}

DiscreteField from_dofs(const Discretization& disc, const VectorXd& x) {
  DiscreteField u = DiscreteField::Zero(disc.mesh.n_vertices());
  for (int i = 0; i < disc.mesh.n_vertices(); ++i)
    if (disc.dof[i] >= 0) u[i] = x[disc.dof[i]];
  return u;
}

SpMat stiffness(const Discretization& disc) {
  return assemble(disc, [&](int t) {
    const auto g = basis_gradients(disc.mesh, t);
    const double a = disc.mesh.area(t);
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = a * g[i].dot(g[j]);
    return m;
  });
}

// Node weights w / d^p.
std::vector<double> weighted_nodes(const Discretization& disc, double p) {
  const auto& nodes = disc.quadrature.nodes();
  std::vector<double> wd(nodes.size());
  parallel_for(static_cast<int>(nodes.size()), [&](int k) { wd[k] = nodes[k].w * std::pow(nodes[k].d, -p); });
  return wd;
}

SpMat weighted_mass(const Discretization& disc, const std::vector<double>& wd) {
  return assemble(disc, [&](int t) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    for (int k = disc.quadrature.begin(t); k < disc.quadrature.end(t); ++k) {
      const auto l = node_basis(disc.quadrature.nodes()[k]);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) += wd[k] * l[i] * l[j];
    }
    return m;
  });
}

// The p-Hardy functionals on interior unknowns.
class PFunctional {
 public:
  PFunctional(const Discretization& disc, double p) : disc_(disc), p_(p), wd_(weighted_nodes(disc, p)) {
    grads_.resize(disc.mesh.n_triangles());
    parallel_for(disc.mesh.n_triangles(), [&](int t) { grads_[t] = basis_gradients(disc.mesh, t); });
  }

  Vec2 grad(const DiscreteField& u, int t) const {
    const auto& tr = disc_.mesh.triangles[t];
    return u[tr[0]] * grads_[t][0] + u[tr[1]] * grads_[t][1] + u[tr[2]] * grads_[t][2];
  }

  double N(const DiscreteField& u) const {
    double s = 0.0;
    for (int t = 0; t < disc_.mesh.n_triangles(); ++t) s += disc_.mesh.area(t) * std::pow(grad(u, t).norm(), p_);
    return s;
  }
  double D(const DiscreteField& u) const {
    const auto& nodes = disc_.quadrature.nodes();
    double s = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) s += wd_[k] * std::pow(std::abs(node_value(disc_.mesh, u, nodes[k])), p_);
    return s;
  }
  VectorXd gN(const DiscreteField& u) const {
    return assemble_vector(disc_, [&](int t) {
      const Vec2 g = grad(u, t);
      const double c = disc_.mesh.area(t) * p_ * std::pow(g.norm(), p_ - 2.0);
      return Eigen::Vector3d(c * g.dot(grads_[t][0]), c * g.dot(grads_[t][1]), c * g.dot(grads_[t][2]));
    });
  }
  VectorXd gD(const DiscreteField& u) const {
    return assemble_vector(disc_, [&](int t) {
      Eigen::Vector3d v = Eigen::Vector3d::Zero();
      for (int k = disc_.quadrature.begin(t); k < disc_.quadrature.end(t); ++k) {
        const QuadNode& n = disc_.quadrature.nodes()[k];
        const double uv = node_value(disc_.mesh, u, n);
        const double c = wd_[k] * p_ * std::pow(std::abs(uv), p_ - 2.0) * uv;
        const auto l = node_basis(n);
        for (int i = 0; i < 3; ++i) v[i] += c * l[i];
      }
      return v;
    });
  }
  SpMat HN(const DiscreteField& u, double eps) const {
    return assemble(disc_, [&](int t) {
      const Vec2 g = grad(u, t);
      const double g2 = g.squaredNorm() + eps;
      const double a = disc_.mesh.area(t) * p_ * std::pow(g2, 0.5 * p_ - 1.0);
      Eigen::Matrix3d m;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          m(i, j) = a * (grads_[t][i].dot(grads_[t][j]) +
                         (p_ - 2.0) * g.dot(grads_[t][i]) * g.dot(grads_[t][j]) / g2);
      return m;
    });
  }
  SpMat HD(const DiscreteField& u) const {
    return assemble(disc_, [&](int t) {
      Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
      for (int k = disc_.quadrature.begin(t); k < disc_.quadrature.end(t); ++k) {
        const QuadNode& n = disc_.quadrature.nodes()[k];
        const double c = wd_[k] * p_ * (p_ - 1.0) * std::pow(std::abs(node_value(disc_.mesh, u, n)), p_ - 2.0);
        const auto l = node_basis(n);
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) m(i, j) += c * l[i] * l[j];
      }
      return m;
    });
  }
  double mean_grad2(const DiscreteField& u) const {
    double s = 0.0, a = 0.0;
    for (int t = 0; t < disc_.mesh.n_triangles(); ++t) {
      s += disc_.mesh.area(t) * grad(u, t).squaredNorm();
      a += disc_.mesh.area(t);
    }
    return s / a;
  }

 private:
  const Discretization& disc_;
  double p_;
  std::vector<double> wd_;
  std::vector<std::array<Vec2, 3>> grads_;
};

// Positive orientation and unit weighted norm.
DiscreteField normalise(const Discretization& disc, DiscreteField u, double p) {
  if (u.sum() < 0) u = -u;
  const double d = hardy_denominator(disc, u, p);
  if (!(d > 0)) throw Error(ErrorKind::degenerate_field, "minimiser has zero weighted norm");
  return u / std::pow(d, 1.0 / p);
}

double dual_norm(const Eigen::SimplicialLLT<SpMat>& llt, const VectorXd& r) { return std::sqrt(std::max(0.0, r.dot(llt.solve(r)))); }

// Smallest eigenpair of K x = lambda M x by restarted Lanczos on K^-1 M with
// full reorthogonalisation in the M inner product.
DiscreteField solve_p2(const Discretization& disc, const SolverParams& params, const VectorXd& start,
                       int& iterations, double& residual) {
  const SpMat K = stiffness(disc);
  const SpMat M = weighted_mass(disc, weighted_nodes(disc, 2.0));
  Eigen::SimplicialLLT<SpMat> llt(K);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::convergence_failure, "stiffness factorisation failed");
  const int n = disc.n_dofs;
  const int m = std::max(4, std::min(params.krylov_dim, n));
  VectorXd q = start;
  q /= std::sqrt(q.dot(M * q));
  Eigen::MatrixXd Q(n, m + 1);
  iterations = 0;
  double rho_prev = std::numeric_limits<double>::infinity();
  VectorXd y = q;
  while (true) {
    Q.col(0) = q;
    VectorXd alpha(m), beta(m);
    int k = 0;
    for (; k < m; ++k) {
      VectorXd w = llt.solve(M * Q.col(k));
      ++iterations;
      double a = 0.0;
      for (int pass = 0; pass < 2; ++pass) {
        const VectorXd Mw = M * w;
        const VectorXd c = Q.leftCols(k + 1).transpose() * Mw;
        w -= Q.leftCols(k + 1) * c;
        a += c[k];
      }
      alpha[k] = a;
      const double b = std::sqrt(std::max(0.0, w.dot(M * w)));
      beta[k] = b;
      if (!(b > 1e-14 * std::abs(a))) {
        ++k;
        break;
      }
      Q.col(k + 1) = w / b;
    }
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const VectorXd s = es.eigenvectors().col(k - 1);
    y = Q.leftCols(k) * s;
    const VectorXd My = M * y;
    const double ymy = y.dot(My);
    const double rho = y.dot(K * y) / ymy;
    const VectorXd r = (K * y - rho * My) / std::sqrt(ymy);
    residual = dual_norm(llt, r);
    if (residual <= params.tol) break;
    if (iterations >= params.max_iterations) {
      throw ConvergenceError(rho, iterations, "Lanczos iteration did not reach the residual tolerance");
    }
    if (std::abs(rho - rho_prev) <= 1e-15 * rho && residual < 1e3 * params.tol) break;
    rho_prev = rho;
    q = y / std::sqrt(ymy);
  }
  return from_dofs(disc, y);
}

// p != 2: inverse iteration with inner Newton solves of the p-Laplace
// problem, then a bordered Newton polish of (u, lambda). A polish that stalls
// resumes the inverse iteration with a tighter stop.
DiscreteField solve_pgeneral(const Discretization& disc, double p, const SolverParams& params, DiscreteField u,
                             int& iterations, double& residual) {
  const PFunctional F(disc, p);
  const SpMat K = stiffness(disc);
  Eigen::SimplicialLLT<SpMat> llt(K);
  u = normalise(disc, u, p);
  double rho = F.N(u);
  iterations = 0;

  Eigen::SimplicialLDLT<SpMat> ldlt;
  bool analysed = false;
  auto inverse_iteration = [&](double stop) {
    while (iterations < params.max_iterations) {
      const VectorXd b = F.gD(u) / p;
      DiscreteField w = u;
      auto energy = [&](const DiscreteField& v) { return F.N(v) / p - b.dot(to_dofs(disc, v)); };
      double e = energy(w);
      for (int inner = 0; inner < 40; ++inner) {
        const VectorXd g = F.gN(w) / p - b;
        const SpMat H = F.HN(w, 1e-10 * F.mean_grad2(w)) / p;
        if (!analysed) {
          ldlt.analyzePattern(H);
          analysed = true;
        }
        ldlt.factorize(H);
        if (ldlt.info() != Eigen::Success) throw Error(ErrorKind::convergence_failure, "p-Laplace Hessian factorisation failed");
        const VectorXd s = -ldlt.solve(g);
        const double slope = g.dot(s);
        if (std::abs(slope) <= 1e-13 * std::max(1.0, std::abs(e))) break;
        double step = 1.0;
        DiscreteField trial;
        double et = e;
        for (int ls = 0; ls < 40; ++ls) {
          trial = w + from_dofs(disc, step * s);
          et = energy(trial);
          if (et <= e + 1e-4 * step * slope) break;
          step *= 0.5;
        }
        w = trial;
        e = et;
      }
      u = normalise(disc, w, p);
      const double rho_new = F.N(u);
      ++iterations;
      const bool done = std::abs(rho_new - rho) < stop * rho_new;
      rho = rho_new;
      if (done) break;
    }
  };

  // Bordered Newton on (u, lambda); returns the final merit.
  const int n = disc.n_dofs;
  auto residual_of = [&](const DiscreteField& v, double lam, VectorXd& f) {
    f.resize(n + 1);
    f.head(n) = F.gN(v) - lam * F.gD(v);
    f[n] = F.D(v) - 1.0;
    return std::sqrt(dual_norm(llt, f.head(n)) * dual_norm(llt, f.head(n)) + f[n] * f[n]);
  };
  auto polish = [&](DiscreteField& v) {
    double lambda = F.N(v);
    VectorXd f;
    double merit = residual_of(v, lambda, f);
    const double merit0 = merit;
    for (int it = 0; it < 40 && iterations < params.max_iterations && merit > params.tol; ++it) {
      const SpMat A = F.HN(v, 1e-10 * F.mean_grad2(v)) - lambda * F.HD(v);
      const VectorXd gd = F.gD(v);
      std::vector<Eigen::Triplet<double>> trip;
      trip.reserve(A.nonZeros() + 2 * n);
      for (int c = 0; c < A.outerSize(); ++c)
        for (SpMat::InnerIterator itA(A, c); itA; ++itA) trip.emplace_back(itA.row(), itA.col(), itA.value());
      for (int i = 0; i < n; ++i) {
        trip.emplace_back(i, n, -gd[i]);
        trip.emplace_back(n, i, gd[i]);
      }
      SpMat J(n + 1, n + 1);
      J.setFromTriplets(trip.begin(), trip.end());
      J.makeCompressed();
      Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
      lu.compute(J);
      if (lu.info() != Eigen::Success) break;
      const VectorXd s = -lu.solve(f);
      double step = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 20; ++ls) {
        const DiscreteField vt = v + from_dofs(disc, step * s.head(n));
        const double lt = lambda + step * s[n];
        VectorXd ft;
        const double mt = residual_of(vt, lt, ft);
        if (mt < merit) {
          v = vt;
          lambda = lt;
          f = ft;
          merit = mt;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      ++iterations;
      if (!accepted || (it >= 8 && merit > 0.1 * merit0)) break;
    }
    return merit;
  };

  DiscreteField v;
  for (double stop : {1e-3, 1e-5, 1e-7, 1e-9}) {
    inverse_iteration(stop);
    v = u;
    if (polish(v) <= params.tol || iterations >= params.max_iterations) break;
  }
  u = normalise(disc, v, p);
  residual = pde_residual(u, F.N(u) / F.D(u), disc, p);
  if (residual > 10.0 * params.tol && residual > 1e-6) {
    throw ConvergenceError(F.N(u) / F.D(u), iterations, "p-Hardy iteration did not reach the residual tolerance");
  }
  return u;
}

}  // namespace

Discretization discretize_mesh(Mesh mesh, const CurvePtr& curve, const QuadratureParams& quad_params) {
  Domain domain = mesh_domain(mesh, curve);
  QuadratureRule quad(mesh, domain, quad_params);
  Discretization d{std::move(mesh), std::move(domain), std::move(quad), {}, 0};
  d.dof.assign(d.mesh.n_vertices(), -1);
  for (int i = 0; i < d.mesh.n_vertices(); ++i)
    if (!d.mesh.boundary[i]) d.dof[i] = d.n_dofs++;
  return d;
}

Discretization discretize(const Domain& domain, const MeshParams& mesh_params, const QuadratureParams& quad_params) {
  return discretize_mesh(build_mesh(domain, mesh_params), domain.curve_ptr(), quad_params);
}

Discretization transport(const Discretization& base, const MapPtr& map) {
  Mesh mesh = transport_mesh(base.mesh, *map);
  Domain domain = mesh_domain(mesh, std::make_shared<TransportedCurve>(base.domain.curve_ptr(), map));
  QuadratureRule quad = base.quadrature.transported(mesh, domain);
  return Discretization{std::move(mesh), std::move(domain), std::move(quad), base.dof, base.n_dofs};
}

std::vector<Vec2> triangle_gradients(const Mesh& mesh, const DiscreteField& u) {
  std::vector<Vec2> g(mesh.n_triangles());
  parallel_for(mesh.n_triangles(), [&](int t) {
    const auto b = basis_gradients(mesh, t);
    const auto& tr = mesh.triangles[t];
    g[t] = u[tr[0]] * b[0] + u[tr[1]] * b[1] + u[tr[2]] * b[2];
  });
  return g;
}

double node_value(const Mesh& mesh, const DiscreteField& u, const QuadNode& node) {
  const auto& tr = mesh.triangles[node.tri];
  return (1.0 - node.l1 - node.l2) * u[tr[0]] + node.l1 * u[tr[1]] + node.l2 * u[tr[2]];
}

double hardy_numerator(const Discretization& disc, const DiscreteField& u, double p) {
  const auto g = triangle_gradients(disc.mesh, u);
  double s = 0.0;
  for (int t = 0; t < disc.mesh.n_triangles(); ++t) s += disc.mesh.area(t) * std::pow(g[t].norm(), p);
  return s;
}

double hardy_denominator(const Discretization& disc, const DiscreteField& u, double p) {
  const auto& nodes = disc.quadrature.nodes();
  std::vector<double> term(nodes.size());
  parallel_for(static_cast<int>(nodes.size()), [&](int k) {
    term[k] = nodes[k].w * std::pow(std::abs(node_value(disc.mesh, u, nodes[k])) / nodes[k].d, p);
  });
  double s = 0.0;
  for (double v : term) s += v;
  return s;
}

double rayleigh_quotient(const DiscreteField& u, const Discretization& disc, double p) {
  if (!(p > 1)) throw Error(ErrorKind::parameter, "p must exceed 1");
  const double d = hardy_denominator(disc, u, p);
  if (!(d > 0)) throw Error(ErrorKind::degenerate_field, "zero weighted norm in the Rayleigh quotient");
  return hardy_numerator(disc, u, p) / d;
}

DiscreteField distance_power(const Discretization& disc, double beta) {
  const std::vector<double> ell = vertex_distances(disc.mesh, disc.domain);
  DiscreteField u(disc.mesh.n_vertices());
  for (int i = 0; i < disc.mesh.n_vertices(); ++i) u[i] = disc.mesh.boundary[i] ? 0.0 : std::pow(ell[i], beta);
  return u;
}

double convex_constant(double p) { return std::pow((p - 1.0) / p, p); }

double existence_margin(double H_fine, double H_coarse) {
  if (!std::isfinite(H_coarse)) return 0.005;
  return std::max(0.005, 5.0 * std::abs(H_fine - H_coarse));
}

HardyResult minimize_hardy(const Discretization& disc, double p, const SolverParams& params, double margin,
                           const DiscreteField* initial) {
  if (!(p > 1)) throw Error(ErrorKind::parameter, "p must exceed 1");
  if (disc.n_dofs < 1) throw Error(ErrorKind::mesh_failure, "mesh has no interior vertices");
  DiscreteField start = initial ? *initial : distance_power(disc, 0.9);
  if (p != 2.0 && !initial) {
    int it = 0;
    double res = 0.0;
    start = solve_p2(disc, params, to_dofs(disc, start), it, res);
    start = start.cwiseAbs().array().pow(2.0 * (p - 1.0) / p).matrix();
  }
  HardyResult r;
  r.p = p;
  DiscreteField u;
  if (p == 2.0) {
    u = solve_p2(disc, params, to_dofs(disc, start), r.iterations, r.residual);
    u = normalise(disc, u, p);
    r.residual = pde_residual(u, rayleigh_quotient(u, disc, p), disc, p);
  } else {
    u = solve_pgeneral(disc, p, params, start, r.iterations, r.residual);
  }
  r.H = rayleigh_quotient(u, disc, p);
  r.minimizer = std::move(u);
  r.margin = margin;
  r.H_coarse = std::numeric_limits<double>::quiet_NaN();
  r.existence_flag = r.H < convex_constant(p) - margin;
  r.alpha = std::numeric_limits<double>::quiet_NaN();
  r.K = std::numeric_limits<double>::quiet_NaN();
  if (r.existence_flag) {
    r.alpha = solve_alpha(p, r.H);
    const std::vector<double> ell = vertex_distances(disc.mesh, disc.domain);
    double k = 0.0;
    for (int i = 0; i < disc.mesh.n_vertices(); ++i)
      if (ell[i] > 0) k = std::max(k, r.minimizer[i] / std::pow(ell[i], r.alpha));
    r.K = k;
  }
  r.h = disc.mesh.h;
  r.n_vertices = disc.mesh.n_vertices();
  return r;
}

SolvedDomain solve_domain(const Domain& domain, double p, const MeshParams& mesh_params, const SolverParams& params) {
  MeshParams coarse = mesh_params;
  coarse.h *= 2.0;
  const double Hc = minimize_hardy(discretize(domain, coarse), p, params).H;
  Discretization df = discretize(domain, mesh_params);
  HardyResult r = minimize_hardy(df, p, params, 0.005);
  const double margin = existence_margin(r.H, Hc);
  if (margin != r.margin) {
    r.margin = margin;
    r.existence_flag = r.H < convex_constant(p) - margin;
    if (!r.existence_flag) {
      r.alpha = std::numeric_limits<double>::quiet_NaN();
      r.K = std::numeric_limits<double>::quiet_NaN();
    }
  }
  r.H_coarse = Hc;
  return {std::move(df), std::move(r)};
}

HardyResult minimize_hardy(const Domain& domain, double p, const MeshParams& mesh_params, double tol) {
  SolverParams sp;
  sp.tol = tol;
  return solve_domain(domain, p, mesh_params, sp).result;
}

double solve_alpha(double p, double H) {
  if (!(p > 1)) throw Error(ErrorKind::parameter, "p must exceed 1");
  const double hmax = convex_constant(p);
  if (!(H > 0) || H > hmax * (1.0 + 1e-12)) throw Error(ErrorKind::parameter, "H outside (0, ((p-1)/p)^p]");
  double lo = (p - 1.0) / p, hi = 1.0;
  if (H >= hmax) return lo;
  auto f = [&](double a) { return (p - 1.0) * std::pow(a, p - 1.0) * (1.0 - a) - H; };
  // f decreases from f(lo) > 0 to f(1) = -H < 0.
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double pde_residual(const DiscreteField& u, double H, const Discretization& disc, double p) {
  const PFunctional F(disc, p);
  const VectorXd r = F.gN(u) / p - H * F.gD(u) / p;
  Eigen::SimplicialLLT<SpMat> llt(stiffness(disc));
  return dual_norm(llt, r);
}

DecayFit decay_fit(const DiscreteField& u, const Discretization& disc, const Collar& collar, double d_min) {
  const std::vector<double> ell = vertex_distances(disc.mesh, disc.domain);
  std::vector<double> lx, ly;
  for (int i = 0; i < disc.mesh.n_vertices(); ++i) {
    if (ell[i] <= 0 || ell[i] < d_min || ell[i] >= collar.delta || !(u[i] > 0)) continue;
    if (disc.domain.nearest(disc.mesh.vertices[i]).on_ridge) continue;
    lx.push_back(std::log(ell[i]));
    ly.push_back(std::log(u[i]));
  }
  auto fit = [](const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sx += x[i];
      sy += y[i];
      sxx += x[i] * x[i];
      sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    if (!(den > 0)) throw Error(ErrorKind::sampling, "degenerate decay samples");
    return (n * sxy - sx * sy) / den;
  };
  DecayFit r;
  r.n_samples = static_cast<int>(lx.size());
  if (r.n_samples < 100) throw Error(ErrorKind::sampling, "fewer than 100 collar samples for the decay fit");
  r.slope = fit(lx, ly);
  for (std::size_t i = 0; i < lx.size(); ++i) r.K = std::max(r.K, std::exp(ly[i] - r.slope * lx[i]));

  const auto g = triangle_gradients(disc.mesh, u);
  std::vector<double> gx, gy;
  for (int t = 0; t < disc.mesh.n_triangles(); ++t) {
    const auto& tr = disc.mesh.triangles[t];
    const Vec2 c = (disc.mesh.vertices[tr[0]] + disc.mesh.vertices[tr[1]] + disc.mesh.vertices[tr[2]]) / 3.0;
    const DistanceQuery q = disc.domain.nearest(c);
    if (q.d < d_min || q.d >= collar.delta || q.on_ridge || !(g[t].norm() > 0)) continue;
    gx.push_back(std::log(q.d));
    gy.push_back(std::log(g[t].norm()));
  }
  r.n_grad_samples = static_cast<int>(gx.size());
  if (r.n_grad_samples < 100) throw Error(ErrorKind::sampling, "fewer than 100 collar samples for the gradient fit");
  r.grad_slope = fit(gx, gy);
  return r;
}

}  // namespace hardy
