#pragma once

#include "hardy/domain.hpp"
#include "hardy/mesh.hpp"
#include "hardy/quadrature.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <vector>

namespace hardy {

/// P1 field: one value per mesh vertex, zero on boundary vertices.
using DiscreteField = Eigen::VectorXd;

/// Mesh, the polygon it discretises and the shared quadrature.
struct Discretization {
  Mesh mesh;
  Domain domain;
  QuadratureRule quadrature;
  std::vector<int> dof;  // vertex -> interior unknown, -1 on the boundary
  int n_dofs = 0;
};

Discretization discretize(const Domain& domain, const MeshParams& mesh_params,
                          const QuadratureParams& quad_params = {});

/// Discretisation of an existing mesh (e.g. after refine_uniform).
Discretization discretize_mesh(Mesh mesh, const CurvePtr& curve, const QuadratureParams& quad_params = {});

/// phi(Omega) with the transported mesh and the same quadrature pattern.
Discretization transport(const Discretization& base, const MapPtr& map);

/// Per-triangle gradient of a P1 field.
std::vector<Vec2> triangle_gradients(const Mesh& mesh, const DiscreteField& u);

/// Value of u at a quadrature node.
double node_value(const Mesh& mesh, const DiscreteField& u, const QuadNode& node);

/// integral |grad u|^p and integral |u|^p / d^p.
double hardy_numerator(const Discretization& disc, const DiscreteField& u, double p);
double hardy_denominator(const Discretization& disc, const DiscreteField& u, double p);

/// R[u] = integral |grad u|^p / integral |u|^p d^-p. Throws degenerate_field for a
/// vanishing denominator.
double rayleigh_quotient(const DiscreteField& u, const Discretization& disc, double p);

/// Interpolant of d^beta on the mesh vertices.
DiscreteField distance_power(const Discretization& disc, double beta);

struct SolverParams {
  double tol = 1e-9;
  int max_iterations = 400;
  int krylov_dim = 80;
};

struct HardyResult {
  double p = 2.0;
  double H = 0.0;
  double alpha = 0.0;  // NaN unless existence_flag
  double K = 0.0;      // max u / d^alpha over vertices
  int iterations = 0;
  double residual = 0.0;
  bool existence_flag = false;
  double margin = 0.0;
  double H_coarse = 0.0;  // value on the 2h mesh, NaN if not computed
  DiscreteField minimizer;
  double h = 0.0;
  int n_vertices = 0;
};

/// ((p-1)/p)^p.
double convex_constant(double p);

/// max(0.005, 5 |H_h - H_2h|).
double existence_margin(double H_fine, double H_coarse);

/// Minimiser of the Hardy quotient on a fixed discretisation. The returned
/// field is nonnegative with integral |u|^p d^-p = 1 and H = R[u]. The
/// existence flag uses `margin`.
HardyResult minimize_hardy(const Discretization& disc, double p, const SolverParams& params = {},
                           double margin = 0.005, const DiscreteField* initial = nullptr);

/// Builds meshes at h and 2h, solves both and sets the existence margin from
/// their difference.
HardyResult minimize_hardy(const Domain& domain, double p, const MeshParams& mesh_params, double tol = 1e-9);

struct SolvedDomain {
  Discretization disc;
  HardyResult result;
};

/// Same as minimize_hardy on a domain, keeping the fine discretisation.
SolvedDomain solve_domain(const Domain& domain, double p, const MeshParams& mesh_params,
                          const SolverParams& params = {});

/// Largest root in [(p-1)/p, 1] of (p-1) a^(p-1) (1-a) = H.
double solve_alpha(double p, double H);

/// Dual norm sup_v r(v) / |grad v|_2 of the weak Euler-Lagrange residual
/// r(v) = integral |grad u|^(p-2) grad u . grad v - H integral |u|^(p-2) u v / d^p.
double pde_residual(const DiscreteField& u, double H, const Discretization& disc, double p);

struct DecayFit {
  double slope = 0.0;
  double K = 0.0;
  double grad_slope = 0.0;
  int n_samples = 0;
  int n_grad_samples = 0;
};

/// Least-squares slopes of log u and log |grad u| against log d over the
/// vertices (resp. triangle centroids) of the collar with d >= d_min.
DecayFit decay_fit(const DiscreteField& u, const Discretization& disc, const Collar& collar, double d_min = 0.0);

}  // namespace hardy
