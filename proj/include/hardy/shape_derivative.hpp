#pragma once

#include "hardy/domain.hpp"
#include "hardy/domain_map.hpp"
#include "hardy/hardy_solver.hpp"
#include "hardy/map_functionals.hpp"
#include "hardy/perturbation.hpp"

#include <string>
#include <vector>

namespace hardy {

struct DerivativeReport {
  double formula_value = 0.0;
  double fd_value = 0.0;
  double fd_step = 0.0;
  /// |formula - fd| / max(|fd|, scale_floor).
  double relative_gap = 0.0;
  double t0 = 0.0;
  bool applicability = true;
  /// Weight of ridge quadrature nodes that entered V-dependent terms.
  double ridge_weight = 0.0;
  double H = 0.0;
  std::string note;
};

double relative_gap(double formula, double fd, double scale_floor);

struct FamilyRow {
  double t;
  double H;
  double min_det;
  int n_vertices;
};

/// t -> H_p(phi_t(Omega)) with phi_t = I + t psi, each phi_t(Omega) carrying
/// the transported base mesh. Throws range if det grad phi_t <= 0.1 on samples.
std::vector<FamilyRow> hardy_family(const Domain& domain, const FieldPtr& psi, const std::vector<double>& t_grid,
                                    double p, const MeshParams& mesh_params, const SolverParams& solver = {});

/// Lemma-type derivative of t -> d^p_{phi_t(Omega)}(phi_t(x)) at t0 against a
/// central difference with the given step.
DerivativeReport dist_family_derivative(const Domain& domain, const FieldPtr& psi, const Vec2& x, double t0,
                                        double p, double step = 1e-5);

/// G(t) = integral over Omega of |u|^p rho / d^p_{phi_t(Omega)}(phi_t x) on the
/// quadrature of `disc`.
double g_function(const Discretization& disc, const DiscreteField& u, const ScalarField& rho, const FieldPtr& psi,
                  double t, double p);

/// Closed-form derivative of G at t0 against a central difference.
DerivativeReport g_function_derivative(const Discretization& disc, const DiscreteField& u, const ScalarField& rho,
                                       const FieldPtr& psi, double t0, double p, double step = 1e-5);

/// Hadamard formula at t = 0 for a normalised minimiser v with quotient H, all
/// integrals on the quadrature of `disc`. Writes the ridge node weight.
double hadamard_formula(const Discretization& disc, const DiscreteField& v, double H, double p,
                        const PerturbationField& psi, double* ridge_weight = nullptr);

struct HadamardOptions {
  SolverParams solver{1e-11, 400, 80};
  std::vector<double> steps{1e-2, 1e-3, 1e-4};
  /// Evaluate formula and FD even when the base solve has no minimiser.
  bool force = false;
  /// Skip the finite-difference oracle.
  bool formula_only = false;
};

/// Hadamard derivative on a solved base domain. The FD oracle solves on the
/// base mesh transported by phi_{+-delta}.
DerivativeReport hadamard_derivative(const SolvedDomain& base, const FieldPtr& psi, double p,
                                     const HadamardOptions& options = {});

DerivativeReport hadamard_derivative(const Domain& domain, const FieldPtr& psi, double p,
                                     const MeshParams& mesh_params, const HadamardOptions& options = {});

struct StabilityRow {
  double t;
  double pullback_gap;
  double extension_gap;
  double H;
  bool existence_flag;
};

struct StabilityTable {
  std::vector<StabilityRow> rows;
  /// Gaps of a pure translation family and of a jittered re-mesh of Omega.
  double translation_baseline = 0.0;
  double remesh_baseline = 0.0;
  double noise_floor = 0.0;
  bool applicability = true;
  double H_base = 0.0;
  std::string note;
};

struct StabilityOptions {
  SolverParams solver{};
  /// Sampling grid spacing as a fraction of the mesh size.
  double grid_factor = 0.25;
  bool force = false;
  std::uint64_t jitter_seed = 7;
};

/// W^{1,p} distances between minimisers of phi_t(Omega) and Omega: pulled back
/// to Omega, and extended by zero on the union. Norms are sampled on a regular
/// grid with P1 values and gradients of each mesh.
StabilityTable minimizer_stability(const Domain& domain, const FieldPtr& psi, const std::vector<double>& t_seq,
                                   double p, const MeshParams& mesh_params, const StabilityOptions& options = {});

}  // namespace hardy
