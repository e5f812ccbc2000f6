#pragma once

#include "hardy/cylinder.hpp"
#include "hardy/domain.hpp"
#include "hardy/hardy_solver.hpp"
#include "hardy/perturbation.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hardy {

struct SweepSpec {
  Domain base;
  /// Perturbation family phi_eps = I + eps psi (unused by the volume check).
  FieldPtr field;
  /// Strictly decreasing positive amplitudes.
  std::vector<double> amplitudes;
  double p = 2.0;
  MeshParams mesh{};
  SolverParams solver{};
  /// Evaluate rows even when the base solve has no minimiser.
  bool force = false;
};

struct SweepRow {
  double eps;
  double distortion;  // sup |grad phi - I|, operator norm
  double delta_rp;    // NaN when not used
  double sym_diff;
  double H_base;
  double H_pert;
  double gap;     // |H_pert - H_base|
  double signed_gap;
  double ratio;   // empirical constant of the row, NaN when excluded
  bool above_floor;
  double profile_l1;  // volume check only
};

struct StabilityReport {
  std::string check;
  double p = 2.0;
  double exponent = 0.0;  // r or s
  std::vector<SweepRow> rows;
  double fitted_slope = 0.0;
  double C_min = 0.0, C_max = 0.0;
  double band = 0.0;
  double noise_floor = 0.0;
  double alpha = 0.0;
  /// I_gamma with gamma = p r (1 - alpha) / (r - 1), logged for the (aaa) sweep.
  double i_gamma = 0.0;
  bool applicability = true;
  bool inconclusive = false;
  bool pass = false;
  std::string note;
};

/// Five times the change of H under a jittered re-mesh of the base domain.
double remesh_noise_floor(const Domain& domain, double p, const MeshParams& mesh, const SolverParams& solver,
                          double H_base, std::uint64_t seed = 7);

/// |H(phi(Omega)) - H(Omega)| against H(Omega) sup|grad phi - I|.
StabilityReport lipschitz_continuity_check(const SweepSpec& spec);

/// Lower bound 1 / (alpha p - p + 1) on r for the delta_{r,p} estimate.
double usc_r_bound(double p, double alpha);

/// H(phi(Omega)) - H(Omega) against delta_{r,p}(phi). Requires a minimiser and
/// r > 1 / (alpha p - p + 1).
StabilityReport upper_semicontinuity_check(const SweepSpec& spec, double r);

/// Cylinder family g_tilde = g + eps * unit bump over W, g the boundary graph
/// of the base domain. Fits log gap against log |symmetric difference|.
StabilityReport volume_stability_check(const SweepSpec& spec, const Cylinder& cylinder, double rho, double M,
                                       double s);

struct TOperatorReport {
  std::vector<double> ratios_coarse, ratios_fine;
  double max_coarse = 0.0, max_fine = 0.0;
  double delta = 0.0;
  double ridge_weight = 0.0;
  bool pass = false;
};

/// Random smooth w supported in the collar of depth 3 delta / 2;
/// integral |Tw|^r against integral log(Inr/d) |w|^r on the mesh of size h and
/// on its uniform refinement.
TOperatorReport t_operator_bound_check(const Domain& domain, double delta, double r, int trials,
                                       std::uint64_t seed, const MeshParams& mesh);

/// Random w of the T-operator check (exposed for tests).
class CollarField {
 public:
  CollarField(const Domain& domain, double delta, std::uint64_t seed, int index);
  double operator()(const Vec2& x) const;

 private:
  const Domain* domain_;
  double delta_;
  double a_[4], phase_[4];
  Vec2 omega_[4];
};

}  // namespace hardy
