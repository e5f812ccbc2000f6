#include "hardy/stability.hpp"

#include "hardy/errors.hpp"
#include "hardy/map_functionals.hpp"
#include "hardy/parallel.hpp"
#include "hardy/quadrature.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace hardy {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_amplitudes(const std::vector<double>& a) {
  if (a.empty()) throw Error(ErrorKind::parameter, "empty amplitude list");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] > 0)) throw Error(ErrorKind::parameter, "amplitudes must be positive");
    if (i > 0 && !(a[i] < a[i - 1])) throw Error(ErrorKind::parameter, "amplitudes must be strictly decreasing");
  }
}

// Band of the row constants above the floor; marks the report inconclusive
// when no row is usable.
void summarise(StabilityReport& rep) {
  rep.C_min = std::numeric_limits<double>::infinity();
  rep.C_max = 0.0;
  int n = 0;
  for (const auto& r : rep.rows) {
    if (!r.above_floor || !std::isfinite(r.ratio)) continue;
    rep.C_min = std::min(rep.C_min, r.ratio);
    rep.C_max = std::max(rep.C_max, r.ratio);
    ++n;
  }
  if (n == 0) {
    rep.inconclusive = true;
    rep.C_min = rep.C_max = rep.band = kNaN;
    return;
  }
  rep.band = rep.C_min > 0 ? rep.C_max / rep.C_min : std::numeric_limits<double>::infinity();
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return kNaN;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : kNaN;
}

struct Base {
  SolvedDomain solved;
  double floor;
};

Base solve_base(const SweepSpec& spec) {
  SolvedDomain s = solve_domain(spec.base, spec.p, spec.mesh, spec.solver);
  const double floor = remesh_noise_floor(spec.base, spec.p, spec.mesh, spec.solver, s.result.H);
  return {std::move(s), floor};
}

double solve_matched(const SolvedDomain& base, const MapPtr& map, double p, const SolverParams& solver) {
  const Discretization d = transport(base.disc, map);
  return minimize_hardy(d, p, solver, base.result.margin, &base.result.minimizer).H;
}

}  // namespace

double remesh_noise_floor(const Domain& domain, double p, const MeshParams& mesh, const SolverParams& solver,
                          double H_base, std::uint64_t seed) {
  MeshParams j = mesh;
  j.jitter = 0.1;
  j.seed = seed;
  const double H = minimize_hardy(discretize(domain, j), p, solver).H;
  return 5.0 * std::abs(H - H_base);
}

StabilityReport lipschitz_continuity_check(const SweepSpec& spec) {
  check_amplitudes(spec.amplitudes);
  if (!spec.field) throw Error(ErrorKind::parameter, "sweep needs a perturbation field");
  StabilityReport rep;
  rep.check = "lipschitz_continuity";
  rep.p = spec.p;
  const Base base = solve_base(spec);
  rep.noise_floor = base.floor;
  rep.alpha = base.solved.result.alpha;
  const double H0 = base.solved.result.H;
  const std::vector<Vec2> samples = interior_samples(spec.base, 40);
  for (double eps : spec.amplitudes) {
    const auto map = std::make_shared<PerturbedIdentity>(spec.field, eps, spec.base.diameter());
    const double Hp = solve_matched(base.solved, map, spec.p, spec.solver);
    SweepRow row{};
    row.eps = eps;
    row.distortion = distortion_sup(*map, samples);
    row.delta_rp = kNaN;
    row.sym_diff = symmetric_difference_measure(base.solved.disc.domain, transport_domain(base.solved.disc.domain, map));
    row.H_base = H0;
    row.H_pert = Hp;
    row.signed_gap = Hp - H0;
    row.gap = std::abs(Hp - H0);
    row.above_floor = row.gap > rep.noise_floor;
    row.ratio = row.above_floor && row.distortion > 0 ? row.gap / (H0 * row.distortion) : kNaN;
    row.profile_l1 = kNaN;
    rep.rows.push_back(row);
  }
  summarise(rep);
  rep.fitted_slope = kNaN;
  if (rep.inconclusive) {
    rep.note = "all rows below the noise floor";
    rep.pass = true;
  } else {
    rep.pass = rep.band <= 3.0;
  }
  return rep;
}

double usc_r_bound(double p, double alpha) { return 1.0 / (alpha * p - p + 1.0); }

StabilityReport upper_semicontinuity_check(const SweepSpec& spec, double r) {
  check_amplitudes(spec.amplitudes);
  if (!spec.field) throw Error(ErrorKind::parameter, "sweep needs a perturbation field");
  StabilityReport rep;
  rep.check = "upper_semicontinuity";
  rep.p = spec.p;
  rep.exponent = r;
  const Base base = solve_base(spec);
  rep.noise_floor = base.floor;
  const HardyResult& hb = base.solved.result;
  rep.applicability = hb.existence_flag;
  rep.alpha = hb.alpha;
  if (!rep.applicability) {
    std::ostringstream os;
    os.precision(10);
    os << "no minimiser on the base domain (H_h = " << hb.H << ", margin " << hb.margin << ")";
    rep.note = os.str();
    if (!spec.force) return rep;
  } else {
    const double bound = usc_r_bound(spec.p, hb.alpha);
    if (!(r > bound)) {
      std::ostringstream os;
      os << "r = " << r << " must exceed 1/(alpha p - p + 1) = " << bound;
      throw Error(ErrorKind::parameter, os.str());
    }
    const double gamma = spec.p * r * (1.0 - hb.alpha) / (r - 1.0);
    rep.i_gamma = gamma < 1.0 ? singular_integral(base.solved.disc.domain, gamma, base.solved.disc.quadrature) : kNaN;
  }
  const double H0 = hb.H;
  const double inr = inradius(base.solved.disc.domain);
  const std::vector<Vec2> samples = interior_samples(spec.base, 40);
  for (double eps : spec.amplitudes) {
    const auto map = std::make_shared<PerturbedIdentity>(spec.field, eps, spec.base.diameter());
    const double Hp = solve_matched(base.solved, map, spec.p, spec.solver);
    SweepRow row{};
    row.eps = eps;
    row.distortion = distortion_sup(*map, samples);
    row.delta_rp = vicinity_delta(base.solved.disc.domain, *map, r, spec.p, base.solved.disc.quadrature, inr);
    row.sym_diff = symmetric_difference_measure(base.solved.disc.domain, transport_domain(base.solved.disc.domain, map));
    row.H_base = H0;
    row.H_pert = Hp;
    row.signed_gap = Hp - H0;
    row.gap = std::abs(Hp - H0);
    row.above_floor = row.signed_gap > rep.noise_floor;
    row.ratio = row.above_floor && row.delta_rp > 0 ? row.signed_gap / row.delta_rp : kNaN;
    row.profile_l1 = kNaN;
    rep.rows.push_back(row);
  }
  summarise(rep);
  rep.fitted_slope = kNaN;
  if (rep.inconclusive) {
    rep.note += std::string(rep.note.empty() ? "" : "; ") + "no row with H_pert - H_base above the noise floor";
    rep.pass = rep.applicability;
  } else {
    rep.pass = rep.applicability && rep.band <= 3.0;
  }
  return rep;
}

StabilityReport volume_stability_check(const SweepSpec& spec, const Cylinder& cylinder, double rho, double M,
                                       double s) {
  check_amplitudes(spec.amplitudes);
  StabilityReport rep;
  rep.check = "volume_stability";
  rep.p = spec.p;
  rep.exponent = s;
  const Profile g = boundary_graph(spec.base, cylinder);
  const Profile bump = unit_bump_profile(cylinder.w0, cylinder.w1);
  // Direct smallness check in place of the interpolation inequality.
  const double delta = default_collar_depth(spec.base);
  double sup_bump = 0.0;
  for (int i = 0; i <= 2000; ++i)
    sup_bump = std::max(sup_bump, std::abs(bump(cylinder.w0 + (cylinder.w1 - cylinder.w0) * i / 2000.0)));
  if (!(spec.amplitudes.front() * sup_bump < delta)) {
    std::ostringstream os;
    os << "sup |g - g_tilde| = " << spec.amplitudes.front() * sup_bump << " is not below the collar depth " << delta;
    throw Error(ErrorKind::hypothesis_violation, os.str());
  }
  const Base base = solve_base(spec);
  rep.noise_floor = base.floor;
  const HardyResult& hb = base.solved.result;
  rep.applicability = hb.existence_flag;
  rep.alpha = hb.alpha;
  if (!rep.applicability) {
    std::ostringstream os;
    os.precision(10);
    os << "no minimiser on the base domain (H_h = " << hb.H << ", margin " << hb.margin
       << "); the admissible range of s is empty";
    rep.note = os.str();
    if (!spec.force) return rep;
  } else {
    const double smax = hb.alpha * spec.p - spec.p + 1.0;
    if (!(s > 0 && s < smax)) {
      std::ostringstream os;
      os << "s = " << s << " outside ]0, alpha p - p + 1[ = ]0, " << smax << "[";
      throw Error(ErrorKind::parameter, os.str());
    }
  }
  const double H0 = hb.H;
  const std::vector<Vec2> samples = interior_samples(spec.base, 40);
  std::vector<double> lx, ly;
  bool l1_ok = true;
  for (double eps : spec.amplitudes) {
    const Profile gt = add_profiles(g, eps, bump);
    const CylinderPerturbation cp = build_cylinder_perturbation(spec.base, g, gt, cylinder, rho, M);
    // The map is only Lipschitz across g_0, so Omega_tilde is meshed afresh.
    const double Hp = minimize_hardy(discretize(cp.perturbed, spec.mesh), spec.p, spec.solver).H;
    SweepRow row{};
    row.eps = eps;
    row.distortion = distortion_sup(*cp.map, samples);
    row.delta_rp = kNaN;
    row.sym_diff = symmetric_difference_measure(spec.base, cp.perturbed);
    row.profile_l1 = cp.profile_l1;
    if (std::abs(row.sym_diff - row.profile_l1) > 0.01 * row.profile_l1) l1_ok = false;
    row.H_base = H0;
    row.H_pert = Hp;
    row.signed_gap = Hp - H0;
    row.gap = std::abs(Hp - H0);
    row.above_floor = row.gap > rep.noise_floor;
    row.ratio = row.above_floor ? row.gap / std::pow(row.sym_diff, s) : kNaN;
    if (row.above_floor) {
      lx.push_back(std::log(row.sym_diff));
      ly.push_back(std::log(row.gap));
    }
    rep.rows.push_back(row);
  }
  summarise(rep);
  rep.fitted_slope = fit_slope(lx, ly);
  if (!l1_ok) rep.note += std::string(rep.note.empty() ? "" : "; ") + "clipped area and profile integral differ by more than 1%";
  if (rep.inconclusive || lx.size() < 2) {
    rep.note += std::string(rep.note.empty() ? "" : "; ") + "fewer than two rows above the noise floor";
    rep.pass = false;
  } else {
    rep.pass = rep.applicability && l1_ok && rep.fitted_slope >= s && rep.band <= 3.0;
  }
  return rep;
}

CollarField::CollarField(const Domain& domain, double delta, std::uint64_t seed, int index)
    : domain_(&domain), delta_(delta) {
  std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(index));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double kmax = 2.0 * M_PI / std::max(delta, 1e-3);
  for (int j = 0; j < 4; ++j) {
    a_[j] = 2.0 * u(rng) - 1.0;
    phase_[j] = 2.0 * M_PI * u(rng);
    const double ang = 2.0 * M_PI * u(rng);
    omega_[j] = kmax * u(rng) * Vec2(std::cos(ang), std::sin(ang));
  }
}

double CollarField::operator()(const Vec2& x) const {
  const double d = std::max(0.0, domain_->signed_distance(x));
  const double s = d / (1.5 * delta_);
  if (s >= 1.0) return 0.0;
  double chi = 1.0;
  if (s > 0.5) {
    const double u = 2.0 * s - 1.0;
    chi = 1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
  }
  double w = 0.0;
  for (int j = 0; j < 4; ++j) w += a_[j] * std::cos(omega_[j].dot(x) + phase_[j]);
  return chi * (1.0 + 0.5 * w);
}

TOperatorReport t_operator_bound_check(const Domain& domain, double delta, double r, int trials,
                                       std::uint64_t seed, const MeshParams& mesh) {
  if (trials < 1) throw Error(ErrorKind::parameter, "trials must be at least 1");
  if (!(delta > 0)) throw Error(ErrorKind::parameter, "delta must be positive");
  if (!(focal_distance(domain) > 2.0 * delta))
    throw Error(ErrorKind::hypothesis_violation, "focal point within 2 delta of the boundary");
  TOperatorReport rep;
  rep.delta = delta;
  const double inr = inradius(domain);
  const Discretization coarse = discretize(domain, mesh);
  const Discretization fine = discretize_mesh(refine_uniform(coarse.mesh), domain.curve_ptr(), coarse.quadrature.params());
  auto ratios = [&](const Discretization& disc, std::vector<double>& out, double& ridge) {
    const auto& nodes = disc.quadrature.nodes();
    for (int k = 0; k < trials; ++k) {
      const CollarField w(disc.domain, delta, seed, k);
      std::vector<double> lhs(nodes.size(), 0.0), rhs(nodes.size(), 0.0), rw(nodes.size(), 0.0);
      parallel_for(static_cast<int>(nodes.size()), [&](int i) {
        const QuadNode& n = nodes[i];
        if (n.ridge) {
          rw[i] = n.w;
          return;
        }
        const double tw = t_operator(disc.domain, w, n.x, 8);
        lhs[i] = n.w * std::pow(tw, r);
        rhs[i] = n.w * std::max(0.0, std::log(inr / n.d)) * std::pow(std::abs(w(n.x)), r);
      });
      double L = 0, R = 0, W = 0;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        L += lhs[i];
        R += rhs[i];
        W += rw[i];
      }
      ridge = W;
      out.push_back(R > 0 ? L / R : kNaN);
    }
  };
  double rc = 0, rf = 0;
  ratios(coarse, rep.ratios_coarse, rc);
  ratios(fine, rep.ratios_fine, rf);
  rep.ridge_weight = rf;
  for (double v : rep.ratios_coarse) rep.max_coarse = std::max(rep.max_coarse, v);
  for (double v : rep.ratios_fine) rep.max_fine = std::max(rep.max_fine, v);
  rep.pass = std::isfinite(rep.max_coarse) && std::isfinite(rep.max_fine) && rep.max_fine > 0 &&
             rep.max_coarse / rep.max_fine <= 2.0 && rep.max_fine / rep.max_coarse <= 2.0;
  return rep;
}

}  // namespace hardy
