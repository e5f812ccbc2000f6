#pragma once

#include "hardy/domain.hpp"
#include "hardy/domain_map.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace hardy {

/// Local frame (ybar, y_n): x = origin + ybar * tangent + y_n * normal.
struct CylinderFrame {
  Vec2 origin = Vec2::Zero();
  Vec2 tangent = Vec2(1.0, 0.0);
  Vec2 normal = Vec2(0.0, 1.0);

  Vec2 local(const Vec2& x) const { return Vec2((x - origin).dot(tangent), (x - origin).dot(normal)); }
  Vec2 world(const Vec2& y) const { return origin + y.x() * tangent + y.y() * normal; }
};

/// V = W x ]a, b[ with W = ]w0, w1[ in frame coordinates.
struct Cylinder {
  CylinderFrame frame;
  double w0 = -0.5, w1 = 0.5;
  double a = -1.0, b = 0.0;

  bool contains(const Vec2& x) const;
};

/// C^2 function on W with its first two derivatives.
struct Profile {
  std::function<double(double)> f, df, ddf;

  double operator()(double y) const { return f(y); }
  /// max of sup |f|, sup |f'|, sup |f''| over `n` samples of [w0, w1].
  double c2_norm(double w0, double w1, int n = 2001) const;
};

/// c_0 + sum_k c_k cos(k pi (y - w0) / (w1 - w0)).
Profile cosine_profile(std::vector<double> coefficients, double w0, double w1);

/// f + scale * g.
Profile add_profiles(const Profile& f, double scale, const Profile& g);

/// Bump (1 - cos 2 pi s)^2 on W, s = (y - w0)/(w1 - w0), scaled to unit L1
/// mass. It vanishes with two derivatives at the ends of W.
Profile unit_bump_profile(double w0, double w1);

/// Height of the boundary of `domain` over W in the cylinder frame, found
/// on the analytic curve. Throws class_violation if the boundary is not a
/// graph over W inside V.
Profile boundary_graph(const Domain& domain, const Cylinder& cylinder);

/// Piecewise map phi of the volume construction: identity off
/// V and on the closure of Omega_0, and (ybar, gt + a (y_n - g)) above g_0.
class CylinderMap final : public DomainMap {
 public:
  CylinderMap(Cylinder cylinder, Profile g, Profile g_tilde, double eta);
  Vec2 forward(const Vec2& x) const override;
  Mat2 jacobian(const Vec2& x) const override;
  Vec2 inverse(const Vec2& y) const override;
  Hessian2 hessian(const Vec2& x) const override;

  double g0(double ybar) const;
  /// a(ybar): eta / (eta + 1) where gt <= g, (eta + 1) / eta where gt > g.
  double slope(double ybar) const;

 private:
  bool moved(const Vec2& local) const;

  Cylinder cyl_;
  Profile g_, gt_;
  double eta_;
};

struct CylinderPerturbation {
  Cylinder cylinder;
  Profile g, g_tilde;
  double rho = 0.0, M = 0.0;
  double eta = 0.0;
  std::shared_ptr<const CylinderMap> map;
  Domain base;
  Domain perturbed;
  /// integral over W of |g - g_tilde|.
  double profile_l1 = 0.0;
  /// max over samples of |phi(x) - x| for x outside V (should be 0).
  double outside_displacement = 0.0;
  /// Fraction of interior samples of Omega mapped into the perturbed domain.
  double containment = 0.0;
};

/// Validates both profiles in the class C^2_M(V, rho), builds eta, g_0, the
/// map and the perturbed domain phi(Omega), and checks the construction on
/// samples.
CylinderPerturbation build_cylinder_perturbation(const Domain& base, const Profile& g, const Profile& g_tilde,
                                                 const Cylinder& cylinder, double rho, double M);

}  // namespace hardy
