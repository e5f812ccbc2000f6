#pragma once

#include "hardy/curve.hpp"
#include "hardy/types.hpp"

#include <memory>
#include <vector>

namespace hardy {

/// Result of a nearest-boundary query. `segment`/`param` locate tau on the
/// polygon: tau = v[segment] + param * (v[segment+1] - v[segment]).
struct DistanceQuery {
  double d = 0.0;
  Vec2 tau = Vec2::Zero();
  Vec2 grad = Vec2::Zero();
  bool on_ridge = false;
  int segment = -1;
  double param = 0.0;
};

class SegmentIndex;

/// Planar domain bounded by a simple counter-clockwise polygon sampled from a
/// boundary curve. Immutable after construction; queries are thread-safe.
class Domain {
 public:
  /// Samples `n_boundary` vertices from the curve.
  Domain(CurvePtr curve, int n_boundary = 1024);

  /// Explicit polygon; `params` are the curve parameters of the vertices
  /// (used for curvature lookups), empty if unknown.
  Domain(CurvePtr curve, std::vector<Vec2> vertices, std::vector<double> params);

  /// Polygon-only domain (curvature treated as zero).
  static Domain from_polygon(std::vector<Vec2> vertices);

  const BoundaryCurve& curve() const { return *curve_; }
  const CurvePtr& curve_ptr() const { return curve_; }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<double>& vertex_params() const { return params_; }
  int size() const { return static_cast<int>(vertices_.size()); }
  double area() const { return area_; }
  double diameter() const { return diameter_; }
  Vec2 bbox_min() const { return lo_; }
  Vec2 bbox_max() const { return hi_; }

  /// Ties between distinct nearest points closer than this are ridge points.
  double ridge_tolerance() const { return 1e-12 * diameter_; }

  /// Winding-number membership of the open polygon; points on the boundary
  /// are exterior.
  bool contains(const Vec2& x) const;

  /// Positive inside, negative outside.
  double signed_distance(const Vec2& x) const;

  /// d_Omega, tau, grad d and ridge flag. Throws BoundaryExteriorError for
  /// points outside or on the boundary.
  DistanceQuery distance(const Vec2& x) const;

  /// Nearest boundary point regardless of side.
  DistanceQuery nearest(const Vec2& x) const;

  /// Signed curvature of the analytic curve at a boundary point given by
  /// polygon segment and parameter.
  double curvature_at(int segment, double param) const;

  /// Same curve, vertices replaced (e.g. transported by a map).
  Domain with_vertices(std::vector<Vec2> vertices) const;

  Domain with_curve(CurvePtr curve) const;

 private:
  void build();

  CurvePtr curve_;
  std::vector<Vec2> vertices_;
  std::vector<double> params_;
  double area_ = 0.0;
  double diameter_ = 0.0;
  Vec2 lo_, hi_;
  std::shared_ptr<const SegmentIndex> index_;
};

/// Interior points within depth delta of the boundary.
struct Collar {
  const Domain* domain;
  double delta;

  Collar(const Domain& d, double depth);
  bool contains(const Vec2& x) const;
};

DistanceQuery distance_to_boundary(const Domain& domain, const Vec2& x);

/// sup of d over a sample grid, refined locally around the best samples.
/// Extra sample points (e.g. mesh vertices) may be supplied.
double inradius(const Domain& domain, const std::vector<Vec2>& extra_samples = {});

/// Laplacian of d at a collar point via the curvature of the analytic curve:
/// -kappa / (1 - kappa d).
double laplacian_of_distance(const Domain& domain, const Vec2& x);

/// max |Laplacian d| over a sample set of the collar (ridge points skipped).
double laplacian_bound(const Domain& domain, double delta, int samples_per_side = 200);

/// min over the boundary of 1 / kappa for kappa > 0; infinity if nowhere
/// convex.
double focal_distance(const Domain& domain);

/// Default collar depth: half the focal distance, capped by the inradius.
double default_collar_depth(const Domain& domain);

/// |a symmetric-difference b| by polygon clipping.
double symmetric_difference_measure(const Domain& a, const Domain& b);

double polygon_area(const std::vector<Vec2>& polygon);

}  // namespace hardy
