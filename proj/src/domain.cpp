#include "hardy/domain.hpp"

#include "hardy/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hardy {

// Uniform grid over the polygon's bounding box. Each cell keeps the segments
// that can be nearest for some point of the cell, the segments overlapping
// it (for ray casting) and, for cells crossed by no segment, their side.
class SegmentIndex {
 public:
  explicit SegmentIndex(const std::vector<Vec2>& v) : v_(v) {
    const std::size_t n = v_.size();
    lo_ = hi_ = v_[0];
    double total_len = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      lo_ = lo_.cwiseMin(v_[i]);
      hi_ = hi_.cwiseMax(v_[i]);
      total_len += (v_[(i + 1) % n] - v_[i]).norm();
    }
    const Vec2 ext = hi_ - lo_;
    const double diam = ext.norm();
    const double pad = 1e-9 * diam;
    lo_ -= Vec2::Constant(pad);
    hi_ += Vec2::Constant(pad);
    double cell = std::max(2.0 * total_len / n, diam / 160.0);
    nx_ = std::max(1, static_cast<int>(std::ceil((hi_.x() - lo_.x()) / cell)));
    ny_ = std::max(1, static_cast<int>(std::ceil((hi_.y() - lo_.y()) / cell)));
    cw_ = (hi_.x() - lo_.x()) / nx_;
    ch_ = (hi_.y() - lo_.y()) / ny_;
    tol_ = 1e-12 * diam;

    overlap_.assign(static_cast<std::size_t>(nx_) * ny_, {});
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& a = v_[i];
      const Vec2& b = v_[(i + 1) % n];
      const int i0 = col(std::min(a.x(), b.x())), i1 = col(std::max(a.x(), b.x()));
      const int j0 = row(std::min(a.y(), b.y())), j1 = row(std::max(a.y(), b.y()));
      for (int j = j0; j <= j1; ++j)
        for (int k = i0; k <= i1; ++k) overlap_[cell_id(k, j)].push_back(static_cast<int>(i));
    }

    // Candidate lists: segments within D_c + 2 * half-diagonal of the cell centre.
    const double hd = 0.5 * std::hypot(cw_, ch_);
    candidates_.assign(overlap_.size(), {});
    inside_.assign(overlap_.size(), 0);
    std::vector<double> dist(n);
    for (int j = 0; j < ny_; ++j) {
      for (int k = 0; k < nx_; ++k) {
        const Vec2 c = center(k, j);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
          double t;
          dist[i] = (closest_on_segment<double>(v_[i], v_[(i + 1) % n], c, t) - c).norm();
          best = std::min(best, dist[i]);
        }
        auto& cand = candidates_[cell_id(k, j)];
        const double reach = best + 2.0 * hd + 4.0 * tol_;
        for (std::size_t i = 0; i < n; ++i)
          if (dist[i] <= reach) cand.push_back(static_cast<int>(i));
        if (overlap_[cell_id(k, j)].empty()) inside_[cell_id(k, j)] = winding_ray(c) != 0 ? 1 : 0;
      }
    }
  }

  bool in_grid(const Vec2& x) const {
    return x.x() >= lo_.x() && x.x() <= hi_.x() && x.y() >= lo_.y() && x.y() <= hi_.y();
  }

  int winding(const Vec2& x) const {
    if (!in_grid(x)) return 0;
    const std::size_t id = cell_id(col(x.x()), row(x.y()));
    if (overlap_[id].empty()) return inside_[id];
    return winding_ray(x);
  }

  // Nearest point over a list of segments, with tie detection.
  DistanceQuery nearest(const Vec2& x) const {
    if (in_grid(x)) return scan(x, candidates_[cell_id(col(x.x()), row(x.y()))]);
    std::vector<int> all(v_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return scan(x, all);
  }

 private:
  int col(double x) const { return std::clamp(static_cast<int>((x - lo_.x()) / cw_), 0, nx_ - 1); }
  int row(double y) const { return std::clamp(static_cast<int>((y - lo_.y()) / ch_), 0, ny_ - 1); }
  std::size_t cell_id(int k, int j) const { return static_cast<std::size_t>(j) * nx_ + k; }
  Vec2 center(int k, int j) const { return lo_ + Vec2((k + 0.5) * cw_, (j + 0.5) * ch_); }

  // Signed crossings of a ray towards +x; uses only the cells of x's row.
  int winding_ray(const Vec2& x) const {
    const std::size_t n = v_.size();
    const int j = row(x.y());
    std::vector<int> segs;
    for (int k = col(x.x()); k < nx_; ++k) {
      const auto& cell = overlap_[cell_id(k, j)];
      segs.insert(segs.end(), cell.begin(), cell.end());
    }
    std::sort(segs.begin(), segs.end());
    segs.erase(std::unique(segs.begin(), segs.end()), segs.end());
    int wn = 0;
    for (int i : segs) {
      const Vec2& a = v_[i];
      const Vec2& b = v_[(i + 1) % n];
      if (a.y() <= x.y()) {
        if (b.y() > x.y() && orient<double>(a, b, x) > 0) ++wn;
      } else if (b.y() <= x.y() && orient<double>(a, b, x) < 0) {
        --wn;
      }
    }
    return wn;
  }

  DistanceQuery scan(const Vec2& x, const std::vector<int>& segs) const {
    const std::size_t n = v_.size();
    DistanceQuery q;
    double best = std::numeric_limits<double>::infinity();
    for (int i : segs) {
      double t;
      const Vec2 p = closest_on_segment<double>(v_[i], v_[(i + 1) % n], x, t);
      const double dd = (p - x).norm();
      if (dd < best) {
        best = dd;
        q.tau = p;
        q.segment = i;
        q.param = t;
      }
    }
    q.d = best;
    // Ties: distinct nearest points within the ridge tolerance. The
    // lexicographically smallest tau is reported.
    for (int i : segs) {
      double t;
      const Vec2 p = closest_on_segment<double>(v_[i], v_[(i + 1) % n], x, t);
      const double dd = (p - x).norm();
      if (dd - best > tol_) continue;
      if ((p - q.tau).norm() > tol_) {
        q.on_ridge = true;
        if (p.x() < q.tau.x() || (p.x() == q.tau.x() && p.y() < q.tau.y())) {
          q.tau = p;
          q.segment = i;
          q.param = t;
        }
      }
    }
    // Canonical segment for a vertex hit: the segment starting at it.
    if (q.param == 1.0) {
      q.segment = static_cast<int>((q.segment + 1) % n);
      q.param = 0.0;
    }
    return q;
  }

  std::vector<Vec2> v_;
  Vec2 lo_, hi_;
  int nx_ = 1, ny_ = 1;
  double cw_ = 1, ch_ = 1, tol_ = 0;
  std::vector<std::vector<int>> overlap_;
  std::vector<std::vector<int>> candidates_;
  std::vector<char> inside_;
};

double polygon_area(const std::vector<Vec2>& polygon) {
  double a = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    a += cross<double>(polygon[i], polygon[(i + 1) % polygon.size()]);
  }
  return 0.5 * a;
}

Domain::Domain(CurvePtr curve, int n_boundary) : curve_(std::move(curve)) {
  if (!curve_) throw Error(ErrorKind::parameter, "domain needs a boundary curve");
  auto [pts, params] = curve_->sample(n_boundary);
  vertices_ = std::move(pts);
  params_ = std::move(params);
  build();
}

Domain::Domain(CurvePtr curve, std::vector<Vec2> vertices, std::vector<double> params)
    : curve_(std::move(curve)), vertices_(std::move(vertices)), params_(std::move(params)) {
  if (!params_.empty() && params_.size() != vertices_.size()) {
    throw Error(ErrorKind::parameter, "vertex parameter count mismatch");
  }
  build();
}

Domain Domain::from_polygon(std::vector<Vec2> vertices) {
  auto curve = std::make_shared<PolygonCurve>(vertices);
  return Domain(curve, curve->vertices(), curve->breakpoints());
}

Domain Domain::with_vertices(std::vector<Vec2> vertices) const {
  if (vertices.size() != vertices_.size()) {
    throw Error(ErrorKind::parameter, "with_vertices: vertex count mismatch");
  }
  return Domain(curve_, std::move(vertices), params_);
}

Domain Domain::with_curve(CurvePtr curve) const { return Domain(std::move(curve), vertices_, params_); }

void Domain::build() {
  if (vertices_.size() < 3) throw Error(ErrorKind::geometry_failure, "domain polygon needs 3 vertices");
  for (const auto& v : vertices_) {
    if (!v.allFinite()) throw Error(ErrorKind::geometry_failure, "non-finite polygon vertex");
  }
  area_ = polygon_area(vertices_);
  if (!(area_ > 0)) {
    throw Error(ErrorKind::geometry_failure, "domain polygon must be counter-clockwise with positive area");
  }
  lo_ = hi_ = vertices_[0];
  for (const auto& v : vertices_) {
    lo_ = lo_.cwiseMin(v);
    hi_ = hi_.cwiseMax(v);
  }
  diameter_ = (hi_ - lo_).norm();
  index_ = std::make_shared<SegmentIndex>(vertices_);
}

bool Domain::contains(const Vec2& x) const {
  if (index_->winding(x) == 0) return false;
  // Boundary points are exterior.
  return index_->nearest(x).d > 0.0;
}

DistanceQuery Domain::nearest(const Vec2& x) const { return index_->nearest(x); }

double Domain::signed_distance(const Vec2& x) const {
  const DistanceQuery q = index_->nearest(x);
  if (q.d == 0.0) return 0.0;
  return index_->winding(x) != 0 ? q.d : -q.d;
}

DistanceQuery Domain::distance(const Vec2& x) const {
  DistanceQuery q = index_->nearest(x);
  if (q.d == 0.0 || index_->winding(x) == 0) {
    std::ostringstream os;
    os.precision(17);
    os << "point (" << x.x() << ", " << x.y() << ") is not interior";
    throw BoundaryExteriorError(q.d == 0.0 ? 0.0 : -q.d, os.str());
  }
  q.grad = (x - q.tau) / q.d;
  return q;
}

double Domain::curvature_at(int segment, double param) const {
  if (!curve_->smooth() || params_.empty()) return 0.0;
  const std::size_t n = vertices_.size();
  double s0 = params_[static_cast<std::size_t>(segment)];
  double s1 = params_[(static_cast<std::size_t>(segment) + 1) % n];
  if (s1 <= s0) s1 += 1.0;
  double s = s0 + param * (s1 - s0);
  s -= std::floor(s);
  return curve_->curvature(s);
}

Collar::Collar(const Domain& d, double depth) : domain(&d), delta(depth) {
  if (!(depth > 0)) throw Error(ErrorKind::parameter, "collar depth must be positive");
}

bool Collar::contains(const Vec2& x) const {
  const double sd = domain->signed_distance(x);
  return sd > 0.0 && sd < delta;
}

DistanceQuery distance_to_boundary(const Domain& domain, const Vec2& x) { return domain.distance(x); }

double inradius(const Domain& domain, const std::vector<Vec2>& extra_samples) {
  const Vec2 lo = domain.bbox_min(), hi = domain.bbox_max();
  const int n = 96;
  const Vec2 step = (hi - lo) / n;
  double best = 0.0;
  std::vector<std::pair<double, Vec2>> top;
  auto consider = [&](const Vec2& x) {
    const double sd = domain.signed_distance(x);
    if (sd <= 0) return;
    best = std::max(best, sd);
    top.emplace_back(sd, x);
  };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) consider(lo + Vec2(i * step.x(), j * step.y()));
  for (const auto& x : extra_samples) consider(x);
  // Local pattern search from the best samples.
  std::sort(top.begin(), top.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  top.resize(std::min<std::size_t>(top.size(), 8));
  for (auto [val, x] : top) {
    double r = step.norm();
    while (r > 1e-10 * domain.diameter()) {
      bool moved = false;
      for (int k = 0; k < 8; ++k) {
        const double ang = k * 0.25 * 3.14159265358979323846;
        const Vec2 y = x + r * Vec2(std::cos(ang), std::sin(ang));
        const double sd = domain.signed_distance(y);
        if (sd > val) {
          val = sd;
          x = y;
          moved = true;
        }
      }
      if (!moved) r *= 0.5;
    }
    best = std::max(best, val);
  }
  return best;
}

double laplacian_of_distance(const Domain& domain, const Vec2& x) {
  const DistanceQuery q = domain.distance(x);
  if (q.on_ridge) throw Error(ErrorKind::ridge, "laplacian of distance requested on the ridge");
  const double kappa = domain.curvature_at(q.segment, q.param);
  const double denom = 1.0 - kappa * q.d;
  if (!(denom > 0)) throw Error(ErrorKind::focal_point, "point at or beyond the focal distance");
  return -kappa / denom;
}

double laplacian_bound(const Domain& domain, double delta, int samples_per_side) {
  const Vec2 lo = domain.bbox_min(), hi = domain.bbox_max();
  double bound = 0.0;
  for (int j = 0; j <= samples_per_side; ++j) {
    for (int i = 0; i <= samples_per_side; ++i) {
      const Vec2 x = lo + Vec2((hi.x() - lo.x()) * i / samples_per_side, (hi.y() - lo.y()) * j / samples_per_side);
      const double sd = domain.signed_distance(x);
      if (!(sd > 0 && sd <= delta)) continue;
      const DistanceQuery q = domain.distance(x);
      if (q.on_ridge) continue;
      const double kappa = domain.curvature_at(q.segment, q.param);
      const double denom = 1.0 - kappa * q.d;
      if (!(denom > 0)) throw Error(ErrorKind::focal_point, "collar reaches a focal point");
      bound = std::max(bound, std::abs(kappa / denom));
    }
  }
  // The collar's inner edge d = delta attains the extreme for convex arcs.
  for (int i = 0; i < domain.size(); ++i) {
    const double kappa = domain.curvature_at(i, 0.0);
    const double denom = 1.0 - kappa * delta;
    if (!(denom > 0)) throw Error(ErrorKind::focal_point, "collar reaches a focal point");
    bound = std::max(bound, std::abs(kappa / denom));
  }
  return bound;
}

double focal_distance(const Domain& domain) {
  double kmax = 0.0;
  const int n = domain.size();
  for (int i = 0; i < n; ++i) {
    kmax = std::max(kmax, domain.curvature_at(i, 0.0));
    kmax = std::max(kmax, domain.curvature_at(i, 0.5));
  }
  return kmax > 0 ? 1.0 / kmax : std::numeric_limits<double>::infinity();
}

namespace {

// Largest t such that x_i + t n_i still projects back to x_i, by bisection.
double normal_cut_distance(const Domain& domain, int i, double t_max) {
  const auto& v = domain.vertices();
  const int n = domain.size();
  // Shoot from the segment midpoint along the inward normal.
  const Vec2 a = v[i], b = v[(i + 1) % n];
  const Vec2 here = 0.5 * (a + b);
  if ((b - a).norm() < 1e-14) return t_max;
  const Vec2 normal = perp<double>((b - a).normalized());
  auto projects_back = [&](double t) {
    const Vec2 x = here + t * normal;
    const double sd = domain.signed_distance(x);
    if (sd <= 0) return false;
    const DistanceQuery q = domain.nearest(x);
    return std::abs(q.d - t) <= 1e-9 * domain.diameter() + 1e-9 * t;
  };
  double lo = 0.0, hi = t_max;
  if (projects_back(hi)) return hi;
  for (int k = 0; k < 50; ++k) {
    const double mid = 0.5 * (lo + hi);
    (projects_back(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

double default_collar_depth(const Domain& domain) {
  const double inr = inradius(domain);
  double reach = std::min(focal_distance(domain), inr);
  // The cut locus may come closer than the focal points (necks).
  const int n = domain.size();
  const int stride = std::max(1, n / 256);
  for (int i = 0; i < n; i += stride) reach = std::min(reach, normal_cut_distance(domain, i, reach));
  return 0.5 * reach;
}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::boundary_exterior: return "boundary_exterior";
    case ErrorKind::ridge: return "ridge";
    case ErrorKind::focal_point: return "focal_point";
    case ErrorKind::non_integrable_exponent: return "non_integrable_exponent";
    case ErrorKind::geometry_failure: return "geometry_failure";
    case ErrorKind::degenerate_map: return "degenerate_map";
    case ErrorKind::class_violation: return "class_violation";
    case ErrorKind::construction_failure: return "construction_failure";
    case ErrorKind::degenerate_field: return "degenerate_field";
    case ErrorKind::convergence_failure: return "convergence_failure";
    case ErrorKind::mesh_failure: return "mesh_failure";
    case ErrorKind::range: return "range";
    case ErrorKind::applicability: return "applicability";
    case ErrorKind::sampling: return "sampling";
    case ErrorKind::hypothesis_violation: return "hypothesis_violation";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace hardy
