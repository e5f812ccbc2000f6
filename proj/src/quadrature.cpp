#include "hardy/quadrature.hpp"

#include "hardy/errors.hpp"
#include "hardy/parallel.hpp"

#include <cmath>

namespace hardy {

namespace {

struct BaseRule {
  std::vector<std::array<double, 3>> pts;  // l1, l2, weight (sum 1)
};

const BaseRule& base_rule(int order) {
  static const BaseRule centroid{{{1.0 / 3.0, 1.0 / 3.0, 1.0}}};
  static const BaseRule dunavant4 = [] {
    BaseRule r;
    const double a1 = 0.445948490915965, b1 = 0.108103018168070, w1 = 0.223381589678011;
    const double a2 = 0.091576213509771, b2 = 0.816847572980459, w2 = 0.109951743655322;
    r.pts = {{a1, a1, w1}, {a1, b1, w1}, {b1, a1, w1}, {a2, a2, w2}, {a2, b2, w2}, {b2, a2, w2}};
    double s = 0.0;
    for (auto& p : r.pts) s += p[2];
    for (auto& p : r.pts) p[2] /= s;
    return r;
  }();
  if (order <= 1) return centroid;
  if (order == 4) return dunavant4;
  throw Error(ErrorKind::parameter, "quadrature order must be 1 or 4");
}

using Poly = std::vector<std::array<double, 2>>;

// Keeps the part of a convex polygon (in barycentric l1, l2 space) where
// sign * (ell(l) - level) >= 0.
Poly clip(const Poly& poly, const std::array<double, 3>& ell, double level, double sign) {
  auto value = [&](const std::array<double, 2>& p) {
    return sign * (ell[0] + (ell[1] - ell[0]) * p[0] + (ell[2] - ell[0]) * p[1] - level);
  };
  Poly out;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % poly.size()];
    const double fa = value(a), fb = value(b);
    if (fa >= 0) out.push_back(a);
    if ((fa >= 0) != (fb >= 0)) {
      const double s = fa / (fa - fb);
      out.push_back({a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])});
    }
  }
  return out;
}

}  // namespace

std::vector<double> vertex_distances(const Mesh& mesh, const Domain& domain) {
  std::vector<double> ell(mesh.n_vertices(), 0.0);
  parallel_for(mesh.n_vertices(), [&](int i) {
    ell[i] = mesh.boundary[i] ? 0.0 : std::max(0.0, domain.signed_distance(mesh.vertices[i]));
  });
  return ell;
}

QuadratureRule::QuadratureRule(const Mesh& mesh, const Domain& domain, const QuadratureParams& params)
    : params_(params) {
  const BaseRule& rule = base_rule(params.order);
  const std::vector<double> ell = vertex_distances(mesh, domain);
  const double floor = params.depth_floor * domain.diameter();
  const int nt = mesh.n_triangles();
  offsets_.assign(nt + 1, 0);
  depth_.assign(nt, 0);
  for (int t = 0; t < nt; ++t) {
    const auto& tr = mesh.triangles[t];
    const std::array<double, 3> e{ell[tr[0]], ell[tr[1]], ell[tr[2]]};
    const double emax = std::max({e[0], e[1], e[2]});
    const double emin = std::min({e[0], e[1], e[2]});
    int depth = 0;
    if (emax > 0 && emax > params.ratio_trigger * emin) {
      const double ratio = emin > 0 ? emax / emin : std::numeric_limits<double>::infinity();
      depth = std::min(params.max_depth, static_cast<int>(std::ceil(std::log2(ratio))));
      // Cuts below the floor would be resolved by rounding, not geometry.
      const int floor_depth = emax > floor ? static_cast<int>(std::floor(std::log2(emax / floor))) : 0;
      depth = std::max(0, std::min(depth, floor_depth));
    }
    depth_[t] = depth;
    const Poly tri{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    std::vector<Poly> pieces;
    if (depth == 0) {
      pieces.push_back(tri);
    } else {
      double hi = emax;
      for (int k = 1; k <= depth; ++k) {
        const double lo = k == depth ? -1.0 : emax * std::ldexp(1.0, -k);
        Poly p = clip(clip(tri, e, lo, 1.0), e, hi, -1.0);
        if (p.size() >= 3) pieces.push_back(std::move(p));
        hi = lo;
      }
    }
    for (const Poly& p : pieces) {
      for (std::size_t k = 1; k + 1 < p.size(); ++k) {
        const auto& a = p[0];
        const auto& b = p[k];
        const auto& c = p[k + 1];
        const double area = std::abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
        if (!(area > 0)) continue;
        for (const auto& q : rule.pts) {
          const double s = q[0], r = q[1];
          pattern_.push_back({a[0] + s * (b[0] - a[0]) + r * (c[0] - a[0]),
                              a[1] + s * (b[1] - a[1]) + r * (c[1] - a[1]), q[2] * area});
        }
      }
    }
    offsets_[t + 1] = static_cast<int>(pattern_.size());
  }
  evaluate(mesh, domain);
}

QuadratureRule QuadratureRule::transported(const Mesh& mesh, const Domain& domain) const {
  if (mesh.n_triangles() != n_triangles()) throw Error(ErrorKind::parameter, "transported mesh topology differs");
  QuadratureRule out;
  out.params_ = params_;
  out.pattern_ = pattern_;
  out.offsets_ = offsets_;
  out.depth_ = depth_;
  out.evaluate(mesh, domain);
  return out;
}

void QuadratureRule::evaluate(const Mesh& mesh, const Domain& domain) {
  nodes_.assign(pattern_.size(), QuadNode{});
  const int nt = mesh.n_triangles();
  std::vector<char> failed(nt, 0);
  parallel_for(nt, [&](int t) {
    const auto& tr = mesh.triangles[t];
    const Vec2& v0 = mesh.vertices[tr[0]];
    const Vec2& v1 = mesh.vertices[tr[1]];
    const Vec2& v2 = mesh.vertices[tr[2]];
    const double area = mesh.area(t);
    for (int k = offsets_[t]; k < offsets_[t + 1]; ++k) {
      const PatternPoint& pp = pattern_[k];
      QuadNode& n = nodes_[k];
      n.l1 = pp.l1;
      n.l2 = pp.l2;
      n.x = (1.0 - pp.l1 - pp.l2) * v0 + pp.l1 * v1 + pp.l2 * v2;
      n.w = pp.w * area;
      n.tri = t;
      const DistanceQuery q = domain.nearest(n.x);
      if (!(q.d > 0)) {
        failed[t] = 1;
        continue;
      }
      n.d = q.d;
      n.tau = q.tau;
      n.grad = (n.x - q.tau) / q.d;
      n.segment = q.segment;
      n.param = q.param;
      n.ridge = q.on_ridge;
    }
  });
  for (int t = 0; t < nt; ++t) {
    if (failed[t]) throw Error(ErrorKind::mesh_failure, "quadrature node on the boundary");
  }
}

double QuadratureRule::ridge_weight() const {
  double s = 0.0;
  for (const auto& n : nodes_)
    if (n.ridge) s += n.w;
  return s;
}

double QuadratureRule::total_weight() const {
  double s = 0.0;
  for (const auto& n : nodes_) s += n.w;
  return s;
}

double singular_integral(const Domain&, double gamma, const QuadratureRule& quadrature) {
  if (!(gamma < 1.0)) throw Error(ErrorKind::non_integrable_exponent, "I_gamma requires gamma < 1");
  double s = 0.0;
  for (const auto& n : quadrature.nodes()) s += n.w * std::pow(n.d, -gamma);
  return s;
}

}  // namespace hardy
