#include "hardy/mesh.hpp"

#include "hardy/errors.hpp"

#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <ostream>
#include <random>

namespace hardy {

namespace {

constexpr double kPi = 3.14159265358979323846;

long double orient_ld(const Vec2& a, const Vec2& b, const Vec2& c) {
  const long double abx = (long double)b.x() - a.x(), aby = (long double)b.y() - a.y();
  const long double acx = (long double)c.x() - a.x(), acy = (long double)c.y() - a.y();
  return abx * acy - aby * acx;
}

// Positive when d lies inside the circumcircle of the counter-clockwise
// triangle (a, b, c).
long double incircle_ld(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const long double adx = (long double)a.x() - d.x(), ady = (long double)a.y() - d.y();
  const long double bdx = (long double)b.x() - d.x(), bdy = (long double)b.y() - d.y();
  const long double cdx = (long double)c.x() - d.x(), cdy = (long double)c.y() - d.y();
  const long double ad = adx * adx + ady * ady;
  const long double bd = bdx * bdx + bdy * bdy;
  const long double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 ab = b - a, ac = c - a;
  const double d = 2.0 * cross<double>(ab, ac);
  const double ab2 = ab.squaredNorm(), ac2 = ac.squaredNorm();
  return a + Vec2(ac.y() * ab2 - ab.y() * ac2, ab.x() * ac2 - ac.x() * ab2) / d;
}

double triangle_min_angle(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double la = (b - c).norm(), lb = (a - c).norm(), lc = (a - b).norm();
  const double area2 = std::abs(cross<double>(b - a, c - a));
  // sin of each angle via the area; the smallest angle is opposite the
  // shortest edge.
  const double lmin = std::min({la, lb, lc});
  double opp1, opp2;
  if (lmin == la) {
    opp1 = lb, opp2 = lc;
  } else if (lmin == lb) {
    opp1 = la, opp2 = lc;
  } else {
    opp1 = la, opp2 = lb;
  }
  const double s = std::clamp(area2 / (opp1 * opp2), 0.0, 1.0);
  return std::asin(s) * 180.0 / kPi;
}

// Incremental Bowyer-Watson triangulation with neighbour links.
class Delaunay {
 public:
  struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> n;  // neighbour opposite v[i]
    bool alive;
  };

  Delaunay(const Vec2& lo, const Vec2& hi) {
    const Vec2 c = 0.5 * (lo + hi);
    const double r = 20.0 * std::max((hi - lo).norm(), 1e-12);
    for (int k = 0; k < 3; ++k) {
      const double a = 0.5 * kPi + 2.0 * kPi * k / 3.0;
      pts.push_back(c + r * Vec2(std::cos(a), std::sin(a)));
    }
    tris.push_back({{0, 1, 2}, {-1, -1, -1}, true});
    mark_.push_back(0);
  }

  int locate(const Vec2& p, int hint) const {
    int t = (hint >= 0 && hint < (int)tris.size() && tris[hint].alive) ? hint : last_alive();
    for (std::size_t step = 0; step < 4 * tris.size() + 16; ++step) {
      const Tri& tr = tris[t];
      bool moved = false;
      for (int k = 0; k < 3; ++k) {
        const int i = (k + static_cast<int>(step)) % 3;
        if (orient_ld(pts[tr.v[(i + 1) % 3]], pts[tr.v[(i + 2) % 3]], p) < 0) {
          if (tr.n[i] < 0) return -1;
          t = tr.n[i];
          moved = true;
          break;
        }
      }
      if (!moved) return t;
    }
    throw Error(ErrorKind::mesh_failure, "point location did not terminate");
  }

  /// Returns the new vertex index, or -1 for a duplicate point.
  int insert(const Vec2& p, int hint, std::vector<int>* created = nullptr) {
    const int t0 = locate(p, hint);
    if (t0 < 0) throw Error(ErrorKind::mesh_failure, "point outside the enclosing triangle");
    for (int i : tris[t0].v) {
      if ((pts[i] - p).squaredNorm() <= 1e-28 * std::max(1.0, p.squaredNorm())) return -1;
    }
    const int id = static_cast<int>(pts.size());
    pts.push_back(p);
    ++stamp_;

    cavity_.clear();
    cavity_.push_back(t0);
    mark_[t0] = stamp_;
    for (std::size_t k = 0; k < cavity_.size(); ++k) {
      const Tri& tr = tris[cavity_[k]];
      for (int i = 0; i < 3; ++i) {
        const int nb = tr.n[i];
        if (nb < 0 || mark_[nb] == stamp_) continue;
        const Tri& q = tris[nb];
        if (incircle_ld(pts[q.v[0]], pts[q.v[1]], pts[q.v[2]], p) > 0) {
          mark_[nb] = stamp_;
          cavity_.push_back(nb);
        }
      }
    }

    struct Edge {
      int a, b, outer;
    };
    std::vector<Edge> edges;
    for (int t : cavity_) {
      const Tri& tr = tris[t];
      for (int i = 0; i < 3; ++i) {
        const int nb = tr.n[i];
        if (nb >= 0 && mark_[nb] == stamp_) continue;
        edges.push_back({tr.v[(i + 1) % 3], tr.v[(i + 2) % 3], nb});
      }
    }
    for (const Edge& e : edges) {
      if (orient_ld(pts[e.a], pts[e.b], p) <= 0) {
        pts.pop_back();
        for (int t : cavity_) mark_[t] = 0;
        throw Error(ErrorKind::mesh_failure, "non-star-shaped insertion cavity");
      }
    }

    std::vector<int> slots(cavity_.begin(), cavity_.end());
    while (slots.size() < edges.size()) {
      slots.push_back(static_cast<int>(tris.size()));
      tris.push_back({{0, 0, 0}, {-1, -1, -1}, false});
      mark_.push_back(0);
    }
    for (std::size_t k = edges.size(); k < slots.size(); ++k) tris[slots[k]].alive = false;

    for (std::size_t k = 0; k < edges.size(); ++k) {
      const Edge& e = edges[k];
      const int t = slots[k];
      tris[t] = {{e.a, e.b, id}, {-1, -1, e.outer}, true};
      if (e.outer >= 0) {
        Tri& o = tris[e.outer];
        for (int i = 0; i < 3; ++i) {
          if (o.v[(i + 1) % 3] == e.b && o.v[(i + 2) % 3] == e.a) o.n[i] = t;
        }
      }
    }
    // Link the fan: the triangle (a, b, p) meets (b, x, p) across (b, p) and
    // (y, a, p) across (p, a).
    for (std::size_t k = 0; k < edges.size(); ++k) {
      for (std::size_t m = 0; m < edges.size(); ++m) {
        if (edges[m].a == edges[k].b) tris[slots[k]].n[0] = slots[m];
        if (edges[m].b == edges[k].a) tris[slots[k]].n[1] = slots[m];
      }
    }
    last_ = slots[0];
    if (created) {
      created->clear();
      for (std::size_t k = 0; k < edges.size(); ++k) created->push_back(slots[k]);
    }
    return id;
  }

  int last_alive() const {
    if (last_ >= 0 && last_ < (int)tris.size() && tris[last_].alive) return last_;
    for (int t = (int)tris.size() - 1; t >= 0; --t)
      if (tris[t].alive) return t;
    return 0;
  }

  std::vector<Vec2> pts;
  std::vector<Tri> tris;

 private:
  std::vector<int> mark_;
  std::vector<int> cavity_;
  int stamp_ = 0;
  int last_ = 0;
};

struct LoopSample {
  Vec2 x;
  double s;  // curve parameter
};

// Boundary nodes at spacing ~hb along the domain polygon. Vertices where the
// polygon turns by more than 15 degrees are kept as nodes.
std::vector<LoopSample> resample_boundary(const Domain& domain, double hb) {
  const auto& v = domain.vertices();
  const auto& params = domain.vertex_params();
  const int n = domain.size();
  std::vector<double> arc(n + 1, 0.0);
  for (int i = 0; i < n; ++i) arc[i + 1] = arc[i] + (v[(i + 1) % n] - v[i]).norm();
  const double perimeter = arc[n];

  auto curve_param = [&](int seg, double t) {
    if (params.empty()) return (arc[seg] + t * (arc[seg + 1] - arc[seg])) / perimeter;
    const double s0 = params[seg];
    double s1 = params[(seg + 1) % n];
    if (s1 <= s0) s1 += 1.0;
    double s = s0 + t * (s1 - s0);
    return s - std::floor(s);
  };
  auto at_arclength = [&](double a) {
    a = std::fmod(a, perimeter);
    if (a < 0) a += perimeter;
    int seg = static_cast<int>(std::upper_bound(arc.begin(), arc.end(), a) - arc.begin()) - 1;
    seg = std::clamp(seg, 0, n - 1);
    const double len = arc[seg + 1] - arc[seg];
    const double t = len > 0 ? std::clamp((a - arc[seg]) / len, 0.0, 1.0) : 0.0;
    const Vec2 x = v[seg] + t * (v[(seg + 1) % n] - v[seg]);
    return LoopSample{x, curve_param(seg, t)};
  };

  const double corner_cos = std::cos(15.0 * kPi / 180.0);
  std::vector<int> corners;
  for (int i = 0; i < n; ++i) {
    const Vec2 ein = (v[i] - v[(i + n - 1) % n]).normalized();
    const Vec2 eout = (v[(i + 1) % n] - v[i]).normalized();
    if (ein.dot(eout) < corner_cos) corners.push_back(i);
  }

  std::vector<LoopSample> out;
  if (corners.empty()) {
    const int m = std::max(8, static_cast<int>(std::lround(perimeter / hb)));
    for (int k = 0; k < m; ++k) out.push_back(at_arclength(perimeter * k / m));
    return out;
  }
  for (std::size_t c = 0; c < corners.size(); ++c) {
    const int i0 = corners[c];
    const int i1 = corners[(c + 1) % corners.size()];
    double a0 = arc[i0], a1 = arc[i1];
    if (a1 <= a0) a1 += perimeter;
    const double len = a1 - a0;
    const int m = std::max(1, static_cast<int>(std::lround(len / hb)));
    out.push_back({v[i0], params.empty() ? arc[i0] / perimeter : params[i0]});
    for (int k = 1; k < m; ++k) out.push_back(at_arclength(a0 + len * k / m));
  }
  return out;
}

}  // namespace

double Mesh::area(int t) const {
  const auto& tr = triangles[t];
  return 0.5 * cross<double>(vertices[tr[1]] - vertices[tr[0]], vertices[tr[2]] - vertices[tr[0]]);
}

Mesh build_mesh(const Domain& domain, const MeshParams& params) {
  if (!(params.h > 0) || !(params.boundary_factor > 0) || params.layers < 0 || !(params.layer_ratio > 0) ||
      !(params.layer_ratio <= 1) || !(params.layer_depth > 0) || !(params.grading > 0)) {
    throw Error(ErrorKind::parameter, "invalid mesh parameters");
  }
  const double hb = params.h * params.boundary_factor;
  const std::vector<LoopSample> bnd = resample_boundary(domain, hb);
  const int nb = static_cast<int>(bnd.size());
  const int L = params.layers;

  Mesh mesh;
  mesh.h = params.h;
  mesh.grading = params.layer_ratio;

  // Mitered inward offset directions.
  std::vector<Vec2> dir(nb);
  for (int j = 0; j < nb; ++j) {
    const Vec2& a = bnd[(j + nb - 1) % nb].x;
    const Vec2& b = bnd[j].x;
    const Vec2& c = bnd[(j + 1) % nb].x;
    const Vec2 na = perp<double>((b - a).normalized());
    const Vec2 nc = perp<double>((c - b).normalized());
    const Vec2 m = (na + nc).normalized();
    dir[j] = m / std::max(m.dot(na), 0.5);
  }

  // Cumulative offsets: layer k sits at depth offset[k], thickness shrinking
  // geometrically towards the boundary.
  std::vector<double> offset(L + 1, 0.0);
  if (L > 0) {
    const double total = params.layer_depth * hb;
    std::vector<double> thick(L);
    double sum = 0.0;
    for (int k = 0; k < L; ++k) {
      thick[k] = std::pow(params.layer_ratio, L - 1 - k);
      sum += thick[k];
    }
    for (int k = 0; k < L; ++k) offset[k + 1] = offset[k] + total * thick[k] / sum;
  }

  for (int k = 0; k <= L; ++k) {
    for (int j = 0; j < nb; ++j) {
      mesh.vertices.push_back(bnd[j].x + offset[k] * dir[j]);
      mesh.boundary.push_back(k == 0 ? 1 : 0);
      mesh.layer.push_back(k);
      mesh.column.push_back(j);
    }
  }
  for (int j = 0; j < nb; ++j) {
    mesh.loop.push_back(j);
    mesh.loop_params.push_back(bnd[j].s);
  }
  auto node = [nb](int k, int j) { return k * nb + (j % nb); };
  for (int k = 0; k < L; ++k) {
    for (int j = 0; j < nb; ++j) {
      const int a = node(k, j), b = node(k, j + 1), c = node(k + 1, j + 1), d = node(k + 1, j);
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({a, c, d});
      mesh.core.push_back(0);
      mesh.core.push_back(0);
    }
  }
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    if (!(mesh.area(t) > 0)) throw Error(ErrorKind::mesh_failure, "boundary layer folds over; reduce h");
  }

  // Isotropic core inside the innermost loop.
  std::vector<Vec2> inner_pts(nb);
  for (int j = 0; j < nb; ++j) inner_pts[j] = mesh.vertices[node(L, j)];
  if (!(polygon_area(inner_pts) > 0)) throw Error(ErrorKind::mesh_failure, "inner loop degenerate");
  const Domain inner = Domain::from_polygon(inner_pts);
  // from_polygon keeps vertex order for counter-clockwise input.
  for (int j = 0; j < nb; ++j) {
    if ((inner.vertices()[j] - inner_pts[j]).norm() > 0) throw Error(ErrorKind::mesh_failure, "inner loop reordered");
  }

  const double hmax = params.h;
  auto size_at = [&](const Vec2& x) { return std::min(hmax, hb + params.grading * inner.nearest(x).d); };

  Delaunay dt(inner.bbox_min(), inner.bbox_max());
  int hint = 0;
  for (int j = 0; j < nb; ++j) {
    const int id = dt.insert(inner_pts[j], hint);
    if (id != j + 3) throw Error(ErrorKind::mesh_failure, "duplicate boundary node");
    hint = dt.tris.size() > 0 ? dt.last_alive() : 0;
  }

  const double qsin = std::sin(params.quality_angle * kPi / 180.0);
  std::mt19937_64 rng(params.seed);
  auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const std::size_t max_points = static_cast<std::size_t>(50.0 * inner.area() / (hb * hb)) + 1000;

  std::deque<std::pair<int, std::array<int, 3>>> queue;
  for (int t = 0; t < (int)dt.tris.size(); ++t)
    if (dt.tris[t].alive) queue.push_back({t, dt.tris[t].v});
  std::vector<int> created;
  auto encroaches = [&](const Vec2& c) {
    const DistanceQuery q = inner.nearest(c);
    for (int off = -1; off <= 1; ++off) {
      const int s = (q.segment + off + nb) % nb;
      const Vec2& a = inner_pts[s];
      const Vec2& b = inner_pts[(s + 1) % nb];
      if ((c - 0.5 * (a + b)).norm() < 0.5 * (b - a).norm() * (1.0 + 1e-9)) return true;
    }
    return false;
  };
  while (!queue.empty()) {
    auto [t, verts] = queue.front();
    queue.pop_front();
    const auto& tr = dt.tris[t];
    if (!tr.alive || tr.v != verts) continue;
    if (verts[0] < 3 || verts[1] < 3 || verts[2] < 3) continue;
    const Vec2& a = dt.pts[verts[0]];
    const Vec2& b = dt.pts[verts[1]];
    const Vec2& c = dt.pts[verts[2]];
    const Vec2 centroid = (a + b + c) / 3.0;
    if (!inner.contains(centroid)) continue;
    const Vec2 cc = circumcenter(a, b, c);
    const double radius = (cc - a).norm();
    const double shortest = std::min({(a - b).norm(), (b - c).norm(), (c - a).norm()});
    const bool skinny = shortest < 2.0 * radius * qsin;
    const bool large = radius > 0.66 * size_at(centroid);
    if (!skinny && !large) continue;
    if (dt.pts.size() >= max_points) throw Error(ErrorKind::mesh_failure, "core refinement exceeded point budget");
    Vec2 p = cc;
    if (params.jitter > 0) {
      const double ang = 2.0 * kPi * uniform();
      p += params.jitter * shortest * uniform() * Vec2(std::cos(ang), std::sin(ang));
    }
    if (!inner.contains(p) || encroaches(p)) continue;
    if (inner.nearest(p).d < 0.25 * hb) continue;
    if (dt.insert(p, t, &created) < 0) continue;
    for (int n : created) queue.push_back({n, dt.tris[n].v});
  }

  // Collect core triangles and map Delaunay vertex ids to mesh ids.
  std::vector<int> id_map(dt.pts.size(), -1);
  for (int j = 0; j < nb; ++j) id_map[j + 3] = node(L, j);
  std::set<std::pair<int, int>> edges;
  for (const auto& tr : dt.tris) {
    if (!tr.alive || tr.v[0] < 3 || tr.v[1] < 3 || tr.v[2] < 3) continue;
    const Vec2 centroid = (dt.pts[tr.v[0]] + dt.pts[tr.v[1]] + dt.pts[tr.v[2]]) / 3.0;
    if (!inner.contains(centroid)) continue;
    std::array<int, 3> m;
    for (int i = 0; i < 3; ++i) {
      int& id = id_map[tr.v[i]];
      if (id < 0) {
        id = mesh.n_vertices();
        mesh.vertices.push_back(dt.pts[tr.v[i]]);
        mesh.boundary.push_back(0);
        mesh.layer.push_back(-1);
        mesh.column.push_back(-1);
      }
      m[i] = id;
    }
    for (int i = 0; i < 3; ++i) edges.insert({m[i], m[(i + 1) % 3]});
    mesh.triangles.push_back(m);
    mesh.core.push_back(1);
  }
  for (int j = 0; j < nb; ++j) {
    if (!edges.count({node(L, j), node(L, j + 1)})) {
      throw Error(ErrorKind::mesh_failure, "inner loop edge missing from the core triangulation");
    }
  }
  // With no layers the inner loop is the boundary.
  if (L == 0) {
    for (int j = 0; j < nb; ++j) mesh.boundary[j] = 1;
  }
  validate_mesh(mesh);
  return mesh;
}

Domain mesh_domain(const Mesh& mesh, const CurvePtr& curve) {
  std::vector<Vec2> pts;
  pts.reserve(mesh.loop.size());
  for (int i : mesh.loop) pts.push_back(mesh.vertices[i]);
  return Domain(curve, std::move(pts), mesh.loop_params);
}

Mesh transport_mesh(const Mesh& mesh, const DomainMap& map) {
  Mesh out = mesh;
  for (int i = 0; i < mesh.n_vertices(); ++i) {
    const int foot = mesh.column.empty() ? -1 : mesh.column[i];
    if (foot < 0 || foot == i) {
      out.vertices[i] = map.forward(mesh.vertices[i]);
    } else {
      const Vec2& b = mesh.vertices[foot];
      out.vertices[i] = map.forward(b) + map.jacobian(b) * (mesh.vertices[i] - b);
    }
  }
  for (int t = 0; t < out.n_triangles(); ++t) {
    if (!(out.area(t) > 0)) throw Error(ErrorKind::degenerate_map, "transported mesh has an inverted triangle");
  }
  return out;
}

Mesh refine_uniform(const Mesh& mesh) {
  Mesh out;
  out.vertices = mesh.vertices;
  out.boundary = mesh.boundary;
  out.layer = mesh.layer;
  out.column = mesh.column;
  out.h = 0.5 * mesh.h;
  out.grading = mesh.grading;
  std::map<std::pair<int, int>, int> count;
  for (const auto& tr : mesh.triangles)
    for (int i = 0; i < 3; ++i) ++count[{std::min(tr[i], tr[(i + 1) % 3]), std::max(tr[i], tr[(i + 1) % 3])}];
  std::map<std::pair<int, int>, int> mid;
  auto midpoint = [&](int a, int b) {
    const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
    auto it = mid.find(key);
    if (it != mid.end()) return it->second;
    const int id = out.n_vertices();
    out.vertices.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
    const bool on_boundary = count[key] == 1;
    out.boundary.push_back(on_boundary ? 1 : 0);
    out.layer.push_back(on_boundary ? 0 : (mesh.layer[a] == mesh.layer[b] ? mesh.layer[a] : -1));
    out.column.push_back(!mesh.column.empty() && mesh.column[a] == mesh.column[b] ? mesh.column[a] : -1);
    mid.emplace(key, id);
    return id;
  };
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tr = mesh.triangles[t];
    const int a = tr[0], b = tr[1], c = tr[2];
    const int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
    for (const std::array<int, 3>& child :
         {std::array<int, 3>{a, ab, ca}, std::array<int, 3>{ab, b, bc}, std::array<int, 3>{ca, bc, c},
          std::array<int, 3>{ab, bc, ca}}) {
      out.triangles.push_back(child);
      out.core.push_back(mesh.core[t]);
    }
  }
  const std::size_t n = mesh.loop.size();
  for (std::size_t j = 0; j < n; ++j) {
    const int a = mesh.loop[j], b = mesh.loop[(j + 1) % n];
    out.loop.push_back(a);
    out.loop.push_back(midpoint(a, b));
    const double s0 = mesh.loop_params[j];
    double s1 = mesh.loop_params[(j + 1) % n];
    if (s1 <= s0) s1 += 1.0;
    double s = 0.5 * (s0 + s1);
    out.loop_params.push_back(s0);
    out.loop_params.push_back(s - std::floor(s));
  }
  return out;
}

double min_angle(const Mesh& mesh, bool core_only) {
  double m = 180.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    if (core_only && !mesh.core[t]) continue;
    const auto& tr = mesh.triangles[t];
    m = std::min(m, triangle_min_angle(mesh.vertices[tr[0]], mesh.vertices[tr[1]], mesh.vertices[tr[2]]));
  }
  return m;
}

void validate_mesh(const Mesh& mesh) {
  std::map<std::pair<int, int>, int> directed;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    if (!(mesh.area(t) > 0)) throw Error(ErrorKind::mesh_failure, "triangle with non-positive orientation");
    const auto& tr = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      if (++directed[{tr[i], tr[(i + 1) % 3]}] > 1) throw Error(ErrorKind::mesh_failure, "non-conforming edge");
    }
  }
  for (const auto& [e, c] : directed) {
    if (directed.count({e.second, e.first})) continue;
    if (!mesh.boundary[e.first] || !mesh.boundary[e.second]) {
      throw Error(ErrorKind::mesh_failure, "open edge away from the boundary");
    }
  }
}

void write_mesh(const Mesh& mesh, std::ostream& os) {
  os.precision(17);
  os << mesh.n_vertices() << " " << mesh.n_triangles() << "\n";
  for (int i = 0; i < mesh.n_vertices(); ++i) {
    os << mesh.vertices[i].x() << " " << mesh.vertices[i].y() << " " << int(mesh.boundary[i]) << "\n";
  }
  for (const auto& tr : mesh.triangles) os << tr[0] << " " << tr[1] << " " << tr[2] << "\n";
}

MeshLocator::MeshLocator(const Mesh& mesh) : mesh_(&mesh) {
  Vec2 lo = mesh.vertices[0], hi = mesh.vertices[0];
  for (const auto& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const double ext = std::max(hi.x() - lo.x(), hi.y() - lo.y());
  const int target = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(mesh.n_triangles()) / 4.0)));
  cell_ = ext / target * (1.0 + 1e-9);
  lo_ = lo - Vec2::Constant(1e-9 * ext);
  nx_ = static_cast<int>((hi.x() - lo_.x()) / cell_) + 1;
  ny_ = static_cast<int>((hi.y() - lo_.y()) / cell_) + 1;
  cells_.assign(static_cast<std::size_t>(nx_) * ny_, {});
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tr = mesh.triangles[t];
    Vec2 a = mesh.vertices[tr[0]], b = a;
    for (int i = 1; i < 3; ++i) {
      a = a.cwiseMin(mesh.vertices[tr[i]]);
      b = b.cwiseMax(mesh.vertices[tr[i]]);
    }
    const int i0 = std::clamp(static_cast<int>((a.x() - lo_.x()) / cell_), 0, nx_ - 1);
    const int i1 = std::clamp(static_cast<int>((b.x() - lo_.x()) / cell_), 0, nx_ - 1);
    const int j0 = std::clamp(static_cast<int>((a.y() - lo_.y()) / cell_), 0, ny_ - 1);
    const int j1 = std::clamp(static_cast<int>((b.y() - lo_.y()) / cell_), 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) cells_[static_cast<std::size_t>(j) * nx_ + i].push_back(t);
  }
}

int MeshLocator::locate(const Vec2& x, Eigen::Vector3d& bary) const {
  const int i = static_cast<int>(std::floor((x.x() - lo_.x()) / cell_));
  const int j = static_cast<int>(std::floor((x.y() - lo_.y()) / cell_));
  if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return -1;
  int best = -1;
  double best_min = -std::numeric_limits<double>::infinity();
  Eigen::Vector3d best_bary;
  for (int t : cells_[static_cast<std::size_t>(j) * nx_ + i]) {
    const auto& tr = mesh_->triangles[t];
    const Vec2& a = mesh_->vertices[tr[0]];
    const Vec2& b = mesh_->vertices[tr[1]];
    const Vec2& c = mesh_->vertices[tr[2]];
    const double area2 = cross<double>(b - a, c - a);
    Eigen::Vector3d l(cross<double>(b - x, c - x) / area2, cross<double>(c - x, a - x) / area2, 0.0);
    l[2] = 1.0 - l[0] - l[1];
    const double m = l.minCoeff();
    if (m >= 0) {
      bary = l;
      return t;
    }
    if (m > best_min) {
      best_min = m;
      best = t;
      best_bary = l;
    }
  }
  if (best >= 0 && best_min > -1e-12) {
    bary = best_bary.cwiseMax(0.0);
    bary /= bary.sum();
    return best;
  }
  return -1;
}

}  // namespace hardy
