#pragma once

#include "hardy/domain.hpp"
#include "hardy/domain_map.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace hardy {

struct MeshParams {
  /// Interior element size.
  double h = 1.0 / 16.0;
  /// Boundary spacing as a fraction of h.
  double boundary_factor = 0.25;
  /// Number of anisotropic layers along the boundary and their thickness
  /// ratio (innermost layer first, each next layer towards the boundary
  /// thinner by `layer_ratio`).
  int layers = 30;
  double layer_ratio = 0.5;
  /// Total layer depth as a fraction of the boundary spacing.
  double layer_depth = 0.5;
  /// Size growth rate of the isotropic core away from the layers.
  double grading = 0.25;
  /// Minimum-angle target for Delaunay refinement of the core (degrees).
  double quality_angle = 25.0;
  /// Relative jitter of inserted core points; 0 gives the canonical mesh.
  double jitter = 0.0;
  std::uint64_t seed = 1;
};

/// Conforming P1 triangulation. Boundary vertices lie on the domain polygon
/// and form `loop` in counter-clockwise order.
struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<char> boundary;
  /// Layer index per vertex: 0 on the boundary, `layers` on the inner loop,
  /// -1 in the core.
  std::vector<int> layer;
  /// Boundary vertex at the foot of a layer vertex's column, -1 otherwise.
  std::vector<int> column;
  /// Triangles of the isotropic core.
  std::vector<char> core;
  std::vector<int> loop;
  /// Curve parameter of each loop vertex.
  std::vector<double> loop_params;
  double h = 0.0;
  double grading = 0.0;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
  double area(int t) const;
};

Mesh build_mesh(const Domain& domain, const MeshParams& params);

/// The polygon bounded by the mesh boundary loop, sharing the curve of
/// `source` for curvature lookups.
Domain mesh_domain(const Mesh& mesh, const CurvePtr& curve);

/// Same topology, vertices moved by the map. Layer vertices follow the
/// linearisation of the map at their boundary foot point so that thin layers
/// stay layered.
Mesh transport_mesh(const Mesh& mesh, const DomainMap& map);

/// Red refinement: every triangle split into four. Boundary midpoints stay on
/// the boundary polygon.
Mesh refine_uniform(const Mesh& mesh);

/// Smallest interior angle in degrees over all triangles, or over the core
/// only.
double min_angle(const Mesh& mesh, bool core_only);

/// Sanity checks: positive orientation and edge conformity. Throws
/// mesh_failure.
void validate_mesh(const Mesh& mesh);

/// Node/element text format: "n_vertices n_triangles", then "x y flag" lines,
/// then "i j k" lines.
void write_mesh(const Mesh& mesh, std::ostream& os);

/// Point location: triangle containing x and its barycentric coordinates, or
/// -1 when x is outside the mesh.
class MeshLocator {
 public:
  explicit MeshLocator(const Mesh& mesh);
  int locate(const Vec2& x, Eigen::Vector3d& bary) const;

 private:
  const Mesh* mesh_;
  Vec2 lo_;
  double cell_;
  int nx_, ny_;
  std::vector<std::vector<int>> cells_;
};

}  // namespace hardy
