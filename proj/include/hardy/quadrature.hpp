#pragma once

#include "hardy/domain.hpp"
#include "hardy/mesh.hpp"

#include <vector>

namespace hardy {

struct QuadratureParams {
  /// Degree of the per-triangle base rule (1 or 4).
  int order = 4;
  /// Cap on the number of graded slabs towards the boundary.
  int max_depth = 12;
  /// Slabs thinner than this fraction of the diameter are not cut.
  double depth_floor = 1e-9;
  /// Ratio of largest to smallest vertex distance that triggers grading.
  double ratio_trigger = 2.0;
};

/// Quadrature point with the distance data of the domain it was evaluated on.
/// Position is (1 - l1 - l2) v0 + l1 v1 + l2 v2 of triangle `tri`.
struct QuadNode {
  Vec2 x;
  double w;
  double l1, l2;
  double d;
  Vec2 grad;
  Vec2 tau;
  int segment;
  double param;
  int tri;
  bool ridge;
};

/// Per-triangle rule for integrands carrying d^-p: triangles whose vertex
/// distances spread by more than `ratio_trigger` are cut into slabs along
/// the affine interpolant of d at levels ell_max 2^-k before the base rule
/// is applied. Weights are positive and sum to the triangle area.
class QuadratureRule {
 public:
  QuadratureRule(const Mesh& mesh, const Domain& domain, const QuadratureParams& params = {});

  /// Same per-triangle pattern on a mesh of identical topology, with
  /// distances re-evaluated on `domain`.
  QuadratureRule transported(const Mesh& mesh, const Domain& domain) const;

  const std::vector<QuadNode>& nodes() const { return nodes_; }
  int begin(int tri) const { return offsets_[tri]; }
  int end(int tri) const { return offsets_[tri + 1]; }
  int n_triangles() const { return static_cast<int>(depth_.size()); }
  /// Slab count used for each triangle (0 = base rule only).
  int depth(int tri) const { return depth_[tri]; }
  const QuadratureParams& params() const { return params_; }

  /// Total weight of nodes that fell on the ridge.
  double ridge_weight() const;
  double total_weight() const;

 private:
  QuadratureRule() = default;
  void evaluate(const Mesh& mesh, const Domain& domain);

  struct PatternPoint {
    double l1, l2, w;  // w relative to the triangle area
  };
  QuadratureParams params_;
  std::vector<PatternPoint> pattern_;
  std::vector<int> offsets_;
  std::vector<int> depth_;
  std::vector<QuadNode> nodes_;
};

/// Exact distance of each mesh vertex to the domain boundary (0 on boundary
/// vertices).
std::vector<double> vertex_distances(const Mesh& mesh, const Domain& domain);

/// I_gamma = integral of d^-gamma over the domain, using the distances the
/// quadrature was evaluated with. gamma >= 1 is rejected.
double singular_integral(const Domain& domain, double gamma, const QuadratureRule& quadrature);

}  // namespace hardy
