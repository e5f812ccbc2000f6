#pragma once

#include "hardy/types.hpp"

#include <memory>
#include <string>
#include <vector>

namespace hardy {

/// Closed parametric boundary curve on s in [0, 1), counter-clockwise.
class BoundaryCurve {
 public:
  virtual ~BoundaryCurve() = default;

  virtual Vec2 point(double s) const = 0;
  virtual Vec2 tangent(double s) const = 0;       // d/ds
  virtual Vec2 second(double s) const = 0;        // d^2/ds^2
  virtual std::string name() const = 0;

  /// Parameters that must appear among the polygon vertices (corners).
  virtual std::vector<double> breakpoints() const { return {}; }

  /// False for piecewise curves whose curvature is a sum of Dirac masses.
  virtual bool smooth() const { return true; }

  /// Signed curvature; positive where the boundary bends towards the interior.
  double curvature(double s) const;

  /// N-vertex polygon sampled from the curve; breakpoints are always included.
  /// Returns vertices and their curve parameters.
  std::pair<std::vector<Vec2>, std::vector<double>> sample(int n) const;
};

using CurvePtr = std::shared_ptr<const BoundaryCurve>;

/// Circle of radius r centred at `center`.
class Circle final : public BoundaryCurve {
 public:
  explicit Circle(double radius, Vec2 center = Vec2::Zero());
  Vec2 point(double s) const override;
  Vec2 tangent(double s) const override;
  Vec2 second(double s) const override;
  std::string name() const override;
  double radius() const { return radius_; }

 private:
  double radius_;
  Vec2 center_;
};

class Ellipse final : public BoundaryCurve {
 public:
  Ellipse(double semi_x, double semi_y);
  Vec2 point(double s) const override;
  Vec2 tangent(double s) const override;
  Vec2 second(double s) const override;
  std::string name() const override;

 private:
  double a_, b_;
};

/// Polar curve r(theta) = scale * (1 + beta cos(k (theta - theta0))). beta = 0.55,
/// k = 2 is the peanut used throughout the test-suite.
class StarCurve final : public BoundaryCurve {
 public:
  StarCurve(double beta, int k, double scale = 1.0, double theta0 = 0.0);
  Vec2 point(double s) const override;
  Vec2 tangent(double s) const override;
  Vec2 second(double s) const override;
  std::string name() const override;

 private:
  void radial(double theta, double& r, double& dr, double& ddr) const;
  double beta_, scale_, theta0_;
  int k_;
};

/// Cassini oval |x - (a,0)| |x + (a,0)| = c^2 with c > a (single closed curve).
class CassiniOval final : public BoundaryCurve {
 public:
  CassiniOval(double a, double c);
  Vec2 point(double s) const override;
  Vec2 tangent(double s) const override;
  Vec2 second(double s) const override;
  std::string name() const override;

 private:
  void radial(double theta, double& r, double& dr, double& ddr) const;
  double a_, c_;
};

/// Closed polygonal curve, parametrised by normalised arclength.
class PolygonCurve final : public BoundaryCurve {
 public:
  explicit PolygonCurve(std::vector<Vec2> vertices, std::string label = "polygon");
  Vec2 point(double s) const override;
  Vec2 tangent(double s) const override;
  Vec2 second(double) const override { return Vec2::Zero(); }
  std::string name() const override { return label_; }
  std::vector<double> breakpoints() const override { return params_; }
  bool smooth() const override { return false; }
  const std::vector<Vec2>& vertices() const { return vertices_; }

 private:
  std::size_t locate(double s, double& local) const;
  std::vector<Vec2> vertices_;
  std::vector<double> params_;  // arclength fraction at each vertex
  std::string label_;
};

/// Axis-aligned rectangle [x0, x0 + w] x [y0, y0 + h].
CurvePtr make_rectangle(double w, double h, Vec2 origin = Vec2::Zero());

/// Rigid motion and uniform scaling x -> scale * R(angle) x + shift.
class SimilarityCurve final : public BoundaryCurve {
 public:
  SimilarityCurve(CurvePtr base, double scale, double angle, Vec2 shift);
  Vec2 point(double s) const override;
  Vec2 tangent(double s) const override;
  Vec2 second(double s) const override;
  std::string name() const override;
  std::vector<double> breakpoints() const override { return base_->breakpoints(); }
  bool smooth() const override { return base_->smooth(); }

 private:
  CurvePtr base_;
  double scale_;
  Mat2 rotation_;
  Vec2 shift_;
};

/// Reads a plain-text polygon: one "x y" pair per line, closed implicitly.
/// Clockwise input is reversed.
CurvePtr read_polygon_file(const std::string& path);

}  // namespace hardy
