#pragma once

#include "hardy/domain.hpp"
#include "hardy/perturbation.hpp"

#include <memory>
#include <utility>
#include <vector>

namespace hardy {

/// Bi-Lipschitz map phi defined on a neighbourhood of a source domain.
class DomainMap {
 public:
  virtual ~DomainMap() = default;
  virtual Vec2 forward(const Vec2& x) const = 0;
  virtual Mat2 jacobian(const Vec2& x) const = 0;
  virtual Vec2 inverse(const Vec2& y) const = 0;
  /// Second derivatives; zero for affine maps.
  virtual Hessian2 hessian(const Vec2&) const { return {Mat2::Zero(), Mat2::Zero()}; }
};

using MapPtr = std::shared_ptr<const DomainMap>;

/// x -> scale * R(angle) x + shift.
class SimilarityMap final : public DomainMap {
 public:
  SimilarityMap(double scale, double angle, Vec2 shift);
  static SimilarityMap identity() { return {1.0, 0.0, Vec2::Zero()}; }
  Vec2 forward(const Vec2& x) const override { return linear_ * x + shift_; }
  Mat2 jacobian(const Vec2&) const override { return linear_; }
  Vec2 inverse(const Vec2& y) const override { return inverse_ * (y - shift_); }

 private:
  Mat2 linear_, inverse_;
  Vec2 shift_;
};

/// phi_t = I + t psi. The inverse uses damped Newton from y - t psi(y).
class PerturbedIdentity final : public DomainMap {
 public:
  PerturbedIdentity(FieldPtr psi, double t, double length_scale = 1.0);
  Vec2 forward(const Vec2& x) const override { return x + t_ * psi_->value(x); }
  Mat2 jacobian(const Vec2& x) const override { return Mat2::Identity() + t_ * psi_->jacobian(x); }
  Hessian2 hessian(const Vec2& x) const override;
  Vec2 inverse(const Vec2& y) const override;
  const FieldPtr& field() const { return psi_; }
  double t() const { return t_; }

 private:
  FieldPtr psi_;
  double t_;
  double tol_;
};

/// Boundary curve pushed forward by a smooth map.
class TransportedCurve final : public BoundaryCurve {
 public:
  TransportedCurve(CurvePtr base, MapPtr map);
  Vec2 point(double s) const override { return map_->forward(base_->point(s)); }
  Vec2 tangent(double s) const override;
  Vec2 second(double s) const override;
  std::string name() const override { return base_->name() + "+transported"; }
  std::vector<double> breakpoints() const override { return base_->breakpoints(); }
  bool smooth() const override { return base_->smooth(); }

 private:
  CurvePtr base_;
  MapPtr map_;
};

/// phi(Omega) as a polygon with transported vertices and transported curve.
Domain transport_domain(const Domain& domain, const MapPtr& map);

/// Empirical (Lip(phi), Lip(phi^-1)) as the largest operator norms of the
/// Jacobian and of its inverse over the samples.
std::pair<double, double> lipschitz_constants(const DomainMap& map, const std::vector<Vec2>& samples);

/// min det(grad phi) over samples.
double min_jacobian_determinant(const DomainMap& map, const std::vector<Vec2>& samples);

/// Interior sample points of a domain on a regular grid.
std::vector<Vec2> interior_samples(const Domain& domain, int per_side);

}  // namespace hardy
