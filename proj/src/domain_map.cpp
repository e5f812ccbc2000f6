#include "hardy/domain_map.hpp"

#include "hardy/errors.hpp"

#include <Eigen/LU>

#include <limits>

namespace hardy {

SimilarityMap::SimilarityMap(double scale, double angle, Vec2 shift) : shift_(shift) {
  if (!(scale > 0)) throw Error(ErrorKind::parameter, "similarity scale must be positive");
  linear_ << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  linear_ *= scale;
  inverse_ = linear_.inverse();
}

PerturbedIdentity::PerturbedIdentity(FieldPtr psi, double t, double length_scale)
    : psi_(std::move(psi)), t_(t), tol_(1e-12 * length_scale) {
  if (!psi_) throw Error(ErrorKind::parameter, "perturbed identity needs a field");
}

Hessian2 PerturbedIdentity::hessian(const Vec2& x) const {
  Hessian2 h = psi_->hessian(x);
  h[0] *= t_;
  h[1] *= t_;
  return h;
}

Vec2 PerturbedIdentity::inverse(const Vec2& y) const {
  if (t_ == 0.0) return y;
  Vec2 x = y - t_ * psi_->value(y);
  for (int it = 0; it < 50; ++it) {
    const Vec2 r = forward(x) - y;
    const double rn = r.norm();
    if (rn <= tol_) return x;
    const Mat2 j = jacobian(x);
    if (!(std::abs(j.determinant()) > 1e-14)) throw Error(ErrorKind::degenerate_map, "singular Jacobian in inverse");
    const Vec2 step = j.lu().solve(r);
    double damp = 1.0;
    for (int k = 0; k < 30; ++k) {
      const Vec2 trial = x - damp * step;
      if ((forward(trial) - y).norm() < rn) {
        x = trial;
        break;
      }
      damp *= 0.5;
      if (k == 29) x = trial;
    }
  }
  if ((forward(x) - y).norm() > 1e3 * tol_) {
    throw Error(ErrorKind::degenerate_map, "inverse map iteration did not converge");
  }
  return x;
}

TransportedCurve::TransportedCurve(CurvePtr base, MapPtr map) : base_(std::move(base)), map_(std::move(map)) {}

Vec2 TransportedCurve::tangent(double s) const {
  return map_->jacobian(base_->point(s)) * base_->tangent(s);
}

Vec2 TransportedCurve::second(double s) const {
  const Vec2 x = base_->point(s);
  const Vec2 d1 = base_->tangent(s);
  const Hessian2 h = map_->hessian(x);
  return map_->jacobian(x) * base_->second(s) + Vec2(d1.dot(h[0] * d1), d1.dot(h[1] * d1));
}

Domain transport_domain(const Domain& domain, const MapPtr& map) {
  std::vector<Vec2> v;
  v.reserve(domain.vertices().size());
  for (const auto& x : domain.vertices()) v.push_back(map->forward(x));
  return Domain(std::make_shared<TransportedCurve>(domain.curve_ptr(), map), std::move(v), domain.vertex_params());
}

std::pair<double, double> lipschitz_constants(const DomainMap& map, const std::vector<Vec2>& samples) {
  if (samples.empty()) throw Error(ErrorKind::parameter, "lipschitz_constants needs samples");
  double lip = 0.0, lip_inv = 0.0;
  for (const auto& x : samples) {
    const Mat2 j = map.jacobian(x);
    const double det = j.determinant();
    if (!(std::abs(det) > 1e-14 * std::max(1.0, j.squaredNorm()))) {
      throw Error(ErrorKind::degenerate_map, "singular Jacobian at a sample point");
    }
    lip = std::max(lip, operator_norm<double>(j));
    lip_inv = std::max(lip_inv, operator_norm<double>(Mat2(j.inverse())));
  }
  return {lip, lip_inv};
}

double min_jacobian_determinant(const DomainMap& map, const std::vector<Vec2>& samples) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& x : samples) m = std::min(m, map.jacobian(x).determinant());
  return m;
}

std::vector<Vec2> interior_samples(const Domain& domain, int per_side) {
  std::vector<Vec2> out;
  const Vec2 lo = domain.bbox_min(), hi = domain.bbox_max();
  for (int j = 0; j < per_side; ++j) {
    for (int i = 0; i < per_side; ++i) {
      const Vec2 x = lo + Vec2((hi.x() - lo.x()) * (i + 0.5) / per_side, (hi.y() - lo.y()) * (j + 0.5) / per_side);
      if (domain.contains(x)) out.push_back(x);
    }
  }
  // Boundary vertices keep the sample set honest near the edge.
  for (const auto& v : domain.vertices()) out.push_back(v);
  return out;
}

}  // namespace hardy
