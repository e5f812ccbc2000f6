#include "hardy/map_functionals.hpp"

#include "hardy/errors.hpp"

#include <cmath>

namespace hardy {

double v_functional(const Domain& image, const DomainMap& phi, const PerturbationField& psi, const Vec2& y,
                    bool allow_ridge) {
  const DistanceQuery q = image.distance(y);
  if (q.on_ridge && !allow_ridge) throw Error(ErrorKind::ridge, "V evaluated on the ridge");
  const Vec2 x = phi.inverse(y);
  const Vec2 xt = phi.inverse(q.tau);
  return q.grad.dot(psi.difference(x, xt)) / q.d;
}

double v_identity(const PerturbationField& psi, const Vec2& x, const DistanceQuery& q) {
  return q.grad.dot(psi.difference(x, q.tau)) / q.d;
}

double f_phi(const Domain& domain, const DomainMap& phi, const Vec2& x) {
  const DistanceQuery q = domain.distance(x);
  if (q.on_ridge) throw Error(ErrorKind::ridge, "F_phi evaluated on the ridge");
  const Vec2 a = phi.forward(q.tau) - q.tau;
  const Vec2 b = phi.forward(x) - x;
  return (a - b).norm() / q.d;
}

double t_operator(const Domain& domain, const ScalarField& w, const Vec2& x, int n_panels) {
  if (n_panels < 1) throw Error(ErrorKind::parameter, "t_operator needs at least one panel");
  const DistanceQuery q = domain.distance(x);
  if (q.on_ridge) throw Error(ErrorKind::ridge, "T evaluated on the ridge");
  static const double g = std::sqrt(0.6);
  static const double nodes[3] = {-g, 0.0, g};
  static const double weights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  double s = 0.0;
  const double hpanel = 1.0 / n_panels;
  for (int k = 0; k < n_panels; ++k) {
    const double mid = (k + 0.5) * hpanel;
    for (int j = 0; j < 3; ++j) {
      const double t = mid + 0.5 * hpanel * nodes[j];
      s += weights[j] * 0.5 * hpanel * std::abs(w(x + t * (q.tau - x)));
    }
  }
  return s;
}

double distortion(const DomainMap& phi, const Vec2& x) {
  return (phi.jacobian(x) - Mat2::Identity()).norm();
}

double vicinity_delta(const Domain& domain, const DomainMap& phi, double r, double p,
                      const QuadratureRule& quadrature, double inr) {
  if (!(r >= 1.0)) throw Error(ErrorKind::parameter, "vicinity_delta needs r >= 1");
  if (!(p > 1.0)) throw Error(ErrorKind::parameter, "vicinity_delta needs p > 1");
  if (!(inr > 0)) inr = inradius(domain);
  double s = 0.0;
  for (const auto& n : quadrature.nodes()) {
    const double a = distortion(phi, n.x);
    if (a == 0.0) continue;
    const double weight = std::max(0.0, std::log(inr / n.d));
    s += n.w * weight * (std::pow(a, r) + std::pow(a, p * r));
  }
  return std::pow(s, 1.0 / r);
}

double distortion_sup(const DomainMap& phi, const std::vector<Vec2>& samples) {
  double m = 0.0;
  for (const auto& x : samples) m = std::max(m, operator_norm<double>(phi.jacobian(x) - Mat2::Identity()));
  return m;
}

}  // namespace hardy
