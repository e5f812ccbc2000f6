#include "hardy/cylinder.hpp"

#include "hardy/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hardy {

bool Cylinder::contains(const Vec2& x) const {
  const Vec2 y = frame.local(x);
  return y.x() > w0 && y.x() < w1 && y.y() > a && y.y() < b;
}

double Profile::c2_norm(double w0, double w1, int n) const {
  double m = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = w0 + (w1 - w0) * i / (n - 1);
    m = std::max({m, std::abs(f(y)), std::abs(df(y)), std::abs(ddf(y))});
  }
  return m;
}

Profile cosine_profile(std::vector<double> c, double w0, double w1) {
  if (!(w1 > w0)) throw Error(ErrorKind::parameter, "profile interval is empty");
  auto coeff = std::make_shared<const std::vector<double>>(std::move(c));
  const double k0 = M_PI / (w1 - w0);
  Profile p;
  p.f = [coeff, k0, w0](double y) {
    double s = 0.0;
    for (std::size_t k = 0; k < coeff->size(); ++k) s += (*coeff)[k] * std::cos(k * k0 * (y - w0));
    return s;
  };
  p.df = [coeff, k0, w0](double y) {
    double s = 0.0;
    for (std::size_t k = 1; k < coeff->size(); ++k) s -= (*coeff)[k] * k * k0 * std::sin(k * k0 * (y - w0));
    return s;
  };
  p.ddf = [coeff, k0, w0](double y) {
    double s = 0.0;
    for (std::size_t k = 1; k < coeff->size(); ++k) {
      const double kk = k * k0;
      s -= (*coeff)[k] * kk * kk * std::cos(kk * (y - w0));
    }
    return s;
  };
  return p;
}

Profile add_profiles(const Profile& f, double scale, const Profile& g) {
  Profile p;
  p.f = [f, g, scale](double y) { return f.f(y) + scale * g.f(y); };
  p.df = [f, g, scale](double y) { return f.df(y) + scale * g.df(y); };
  p.ddf = [f, g, scale](double y) { return f.ddf(y) + scale * g.ddf(y); };
  return p;
}

Profile unit_bump_profile(double w0, double w1) {
  // (1 - cos 2 pi s)^2 = 3/2 - 2 cos 2 pi s + 1/2 cos 4 pi s, mass 3/2 (w1 - w0).
  const double m = 1.5 * (w1 - w0);
  return cosine_profile({1.5 / m, 0.0, -2.0 / m, 0.0, 0.5 / m}, w0, w1);
}

namespace {

struct GraphChain {
  CurvePtr curve;
  CylinderFrame frame;
  struct Piece {
    double ylo, yhi, slo, shi;
  };
  std::vector<Piece> pieces;  // sorted by ylo

  // Curve parameter of the graph point over ybar.
  double param(double ybar) const {
    auto it = std::upper_bound(pieces.begin(), pieces.end(), ybar,
                               [](double y, const Piece& p) { return y < p.ylo; });
    const Piece& pc = it == pieces.begin() ? pieces.front() : *(it - 1);
    double lo = pc.slo, hi = pc.shi;
    auto coord = [&](double s) { return frame.local(curve->point(s - std::floor(s))).x() - ybar; };
    double flo = coord(lo), fhi = coord(hi);
    if (flo > fhi) {
      std::swap(lo, hi);
      std::swap(flo, fhi);
    }
    double s = 0.5 * (lo + hi);
    for (int it2 = 0; it2 < 100; ++it2) {
      const double fs = coord(s);
      if (fs == 0.0) break;
      if (fs < 0) lo = s;
      else hi = s;
      const double ds = frame.tangent.dot(curve->tangent(s - std::floor(s)));
      double next = ds != 0.0 ? s - fs / ds : 0.5 * (lo + hi);
      if (!((next - lo) * (next - hi) < 0)) next = 0.5 * (lo + hi);
      if (std::abs(next - s) < 1e-16) {
        s = next;
        break;
      }
      s = next;
    }
    return s - std::floor(s);
  }
};

}  // namespace

Profile boundary_graph(const Domain& domain, const Cylinder& cyl) {
  const auto& v = domain.vertices();
  const auto& sp = domain.vertex_params();
  if (sp.size() != v.size()) throw Error(ErrorKind::parameter, "boundary_graph needs curve parameters");
  auto chain = std::make_shared<GraphChain>();
  chain->curve = domain.curve_ptr();
  chain->frame = cyl.frame;
  const int n = domain.size();
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    const Vec2 p = cyl.frame.local(v[i]), q = cyl.frame.local(v[j]);
    const double ylo = std::min(p.x(), q.x()), yhi = std::max(p.x(), q.x());
    if (yhi < cyl.w0 || ylo > cyl.w1) continue;
    if (std::max(p.y(), q.y()) <= cyl.a || std::min(p.y(), q.y()) >= cyl.b) continue;
    double s0 = sp[i], s1 = sp[j];
    if (s1 < s0) s1 += 1.0;
    chain->pieces.push_back({ylo, yhi, p.x() <= q.x() ? s0 : s1, p.x() <= q.x() ? s1 : s0});
  }
  std::sort(chain->pieces.begin(), chain->pieces.end(),
            [](const GraphChain::Piece& a, const GraphChain::Piece& b) { return a.ylo < b.ylo; });
  // Every vertical line through W must cross exactly one piece inside V.
  for (int k = 0; k <= 256; ++k) {
    const double y = cyl.w0 + (cyl.w1 - cyl.w0) * k / 256.0;
    int hits = 0;
    for (const auto& pc : chain->pieces)
      if (pc.ylo <= y && y < pc.yhi) ++hits;
    if (hits != 1 && !(k == 256 && hits == 0))
      throw Error(ErrorKind::class_violation, "boundary is not a single graph over the cylinder base");
  }
  Profile g;
  g.f = [chain](double y) { return chain->frame.local(chain->curve->point(chain->param(y))).y(); };
  g.df = [chain](double y) {
    const Vec2 d = chain->curve->tangent(chain->param(y));
    return chain->frame.normal.dot(d) / chain->frame.tangent.dot(d);
  };
  g.ddf = [chain](double y) {
    const double s = chain->param(y);
    const Vec2 d1 = chain->curve->tangent(s), d2 = chain->curve->second(s);
    const double xt = chain->frame.tangent.dot(d1), yt = chain->frame.normal.dot(d1);
    const double xtt = chain->frame.tangent.dot(d2), ytt = chain->frame.normal.dot(d2);
    return (ytt * xt - yt * xtt) / (xt * xt * xt);
  };
  return g;
}

CylinderMap::CylinderMap(Cylinder cylinder, Profile g, Profile g_tilde, double eta)
    : cyl_(std::move(cylinder)), g_(std::move(g)), gt_(std::move(g_tilde)), eta_(eta) {}

double CylinderMap::g0(double y) const {
  const double g = g_(y), gt = gt_(y);
  return std::min(g, gt) - eta_ * std::abs(g - gt);
}

double CylinderMap::slope(double y) const {
  return gt_(y) <= g_(y) ? eta_ / (eta_ + 1.0) : (eta_ + 1.0) / eta_;
}

bool CylinderMap::moved(const Vec2& l) const {
  if (!(l.x() > cyl_.w0 && l.x() < cyl_.w1 && l.y() > cyl_.a && l.y() < cyl_.b)) return false;
  return l.y() > g0(l.x()) + 1e-10;
}

Vec2 CylinderMap::forward(const Vec2& x) const {
  const Vec2 l = cyl_.frame.local(x);
  if (!moved(l)) return x;
  const double y = l.x();
  return cyl_.frame.world(Vec2(y, gt_(y) + slope(y) * (l.y() - g_(y))));
}

Vec2 CylinderMap::inverse(const Vec2& x) const {
  const Vec2 l = cyl_.frame.local(x);
  if (!moved(l)) return x;
  const double y = l.x();
  return cyl_.frame.world(Vec2(y, g_(y) + (l.y() - gt_(y)) / slope(y)));
}

Mat2 CylinderMap::jacobian(const Vec2& x) const {
  const Vec2 l = cyl_.frame.local(x);
  if (!moved(l)) return Mat2::Identity();
  const double y = l.x();
  const double a = slope(y);
  Mat2 jl;
  jl << 1.0, 0.0, gt_.df(y) - a * g_.df(y), a;
  Mat2 r;
  r.col(0) = cyl_.frame.tangent;
  r.col(1) = cyl_.frame.normal;
  return r * jl * r.transpose();
}

Hessian2 CylinderMap::hessian(const Vec2& x) const {
  const Vec2 l = cyl_.frame.local(x);
  if (!moved(l)) return {Mat2::Zero(), Mat2::Zero()};
  const double y = l.x();
  Mat2 hl = Mat2::Zero();
  hl(0, 0) = gt_.ddf(y) - slope(y) * g_.ddf(y);
  Mat2 r;
  r.col(0) = cyl_.frame.tangent;
  r.col(1) = cyl_.frame.normal;
  const Mat2 hw = r * hl * r.transpose();
  return {r(0, 1) * hw, r(1, 1) * hw};
}

CylinderPerturbation build_cylinder_perturbation(const Domain& base, const Profile& g, const Profile& g_tilde,
                                                 const Cylinder& cyl, double rho, double M) {
  if (!(rho > 0) || !(M > 0)) throw Error(ErrorKind::parameter, "rho and M must be positive");
  if (!(cyl.b > cyl.a) || !(cyl.w1 > cyl.w0)) throw Error(ErrorKind::parameter, "empty cylinder");
  const int ns = 2001;
  for (int i = 0; i < ns; ++i) {
    const double y = cyl.w0 + (cyl.w1 - cyl.w0) * i / (ns - 1);
    for (const Profile* p : {&g, &g_tilde}) {
      const double v = (*p)(y);
      if (v < cyl.a + rho - 1e-12 || v > cyl.b + 1e-12)
        throw Error(ErrorKind::class_violation, "profile leaves [a + rho, b] at ybar = " + std::to_string(y));
    }
  }
  if (g.c2_norm(cyl.w0, cyl.w1) > M) throw Error(ErrorKind::class_violation, "C2 norm of g exceeds M");
  if (g_tilde.c2_norm(cyl.w0, cyl.w1) > M) throw Error(ErrorKind::class_violation, "C2 norm of g_tilde exceeds M");

  // Omega cap V must be the subgraph of g.
  for (int i = 1; i < 64; ++i) {
    const double y = cyl.w0 + (cyl.w1 - cyl.w0) * i / 64.0;
    const double gy = g(y);
    for (int j = 1; j < 64; ++j) {
      const double yn = cyl.a + (cyl.b - cyl.a) * j / 64.0;
      if (std::abs(yn - gy) < 1e-6 * base.diameter()) continue;
      if (base.contains(cyl.frame.world(Vec2(y, yn))) != (yn < gy))
        throw Error(ErrorKind::class_violation, "domain inside V is not the subgraph of g");
    }
  }

  CylinderPerturbation out{cyl, g, g_tilde, rho, M, rho / (2.0 * (cyl.b - cyl.a)), nullptr, base, base, 0.0, 0.0, 0.0};
  auto map = std::make_shared<CylinderMap>(cyl, g, g_tilde, out.eta);
  for (int i = 0; i < ns; ++i) {
    const double y = cyl.w0 + (cyl.w1 - cyl.w0) * i / (ns - 1);
    if (!(map->g0(y) > cyl.a)) throw Error(ErrorKind::construction_failure, "g0 <= a");
  }
  out.map = map;
  out.perturbed = transport_domain(base, map);

  // Trapezoid rule for the profile L1 distance.
  const int nl = 20000;
  double l1 = 0.0;
  for (int i = 0; i <= nl; ++i) {
    const double y = cyl.w0 + (cyl.w1 - cyl.w0) * i / nl;
    const double f = std::abs(g(y) - g_tilde(y));
    l1 += (i == 0 || i == nl) ? 0.5 * f : f;
  }
  out.profile_l1 = l1 * (cyl.w1 - cyl.w0) / nl;

  const std::vector<Vec2> samples = interior_samples(base, 60);
  int inside = 0, total = 0;
  for (const auto& x : samples) {
    if (!cyl.contains(x)) out.outside_displacement = std::max(out.outside_displacement, (map->forward(x) - x).norm());
    if (base.signed_distance(x) < 1e-3 * base.diameter()) continue;
    ++total;
    if (out.perturbed.contains(map->forward(x))) ++inside;
  }
  out.containment = total > 0 ? static_cast<double>(inside) / total : 1.0;
  if (out.outside_displacement > 0.0 || out.containment < 1.0)
    throw Error(ErrorKind::construction_failure, "phi(Omega) does not match the perturbed domain on samples");
  return out;
}

}  // namespace hardy
