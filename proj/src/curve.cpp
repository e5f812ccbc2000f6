#include "hardy/curve.hpp"

#include "hardy/errors.hpp"

#include <algorithm>
#include <fstream>
#include <numbers>
#include <sstream>

namespace hardy {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Arclength of the curve between parameters s0 < s1 by composite Simpson.
double arclength(const BoundaryCurve& c, double s0, double s1, int panels) {
  const double h = (s1 - s0) / panels;
  double sum = c.tangent(s0).norm() + c.tangent(s1).norm();
  for (int i = 1; i < panels; ++i) {
    sum += (i % 2 ? 4.0 : 2.0) * c.tangent(s0 + i * h).norm();
  }
  return sum * h / 3.0;
}

double wrap01(double s) {
  s -= std::floor(s);
  return s >= 1.0 ? 0.0 : s;
}

}  // namespace

double BoundaryCurve::curvature(double s) const {
  const Vec2 d1 = tangent(s);
  const Vec2 d2 = second(s);
  const double speed = d1.norm();
  return cross<double>(d1, d2) / (speed * speed * speed);
}

std::pair<std::vector<Vec2>, std::vector<double>> BoundaryCurve::sample(int n) const {
  if (n < 3) throw Error(ErrorKind::parameter, "polygon needs at least 3 vertices");
  std::vector<double> cuts = breakpoints();
  for (double& c : cuts) c = wrap01(c);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  if (cuts.empty()) cuts.push_back(0.0);

  // Arclength of each piece [cuts[i], cuts[i+1]] (the last one wraps around).
  const std::size_t pieces = cuts.size();
  std::vector<double> lengths(pieces);
  double total = 0.0;
  for (std::size_t i = 0; i < pieces; ++i) {
    const double a = cuts[i];
    const double b = i + 1 < pieces ? cuts[i + 1] : cuts[0] + 1.0;
    lengths[i] = arclength(*this, a, b, 512);
    total += lengths[i];
  }
  if (static_cast<std::size_t>(n) < pieces) {
    throw Error(ErrorKind::parameter, "fewer polygon vertices than curve corners");
  }

  // Distribute vertices over pieces proportionally to length (largest remainder).
  std::vector<int> counts(pieces, 1);
  int assigned = static_cast<int>(pieces);
  std::vector<std::pair<double, std::size_t>> remainders;
  for (std::size_t i = 0; i < pieces; ++i) {
    const double exact = n * lengths[i] / total;
    const int extra = std::max(0, static_cast<int>(std::floor(exact)) - 1);
    counts[i] += extra;
    assigned += extra;
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& l, const auto& r) { return l.first > r.first; });
  for (std::size_t k = 0; assigned < n; ++k) {
    ++counts[remainders[k % pieces].second];
    ++assigned;
  }

  std::vector<Vec2> pts;
  std::vector<double> params;
  pts.reserve(n);
  params.reserve(n);
  for (std::size_t i = 0; i < pieces; ++i) {
    const double a = cuts[i];
    const double b = i + 1 < pieces ? cuts[i + 1] : cuts[0] + 1.0;
    // Arclength table for inversion.
    const int table = 2048;
    std::vector<double> acc(table + 1, 0.0);
    const double ds = (b - a) / table;
    for (int j = 0; j < table; ++j) {
      acc[j + 1] = acc[j] + arclength(*this, a + j * ds, a + (j + 1) * ds, 4);
    }
    const double len = acc.back();
    for (int m = 0; m < counts[i]; ++m) {
      const double target = len * m / counts[i];
      const auto it = std::lower_bound(acc.begin(), acc.end(), target);
      std::size_t j = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - acc.begin()));
      j = std::min<std::size_t>(j, table);
      const double frac = (acc[j] > acc[j - 1]) ? (target - acc[j - 1]) / (acc[j] - acc[j - 1]) : 0.0;
      double s = a + (static_cast<double>(j - 1) + frac) * ds;
      // One Newton correction on the arclength equation.
      if (m > 0) {
        const double err = arclength(*this, a, s, 64) - target;
        s -= err / tangent(s).norm();
      } else {
        s = a;
      }
      s = wrap01(s);
      params.push_back(s);
      pts.push_back(point(s));
    }
  }
  return {pts, params};
}

// --- Circle -------------------------------------------------------------

Circle::Circle(double radius, Vec2 center) : radius_(radius), center_(center) {
  if (!(radius > 0)) throw Error(ErrorKind::parameter, "circle radius must be positive");
}
Vec2 Circle::point(double s) const {
  const double t = kTwoPi * s;
  return center_ + radius_ * Vec2(std::cos(t), std::sin(t));
}
Vec2 Circle::tangent(double s) const {
  const double t = kTwoPi * s;
  return kTwoPi * radius_ * Vec2(-std::sin(t), std::cos(t));
}
Vec2 Circle::second(double s) const {
  const double t = kTwoPi * s;
  return -kTwoPi * kTwoPi * radius_ * Vec2(std::cos(t), std::sin(t));
}
std::string Circle::name() const { return "disk"; }

// --- Ellipse ------------------------------------------------------------

Ellipse::Ellipse(double semi_x, double semi_y) : a_(semi_x), b_(semi_y) {
  if (!(a_ > 0 && b_ > 0)) throw Error(ErrorKind::parameter, "ellipse semi-axes must be positive");
}
Vec2 Ellipse::point(double s) const {
  const double t = kTwoPi * s;
  return {a_ * std::cos(t), b_ * std::sin(t)};
}
Vec2 Ellipse::tangent(double s) const {
  const double t = kTwoPi * s;
  return kTwoPi * Vec2(-a_ * std::sin(t), b_ * std::cos(t));
}
Vec2 Ellipse::second(double s) const {
  const double t = kTwoPi * s;
  return -kTwoPi * kTwoPi * Vec2(a_ * std::cos(t), b_ * std::sin(t));
}
std::string Ellipse::name() const { return "ellipse"; }

// --- Polar curves -------------------------------------------------------

namespace {

// Position and derivatives w.r.t. s of a polar curve given r(theta) and its
// theta-derivatives, theta = 2 pi s.
void polar_eval(double theta, double r, double dr, double ddr, Vec2* p, Vec2* d1, Vec2* d2) {
  const double c = std::cos(theta), s = std::sin(theta);
  const Vec2 e(c, s), f(-s, c);
  if (p) *p = r * e;
  if (d1) *d1 = kTwoPi * (dr * e + r * f);
  if (d2) *d2 = kTwoPi * kTwoPi * ((ddr - r) * e + 2.0 * dr * f);
}

}  // namespace

StarCurve::StarCurve(double beta, int k, double scale, double theta0)
    : beta_(beta), scale_(scale), theta0_(theta0), k_(k) {
  if (!(std::abs(beta) < 1.0) || k < 1 || !(scale > 0)) {
    throw Error(ErrorKind::parameter, "star curve needs |beta| < 1, k >= 1, scale > 0");
  }
}

void StarCurve::radial(double theta, double& r, double& dr, double& ddr) const {
  const double arg = k_ * (theta - theta0_);
  r = scale_ * (1.0 + beta_ * std::cos(arg));
  dr = -scale_ * beta_ * k_ * std::sin(arg);
  ddr = -scale_ * beta_ * k_ * k_ * std::cos(arg);
}

Vec2 StarCurve::point(double s) const {
  double r, dr, ddr;
  radial(kTwoPi * s, r, dr, ddr);
  Vec2 p;
  polar_eval(kTwoPi * s, r, dr, ddr, &p, nullptr, nullptr);
  return p;
}
Vec2 StarCurve::tangent(double s) const {
  double r, dr, ddr;
  radial(kTwoPi * s, r, dr, ddr);
  Vec2 d1;
  polar_eval(kTwoPi * s, r, dr, ddr, nullptr, &d1, nullptr);
  return d1;
}
Vec2 StarCurve::second(double s) const {
  double r, dr, ddr;
  radial(kTwoPi * s, r, dr, ddr);
  Vec2 d2;
  polar_eval(kTwoPi * s, r, dr, ddr, nullptr, nullptr, &d2);
  return d2;
}
std::string StarCurve::name() const {
  std::ostringstream os;
  os.precision(17);
  os << "star:" << beta_ << ":" << k_;
  return os.str();
}

CassiniOval::CassiniOval(double a, double c) : a_(a), c_(c) {
  if (!(a > 0 && c > a)) throw Error(ErrorKind::parameter, "cassini oval needs 0 < a < c");
}

void CassiniOval::radial(double theta, double& r, double& dr, double& ddr) const {
  const double a2 = a_ * a_, a4 = a2 * a2, c4 = c_ * c_ * c_ * c_;
  const double c2t = std::cos(2 * theta), s2t = std::sin(2 * theta);
  const double g = a4 * c2t * c2t + c4 - a4;
  const double dg = -2.0 * a4 * std::sin(4 * theta);
  const double ddg = -8.0 * a4 * std::cos(4 * theta);
  const double sg = std::sqrt(g);
  const double f = a2 * c2t + sg;
  const double df = -2.0 * a2 * s2t + dg / (2.0 * sg);
  const double ddf = -4.0 * a2 * c2t + ddg / (2.0 * sg) - dg * dg / (4.0 * g * sg);
  r = std::sqrt(f);
  dr = df / (2.0 * r);
  ddr = (ddf / 2.0 - dr * dr) / r;
}

Vec2 CassiniOval::point(double s) const {
  double r, dr, ddr;
  radial(kTwoPi * s, r, dr, ddr);
  Vec2 p;
  polar_eval(kTwoPi * s, r, dr, ddr, &p, nullptr, nullptr);
  return p;
}
Vec2 CassiniOval::tangent(double s) const {
  double r, dr, ddr;
  radial(kTwoPi * s, r, dr, ddr);
  Vec2 d1;
  polar_eval(kTwoPi * s, r, dr, ddr, nullptr, &d1, nullptr);
  return d1;
}
Vec2 CassiniOval::second(double s) const {
  double r, dr, ddr;
  radial(kTwoPi * s, r, dr, ddr);
  Vec2 d2;
  polar_eval(kTwoPi * s, r, dr, ddr, nullptr, nullptr, &d2);
  return d2;
}
std::string CassiniOval::name() const {
  std::ostringstream os;
  os.precision(17);
  os << "cassini:" << a_ << ":" << c_;
  return os.str();
}

// --- Polygons -----------------------------------------------------------

PolygonCurve::PolygonCurve(std::vector<Vec2> vertices, std::string label)
    : vertices_(std::move(vertices)), label_(std::move(label)) {
  if (vertices_.size() < 3) throw Error(ErrorKind::parameter, "polygon needs at least 3 vertices");
  double area2 = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    area2 += cross<double>(vertices_[i], vertices_[(i + 1) % vertices_.size()]);
  }
  if (area2 < 0) std::reverse(vertices_.begin(), vertices_.end());
  if (area2 == 0) throw Error(ErrorKind::parameter, "polygon has zero area");
  double total = 0.0;
  params_.push_back(0.0);
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    total += (vertices_[(i + 1) % vertices_.size()] - vertices_[i]).norm();
    params_.push_back(total);
  }
  for (double& p : params_) p /= total;
  params_.pop_back();
}

std::size_t PolygonCurve::locate(double s, double& local) const {
  s = wrap01(s);
  const auto it = std::upper_bound(params_.begin(), params_.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - params_.begin()) - 1;
  const double end = i + 1 < params_.size() ? params_[i + 1] : 1.0;
  local = (s - params_[i]) / (end - params_[i]);
  return i;
}

Vec2 PolygonCurve::point(double s) const {
  double t;
  const std::size_t i = locate(s, t);
  const Vec2& a = vertices_[i];
  const Vec2& b = vertices_[(i + 1) % vertices_.size()];
  return a + t * (b - a);
}

Vec2 PolygonCurve::tangent(double s) const {
  double t;
  const std::size_t i = locate(s, t);
  const double end = i + 1 < params_.size() ? params_[i + 1] : 1.0;
  return (vertices_[(i + 1) % vertices_.size()] - vertices_[i]) / (end - params_[i]);
}

CurvePtr make_rectangle(double w, double h, Vec2 origin) {
  if (!(w > 0 && h > 0)) throw Error(ErrorKind::parameter, "rectangle sides must be positive");
  std::vector<Vec2> v{origin, origin + Vec2(w, 0), origin + Vec2(w, h), origin + Vec2(0, h)};
  std::ostringstream os;
  os.precision(17);
  os << "rectangle:" << w << ":" << h;
  return std::make_shared<PolygonCurve>(std::move(v), os.str());
}

SimilarityCurve::SimilarityCurve(CurvePtr base, double scale, double angle, Vec2 shift)
    : base_(std::move(base)), scale_(scale), shift_(shift) {
  rotation_ << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
}
Vec2 SimilarityCurve::point(double s) const { return scale_ * rotation_ * base_->point(s) + shift_; }
Vec2 SimilarityCurve::tangent(double s) const { return scale_ * rotation_ * base_->tangent(s); }
Vec2 SimilarityCurve::second(double s) const { return scale_ * rotation_ * base_->second(s); }
std::string SimilarityCurve::name() const { return base_->name() + "+similarity"; }

CurvePtr read_polygon_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open polygon file " + path);
  std::vector<Vec2> pts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double x, y;
    if (!(ls >> x)) continue;
    if (!(ls >> y)) {
      throw Error(ErrorKind::io, path + ":" + std::to_string(lineno) + ": expected \"x y\"");
    }
    pts.emplace_back(x, y);
  }
  if (pts.size() >= 2 && pts.front() == pts.back()) pts.pop_back();
  return std::make_shared<PolygonCurve>(std::move(pts), "file:" + path);
}

}  // namespace hardy
