#include "hardy/perturbation.hpp"

#include "hardy/errors.hpp"

#include <sstream>

namespace hardy {

const char* to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::translation: return "translation";
    case FieldKind::dilation: return "dilation";
    case FieldKind::rotationlike: return "rotationlike";
    case FieldKind::normal_bump: return "normal_bump";
    case FieldKind::custom: return "custom";
  }
  return "unknown";
}

double PerturbationField::c2_bound(const std::vector<Vec2>& samples) const {
  double m = 0.0;
  for (const auto& x : samples) {
    const Hessian2 h = hessian(x);
    m = std::max({m, value(x).norm(), jacobian(x).norm(), std::sqrt(h[0].squaredNorm() + h[1].squaredNorm())});
  }
  return m;
}

namespace {

Hessian2 zero_hessian() { return {Mat2::Zero(), Mat2::Zero()}; }

std::string fmt(const Vec2& v) {
  std::ostringstream os;
  os.precision(17);
  os << v.x() << "," << v.y();
  return os.str();
}

class QuadraticField final : public PerturbationField {
 public:
  QuadraticField(FieldKind kind, std::string label, Vec2 b, Mat2 a, Hessian2 q)
      : kind_(kind), label_(std::move(label)), b_(b), a_(a), q_(q) {}

  Vec2 value(const Vec2& x) const override {
    return b_ + a_ * x + 0.5 * Vec2(x.dot(q_[0] * x), x.dot(q_[1] * x));
  }
  Mat2 jacobian(const Vec2& x) const override {
    Mat2 j = a_;
    j.row(0) += (0.5 * (q_[0] + q_[0].transpose()) * x).transpose();
    j.row(1) += (0.5 * (q_[1] + q_[1].transpose()) * x).transpose();
    return j;
  }
  Hessian2 hessian(const Vec2&) const override {
    return {0.5 * (q_[0] + q_[0].transpose()), 0.5 * (q_[1] + q_[1].transpose())};
  }
  Vec2 difference(const Vec2& x, const Vec2& y) const override {
    const Vec2 e = x - y;
    const Vec2 s = x + y;
    const Hessian2 h = hessian(x);
    return a_ * e + 0.5 * Vec2(e.dot(h[0] * s), e.dot(h[1] * s));
  }
  FieldKind kind() const override { return kind_; }
  std::string describe() const override { return label_; }

 private:
  FieldKind kind_;
  std::string label_;
  Vec2 b_;
  Mat2 a_;
  Hessian2 q_;
};

// Quintic smooth step: 1 on [0, 1/2], 0 on [1, inf).
void cutoff_profile(double s, double& chi, double& dchi, double& ddchi) {
  if (s <= 0.5) {
    chi = 1.0;
    dchi = ddchi = 0.0;
    return;
  }
  if (s >= 1.0) {
    chi = dchi = ddchi = 0.0;
    return;
  }
  const double u = 2.0 * s - 1.0;
  chi = 1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
  dchi = -2.0 * 30.0 * u * u * (1.0 - u) * (1.0 - u);
  ddchi = -4.0 * 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
}

class BumpField final : public PerturbationField {
 public:
  BumpField(const BumpSpec& spec, std::shared_ptr<const Domain> domain) : spec_(spec), domain_(std::move(domain)) {
    if (!(spec_.width > 0)) throw Error(ErrorKind::parameter, "bump width must be positive");
    if (spec_.cutoff > 0 && !domain_) throw Error(ErrorKind::parameter, "bump cutoff needs a domain");
    const double n = spec_.direction.norm();
    if (!(n > 0)) throw Error(ErrorKind::parameter, "bump direction must be nonzero");
    spec_.direction /= n;
  }

  // Scalar profile g = exp(-|x - x0|^2 / w^2) * chi(d / cutoff) with derivatives.
  void profile(const Vec2& x, double& g, Vec2& dg, Mat2& ddg) const {
    const Vec2 r = x - spec_.center;
    const double w2 = spec_.width * spec_.width;
    const double e = std::exp(-r.squaredNorm() / w2);
    const Vec2 de = -2.0 * e * r / w2;
    const Mat2 dde = e * (4.0 * r * r.transpose() / (w2 * w2) - 2.0 * Mat2::Identity() / w2);
    if (spec_.cutoff <= 0) {
      g = e;
      dg = de;
      ddg = dde;
      return;
    }
    const double sd = domain_->signed_distance(x);
    double chi, dchi, ddchi;
    cutoff_profile(std::max(sd, 0.0) / spec_.cutoff, chi, dchi, ddchi);
    if (dchi == 0.0 && ddchi == 0.0) {
      g = e * chi;
      dg = de * chi;
      ddg = dde * chi;
      return;
    }
    const DistanceQuery q = domain_->distance(x);
    const Vec2 n = q.grad;
    const double kappa = domain_->curvature_at(q.segment, q.param);
    const double lap = -kappa / (1.0 - kappa * q.d);
    const Mat2 hess_d = lap * (Mat2::Identity() - n * n.transpose());
    const Vec2 dchi_x = dchi * n / spec_.cutoff;
    const Mat2 ddchi_x = ddchi * n * n.transpose() / (spec_.cutoff * spec_.cutoff) + dchi * hess_d / spec_.cutoff;
    g = e * chi;
    dg = de * chi + e * dchi_x;
    ddg = dde * chi + de * dchi_x.transpose() + dchi_x * de.transpose() + e * ddchi_x;
  }

  Vec2 value(const Vec2& x) const override {
    double g;
    Vec2 dg;
    Mat2 ddg;
    profile(x, g, dg, ddg);
    return spec_.amplitude * g * spec_.direction;
  }
  Mat2 jacobian(const Vec2& x) const override {
    double g;
    Vec2 dg;
    Mat2 ddg;
    profile(x, g, dg, ddg);
    return spec_.amplitude * spec_.direction * dg.transpose();
  }
  Hessian2 hessian(const Vec2& x) const override {
    double g;
    Vec2 dg;
    Mat2 ddg;
    profile(x, g, dg, ddg);
    return {spec_.amplitude * spec_.direction.x() * ddg, spec_.amplitude * spec_.direction.y() * ddg};
  }
  FieldKind kind() const override { return FieldKind::normal_bump; }
  std::string describe() const override {
    std::ostringstream os;
    os.precision(17);
    os << "bump:" << fmt(spec_.center) << ":" << spec_.width << ":" << fmt(spec_.direction) << ":"
       << spec_.amplitude << ":" << spec_.cutoff;
    return os.str();
  }

 private:
  BumpSpec spec_;
  std::shared_ptr<const Domain> domain_;
};

class CombinedField final : public PerturbationField {
 public:
  CombinedField(double a, FieldPtr f, double b, FieldPtr g) : a_(a), b_(b), f_(std::move(f)), g_(std::move(g)) {}
  Vec2 value(const Vec2& x) const override { return a_ * f_->value(x) + b_ * g_->value(x); }
  Mat2 jacobian(const Vec2& x) const override { return a_ * f_->jacobian(x) + b_ * g_->jacobian(x); }
  Hessian2 hessian(const Vec2& x) const override {
    const Hessian2 hf = f_->hessian(x), hg = g_->hessian(x);
    return {a_ * hf[0] + b_ * hg[0], a_ * hf[1] + b_ * hg[1]};
  }
  Vec2 difference(const Vec2& x, const Vec2& y) const override {
    return a_ * f_->difference(x, y) + b_ * g_->difference(x, y);
  }
  FieldKind kind() const override { return FieldKind::custom; }
  std::string describe() const override {
    std::ostringstream os;
    os.precision(17);
    os << "sum(" << a_ << "*" << f_->describe() << "," << b_ << "*" << g_->describe() << ")";
    return os.str();
  }

 private:
  double a_, b_;
  FieldPtr f_, g_;
};

}  // namespace

FieldPtr translation_field(const Vec2& c) {
  return std::make_shared<QuadraticField>(FieldKind::translation, "translation:" + fmt(c), c, Mat2::Zero(),
                                          zero_hessian());
}

FieldPtr dilation_field(const Vec2& center) {
  return std::make_shared<QuadraticField>(FieldKind::dilation, "dilation:" + fmt(center), -center,
                                          Mat2::Identity(), zero_hessian());
}

FieldPtr rotation_field(const Vec2& center) {
  Mat2 a;
  a << 0.0, -1.0, 1.0, 0.0;
  return std::make_shared<QuadraticField>(FieldKind::rotationlike, "rotation:" + fmt(center), -a * center, a,
                                          zero_hessian());
}

FieldPtr affine_field(const Mat2& a, const Vec2& b) {
  std::ostringstream os;
  os.precision(17);
  os << "affine:" << a(0, 0) << "," << a(0, 1) << "," << a(1, 0) << "," << a(1, 1) << ":" << fmt(b);
  return std::make_shared<QuadraticField>(FieldKind::custom, os.str(), b, a, zero_hessian());
}

FieldPtr quadratic_field(const Vec2& b, const Mat2& a, const Hessian2& q) {
  return std::make_shared<QuadraticField>(FieldKind::custom, "quadratic", b, a, q);
}

FieldPtr normal_bump_field(const BumpSpec& spec, std::shared_ptr<const Domain> cutoff_domain) {
  return std::make_shared<BumpField>(spec, std::move(cutoff_domain));
}

FieldPtr combine_fields(double a, FieldPtr f, double b, FieldPtr g) {
  return std::make_shared<CombinedField>(a, std::move(f), b, std::move(g));
}

}  // namespace hardy
