#pragma once

#include "hardy/domain.hpp"
#include "hardy/types.hpp"

#include <memory>
#include <string>
#include <vector>

namespace hardy {

enum class FieldKind { translation, dilation, rotationlike, normal_bump, custom };

const char* to_string(FieldKind kind);

/// C^2 vector field psi with analytic first and second derivatives.
class PerturbationField {
 public:
  virtual ~PerturbationField() = default;
  virtual Vec2 value(const Vec2& x) const = 0;
  virtual Mat2 jacobian(const Vec2& x) const = 0;  // (i, j) = d psi_i / d x_j
  virtual Hessian2 hessian(const Vec2& x) const = 0;
  virtual FieldKind kind() const = 0;
  virtual std::string describe() const = 0;

  double divergence(const Vec2& x) const { return jacobian(x).trace(); }

  /// psi(x) - psi(y). Polynomial fields evaluate it from x - y so that the
  /// difference stays accurate when x and y are close.
  virtual Vec2 difference(const Vec2& x, const Vec2& y) const { return value(x) - value(y); }

  /// Largest of |psi|, |grad psi| and |grad^2 psi| (Frobenius) over samples.
  double c2_bound(const std::vector<Vec2>& samples) const;
};

using FieldPtr = std::shared_ptr<const PerturbationField>;

FieldPtr translation_field(const Vec2& c);
FieldPtr dilation_field(const Vec2& center = Vec2::Zero());
FieldPtr rotation_field(const Vec2& center = Vec2::Zero());

/// Affine field psi(x) = b + A x (kind "custom").
FieldPtr affine_field(const Mat2& a, const Vec2& b);

/// Quadratic field psi_k(x) = b_k + A_k x + x^T Q_k x / 2 (kind "custom").
FieldPtr quadratic_field(const Vec2& b, const Mat2& a, const Hessian2& q);

struct BumpSpec {
  Vec2 center = Vec2::Zero();
  double width = 0.25;
  Vec2 direction = Vec2(0.0, 1.0);
  double amplitude = 1.0;
  /// Collar depth for the cutoff; 0 disables it. With a cutoff the field
  /// vanishes where d >= cutoff and is untouched where d <= cutoff / 2.
  double cutoff = 0.0;
};

/// psi(x) = A exp(-|x - x0|^2 / w^2) e, optionally times a smooth cutoff in
/// d_Omega so that phi = I away from the boundary.
FieldPtr normal_bump_field(const BumpSpec& spec, std::shared_ptr<const Domain> cutoff_domain = nullptr);

/// a * f + b * g.
FieldPtr combine_fields(double a, FieldPtr f, double b, FieldPtr g);

}  // namespace hardy
