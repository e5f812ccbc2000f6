#pragma once

#include "hardy/domain.hpp"
#include "hardy/domain_map.hpp"
#include "hardy/perturbation.hpp"
#include "hardy/quadrature.hpp"

#include <functional>

namespace hardy {

using ScalarField = std::function<double(const Vec2&)>;

/// V[phi, psi](y) = d^-1 grad d . (psi(phi^-1 y) - psi(phi^-1 tau y)) with d,
/// tau taken on `image` = phi(Omega). Ridge points raise a ridge error unless
/// `allow_ridge`, in which case the tie-broken tau is used.
double v_functional(const Domain& image, const DomainMap& phi, const PerturbationField& psi, const Vec2& y,
                    bool allow_ridge = false);

/// Same with phi = I and a precomputed distance query at x.
double v_identity(const PerturbationField& psi, const Vec2& x, const DistanceQuery& q);

/// F_phi(x) = d^-1 |(phi - I)(tau x) - (phi - I)(x)|.
double f_phi(const Domain& domain, const DomainMap& phi, const Vec2& x);

/// Tw(x) = integral_0^1 |w(x + s (tau x - x))| ds by 3-point Gauss on
/// `n_panels` panels.
double t_operator(const Domain& domain, const ScalarField& w, const Vec2& x, int n_panels = 16);

/// Frobenius norm of grad phi - I.
double distortion(const DomainMap& phi, const Vec2& x);

/// delta_{r,p}(phi) = (integral log(Inr/d) (|grad phi - I|^r + |grad phi - I|^{pr}))^{1/r}
/// on the quadrature nodes; the log weight is clamped at 0. A non-positive
/// `inr` is replaced by inradius(domain).
double vicinity_delta(const Domain& domain, const DomainMap& phi, double r, double p,
                      const QuadratureRule& quadrature, double inr = 0.0);

/// sup over the samples of |grad phi - I| (operator norm).
double distortion_sup(const DomainMap& phi, const std::vector<Vec2>& samples);

}  // namespace hardy
