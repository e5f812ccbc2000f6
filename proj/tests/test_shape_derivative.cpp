#include "hardy/curve.hpp"
#include "hardy/errors.hpp"
#include "hardy/shape_derivative.hpp"

#include <doctest.h>

#include <cmath>

using namespace hardy;

namespace {

Domain peanut(int n = 1024) { return Domain(std::make_shared<StarCurve>(0.55, 2), n); }

MeshParams mesh_h(double h) {
  MeshParams m;
  m.h = h;
  return m;
}

FieldPtr peanut_bump() {
  BumpSpec b;
  b.center = Vec2(0.3, 0.45);
  b.width = 0.3;
  b.direction = Vec2(0.0, 1.0);
  return normal_bump_field(b);
}

const SolvedDomain& peanut_solution() {
  static const SolvedDomain s = solve_domain(peanut(), 2.0, mesh_h(1.0 / 8.0), SolverParams{1e-11, 400, 80});
  return s;
}

double formula(const PerturbationField& psi) {
  const SolvedDomain& s = peanut_solution();
  return hadamard_formula(s.disc, s.result.minimizer, s.result.H, 2.0, psi);
}

}  // namespace

TEST_CASE("Hadamard formula vanishes for rigid motions and dilations") {
  const double scale = std::max(1.0, peanut_solution().result.H);
  CHECK(std::abs(formula(*translation_field(Vec2(0.7, -0.3)))) <= 1e-8 * scale);
  CHECK(std::abs(formula(*dilation_field())) <= 1e-8 * scale);
  CHECK(std::abs(formula(*dilation_field(Vec2(0.2, 0.1)))) <= 1e-8 * scale);
  CHECK(std::abs(formula(*rotation_field())) <= 1e-8 * scale);
}

TEST_CASE("Hadamard formula is linear in the field") {
  const FieldPtr a = peanut_bump();
  BumpSpec b2;
  b2.center = Vec2(-0.6, 0.2);
  b2.width = 0.25;
  b2.direction = Vec2(1.0, 0.5);
  const FieldPtr b = normal_bump_field(b2);
  const double fa = formula(*a), fb = formula(*b);
  const double fab = formula(*combine_fields(2.0, a, -0.5, b));
  CHECK(fab == doctest::Approx(2.0 * fa - 0.5 * fb).epsilon(1e-10));
  CHECK(std::abs(fa) > 1e-6);
  // Adding a dilation leaves the value unchanged.
  CHECK(formula(*combine_fields(1.0, a, 3.0, dilation_field())) == doctest::Approx(fa).epsilon(1e-8));
}

TEST_CASE("Hadamard derivative refuses a domain without minimiser") {
  const Domain disk(std::make_shared<Circle>(1.0), 1024);
  const DerivativeReport r = hadamard_derivative(disk, peanut_bump(), 2.0, mesh_h(0.125));
  CHECK_FALSE(r.applicability);
  CHECK(std::isnan(r.formula_value));
  CHECK(std::isnan(r.fd_value));
  CHECK_FALSE(r.note.empty());
}

TEST_CASE("forced Hadamard derivative against the matched finite difference") {
  HadamardOptions opt;
  opt.force = true;
  const DerivativeReport r = hadamard_derivative(peanut_solution(), peanut_bump(), 2.0, opt);
  CHECK_FALSE(r.applicability);
  CHECK(std::isfinite(r.formula_value));
  CHECK(std::isfinite(r.fd_value));
  CHECK(r.formula_value * r.fd_value > 0.0);
  CHECK(r.relative_gap < 0.5);
}

TEST_CASE("distance family derivative") {
  const Domain disk(std::make_shared<Circle>(1.0), 1022);
  const DerivativeReport d = dist_family_derivative(disk, dilation_field(), Vec2(0.0, 0.5), 0.0, 2.0);
  CHECK(d.formula_value == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(std::abs(d.formula_value - d.fd_value) < 1e-6);

  const DerivativeReport c = dist_family_derivative(disk, translation_field(Vec2(0.3, 0.4)), Vec2(0.2, 0.1), 0.0, 2.0);
  CHECK(std::abs(c.formula_value) < 1e-8);
  CHECK(std::abs(c.fd_value) < 1e-8);

  const Domain pea = peanut(4096);
  for (const Vec2& x : {Vec2(0.3, 0.2), Vec2(-0.2, 0.3), Vec2(0.8, 0.1)}) {
    const DerivativeReport b = dist_family_derivative(pea, peanut_bump(), x, 0.0, 2.0);
    CHECK(b.relative_gap <= 1e-3);
  }
  const DerivativeReport t0 = dist_family_derivative(pea, peanut_bump(), Vec2(0.3, 0.2), 0.05, 3.0);
  CHECK(t0.relative_gap <= 1e-3);
  CHECK_THROWS_AS(dist_family_derivative(pea, peanut_bump(), Vec2(0.0, 0.0), 0.0, 2.0), Error);
}

TEST_CASE("G derivative") {
  const Domain disk(std::make_shared<Circle>(1.0), 1024);
  const Discretization disc = discretize(disk, mesh_h(0.125));
  const DiscreteField u = distance_power(disc, 0.9);
  const ScalarField one = [](const Vec2&) { return 1.0; };
  for (double p : {2.0, 3.0}) {
    const double G0 = g_function(disc, u, one, dilation_field(), 0.0, p);
    const DerivativeReport r = g_function_derivative(disc, u, one, dilation_field(), 0.0, p);
    CHECK(r.formula_value == doctest::Approx(-p * G0).epsilon(1e-8));
    CHECK(r.relative_gap <= 1e-4);
  }
  const DerivativeReport later = g_function_derivative(disc, u, one, dilation_field(), 0.1, 2.0);
  CHECK(later.relative_gap <= 1e-4);

  const double G0 = g_function(disc, u, one, translation_field(Vec2(1.0, 0.0)), 0.0, 2.0);
  const DerivativeReport c = g_function_derivative(disc, u, one, translation_field(Vec2(1.0, 0.0)), 0.0, 2.0);
  CHECK(std::abs(c.formula_value) <= 1e-8 * G0);
  CHECK(std::abs(c.fd_value) <= 1e-8 * G0);

  const ScalarField zero = [](const Vec2&) { return 0.0; };
  const DerivativeReport z = g_function_derivative(disc, u, zero, peanut_bump(), 0.0, 2.0);
  CHECK(z.formula_value == 0.0);
  CHECK(z.fd_value == 0.0);

}

// Invariance holds up to the rounding of node positions at depth ~1e-10.
TEST_CASE("Hardy family under rigid motion and scaling") {
  const Domain pea = peanut();
  SolverParams sp{1e-10, 400, 80};
  const auto tr = hardy_family(pea, translation_field(Vec2(0.3, -0.1)), {0.0, 0.5, 1.0}, 2.0, mesh_h(0.125), sp);
  REQUIRE(tr.size() == 3);
  for (const auto& row : tr) CHECK(std::abs(row.H - tr[0].H) <= 1e-6 * tr[0].H);
  const auto dl = hardy_family(pea, dilation_field(), {-0.05, 0.0, 0.05}, 2.0, mesh_h(0.125), sp);
  for (const auto& row : dl) CHECK(std::abs(row.H - dl[1].H) <= 1e-6 * dl[1].H);
  CHECK_THROWS_AS(hardy_family(pea, dilation_field(), {-0.95}, 2.0, mesh_h(0.125)), Error);

  BumpSpec b;
  b.center = Vec2(0.3, 0.45);
  b.width = 0.3;
  const auto bump = hardy_family(pea, normal_bump_field(b), {-0.02, 0.0, 0.02}, 2.0, mesh_h(0.125), sp);
  CHECK(bump[0].H != doctest::Approx(bump[1].H).epsilon(1e-6));
  CHECK(bump[2].H != doctest::Approx(bump[1].H).epsilon(1e-6));
}
