#include "hardy/curve.hpp"
#include "hardy/errors.hpp"
#include "hardy/hardy_solver.hpp"
#include "hardy/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hardy;

namespace {

Domain unit_disk() { return Domain(std::make_shared<Circle>(1.0), 1024); }
Domain peanut() { return Domain(std::make_shared<StarCurve>(0.55, 2), 1024); }

MeshParams mesh_h(double h) {
  MeshParams m;
  m.h = h;
  return m;
}

double alpha_equation(double p, double a) { return (p - 1.0) * std::pow(a, p - 1.0) * (1.0 - a); }

}  // namespace

TEST_CASE("alpha equation analytic roots") {
  CHECK(std::abs(solve_alpha(2.0, 3.0 / 16.0) - 0.75) < 1e-10);
  CHECK(std::abs(solve_alpha(2.0, 0.25) - 0.5) < 1e-10);
  const double a = solve_alpha(3.0, 0.2);
  CHECK(a == doctest::Approx(0.8669).epsilon(1e-4));
  CHECK(std::abs(alpha_equation(3.0, a) - 0.2) < 1e-12);
  CHECK_THROWS_AS(solve_alpha(2.0, 0.3), Error);
  CHECK_THROWS_AS(solve_alpha(1.0, 0.1), Error);
}

TEST_CASE("alpha equation round trip on random pairs") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> up(1.05, 6.0), uf(1e-6, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double p = up(rng);
    const double H = uf(rng) * convex_constant(p);
    const double a = solve_alpha(p, H);
    CHECK(a >= (p - 1.0) / p - 1e-12);
    CHECK(a <= 1.0);
    CHECK(std::abs(alpha_equation(p, a) - H) < 1e-10);
  }
}

TEST_CASE("convex constant") {
  CHECK(convex_constant(2.0) == doctest::Approx(0.25));
  CHECK(convex_constant(3.0) == doctest::Approx(8.0 / 27.0));
  CHECK(existence_margin(0.25, 0.25) == doctest::Approx(0.005));
  CHECK(existence_margin(0.25, 0.26) == doctest::Approx(0.05));
}

TEST_CASE("Rayleigh quotient examples") {
  const Domain disk = unit_disk();
  const Discretization disc = discretize(disk, mesh_h(1.0 / 16.0));
  // 1 - |x|^2 = 2 d - d^2 on the disk; written through d it vanishes on the polygon.
  const std::vector<double> d = vertex_distances(disc.mesh, disc.domain);
  DiscreteField u = DiscreteField::Zero(disc.mesh.n_vertices());
  for (int v = 0; v < disc.mesh.n_vertices(); ++v) u[v] = 2.0 * d[v] - d[v] * d[v];
  CHECK(rayleigh_quotient(u, disc, 2.0) == doctest::Approx(12.0 / 17.0).epsilon(5e-3));

  for (double p : {2.0, 3.0}) {
    CHECK(rayleigh_quotient(distance_power(disc, 1.0), disc, p) == doctest::Approx(1.0).epsilon(2e-2));
  }
  CHECK_THROWS_AS(rayleigh_quotient(DiscreteField::Zero(disc.mesh.n_vertices()), disc, 2.0), Error);
}

TEST_CASE("Rayleigh quotient is homogeneous and symmetric") {
  const Discretization disc = discretize(peanut(), mesh_h(1.0 / 8.0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> un(-1.0, 1.0);
  DiscreteField u = DiscreteField::Zero(disc.mesh.n_vertices());
  for (int v = 0; v < disc.mesh.n_vertices(); ++v)
    if (!disc.mesh.boundary[v]) u[v] = un(rng);
  for (double p : {2.0, 3.0}) {
    const double r = rayleigh_quotient(u, disc, p);
    CHECK(rayleigh_quotient(3.7 * u, disc, p) == doctest::Approx(r).epsilon(1e-12));
    CHECK(rayleigh_quotient(-u, disc, p) == doctest::Approx(r).epsilon(1e-12));
  }
}

TEST_CASE("minimiser on the unit square") {
  const Domain sq(make_rectangle(1.0, 1.0), 256);
  const HardyResult r = minimize_hardy(discretize(sq, mesh_h(1.0 / 8.0)), 2.0);
  CHECK(r.H > 0.25);
  CHECK(r.H < 0.275);
  CHECK(r.H >= 1.0 / 16.0 - 1e-3);
  CHECK(r.minimizer.minCoeff() >= 0.0);
  const Discretization disc = discretize(sq, mesh_h(1.0 / 8.0));
  CHECK(hardy_denominator(disc, r.minimizer, 2.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rayleigh_quotient(r.minimizer, disc, 2.0) == doctest::Approx(r.H).epsilon(1e-10));
  CHECK(pde_residual(r.minimizer, r.H, disc, 2.0) < 1e-6);
  CHECK(pde_residual(r.minimizer, r.H + 0.01, disc, 2.0) > 1e-3);
  CHECK_FALSE(r.existence_flag);
}

TEST_CASE("p = 3 minimiser on the unit disk") {
  const HardyResult r = minimize_hardy(discretize(unit_disk(), mesh_h(1.0 / 8.0)), 3.0);
  CHECK(r.H > 8.0 / 27.0);
  CHECK(r.H < 1.1 * 8.0 / 27.0);
  CHECK(std::isnan(r.alpha));
}

TEST_CASE("refinement lowers H on the unit square") {
  const Domain sq(make_rectangle(1.0, 1.0), 256);
  double prev = 1.0;
  for (double h : {1.0 / 4.0, 1.0 / 8.0, 1.0 / 16.0}) {
    const double H = minimize_hardy(discretize(sq, mesh_h(h)), 2.0).H;
    CHECK(H < prev);
    prev = H;
  }
}

TEST_CASE("peanut reference value") {
  const SolvedDomain s = solve_domain(peanut(), 2.0, mesh_h(1.0 / 8.0));
  CHECK(s.result.H == doctest::Approx(0.26389458018413775).epsilon(1e-8));
  CHECK(s.result.H >= 1.0 / 16.0 - 1e-3);
  CHECK(s.result.margin >= 0.005);
}

TEST_CASE("decay fit on synthetic powers") {
  const Domain disk = unit_disk();
  const Discretization disc = discretize(disk, mesh_h(1.0 / 8.0));
  const Collar collar(disk, 0.3);
  for (double beta : {0.75, 1.0}) {
    const DecayFit f = decay_fit(distance_power(disc, beta), disc, collar, 1e-6);
    CHECK(f.slope == doctest::Approx(beta).epsilon(1e-6));
    CHECK(f.K == doctest::Approx(1.0).epsilon(1e-6));
  }
  CHECK_THROWS_AS(decay_fit(distance_power(disc, 1.0), disc, Collar(disk, 1e-12)), Error);
}

TEST_CASE("solver errors") {
  const Discretization disc = discretize(unit_disk(), mesh_h(0.25));
  CHECK_THROWS_AS(minimize_hardy(disc, 1.0), Error);
  SolverParams tight;
  tight.max_iterations = 1;
  tight.tol = 1e-15;
  CHECK_THROWS_AS(minimize_hardy(disc, 3.0, tight), ConvergenceError);
}
