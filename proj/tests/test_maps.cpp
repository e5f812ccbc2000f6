#include "hardy/curve.hpp"
#include "hardy/cylinder.hpp"
#include "hardy/domain_map.hpp"
#include "hardy/errors.hpp"
#include "hardy/map_functionals.hpp"
#include "hardy/mesh.hpp"
#include "hardy/perturbation.hpp"
#include "hardy/quadrature.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace hardy;

namespace {

Domain unit_disk(int n = 1022) { return Domain(std::make_shared<Circle>(1.0), n); }

Mat2 scaled(double s) { return s * Mat2::Identity(); }

}  // namespace

TEST_CASE("lipschitz constants of similarities") {
  const auto samples = interior_samples(unit_disk(), 12);
  auto [l1, m1] = lipschitz_constants(SimilarityMap::identity(), samples);
  CHECK(l1 == doctest::Approx(1.0));
  CHECK(m1 == doctest::Approx(1.0));
  auto [l2, m2] = lipschitz_constants(SimilarityMap(2.0, 0.0, Vec2::Zero()), samples);
  CHECK(l2 == doctest::Approx(2.0));
  CHECK(m2 == doctest::Approx(0.5));
  auto [l3, m3] = lipschitz_constants(SimilarityMap(1.0, 0.0, Vec2(3.0, -1.0)), samples);
  CHECK(l3 == doctest::Approx(1.0));
  CHECK(m3 == doctest::Approx(1.0));
}

TEST_CASE("perturbed identity stays within 1 + t sup|grad psi|") {
  const Domain dom(std::make_shared<StarCurve>(0.55, 2), 1024);
  BumpSpec b;
  b.center = Vec2(0.3, 0.45);
  b.width = 0.3;
  const FieldPtr psi = normal_bump_field(b);
  const auto samples = interior_samples(dom, 16);
  double g = 0.0;
  for (const auto& x : samples) g = std::max(g, psi->jacobian(x).operatorNorm());
  for (double t : {0.08, 0.02}) {
    const PerturbedIdentity phi(psi, t);
    auto [lip, inv] = lipschitz_constants(phi, samples);
    CHECK(lip <= 1.0 + t * g + 1e-12);
    CHECK(lip >= 1.0);
    const Vec2 x(0.2, 0.1);
    CHECK((phi.inverse(phi.forward(x)) - x).norm() < 1e-10);
    (void)inv;
  }
}

TEST_CASE("V functional") {
  const Domain disk = unit_disk();
  const SimilarityMap id = SimilarityMap::identity();
  const Vec2 y(0.1, 0.4);
  CHECK(v_functional(disk, id, *translation_field(Vec2(0.3, -0.2)), y) == doctest::Approx(0.0));
  CHECK(v_functional(disk, SimilarityMap(1.5, 0.3, Vec2(0.1, 0.0)), *translation_field(Vec2(1.0, 2.0)),
                     Vec2(0.2, 0.2)) == doctest::Approx(0.0));
  CHECK(v_functional(disk, id, *dilation_field(), y) == doctest::Approx(1.0).epsilon(1e-12));
  const FieldPtr horizontal = affine_field((Mat2() << 1.0, 0.0, 0.0, 0.0).finished(), Vec2::Zero());
  CHECK(std::abs(v_functional(disk, id, *horizontal, Vec2(0.0, 0.5))) < 1e-12);
  CHECK_THROWS_AS(v_functional(disk, id, *dilation_field(), Vec2(1.2, 0.0)), BoundaryExteriorError);
}

TEST_CASE("F_phi") {
  const Domain disk = unit_disk();
  const Vec2 x(0.0, 0.5);
  CHECK(f_phi(disk, SimilarityMap::identity(), x) == doctest::Approx(0.0));
  CHECK(f_phi(disk, SimilarityMap(1.0, 0.0, Vec2(0.4, 0.1)), x) == doctest::Approx(0.0));
  CHECK(f_phi(disk, SimilarityMap(2.0, 0.0, Vec2::Zero()), x) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("T operator") {
  const Domain disk = unit_disk();
  const Vec2 x(0.3, -0.2);
  CHECK(t_operator(disk, [](const Vec2&) { return 1.0; }, x) == doctest::Approx(1.0));
  CHECK(t_operator(disk, [](const Vec2&) { return 0.0; }, x) == 0.0);
  const double d = disk.distance(x).d;
  CHECK(t_operator(disk, [&](const Vec2& z) { return disk.distance(z).d; }, x) ==
        doctest::Approx(d / 2.0).epsilon(1e-10));
}

TEST_CASE("vicinity delta") {
  const Domain disk = unit_disk(2048);
  MeshParams mp;
  mp.h = 1.0 / 8.0;
  const QuadratureRule q(build_mesh(disk, mp), disk);
  CHECK(vicinity_delta(disk, SimilarityMap::identity(), 1.0, 2.0, q, 1.0) == 0.0);
  const double eps = 0.1;
  const SimilarityMap phi(1.0 + eps, 0.0, Vec2::Zero());
  const double expected = (eps * std::sqrt(2.0) + 2.0 * eps * eps) * 1.5 * M_PI;
  CHECK(vicinity_delta(disk, phi, 1.0, 2.0, q, 1.0) == doctest::Approx(expected).epsilon(2e-3));
  CHECK(std::abs(expected - 0.7607) < 1e-4);
  CHECK(vicinity_delta(disk, SimilarityMap(1.3, 0.2, Vec2::Zero()), 3.0, 2.0, q) >= 0.0);
  CHECK_THROWS_AS(vicinity_delta(disk, phi, 0.5, 2.0, q), Error);
}

TEST_CASE("cylinder map slopes") {
  Cylinder cyl;
  cyl.w0 = -0.5;
  cyl.w1 = 0.5;
  cyl.a = -1.0;
  cyl.b = 0.0;
  const double rho = 0.5;
  const double eta = rho / (2.0 * (cyl.b - cyl.a));
  CHECK(eta == doctest::Approx(0.25));
  const Profile g = cosine_profile({-0.5}, cyl.w0, cyl.w1);
  const CylinderMap down(cyl, g, cosine_profile({-0.6}, cyl.w0, cyl.w1), eta);
  CHECK(down.slope(0.0) == doctest::Approx(0.2));
  const CylinderMap up(cyl, g, cosine_profile({-0.4}, cyl.w0, cyl.w1), eta);
  CHECK(up.slope(0.0) == doctest::Approx(5.0));
  // Boundary point goes to the new graph, g_0 stays fixed.
  CHECK(up.forward(Vec2(0.1, -0.5)).y() == doctest::Approx(-0.4));
  CHECK(up.forward(Vec2(0.1, up.g0(0.1))).y() == doctest::Approx(up.g0(0.1)));
  const Vec2 y(0.2, -0.45);
  CHECK((up.forward(up.inverse(y)) - y).norm() < 1e-12);
  CHECK((up.forward(Vec2(0.7, -0.45)) - Vec2(0.7, -0.45)).norm() == 0.0);
}

TEST_CASE("cylinder perturbation of the unit square") {
  const Domain sq(make_rectangle(1.0, 1.0), 2048);
  Cylinder cyl;
  cyl.frame.origin = Vec2(0.5, 0.0);
  cyl.w0 = -0.3;
  cyl.w1 = 0.3;
  cyl.a = 0.5;
  cyl.b = 1.5;
  const Profile g = boundary_graph(sq, cyl);
  CHECK(g(0.1) == doctest::Approx(1.0));
  CHECK(g.df(0.1) == doctest::Approx(0.0).scale(1.0));

  const CylinderPerturbation same = build_cylinder_perturbation(sq, g, g, cyl, 0.4, 40.0);
  for (const Vec2& x : interior_samples(sq, 9)) CHECK((same.map->forward(x) - x).norm() == 0.0);
  CHECK(symmetric_difference_measure(sq, same.perturbed) == doctest::Approx(0.0));

  for (double eps : {0.04, 0.01}) {
    const Profile gt = add_profiles(g, eps, unit_bump_profile(cyl.w0, cyl.w1));
    const CylinderPerturbation cp = build_cylinder_perturbation(sq, g, gt, cyl, 0.4, 40.0);
    CHECK(cp.profile_l1 == doctest::Approx(eps).epsilon(1e-6));
    CHECK(symmetric_difference_measure(sq, cp.perturbed) == doctest::Approx(eps).epsilon(1e-2));
    CHECK(cp.outside_displacement == 0.0);
    CHECK(cp.containment == doctest::Approx(1.0));
  }
  const Profile wild = add_profiles(g, 0.04, unit_bump_profile(cyl.w0, cyl.w1));
  CHECK_THROWS_AS(build_cylinder_perturbation(sq, g, wild, cyl, 0.4, 2.0), Error);
}
