#include "hardy/curve.hpp"
#include "hardy/domain.hpp"
#include "hardy/errors.hpp"
#include "hardy/mesh.hpp"
#include "hardy/quadrature.hpp"

#include <doctest.h>

#include <cmath>

using namespace hardy;

namespace {

Domain unit_square() { return Domain(make_rectangle(1.0, 1.0), 256); }
Domain unit_disk(int n = 1024) { return Domain(std::make_shared<Circle>(1.0), n); }

}  // namespace

TEST_CASE("distance on the unit square") {
  const Domain sq = unit_square();
  const DistanceQuery c = distance_to_boundary(sq, Vec2(0.5, 0.5));
  CHECK(c.d == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(c.on_ridge);

  const DistanceQuery q = distance_to_boundary(sq, Vec2(0.2, 0.5));
  CHECK(q.d == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(q.tau.x() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(q.tau.y() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(q.grad.x() == doctest::Approx(1.0));
  CHECK(q.grad.y() == doctest::Approx(0.0));
  CHECK_FALSE(q.on_ridge);
}

TEST_CASE("distance on the unit disk") {
  const Domain disk = unit_disk(512);
  const DistanceQuery q = distance_to_boundary(disk, Vec2(0.3, 0.0));
  // The axis hits a polygon vertex; the foot lies on an adjacent edge.
  CHECK(std::abs(q.d - 0.7) < 1e-4);
  CHECK((q.tau - Vec2(1.0, 0.0)).norm() < 1e-2);
  CHECK((q.grad - Vec2(-1.0, 0.0)).norm() < 1e-2);
}

TEST_CASE("exterior and boundary queries carry the signed distance") {
  const Domain sq = unit_square();
  try {
    distance_to_boundary(sq, Vec2(1.5, 0.5));
    FAIL("no error");
  } catch (const BoundaryExteriorError& e) {
    CHECK(e.signed_distance() == doctest::Approx(-0.5));
  }
  CHECK_THROWS_AS(distance_to_boundary(sq, Vec2(0.0, 0.5)), BoundaryExteriorError);
}

TEST_CASE("distance is 1-Lipschitz and matches the signed distance inside") {
  const Domain dom(std::make_shared<StarCurve>(0.55, 2), 1024);
  const std::vector<Vec2> pts{{0.1, 0.1}, {0.5, 0.2}, {-0.7, 0.3}, {0.2, -0.35}, {1.2, 0.05}};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double di = dom.distance(pts[i]).d;
    CHECK(di == doctest::Approx(dom.signed_distance(pts[i])).epsilon(1e-12));
    for (std::size_t j = 0; j < i; ++j)
      CHECK(std::abs(di - dom.distance(pts[j]).d) <= (pts[i] - pts[j]).norm() + 1e-12);
  }
}

TEST_CASE("inradius") {
  CHECK(inradius(unit_square()) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(inradius(unit_disk()) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(inradius(Domain(make_rectangle(2.0, 1.0), 256)) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("singular integral") {
  MeshParams mp;
  mp.h = 1.0 / 8.0;
  // Distances are taken to the mesh polygon the quadrature covers.
  const Mesh mesh = build_mesh(unit_disk(), mp);
  const Domain disk = mesh_domain(mesh, unit_disk().curve_ptr());
  const QuadratureRule q(mesh, disk);
  CHECK(singular_integral(disk, 0.0, q) == doctest::Approx(disk.area()).epsilon(1e-12));
  CHECK(std::abs(disk.area() - M_PI) < 2e-3);
  CHECK(singular_integral(disk, 0.5, q) == doctest::Approx(8.0 * M_PI / 3.0).epsilon(1e-3));
  CHECK_THROWS_AS(singular_integral(disk, 1.0, q), Error);

  const Domain sq = unit_square();
  const Mesh ms = build_mesh(sq, mp);
  const QuadratureRule qs(ms, mesh_domain(ms, sq.curve_ptr()));
  CHECK(singular_integral(sq, 0.0, qs) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("symmetric difference") {
  const Domain a = unit_square();
  CHECK(symmetric_difference_measure(a, a) == doctest::Approx(0.0));
  const Domain b(make_rectangle(1.0, 1.0, Vec2(0.1, 0.0)), 256);
  CHECK(symmetric_difference_measure(a, b) == doctest::Approx(0.2).epsilon(1e-12));
  const Domain r1 = unit_disk(2048);
  const Domain r2(std::make_shared<Circle>(1.1), 2048);
  CHECK(symmetric_difference_measure(r1, r2) == doctest::Approx(0.21 * M_PI).epsilon(1e-4));
}

TEST_CASE("laplacian of the distance") {
  const Domain disk = unit_disk();
  CHECK(laplacian_of_distance(disk, 0.9 * Vec2(std::cos(0.001234), std::sin(0.001234))) == doctest::Approx(-1.0 / 0.9).epsilon(1e-3));
  const Domain sq = unit_square();
  CHECK(laplacian_of_distance(sq, Vec2(0.5, 0.1)) == doctest::Approx(0.0));
  CHECK(laplacian_bound(disk, 0.5) == doctest::Approx(2.0).epsilon(1e-2));
  CHECK(focal_distance(disk) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("collar depth of the peanut stays below the focal distance") {
  const Domain dom(std::make_shared<StarCurve>(0.55, 2), 1024);
  const double f = focal_distance(dom);
  const double c = default_collar_depth(dom);
  CHECK(c > 0.1);
  CHECK(c <= 0.5 * f + 1e-12);
}

TEST_CASE("polygon file input") {
  const std::string path = "test_polygon_input.txt";
  {
    FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("0 0\n0 1\n2 1\n2 0\n", f);  // clockwise
    std::fclose(f);
  }
  const Domain d(read_polygon_file(path), 64);
  CHECK(d.area() == doctest::Approx(2.0));
  CHECK(d.contains(Vec2(1.0, 0.5)));
  std::remove(path.c_str());
}

TEST_CASE("mesh quality and boundary conformity") {
  MeshParams mp;
  mp.h = 1.0 / 8.0;
  const Domain dom(std::make_shared<StarCurve>(0.55, 2), 1024);
  const Mesh m = build_mesh(dom, mp);
  CHECK_NOTHROW(validate_mesh(m));
  CHECK(min_angle(m, true) >= 20.0);
  double area = 0.0;
  for (int t = 0; t < m.n_triangles(); ++t) area += m.area(t);
  CHECK(area == doctest::Approx(mesh_domain(m, dom.curve_ptr()).area()).epsilon(1e-12));
}
