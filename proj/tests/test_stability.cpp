#include "hardy/curve.hpp"
#include "hardy/errors.hpp"
#include "hardy/shape_derivative.hpp"
#include "hardy/stability.hpp"

#include <doctest.h>

#include <cmath>

using namespace hardy;

namespace {

MeshParams mesh_h(double h) {
  MeshParams m;
  m.h = h;
  return m;
}

}  // namespace

TEST_CASE("r bound arithmetic") {
  CHECK(usc_r_bound(2.0, 0.75) == doctest::Approx(2.0));
  CHECK(usc_r_bound(3.0, 0.9) == doctest::Approx(1.0 / 0.7));
}

TEST_CASE("Lipschitz sweep under dilation is flat") {
  const Domain sq(make_rectangle(1.0, 1.0), 256);
  SweepSpec spec{sq, dilation_field(Vec2(0.5, 0.5)), {0.1, 0.05}, 2.0, mesh_h(0.125), SolverParams{1e-10, 400, 80}};
  const StabilityReport r = lipschitz_continuity_check(spec);
  REQUIRE(r.rows.size() == 2);
  for (const auto& row : r.rows) {
    // Rounding of node positions at depth ~1e-10 sets the floor.
    CHECK(row.gap <= 1e-6 * row.H_base);
    CHECK_FALSE(row.above_floor);
  }
  CHECK(r.inconclusive);
  CHECK(r.pass);
}

TEST_CASE("sweep validation") {
  const Domain sq(make_rectangle(1.0, 1.0), 256);
  SweepSpec spec{sq, dilation_field(), {0.05, 0.1}, 2.0, mesh_h(0.25), {}};
  CHECK_THROWS_AS(lipschitz_continuity_check(spec), Error);
  spec.amplitudes = {};
  CHECK_THROWS_AS(lipschitz_continuity_check(spec), Error);
  spec.amplitudes = {0.1};
  spec.field = nullptr;
  CHECK_THROWS_AS(lipschitz_continuity_check(spec), Error);
}

TEST_CASE("sweeps on a domain without minimiser are reported, not run") {
  const Domain disk(std::make_shared<Circle>(1.0), 512);
  SweepSpec spec{disk, dilation_field(), {0.1, 0.05}, 2.0, mesh_h(0.25), {}};
  const StabilityReport r = upper_semicontinuity_check(spec, 3.0);
  CHECK_FALSE(r.applicability);
  CHECK_FALSE(r.pass);
  CHECK(r.rows.empty());
  CHECK_FALSE(r.note.empty());
}

TEST_CASE("T operator check on the unit disk") {
  const Domain disk(std::make_shared<Circle>(1.0), 1024);
  const TOperatorReport r = t_operator_bound_check(disk, 0.2, 3.0, 2, 11, mesh_h(0.25));
  REQUIRE(r.ratios_coarse.size() == 2);
  for (double q : r.ratios_coarse) {
    CHECK(std::isfinite(q));
    CHECK(q > 0.0);
  }
  CHECK(r.pass);
  CHECK_THROWS_AS(t_operator_bound_check(disk, 0.6, 3.0, 1, 1, mesh_h(0.25)), Error);
}

TEST_CASE("collar field is supported in the collar and reproducible") {
  const Domain disk(std::make_shared<Circle>(1.0), 1024);
  const CollarField w(disk, 0.2, 5, 0), w2(disk, 0.2, 5, 0), w3(disk, 0.2, 5, 1);
  CHECK(w(Vec2(0.0, 0.0)) == 0.0);
  CHECK(w(Vec2(0.65, 0.0)) == 0.0);
  CHECK(w(Vec2(0.9, 0.1)) != 0.0);
  CHECK(w(Vec2(0.9, 0.1)) == w2(Vec2(0.9, 0.1)));
  CHECK(w(Vec2(0.9, 0.1)) != w3(Vec2(0.9, 0.1)));
}

TEST_CASE("minimiser stability table") {
  const Domain sq(make_rectangle(1.0, 1.0), 256);
  StabilityOptions opt;
  opt.force = true;
  const StabilityTable t = minimizer_stability(sq, translation_field(Vec2(1.0, 0.0)), {0.04, 0.0}, 2.0,
                                               mesh_h(0.125), opt);
  REQUIRE(t.rows.size() == 2);
  CHECK_FALSE(t.applicability);
  CHECK(t.rows[1].pullback_gap == 0.0);
  CHECK(t.rows[1].extension_gap == 0.0);
  // A translation only moves the minimiser: the pullback gap is the baseline.
  CHECK(t.rows[0].pullback_gap <= t.noise_floor);
  CHECK(t.noise_floor >= t.translation_baseline);
}
