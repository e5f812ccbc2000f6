#include "hardy/domain.hpp"
#include "hardy/errors.hpp"

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>

namespace hardy {

namespace {

namespace bg = boost::geometry;
using BPoint = bg::model::d2::point_xy<double>;
// Counter-clockwise, open rings.
using BPolygon = bg::model::polygon<BPoint, false, false>;
using BMulti = bg::model::multi_polygon<BPolygon>;

BPolygon to_boost(const Domain& d) {
  BPolygon poly;
  for (const auto& v : d.vertices()) bg::append(poly.outer(), BPoint(v.x(), v.y()));
  bg::correct(poly);
  std::string reason;
  if (!bg::is_valid(poly, reason)) throw Error(ErrorKind::geometry_failure, "invalid polygon: " + reason);
  return poly;
}

}  // namespace

double symmetric_difference_measure(const Domain& a, const Domain& b) {
  const BPolygon pa = to_boost(a), pb = to_boost(b);
  BMulti diff;
  bg::sym_difference(pa, pb, diff);
  const double area = bg::area(diff);
  if (!(area >= 0) || area > a.area() + b.area() * (1.0 + 1e-12))
    throw Error(ErrorKind::geometry_failure, "degenerate clip result");
  return area;
}

}  // namespace hardy
