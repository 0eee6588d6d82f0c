#include "losmap/geometry.hpp"

#include "losmap/errors.hpp"

#include <algorithm>
#include <limits>

namespace losmap::geometry {

Footprint Footprint::make_rectangle(
  Point2 center, double half_length, double half_width, double heading)
{
  if (!(half_length > 0.0) || !(half_width > 0.0))
    throw InvalidArgument("rectangle footprint needs positive half extents");

  Footprint f;
  f.kind = Kind::rectangle;
  f.center = center;
  f.half_length = half_length;
  f.half_width = half_width;
  f.heading = heading;
  return f;
}

Footprint Footprint::make_disc(Point2 center, double radius)
{
  if (!(radius > 0.0))
    throw InvalidArgument("disc footprint needs a positive radius");

  Footprint f;
  f.kind = Kind::disc;
  f.center = center;
  f.radius = radius;
  return f;
}

LinkFramePoint to_link_frame(Point2 tx, Point2 rx, Point2 p)
{
  const Point2 axis = rx - tx;
  const double d = norm(axis);
  if (d == 0.0)
    throw DegenerateLinkError();

  const Point2 e = (1.0 / d) * axis;
  const Point2 rel = p - tx;
  return {dot(rel, e), cross(e, rel)};
}

LinkFrameRect blockage_region(Point2 tx, Point2 rx, double blocker_half_width)
{
  const double d = distance(tx, rx);
  if (d == 0.0)
    throw DegenerateLinkError();
  if (!(blocker_half_width > 0.0))
    throw InvalidArgument("blocker half width must be positive");

  const double w = blocker_half_width;
  return {-w, d + w, -w, w};
}

namespace {

// Express `p` in the rectangle's body frame (x along the heading).
Point2 to_body(Point2 p, const Footprint& f)
{
  const double c = std::cos(f.heading);
  const double s = std::sin(f.heading);
  const Point2 rel = p - f.center;
  return {c * rel.x + s * rel.y, -s * rel.x + c * rel.y};
}

// Parameter interval of `p0 + t * dir` lying strictly inside (-h, h).
// Returns false when the line never enters the open slab.
bool slab_interval(double p0, double dir, double h, double& lo, double& hi)
{
  if (dir == 0.0)
  {
    if (!(std::abs(p0) < h))
      return false;
    return true;
  }

  double t1 = (-h - p0) / dir;
  double t2 = (h - p0) / dir;
  if (t1 > t2)
    std::swap(t1, t2);
  lo = std::max(lo, t1);
  hi = std::min(hi, t2);
  return true;
}

} // namespace

bool segment_intersects_footprint(Point2 tx, Point2 rx, const Footprint& f)
{
  if (tx == rx)
    return false;

  if (f.kind == Footprint::Kind::disc)
  {
    const Point2 seg = rx - tx;
    const double t = std::clamp(dot(f.center - tx, seg) / dot(seg, seg), 0.0, 1.0);
    const Point2 closest = tx + t * seg;
    return distance(closest, f.center) < f.radius;
  }

  const Point2 a = to_body(tx, f);
  const Point2 b = to_body(rx, f);
  const Point2 dir = b - a;

  double lo = 0.0;
  double hi = 1.0;
  if (!slab_interval(a.x, dir.x, f.half_length, lo, hi))
    return false;
  if (!slab_interval(a.y, dir.y, f.half_width, lo, hi))
    return false;
  return lo < hi;
}

double signed_distance(Point2 p, const Footprint& f)
{
  if (f.kind == Footprint::Kind::disc)
    return distance(p, f.center) - f.radius;

  const Point2 q = to_body(p, f);
  const double dx = std::abs(q.x) - f.half_length;
  const double dy = std::abs(q.y) - f.half_width;
  const double outside = std::hypot(std::max(dx, 0.0), std::max(dy, 0.0));
  const double inside = std::min(std::max(dx, dy), 0.0);
  return outside + inside;
}

} // namespace losmap::geometry
