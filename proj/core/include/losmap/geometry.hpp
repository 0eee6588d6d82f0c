#pragma once

#include <cmath>
#include <cstdint>

namespace losmap {

using NodeId = std::uint32_t;

namespace geometry {

struct Point2
{
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend constexpr bool operator==(Point2 a, Point2 b) = default;
};

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }

/// z-component of the 2-D cross product a x b.
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }

inline double norm(Point2 p) { return std::hypot(p.x, p.y); }

inline double distance(Point2 a, Point2 b) { return norm(b - a); }

/// Coordinates of a point in the frame of a link: `u` along the
/// transmitter-to-receiver direction, `v` positive to the left of it.
struct LinkFramePoint
{
  double u = 0.0;
  double v = 0.0;
};

/// Axis-aligned rectangle in link-frame coordinates.
struct LinkFrameRect
{
  double u_min = 0.0;
  double u_max = 0.0;
  double v_min = 0.0;
  double v_max = 0.0;

  double area() const { return (u_max - u_min) * (v_max - v_min); }
};

/// Planar outline of an object. Rectangles are oriented by `heading`
/// (radians, counter-clockwise from +x); `half_length` runs along the
/// heading and `half_width` across it.
struct Footprint
{
  enum class Kind { rectangle, disc };

  Kind kind = Kind::disc;
  Point2 center;
  double half_length = 0.0;
  double half_width = 0.0;
  double radius = 0.0;
  double heading = 0.0;

  /// Throws InvalidArgument for nonpositive extents.
  static Footprint make_rectangle(
    Point2 center, double half_length, double half_width, double heading = 0.0);

  /// Throws InvalidArgument for a nonpositive radius.
  static Footprint make_disc(Point2 center, double radius);
};

/// Throws DegenerateLinkError when `tx == rx`.
LinkFramePoint to_link_frame(Point2 tx, Point2 rx, Point2 p);

/// Set of blocker centres whose disc of radius `blocker_half_width` touches
/// the segment tx-rx, as a link-frame rectangle
/// `[-w, d + w] x [-w, w]`.
LinkFrameRect blockage_region(Point2 tx, Point2 rx, double blocker_half_width);

/// True iff the open segment tx-rx passes through the interior of `f`.
/// Touching the boundary does not count.
bool segment_intersects_footprint(Point2 tx, Point2 rx, const Footprint& f);

/// Signed distance from `p` to the boundary of `f`; negative inside.
double signed_distance(Point2 p, const Footprint& f);

} // namespace geometry
} // namespace losmap
