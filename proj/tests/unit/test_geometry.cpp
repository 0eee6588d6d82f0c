#include <doctest.h>

#include <losmap/errors.hpp>
#include <losmap/geometry.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace losmap;
using namespace losmap::geometry;

namespace {

// Point strictly inside a rotated rectangle, by projecting on its axes.
bool inside_rectangle(Point2 p, Point2 c, double hl, double hw, double heading)
{
  const double ux = std::cos(heading);
  const double uy = std::sin(heading);
  const double rx = p.x - c.x;
  const double ry = p.y - c.y;
  return std::abs(rx * ux + ry * uy) < hl && std::abs(-rx * uy + ry * ux) < hw;
}

} // namespace

TEST_CASE("link frame of a horizontal link")
{
  const auto p = to_link_frame({0, 0}, {10, 0}, {3, 2});
  CHECK(p.u == doctest::Approx(3.0));
  CHECK(p.v == doctest::Approx(2.0));

  const auto q = to_link_frame({0, 0}, {10, 0}, {3, -2});
  CHECK(q.v == doctest::Approx(-2.0));
}

TEST_CASE("link frame v axis points left of the direction of travel")
{
  // Link heading north: a point to the west is on the left.
  const auto p = to_link_frame({0, 0}, {0, 5}, {-1, 2});
  CHECK(p.u == doctest::Approx(2.0));
  CHECK(p.v == doctest::Approx(1.0));
}

TEST_CASE("link frame preserves distances")
{
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int k = 0; k < 200; ++k)
  {
    const Point2 tx{u(rng), u(rng)};
    const Point2 rx{u(rng), u(rng)};
    const Point2 p{u(rng), u(rng)};
    const auto f = to_link_frame(tx, rx, p);
    CHECK(std::hypot(f.u, f.v) == doctest::Approx(distance(tx, p)).epsilon(1e-12));
  }
}

TEST_CASE("zero-length link is rejected")
{
  CHECK_THROWS_AS(to_link_frame({1, 1}, {1, 1}, {0, 0}), DegenerateLinkError);
  CHECK_THROWS_AS(blockage_region({1, 1}, {1, 1}, 0.9), DegenerateLinkError);
}

TEST_CASE("blockage region spans the link plus the half width")
{
  const auto r = blockage_region({0, 0}, {30, 40}, 0.9);
  CHECK(r.u_min == doctest::Approx(-0.9));
  CHECK(r.u_max == doctest::Approx(50.9));
  CHECK(r.v_min == doctest::Approx(-0.9));
  CHECK(r.v_max == doctest::Approx(0.9));
  CHECK(r.area() == doctest::Approx(51.8 * 1.8));
  CHECK_THROWS_AS(blockage_region({0, 0}, {1, 0}, 0.0), InvalidArgument);
}

TEST_CASE("footprint factories validate extents")
{
  CHECK_THROWS_AS(Footprint::make_rectangle({0, 0}, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(Footprint::make_rectangle({0, 0}, 1.0, -1.0), InvalidArgument);
  CHECK_THROWS_AS(Footprint::make_disc({0, 0}, 0.0), InvalidArgument);
  CHECK(Footprint::make_disc({1, 2}, 3.0).radius == 3.0);
}

TEST_CASE("segment against an axis-aligned rectangle")
{
  const auto f = Footprint::make_rectangle({5, 0}, 2.25, 0.9);
  CHECK(segment_intersects_footprint({0, 0}, {10, 0}, f));
  CHECK(segment_intersects_footprint({0, 0.5}, {10, 0.5}, f));
  CHECK_FALSE(segment_intersects_footprint({0, 2}, {10, 2}, f));
  // Grazing the long edge is not a crossing.
  CHECK_FALSE(segment_intersects_footprint({0, 0.9}, {10, 0.9}, f));
  // Segment ending before the rectangle.
  CHECK_FALSE(segment_intersects_footprint({0, 0}, {2.5, 0}, f));
  // Segment fully inside.
  CHECK(segment_intersects_footprint({4.5, 0}, {5.5, 0.1}, f));
  CHECK_FALSE(segment_intersects_footprint({5, 0}, {5, 0}, f));
}

TEST_CASE("segment against a rotated rectangle and a disc")
{
  const auto f = Footprint::make_rectangle({0, 0}, 2.0, 0.5, std::numbers::pi / 4);
  // Along the rotated long axis.
  CHECK(segment_intersects_footprint({-3, -3}, {3, 3}, f));
  // Perpendicular lines inside and beyond the half length.
  CHECK(segment_intersects_footprint({-3, 3 + 1.0}, {3, -3 + 1.0}, f));
  CHECK_FALSE(segment_intersects_footprint({-3, 3 + 3.0}, {3, -3 + 3.0}, f));
  // Parallel line offset beyond the half width.
  CHECK_FALSE(segment_intersects_footprint({-3, -3 + 1.0}, {3, 3 + 1.0}, f));

  const auto d = Footprint::make_disc({0, 0}, 1.0);
  CHECK(segment_intersects_footprint({-2, 0.5}, {2, 0.5}, d));
  CHECK_FALSE(segment_intersects_footprint({-2, 1.0}, {2, 1.0}, d));
  CHECK_FALSE(segment_intersects_footprint({2, 0}, {5, 0}, d));
}

TEST_CASE("segment crossing agrees with dense point sampling")
{
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-10.0, 10.0);
  std::uniform_real_distribution<double> ext(0.3, 3.0);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  int disagreements = 0;
  for (int k = 0; k < 500; ++k)
  {
    const Point2 c{pos(rng), pos(rng)};
    const double hl = ext(rng);
    const double hw = ext(rng);
    const double h = ang(rng);
    const Point2 a{pos(rng), pos(rng)};
    const Point2 b{pos(rng), pos(rng)};

    bool sampled = false;
    for (int s = 0; s <= 20000 && !sampled; ++s)
      sampled = inside_rectangle(a + (s / 20000.0) * (b - a), c, hl, hw, h);

    const bool exact = segment_intersects_footprint(a, b, Footprint::make_rectangle(c, hl, hw, h));
    // Sampling can only miss a crossing thinner than the sample spacing.
    if (sampled && !exact)
      ++disagreements;
    if (!sampled && exact)
      ++disagreements;
  }
  CHECK(disagreements <= 2);
}

TEST_CASE("signed distance")
{
  const auto r = Footprint::make_rectangle({0, 0}, 2.0, 1.0);
  CHECK(signed_distance({0, 0}, r) == doctest::Approx(-1.0));
  CHECK(signed_distance({5, 0}, r) == doctest::Approx(3.0));
  CHECK(signed_distance({5, 5}, r) == doctest::Approx(5.0));
  const auto d = Footprint::make_disc({1, 1}, 2.0);
  CHECK(signed_distance({1, 1}, d) == doctest::Approx(-2.0));
  CHECK(signed_distance({4, 5}, d) == doctest::Approx(3.0));
}
