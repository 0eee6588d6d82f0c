#include "losmap/scenario.hpp"

#include "losmap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>

namespace losmap::scenario {

using geometry::Footprint;
using geometry::Point2;

std::string_view to_string(ScenarioKind k)
{
  switch (k)
  {
    case ScenarioKind::highway: return "highway";
    case ScenarioKind::intersection: return "intersection";
    case ScenarioKind::roundabout: return "roundabout";
  }
  return "?";
}

std::string_view to_string(Role r)
{
  switch (r)
  {
    case Role::none: return "none";
    case Role::rv: return "rv";
    case Role::voi: return "voi";
    case Role::relay_candidate: return "relay";
  }
  return "?";
}

namespace {

void require(bool ok, const char* path, const char* message)
{
  if (!ok)
    throw ConfigError(path, message);
}

unsigned lanes_per_direction(const LaneGeometry& g)
{
  return g.lane_count / 2;
}

double road_half_width(const LaneGeometry& g)
{
  return lanes_per_direction(g) * g.lane_width;
}

double roundabout_outer_radius(const LaneGeometry& g)
{
  return g.roundabout_radius + (lanes_per_direction(g) - 0.5) * g.lane_width;
}

Point2 rotate(Point2 p, int quarter_turns)
{
  Point2 out = p;
  for (int i = 0; i < quarter_turns; ++i)
    out = {-out.y, out.x};
  return out;
}

} // namespace

void ScenarioConfig::validate() const
{
  require(std::isfinite(density) && density > 0.0, "scenario.density", "must be positive");
  require(cav_fraction >= 0.0 && cav_fraction <= 1.0, "scenario.cav_fraction", "must lie in [0, 1]");
  require(std::isfinite(aoi_radius) && aoi_radius > 0.0, "scenario.aoi_radius", "must be positive");
  require(lanes.lane_count >= 2 && lanes.lane_count % 2 == 0,
          "scenario.lanes.lane_count", "must be an even number of at least 2");
  require(lanes.lane_width > 0.0, "scenario.lanes.lane_width", "must be positive");
  require(lanes.roundabout_radius > 0.0, "scenario.lanes.roundabout_radius", "must be positive");
  require(lanes.road_half_length > 0.0, "scenario.lanes.road_half_length", "must be positive");
  if (kind == ScenarioKind::roundabout)
  {
    require(lanes.road_half_length > roundabout_outer_radius(lanes) + lanes.lane_width,
            "scenario.lanes.road_half_length", "arms must extend past the roundabout ring");
    require(lanes.roundabout_radius > road_half_width(lanes),
            "scenario.lanes.roundabout_radius", "ring must be wider than the arms");
  }
  if (kind == ScenarioKind::intersection)
  {
    require(lanes.road_half_length > road_half_width(lanes) + building_setback,
            "scenario.lanes.road_half_length", "roads must extend past the junction");
  }
  require(building_setback >= 0.0, "scenario.building_setback", "must be nonnegative");
  require(building_size > 0.0, "scenario.building_size", "must be positive");
  require(min_speed > 0.0, "scenario.speed_range", "minimum speed must be positive");
  require(max_speed >= min_speed, "scenario.speed_range", "maximum below minimum");
  require(min_headway >= 0.0, "scenario.min_headway", "must be nonnegative");
  require(vehicle_length > 0.0, "scenario.vehicle_length", "must be positive");
  require(vehicle_width > 0.0, "scenario.vehicle_width", "must be positive");
  require(turn_probability >= 0.0 && turn_probability <= 1.0,
          "scenario.turn_probability", "must lie in [0, 1]");
  require(approach_band >= 1.0, "scenario.approach_band", "must be at least 1");
}

ScenarioConfig ScenarioConfig::defaults_for(ScenarioKind kind)
{
  ScenarioConfig c;
  c.kind = kind;
  switch (kind)
  {
    case ScenarioKind::highway:
      c.lanes.road_half_length = 500.0;
      c.aoi_radius = 70.0;
      break;
    case ScenarioKind::intersection:
      c.lanes.road_half_length = 150.0;
      c.aoi_radius = 70.0;
      c.rsu_positions = {{road_half_width(c.lanes) + 1.0, road_half_width(c.lanes) + 1.0}};
      break;
    case ScenarioKind::roundabout:
      c.lanes.road_half_length = 180.0;
      c.aoi_radius = 90.0;
      c.rsu_positions = {{0.0, 0.0}};
      break;
  }
  return c;
}

Route Route::polyline(std::vector<Point2> points)
{
  if (points.size() < 2)
    throw InvalidArgument("a route needs at least two points");
  Route r;
  r._points = std::move(points);
  r._cumulative.assign(1, 0.0);
  for (std::size_t i = 1; i < r._points.size(); ++i)
  {
    const double seg = geometry::distance(r._points[i - 1], r._points[i]);
    if (!(seg > 0.0))
      throw InvalidArgument("route has a zero-length segment");
    r._cumulative.push_back(r._cumulative.back() + seg);
  }
  r._length = r._cumulative.back();
  return r;
}

Route Route::circle(Point2 center, double radius)
{
  if (!(radius > 0.0))
    throw InvalidArgument("circular route needs a positive radius");
  Route r;
  r._circle = true;
  r._center = center;
  r._radius = radius;
  r._length = 2.0 * std::numbers::pi * radius;
  return r;
}

Pose Route::at(double arc) const
{
  if (_circle)
  {
    const double theta = arc / _radius;
    return {{_center.x + _radius * std::cos(theta), _center.y + _radius * std::sin(theta)},
            theta + 0.5 * std::numbers::pi};
  }

  arc = std::clamp(arc, 0.0, _length);
  const auto it = std::upper_bound(_cumulative.begin(), _cumulative.end(), arc);
  std::size_t seg = static_cast<std::size_t>(it - _cumulative.begin());
  seg = std::clamp<std::size_t>(seg, 1, _points.size() - 1);
  const Point2 a = _points[seg - 1];
  const Point2 b = _points[seg];
  const double len = _cumulative[seg] - _cumulative[seg - 1];
  const double t = (arc - _cumulative[seg - 1]) / len;
  return {a + t * (b - a), std::atan2(b.y - a.y, b.x - a.x)};
}

std::size_t WorldSnapshot::cav_count() const
{
  return static_cast<std::size_t>(
    std::count_if(vehicles.begin(), vehicles.end(), [](const Vehicle& v) { return v.is_cav; }));
}

namespace {

/// A lane vehicles are placed on. `turn_route` is the alternative route a
/// vehicle may take, sharing the lane up to `turn_arc`.
struct Lane
{
  std::size_t route = 0;
  std::size_t lanes_on_road = 1;
  std::optional<std::size_t> turn_route;
  double turn_arc = 0.0;
};

struct Layout
{
  std::vector<Route> routes;
  std::vector<Lane> lanes;
  std::vector<channel::Obstacle> obstacles;
};

void add_corner_buildings(Layout& out, const ScenarioConfig& c, double inner)
{
  if (!c.corner_buildings)
    return;
  const double half = 0.5 * c.building_size;
  for (int q = 0; q < 4; ++q)
  {
    const Point2 centre = rotate({inner + half, inner + half}, q);
    out.obstacles.push_back(
      {channel::ObstacleKind::building, Footprint::make_rectangle(centre, half, half)});
  }
}

Layout highway_layout(const ScenarioConfig& c)
{
  Layout out;
  const unsigned per_dir = lanes_per_direction(c.lanes);
  const double w = c.lanes.lane_width;
  const double h = c.lanes.road_half_length;
  for (unsigned j = 0; j < per_dir; ++j)
  {
    const double off = (j + 0.5) * w;
    out.routes.push_back(Route::polyline({{-h, -off}, {h, -off}}));
    out.lanes.push_back({out.routes.size() - 1, 2 * per_dir, std::nullopt, 0.0});
    out.routes.push_back(Route::polyline({{h, off}, {-h, off}}));
    out.lanes.push_back({out.routes.size() - 1, 2 * per_dir, std::nullopt, 0.0});
  }
  return out;
}

Layout intersection_layout(const ScenarioConfig& c)
{
  Layout out;
  const unsigned per_dir = lanes_per_direction(c.lanes);
  const double w = c.lanes.lane_width;
  const double h = c.lanes.road_half_length;
  // Eastbound template, rotated a quarter turn per approach. The right turn
  // leaves at the first crossing lane heading south.
  for (int q = 0; q < 4; ++q)
  {
    for (unsigned j = 0; j < per_dir; ++j)
    {
      const double off = (j + 0.5) * w;
      out.routes.push_back(Route::polyline({rotate({-h, -off}, q), rotate({h, -off}, q)}));
      Lane lane{out.routes.size() - 1, 2 * per_dir, std::nullopt, 0.0};
      if (c.turn_probability > 0.0)
      {
        out.routes.push_back(Route::polyline(
          {rotate({-h, -off}, q), rotate({-off, -off}, q), rotate({-off, -h}, q)}));
        lane.turn_route = out.routes.size() - 1;
        lane.turn_arc = h - off;
      }
      out.lanes.push_back(lane);
    }
  }
  add_corner_buildings(out, c, road_half_width(c.lanes) + c.building_setback);
  return out;
}

Layout roundabout_layout(const ScenarioConfig& c)
{
  Layout out;
  const unsigned per_dir = lanes_per_direction(c.lanes);
  const double w = c.lanes.lane_width;
  const double h = c.lanes.road_half_length;
  const double ring_edge = roundabout_outer_radius(c.lanes) + 0.5 * w;

  for (unsigned j = 0; j < per_dir; ++j)
  {
    out.routes.push_back(Route::circle({0.0, 0.0}, c.lanes.roundabout_radius + j * w));
    out.lanes.push_back({out.routes.size() - 1, per_dir, std::nullopt, 0.0});
  }
  // Eastern arm template: inbound to the north of the axis, outbound south.
  for (int q = 0; q < 4; ++q)
  {
    for (unsigned j = 0; j < per_dir; ++j)
    {
      const double off = (j + 0.5) * w;
      const double start = std::sqrt(std::max(ring_edge * ring_edge - off * off, 0.0));
      out.routes.push_back(Route::polyline({rotate({h, off}, q), rotate({start, off}, q)}));
      out.lanes.push_back({out.routes.size() - 1, 2 * per_dir, std::nullopt, 0.0});
      out.routes.push_back(Route::polyline({rotate({start, -off}, q), rotate({h, -off}, q)}));
      out.lanes.push_back({out.routes.size() - 1, 2 * per_dir, std::nullopt, 0.0});
    }
  }
  const double inner = std::max(
    road_half_width(c.lanes) + c.building_setback,
    (ring_edge + c.building_setback) / std::numbers::sqrt2);
  add_corner_buildings(out, c, inner);
  return out;
}

Layout layout_for(const ScenarioConfig& c)
{
  switch (c.kind)
  {
    case ScenarioKind::highway: return highway_layout(c);
    case ScenarioKind::intersection: return intersection_layout(c);
    case ScenarioKind::roundabout: return roundabout_layout(c);
  }
  return highway_layout(c);
}

void place(Vehicle& v, const std::vector<Route>& routes, double length, double width)
{
  const Pose pose = routes[v.route].at(v.arc);
  const double c = std::cos(pose.heading);
  const double s = std::sin(pose.heading);
  v.true_state = {pose.position.x, pose.position.y, v.speed * c, v.speed * s};
  v.footprint = Footprint::make_rectangle(pose.position, 0.5 * length, 0.5 * width, pose.heading);
}

void check_obstacles(const Layout& layout, const ScenarioConfig& c)
{
  for (const auto& ob : layout.obstacles)
  {
    for (const auto& route : layout.routes)
    {
      if (route.is_circle())
      {
        for (int k = 0; k < 720; ++k)
        {
          const double arc = route.length() * k / 720.0;
          if (geometry::signed_distance(route.at(arc).position, ob.footprint) < 0.0)
            throw ConfigError("scenario.buildings", "obstacle overlaps the roundabout ring");
        }
        continue;
      }
      const auto& pts = route.points();
      for (std::size_t i = 1; i < pts.size(); ++i)
      {
        if (geometry::segment_intersects_footprint(pts[i - 1], pts[i], ob.footprint))
          throw ConfigError(
            ob.kind == channel::ObstacleKind::building ? "scenario.buildings" : "scenario.foliage",
            "obstacle overlaps a lane");
      }
    }
  }
  for (const auto& p : c.rsu_positions)
  {
    for (const auto& ob : layout.obstacles)
    {
      if (geometry::signed_distance(p, ob.footprint) < 0.0)
        throw ConfigError("scenario.rsu_positions", "RSU placed inside an obstacle");
    }
  }
}

} // namespace

WorldSnapshot generate(const ScenarioConfig& config)
{
  config.validate();

  Layout layout = layout_for(config);
  for (const auto& f : config.buildings)
    layout.obstacles.push_back({channel::ObstacleKind::building, f});
  for (const auto& f : config.foliage)
    layout.obstacles.push_back({channel::ObstacleKind::foliage, f});
  check_obstacles(layout, config);

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  WorldSnapshot world;
  world.routes = layout.routes;
  world.static_map.obstacles = layout.obstacles;

  NodeId next_id = 0;
  for (const Lane& lane : layout.lanes)
  {
    const Route& route = world.routes[lane.route];
    // Density is per km of road; a road carries `lanes_on_road` lanes.
    const double mean = config.density * route.length() / 1000.0 / lane.lanes_on_road;
    std::poisson_distribution<unsigned> count_dist(mean);
    const unsigned count = count_dist(rng);

    std::vector<double> arcs;
    arcs.reserve(count);
    for (unsigned k = 0; k < count; ++k)
    {
      bool placed = false;
      for (int attempt = 0; attempt < 10000 && !placed; ++attempt)
      {
        const double s = unit(rng) * route.length();
        placed = std::none_of(arcs.begin(), arcs.end(), [&](double o) {
          double gap = std::abs(o - s);
          if (route.is_circle())
            gap = std::min(gap, route.length() - gap);
          return gap < config.min_headway;
        });
        if (placed)
          arcs.push_back(s);
      }
      if (!placed)
        throw ConfigError("scenario.density", "too dense to respect the minimum headway");
    }
    std::sort(arcs.begin(), arcs.end());

    for (double s : arcs)
    {
      Vehicle v;
      v.id = next_id++;
      v.route = lane.route;
      v.arc = s;
      v.speed = config.min_speed + unit(rng) * (config.max_speed - config.min_speed);
      v.is_cav = unit(rng) < config.cav_fraction;
      if (lane.turn_route && s < lane.turn_arc && unit(rng) < config.turn_probability)
        v.route = *lane.turn_route;
      place(v, world.routes, config.vehicle_length, config.vehicle_width);
      world.vehicles.push_back(v);
    }
  }

  for (std::size_t k = 0; k < config.rsu_positions.size(); ++k)
  {
    world.rsus.push_back(
      {rsu_id_base + static_cast<NodeId>(k), config.rsu_positions[k], Role::relay_candidate});
  }
  return world;
}

WorldSnapshot step(const WorldSnapshot& world, double dt)
{
  if (!(dt > 0.0))
    throw InvalidArgument("step needs a positive dt");

  WorldSnapshot out = world;
  out.time = world.time + dt;
  for (Vehicle& v : out.vehicles)
  {
    const Route& route = out.routes[v.route];
    v.arc = std::fmod(v.arc + v.speed * dt, route.length());
    const double length = 2.0 * v.footprint.half_length;
    const double width = 2.0 * v.footprint.half_width;
    place(v, out.routes, length, width);
  }
  return out;
}

WorldSnapshot identify_roles(const WorldSnapshot& world, const ScenarioConfig& config)
{
  WorldSnapshot out = world;
  out.requests.clear();

  const Point2 c = config.aoi_center;
  const double band = config.approach_band * config.aoi_radius;
  std::vector<std::size_t> rvs;
  std::vector<std::size_t> vois;
  for (std::size_t k = 0; k < out.vehicles.size(); ++k)
  {
    Vehicle& v = out.vehicles[k];
    if (!v.is_cav)
    {
      v.role = Role::none;
      continue;
    }
    const Point2 rel = v.true_state.position() - c;
    const double range = geometry::norm(rel);
    const double range_rate = geometry::dot(rel, {v.true_state.vx, v.true_state.vy});
    if (range <= config.aoi_radius)
    {
      v.role = Role::voi;
      vois.push_back(k);
    }
    else if (range <= band && range_rate < 0.0)
    {
      v.role = Role::rv;
      rvs.push_back(k);
    }
    else
    {
      v.role = Role::relay_candidate;
    }
  }
  for (Rsu& r : out.rsus)
    r.role = Role::relay_candidate;

  if (vois.empty())
    return out;

  for (std::size_t rv : rvs)
  {
    const Point2 p = out.vehicles[rv].true_state.position();
    if (config.pairing == Pairing::all_pairs)
    {
      for (std::size_t voi : vois)
        out.requests.push_back({out.vehicles[rv].id, out.vehicles[voi].id});
      continue;
    }
    std::size_t best = vois.front();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t voi : vois)
    {
      const double d = geometry::distance(p, out.vehicles[voi].true_state.position());
      if (d < best_d)
      {
        best_d = d;
        best = voi;
      }
    }
    out.requests.push_back({out.vehicles[rv].id, out.vehicles[best].id});
  }
  return out;
}

void write_trace(std::ostream& os, const WorldSnapshot& world, bool header)
{
  if (header)
    os << "time,id,is_cav,x,y,vx,vy,role\n";
  char buf[256];
  for (const Vehicle& v : world.vehicles)
  {
    std::snprintf(buf, sizeof buf, "%.9g,%u,%d,%.9g,%.9g,%.9g,%.9g,%s\n",
                  world.time, v.id, v.is_cav ? 1 : 0,
                  v.true_state.x, v.true_state.y, v.true_state.vx, v.true_state.vy,
                  std::string(to_string(v.role)).c_str());
    os << buf;
  }
}

} // namespace losmap::scenario
