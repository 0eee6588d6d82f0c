#pragma once

#include "losmap/channel.hpp"
#include "losmap/geometry.hpp"
#include "losmap/sensing.hpp"

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace losmap::scenario {

enum class ScenarioKind { highway, intersection, roundabout };

std::string_view to_string(ScenarioKind k);

enum class Role { none, rv, voi, relay_candidate };

std::string_view to_string(Role r);

enum class Pairing { nearest_voi, all_pairs };

struct LaneGeometry
{
  /// Lanes per road, split evenly between the two travel directions.
  unsigned lane_count = 2;
  double lane_width = 3.5;
  /// Half length of each straight road (or of each roundabout arm measured
  /// from the centre).
  double road_half_length = 500.0;
  double roundabout_radius = 25.0;
};

struct ScenarioConfig
{
  ScenarioKind kind = ScenarioKind::highway;
  double density = 50.0;          ///< vehicles per km of road
  double cav_fraction = 1.0;
  geometry::Point2 aoi_center;
  double aoi_radius = 70.0;
  std::vector<geometry::Point2> rsu_positions;
  LaneGeometry lanes;

  /// Additional static obstacles on top of the kind's default layout.
  std::vector<geometry::Footprint> buildings;
  std::vector<geometry::Footprint> foliage;
  /// Corner building blocks of the intersection and roundabout layouts.
  bool corner_buildings = true;
  double building_setback = 2.0;
  double building_size = 60.0;

  double min_speed = 8.0;
  double max_speed = 14.0;
  double min_headway = 5.0;
  double vehicle_length = 4.5;
  double vehicle_width = 1.8;
  /// Probability that an intersection vehicle takes a right turn.
  double turn_probability = 0.0;

  /// RVs are searched up to this multiple of the AoI radius.
  double approach_band = 2.0;
  Pairing pairing = Pairing::all_pairs;
  std::uint64_t seed = 1;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  /// Kind-specific defaults: road lengths, AoI radius and RSU placement.
  static ScenarioConfig defaults_for(ScenarioKind kind);
};

/// Pose of a vehicle along its route.
struct Pose
{
  geometry::Point2 position;
  double heading = 0.0;
};

/// Path followed by a vehicle, parametrised by arc length. Polylines respawn
/// at their start when completed; circles wrap around counter-clockwise.
class Route
{
public:
  static Route polyline(std::vector<geometry::Point2> points);
  static Route circle(geometry::Point2 center, double radius);

  double length() const { return _length; }
  bool is_circle() const { return _circle; }
  Pose at(double arc) const;
  const std::vector<geometry::Point2>& points() const { return _points; }

private:
  bool _circle = false;
  std::vector<geometry::Point2> _points;
  std::vector<double> _cumulative;
  geometry::Point2 _center;
  double _radius = 0.0;
  double _length = 0.0;
};

struct Vehicle
{
  NodeId id = 0;
  bool is_cav = false;
  sensing::ObjectState true_state;
  geometry::Footprint footprint;
  std::size_t route = 0;
  double arc = 0.0;
  double speed = 0.0;
  Role role = Role::none;
};

struct Rsu
{
  NodeId id = 0;
  geometry::Point2 position;
  Role role = Role::relay_candidate;
};

struct LinkRequest
{
  NodeId rv = 0;
  NodeId voi = 0;
};

struct WorldSnapshot
{
  double time = 0.0;
  std::vector<Vehicle> vehicles;
  std::vector<Rsu> rsus;
  std::vector<Route> routes;
  channel::StaticMap static_map;
  std::vector<LinkRequest> requests;

  std::size_t cav_count() const;
};

/// First RSU id; vehicles are numbered from zero.
inline constexpr NodeId rsu_id_base = 100000;

/// Places vehicles on the kind's lanes by a per-lane Poisson process with a
/// minimum headway, draws speeds and CAV flags from the seed, and lays out
/// the static map. Deterministic in the config.
WorldSnapshot generate(const ScenarioConfig& config);

/// Advances every vehicle along its route by `speed * dt`.
WorldSnapshot step(const WorldSnapshot& world, double dt);

/// Assigns VoI / RV / relay roles relative to the AoI and forms the RV-VoI
/// request list.
WorldSnapshot identify_roles(const WorldSnapshot& world, const ScenarioConfig& config);

/// Text trace: header `time,id,is_cav,x,y,vx,vy,role`, one vehicle per line.
void write_trace(std::ostream& os, const WorldSnapshot& world, bool header = true);

} // namespace losmap::scenario
