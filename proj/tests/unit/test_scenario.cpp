#include <doctest.h>

#include <losmap/errors.hpp>
#include <losmap/scenario.hpp>

#include <boost/math/distributions/poisson.hpp>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

using namespace losmap;
using namespace losmap::scenario;

namespace {

ScenarioConfig highway(double density, double cav_fraction, std::uint64_t seed)
{
  auto c = ScenarioConfig::defaults_for(ScenarioKind::highway);
  c.density = density;
  c.cav_fraction = cav_fraction;
  c.seed = seed;
  return c;
}

bool same(const WorldSnapshot& a, const WorldSnapshot& b)
{
  if (a.vehicles.size() != b.vehicles.size() || a.time != b.time)
    return false;
  for (std::size_t k = 0; k < a.vehicles.size(); ++k)
  {
    const auto& x = a.vehicles[k];
    const auto& y = b.vehicles[k];
    if (x.id != y.id || x.is_cav != y.is_cav || x.true_state.x != y.true_state.x ||
        x.true_state.y != y.true_state.y || x.true_state.vx != y.true_state.vx ||
        x.route != y.route || x.role != y.role)
      return false;
  }
  return true;
}

} // namespace

TEST_CASE("config validation names the field")
{
  auto c = highway(50, 1.0, 1);
  c.density = 0.0;
  try
  {
    c.validate();
    FAIL("expected ConfigError");
  }
  catch (const ConfigError& e)
  {
    CHECK(e.path() == "scenario.density");
  }
  c = highway(50, 1.2, 1);
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = highway(50, 1.0, 1);
  c.aoi_radius = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = highway(50, 1.0, 1);
  c.lanes.lane_count = 3;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("routes")
{
  const auto line = Route::polyline({{0, 0}, {10, 0}, {10, 5}});
  CHECK(line.length() == doctest::Approx(15.0));
  const auto p = line.at(12.0);
  CHECK(p.position.x == doctest::Approx(10.0));
  CHECK(p.position.y == doctest::Approx(2.0));
  CHECK(p.heading == doctest::Approx(std::numbers::pi / 2));

  const auto ring = Route::circle({0, 0}, 20.0);
  CHECK(ring.length() == doctest::Approx(2 * std::numbers::pi * 20.0));
  const auto q = ring.at(ring.length() / 4);
  CHECK(q.position.x == doctest::Approx(0.0).scale(1.0));
  CHECK(q.position.y == doctest::Approx(20.0));
  CHECK(q.heading == doctest::Approx(std::numbers::pi));
  CHECK_THROWS_AS(Route::polyline({{0, 0}}), InvalidArgument);
}

TEST_CASE("vehicle count follows the Poisson law of the density")
{
  // 50 veh/km on a 1 km two-lane highway: mean 50.
  const boost::math::poisson law(50.0);
  const double lo = boost::math::quantile(law, 0.005);
  const double hi = boost::math::quantile(law, 0.995);
  int outside = 0;
  double total = 0.0;
  const int seeds = 1000;
  for (int s = 0; s < seeds; ++s)
  {
    const auto w = generate(highway(50.0, 1.0, s));
    const double n = static_cast<double>(w.vehicles.size());
    total += n;
    if (n < lo || n > hi)
      ++outside;
  }
  CHECK(total / seeds == doctest::Approx(50.0).epsilon(0.02));
  // About 1% of seeds fall outside the 99% interval.
  CHECK(outside <= 25);
}

TEST_CASE("CAV flags")
{
  CHECK(generate(highway(60, 1.0, 3)).cav_count() == generate(highway(60, 1.0, 3)).vehicles.size());
  CHECK(generate(highway(60, 0.0, 3)).cav_count() == 0);

  std::size_t cavs = 0;
  std::size_t total = 0;
  for (std::uint64_t s = 0; total < 10000; ++s)
  {
    const auto w = generate(highway(70, 0.5, s));
    cavs += w.cav_count();
    total += w.vehicles.size();
  }
  CHECK(static_cast<double>(cavs) / total == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("generation is deterministic and ids are unique")
{
  for (auto kind : {ScenarioKind::highway, ScenarioKind::intersection, ScenarioKind::roundabout})
  {
    auto c = ScenarioConfig::defaults_for(kind);
    c.cav_fraction = 0.6;
    c.seed = 99;
    const auto a = generate(c);
    const auto b = generate(c);
    CHECK(same(a, b));
    std::set<NodeId> ids;
    for (const auto& v : a.vehicles)
      ids.insert(v.id);
    for (const auto& r : a.rsus)
      ids.insert(r.id);
    CHECK(ids.size() == a.vehicles.size() + a.rsus.size());
  }
}

TEST_CASE("layouts")
{
  const auto inter = generate(ScenarioConfig::defaults_for(ScenarioKind::intersection));
  CHECK(inter.static_map.obstacles.size() == 4);
  for (const auto& v : inter.vehicles)
    for (const auto& ob : inter.static_map.obstacles)
      CHECK(geometry::signed_distance(v.true_state.position(), ob.footprint) > 0.0);

  const auto round = generate(ScenarioConfig::defaults_for(ScenarioKind::roundabout));
  REQUIRE(round.rsus.size() == 1);
  CHECK(round.rsus[0].position == geometry::Point2{0.0, 0.0});

  auto bad = ScenarioConfig::defaults_for(ScenarioKind::highway);
  bad.buildings.push_back(geometry::Footprint::make_rectangle({0, 0}, 10, 10));
  CHECK_THROWS_AS(generate(bad), ConfigError);

  auto too_dense = highway(400.0, 1.0, 1);
  too_dense.min_headway = 50.0;
  CHECK_THROWS_AS(generate(too_dense), ConfigError);
}

TEST_CASE("vehicles keep the minimum headway")
{
  const auto w = generate(highway(70.0, 1.0, 5));
  for (std::size_t i = 0; i < w.vehicles.size(); ++i)
    for (std::size_t j = i + 1; j < w.vehicles.size(); ++j)
      if (w.vehicles[i].route == w.vehicles[j].route)
        CHECK(std::abs(w.vehicles[i].arc - w.vehicles[j].arc) >= 5.0);
}

TEST_CASE("stepping moves along the lane")
{
  auto w = generate(highway(30.0, 1.0, 2));
  REQUIRE(!w.vehicles.empty());
  w.vehicles[0].speed = 10.0;
  w.vehicles[0].arc = 100.0;
  const auto next = step(w, 0.1);
  CHECK(next.time == doctest::Approx(0.1));
  CHECK(next.vehicles[0].arc == doctest::Approx(101.0));
  const double moved = geometry::distance(
    w.routes[w.vehicles[0].route].at(100.0).position, next.vehicles[0].true_state.position());
  CHECK(moved == doctest::Approx(1.0));
  CHECK(next.vehicles.size() == w.vehicles.size());
  CHECK_THROWS_AS(step(w, 0.0), InvalidArgument);
}

TEST_CASE("a full revolution of the roundabout")
{
  auto c = ScenarioConfig::defaults_for(ScenarioKind::roundabout);
  c.lanes.roundabout_radius = 20.0;
  auto w = generate(c);
  std::size_t k = w.vehicles.size();
  for (std::size_t i = 0; i < w.vehicles.size(); ++i)
    if (w.routes[w.vehicles[i].route].is_circle())
      k = i;
  REQUIRE(k < w.vehicles.size());
  const double speed = w.vehicles[k].speed;
  const auto start = w.vehicles[k].true_state.position();
  const double period = 2 * std::numbers::pi * 20.0 / speed;
  const auto half = step(w, period / 2);
  CHECK(geometry::distance(start, half.vehicles[k].true_state.position()) == doctest::Approx(40.0));
  const auto full = step(w, period);
  CHECK(geometry::distance(start, full.vehicles[k].true_state.position()) ==
        doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("density stays put while stepping")
{
  auto w = generate(highway(50.0, 1.0, 7));
  const auto n0 = w.vehicles.size();
  double sum = 0.0;
  int samples = 0;
  for (int k = 0; k < 100; ++k)
  {
    w = step(w, 1.0);
    std::size_t on_road = 0;
    for (const auto& v : w.vehicles)
      if (std::abs(v.true_state.x) <= 500.0)
        ++on_road;
    sum += static_cast<double>(on_road);
    ++samples;
  }
  CHECK(w.vehicles.size() == n0);
  CHECK(sum / samples == doctest::Approx(static_cast<double>(n0)).epsilon(0.1));
}

TEST_CASE("role identification")
{
  auto c = highway(30.0, 1.0, 1);
  CHECK(c.pairing == Pairing::all_pairs);
  WorldSnapshot w;
  auto add = [&](NodeId id, double x, double vx, bool cav) {
    Vehicle v;
    v.id = id;
    v.is_cav = cav;
    v.true_state = {x, 0.0, vx, 0.0};
    w.vehicles.push_back(v);
  };
  add(0, 0.0, 10.0, true);     // AoI centre
  add(1, 75.0, -10.0, true);   // just outside, moving in
  add(2, 75.0, 10.0, true);    // just outside, moving away
  add(3, 200.0, -10.0, true);  // beyond the approach band
  add(4, 10.0, 10.0, false);   // nCAV inside
  add(5, -100.0, 10.0, true);  // inside band, moving in
  w.rsus.push_back({rsu_id_base, {0.0, 10.0}, Role::none});

  const auto r = identify_roles(w, c);
  CHECK(r.vehicles[0].role == Role::voi);
  CHECK(r.vehicles[1].role == Role::rv);
  CHECK(r.vehicles[2].role == Role::relay_candidate);
  CHECK(r.vehicles[3].role == Role::relay_candidate);
  CHECK(r.vehicles[4].role == Role::none);
  CHECK(r.vehicles[5].role == Role::rv);
  CHECK(r.rsus[0].role == Role::relay_candidate);
  REQUIRE(r.requests.size() == 2);
  CHECK(r.requests[0].rv == 1);
  CHECK(r.requests[0].voi == 0);

  add(6, 20.0, 0.0, true);  // second VoI, nearer to RV 1
  c.pairing = Pairing::nearest_voi;
  const auto nearest = identify_roles(w, c);
  CHECK(nearest.requests[0].voi == 6);
  c.pairing = Pairing::all_pairs;
  CHECK(identify_roles(w, c).requests.size() == 4);
}

TEST_CASE("trace output")
{
  const auto c = highway(30.0, 0.5, 4);
  const auto w = identify_roles(generate(c), c);
  std::ostringstream os;
  write_trace(os, w);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "time,id,is_cav,x,y,vx,vy,role");
  std::size_t rows = 0;
  while (std::getline(is, line))
  {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 7);
  }
  CHECK(rows == w.vehicles.size());
}
