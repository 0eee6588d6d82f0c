#include "losmap/errors.hpp"
#include "losmap/experiment.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace losmap::experiment {

namespace {

using json = nlohmann::json;

/// View of one JSON object that remembers which keys were read, so that
/// leftovers can be reported as unknown.
class Section
{
public:
  Section(const json& j, std::string path) : _j(j), _path(std::move(path))
  {
    if (!_j.is_object())
      throw ConfigError(_path.empty() ? "<root>" : _path, "expected an object");
  }

  std::string path_of(const std::string& key) const
  {
    return _path.empty() ? key : _path + "." + key;
  }

  const json* find(const std::string& key)
  {
    _seen.insert(key);
    const auto it = _j.find(key);
    return it == _j.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out)
  {
    if (const json* v = find(key))
    {
      if (!v->is_number())
        throw ConfigError(path_of(key), "expected a number");
      out = v->get<double>();
    }
  }

  template <typename Int>
  void integer(const std::string& key, Int& out)
  {
    if (const json* v = find(key))
    {
      if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() && v->get<long long>() < 0))
        throw ConfigError(path_of(key), "expected a nonnegative integer");
      out = v->get<Int>();
    }
  }

  void boolean(const std::string& key, bool& out)
  {
    if (const json* v = find(key))
    {
      if (!v->is_boolean())
        throw ConfigError(path_of(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out)
  {
    if (const json* v = find(key))
    {
      if (!v->is_string())
        throw ConfigError(path_of(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void numbers(const std::string& key, std::vector<double>& out)
  {
    if (const json* v = find(key))
    {
      if (!v->is_array())
        throw ConfigError(path_of(key), "expected a list of numbers");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i)
      {
        if (!(*v)[i].is_number())
          throw ConfigError(path_of(key) + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back((*v)[i].get<double>());
      }
    }
  }

  void finish() const
  {
    for (const auto& [key, value] : _j.items())
    {
      if (!_seen.count(key))
        throw ConfigError(path_of(key), "unknown key");
    }
  }

private:
  const json& _j;
  std::string _path;
  std::set<std::string> _seen;
};

geometry::Point2 point(const json& v, const std::string& path)
{
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ConfigError(path, "expected a point [x, y]");
  return {v[0].get<double>(), v[1].get<double>()};
}

geometry::Footprint footprint(const json& v, const std::string& path)
{
  Section s(v, path);
  std::string type = "rectangle";
  s.string("type", type);
  geometry::Point2 center;
  if (const json* c = s.find("center"))
    center = point(*c, s.path_of("center"));
  else
    throw ConfigError(s.path_of("center"), "required");

  try
  {
    if (type == "disc")
    {
      double radius = 0.0;
      s.number("radius", radius);
      s.finish();
      return geometry::Footprint::make_disc(center, radius);
    }
    if (type == "rectangle")
    {
      double half_length = 0.0;
      double half_width = 0.0;
      double heading = 0.0;
      s.number("half_length", half_length);
      s.number("half_width", half_width);
      s.number("heading", heading);
      s.finish();
      return geometry::Footprint::make_rectangle(center, half_length, half_width, heading);
    }
  }
  catch (const InvalidArgument& e)
  {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(s.path_of("type"), "expected \"rectangle\" or \"disc\"");
}

std::vector<geometry::Footprint> footprints(const json& v, const std::string& path)
{
  if (!v.is_array())
    throw ConfigError(path, "expected a list of footprints");
  std::vector<geometry::Footprint> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(footprint(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

scenario::ScenarioConfig parse_scenario(const json& j)
{
  scenario::ScenarioConfig c;
  {
    const auto it = j.find("kind");
    std::string kind = "highway";
    if (it != j.end())
    {
      if (!it->is_string())
        throw ConfigError("scenario.kind", "expected a string");
      kind = it->get<std::string>();
    }
    if (kind == "highway")
      c = scenario::ScenarioConfig::defaults_for(scenario::ScenarioKind::highway);
    else if (kind == "intersection")
      c = scenario::ScenarioConfig::defaults_for(scenario::ScenarioKind::intersection);
    else if (kind == "roundabout")
      c = scenario::ScenarioConfig::defaults_for(scenario::ScenarioKind::roundabout);
    else
      throw ConfigError("scenario.kind", "expected highway, intersection or roundabout");
  }

  Section s(j, "scenario");
  s.find("kind");
  s.number("density", c.density);
  s.number("cav_fraction", c.cav_fraction);
  if (const json* v = s.find("aoi_center"))
    c.aoi_center = point(*v, "scenario.aoi_center");
  s.number("aoi_radius", c.aoi_radius);
  if (const json* v = s.find("rsu_positions"))
  {
    if (!v->is_array())
      throw ConfigError("scenario.rsu_positions", "expected a list of points");
    c.rsu_positions.clear();
    for (std::size_t i = 0; i < v->size(); ++i)
      c.rsu_positions.push_back(
        point((*v)[i], "scenario.rsu_positions[" + std::to_string(i) + "]"));
  }
  if (const json* v = s.find("lanes"))
  {
    Section l(*v, "scenario.lanes");
    l.integer("lane_count", c.lanes.lane_count);
    l.number("lane_width", c.lanes.lane_width);
    l.number("road_half_length", c.lanes.road_half_length);
    l.number("roundabout_radius", c.lanes.roundabout_radius);
    l.finish();
  }
  if (const json* v = s.find("buildings"))
    c.buildings = footprints(*v, "scenario.buildings");
  if (const json* v = s.find("foliage"))
    c.foliage = footprints(*v, "scenario.foliage");
  s.boolean("corner_buildings", c.corner_buildings);
  s.number("building_setback", c.building_setback);
  s.number("building_size", c.building_size);
  if (const json* v = s.find("speed_range"))
  {
    const geometry::Point2 r = point(*v, "scenario.speed_range");
    c.min_speed = r.x;
    c.max_speed = r.y;
  }
  s.number("min_headway", c.min_headway);
  s.number("vehicle_length", c.vehicle_length);
  s.number("vehicle_width", c.vehicle_width);
  s.number("turn_probability", c.turn_probability);
  s.number("approach_band", c.approach_band);
  std::string pairing = c.pairing == scenario::Pairing::all_pairs ? "all_pairs" : "nearest_voi";
  s.string("pairing", pairing);
  if (pairing == "all_pairs")
    c.pairing = scenario::Pairing::all_pairs;
  else if (pairing == "nearest_voi")
    c.pairing = scenario::Pairing::nearest_voi;
  else
    throw ConfigError("scenario.pairing", "expected nearest_voi or all_pairs");
  s.integer("seed", c.seed);
  s.finish();
  return c;
}

channel::ChannelParams parse_channel(const json& j)
{
  channel::ChannelParams c;
  Section s(j, "channel");
  s.number("tx_power_dbm", c.tx_power_dbm);
  s.number("beam_gain_dbi", c.beam_gain_dbi);
  s.number("noise_power_dbm", c.noise_power_dbm);
  s.number("carrier_ghz", c.carrier_ghz);
  std::string env = c.environment == channel::Environment::highway ? "highway" : "urban";
  s.string("environment", env);
  if (env == "urban")
    c.environment = channel::Environment::urban;
  else if (env == "highway")
    c.environment = channel::Environment::highway;
  else
    throw ConfigError("channel.environment", "expected urban or highway");
  s.number("shadowing_sigma_db", c.shadowing_sigma_db);
  s.number("foliage_loss_db", c.foliage_loss_db);
  s.number("foliage_sigma_db", c.foliage_sigma_db);
  s.number("vehicle_loss_base_db", c.vehicle_loss_base_db);
  s.number("vehicle_loss_step_db", c.vehicle_loss_step_db);
  s.number("vehicle_loss_cap_db", c.vehicle_loss_cap_db);
  s.number("vehicle_sigma_db", c.vehicle_sigma_db);
  s.finish();
  return c;
}

} // namespace

ExperimentSpec parse_spec(std::string_view json_text)
{
  json root;
  try
  {
    root = json::parse(json_text);
  }
  catch (const json::parse_error& e)
  {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }

  ExperimentSpec spec;
  Section s(root, "");
  if (const json* v = s.find("scenario"))
    spec.scenario = parse_scenario(*v);
  if (const json* v = s.find("channel"))
    spec.channel = parse_channel(*v);
  else if (spec.scenario.kind == scenario::ScenarioKind::highway)
    spec.channel.environment = channel::Environment::highway;
  if (const json* v = s.find("prediction"))
  {
    Section p(*v, "prediction");
    p.number("horizon", spec.prediction.horizon);
    p.number("step", spec.prediction.step);
    p.number("q_pos", spec.prediction.q_pos);
    p.number("q_vel", spec.prediction.q_vel);
    p.finish();
  }
  if (const json* v = s.find("sensing"))
  {
    Section p(*v, "sensing");
    p.number("range", spec.sensing.range);
    p.number("footprint_sigma", spec.sensing.footprint_sigma);
    p.number("velocity_variance", spec.sensing.velocity_variance);
    p.number("blocker_half_width", spec.sensing.blocker_half_width);
    p.number("min_blocker_probability", spec.sensing.min_blocker_probability);
    p.finish();
  }
  // Sweep axes left out fall back to the scenario's single value.
  spec.cav_fractions = {spec.scenario.cav_fraction};
  spec.densities = {spec.scenario.density};
  if (const json* v = s.find("sweep"))
  {
    Section p(*v, "sweep");
    p.numbers("gamma_th_db", spec.gamma_th_db);
    p.numbers("cav_fraction", spec.cav_fractions);
    p.numbers("density", spec.densities);
    p.finish();
  }
  if (const json* v = s.find("solvers"))
  {
    if (!v->is_array())
      throw ConfigError("solvers", "expected a list of solver names");
    spec.solvers.clear();
    for (std::size_t i = 0; i < v->size(); ++i)
    {
      const std::string path = "solvers[" + std::to_string(i) + "]";
      if (!(*v)[i].is_string())
        throw ConfigError(path, "expected a solver name");
      try
      {
        spec.solvers.push_back(parse_solver((*v)[i].get<std::string>()));
      }
      catch (const InvalidArgument& e)
      {
        throw ConfigError(path, e.what());
      }
    }
  }
  s.integer("repetitions", spec.repetitions);
  s.integer("base_seed", spec.base_seed);
  if (const json* v = s.find("relay_capacity"))
  {
    Section p(*v, "relay_capacity");
    p.integer("cav", spec.cav_capacity);
    p.integer("rsu", spec.rsu_capacity);
    p.finish();
  }
  if (const json* v = s.find("admm"))
  {
    Section p(*v, "admm");
    p.number("rho", spec.admm.rho);
    p.integer("max_iterations", spec.admm.max_iterations);
    p.number("tolerance", spec.admm.tolerance);
    p.finish();
  }
  if (const json* v = s.find("exhaustive"))
  {
    Section p(*v, "exhaustive");
    p.number("max_arrangements", spec.exhaustive.max_arrangements);
    p.boolean("prune", spec.exhaustive.prune);
    p.finish();
  }
  s.integer("windows", spec.windows);
  s.integer("threads", spec.threads);
  s.boolean("record_timing", spec.record_timing);
  std::string out_dir = spec.output_dir.string();
  s.string("output_dir", out_dir);
  spec.output_dir = out_dir;
  std::string format = spec.format == OutputFormat::jsonl ? "jsonl" : "csv";
  s.string("format", format);
  if (format == "csv")
    spec.format = OutputFormat::csv;
  else if (format == "jsonl")
    spec.format = OutputFormat::jsonl;
  else
    throw ConfigError("format", "expected csv or jsonl");
  s.finish();

  spec.validate();
  return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw Error("cannot open spec file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_spec(text.str());
}

} // namespace losmap::experiment
