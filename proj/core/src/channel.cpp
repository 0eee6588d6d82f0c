#include "losmap/channel.hpp"

#include "losmap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace losmap::channel {

std::string_view to_string(LinkCondition c)
{
  switch (c)
  {
    case LinkCondition::los: return "LoS";
    case LinkCondition::nlos_building: return "NLoSb";
    case LinkCondition::nlos_foliage: return "NLoSf";
    case LinkCondition::nlos_vehicle: return "NLoSv";
  }
  return "?";
}

void ChannelParams::validate() const
{
  if (!(carrier_ghz > 0.0))
    throw InvalidArgument("carrier frequency must be positive");
  if (shadowing_sigma_db < 0.0 || foliage_sigma_db < 0.0 || vehicle_sigma_db < 0.0)
    throw InvalidArgument("loss spreads must be nonnegative");
  if (shadowing_sigma_db == 0.0 && (foliage_sigma_db == 0.0 || vehicle_sigma_db == 0.0))
    throw InvalidArgument("every SNR component needs a positive variance");
}

double ChannelParams::snr_reference_db() const
{
  return tx_power_dbm + 2.0 * beam_gain_dbi - noise_power_dbm;
}

double ChannelParams::vehicle_loss_db(unsigned blockers) const
{
  if (blockers == 0)
    return 0.0;
  const double loss = vehicle_loss_base_db + vehicle_loss_step_db * (blockers - 1);
  return std::min(loss, vehicle_loss_cap_db);
}

double ChannelParams::vehicle_loss_sigma_db(unsigned) const
{
  return vehicle_sigma_db;
}

GaussianMixtureDb::GaussianMixtureDb(std::vector<MixtureComponent> components)
: _components(std::move(components))
{
  double total = 0.0;
  for (const auto& c : _components)
  {
    if (!(c.weight >= 0.0) || !(c.variance_db2 > 0.0) || !std::isfinite(c.mean_db))
      throw InvalidArgument("mixture component needs weight >= 0 and variance > 0");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw InvalidArgument("mixture weights must sum to one");
}

double GaussianMixtureDb::pdf(double snr_db) const
{
  double out = 0.0;
  for (const auto& c : _components)
  {
    const double z = snr_db - c.mean_db;
    out += c.weight * std::exp(-0.5 * z * z / c.variance_db2) /
           std::sqrt(2.0 * std::numbers::pi * c.variance_db2);
  }
  return out;
}

double q_function(double x)
{
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double interval_probability(double lo, double hi, double mean, double sigma)
{
  if (!(hi > lo))
    return 0.0;

  if (sigma == 0.0)
  {
    if (mean > lo && mean < hi)
      return 1.0;
    if (mean == lo || mean == hi)
      return 0.5;
    return 0.0;
  }

  const double za = (lo - mean) / sigma;
  const double zb = (hi - mean) / sigma;
  // Pick the form that subtracts two small tails rather than two numbers
  // close to one.
  if (za >= 0.0)
    return q_function(za) - q_function(zb);
  if (zb <= 0.0)
    return q_function(-zb) - q_function(-za);
  return 1.0 - q_function(-za) - q_function(zb);
}

double path_loss_mean(
  LinkCondition cond, double distance_m, const ChannelParams& p, unsigned vehicle_blockers)
{
  if (!(distance_m > 0.0))
    throw InvalidArgument("path loss needs a positive distance");

  const double ld = std::log10(distance_m);
  const double lf = std::log10(p.carrier_ghz);
  const double los = p.environment == Environment::highway
    ? 32.4 + 20.0 * ld + 20.0 * lf
    : 38.77 + 16.7 * ld + 18.2 * lf;

  switch (cond)
  {
    case LinkCondition::los: return los;
    case LinkCondition::nlos_building: return 36.85 + 30.0 * ld + 18.9 * lf;
    case LinkCondition::nlos_foliage: return los + p.foliage_loss_db;
    case LinkCondition::nlos_vehicle: return los + p.vehicle_loss_db(std::max(1u, vehicle_blockers));
  }
  return los;
}

LinkCondition classify_static(
  geometry::Point2 tx, geometry::Point2 rx, const StaticMap& map)
{
  bool foliage = false;
  for (const auto& ob : map.obstacles)
  {
    if (!geometry::segment_intersects_footprint(tx, rx, ob.footprint))
      continue;
    if (ob.kind == ObstacleKind::building)
      return LinkCondition::nlos_building;
    foliage = true;
  }
  return foliage ? LinkCondition::nlos_foliage : LinkCondition::los;
}

unsigned count_vehicle_blockers(
  geometry::Point2 tx, geometry::Point2 rx,
  std::span<const geometry::Footprint> vehicles)
{
  unsigned n = 0;
  for (const auto& f : vehicles)
  {
    if (geometry::segment_intersects_footprint(tx, rx, f))
      ++n;
  }
  return n;
}

LinkCondition classify_link(
  geometry::Point2 tx, geometry::Point2 rx, const StaticMap& map,
  std::span<const geometry::Footprint> vehicles)
{
  if (tx == rx)
    throw DegenerateLinkError();

  const LinkCondition s = classify_static(tx, rx, map);
  if (s != LinkCondition::los)
    return s;
  return count_vehicle_blockers(tx, rx, vehicles) > 0
    ? LinkCondition::nlos_vehicle
    : LinkCondition::los;
}

double blockage_probability_single(
  const sensing::StateEstimate& blocker,
  geometry::Point2 tx, geometry::Point2 rx,
  double blocker_half_width)
{
  const geometry::LinkFrameRect omega =
    geometry::blockage_region(tx, rx, blocker_half_width);

  const Eigen::Matrix2d cov = blocker.position_covariance();
  const double scale = std::max(1.0, std::max(std::abs(cov(0, 0)), std::abs(cov(1, 1))));
  if (std::abs(cov(0, 0) - cov(1, 1)) > 1e-9 * scale ||
      std::abs(cov(0, 1)) > 1e-9 * scale || std::abs(cov(1, 0)) > 1e-9 * scale)
  {
    throw AnisotropicCovarianceError(
      "blocker position covariance is not isotropic; the closed form does not apply");
  }
  if (cov(0, 0) < 0.0)
    throw InvalidArgument("negative position variance");

  const double sigma = std::sqrt(cov(0, 0));
  const geometry::LinkFramePoint m =
    geometry::to_link_frame(tx, rx, blocker.mean.position());

  const double pu = interval_probability(omega.u_min, omega.u_max, m.u, sigma);
  const double pv = interval_probability(omega.v_min, omega.v_max, m.v, sigma);
  return std::clamp(pu * pv, 0.0, 1.0);
}

namespace {

void check_probabilities(std::span<const double> probabilities)
{
  for (double p : probabilities)
  {
    if (!(p >= 0.0 && p <= 1.0))
      throw InvalidArgument("blockage probabilities must lie in [0, 1]");
  }
}

} // namespace

double blockage_probability_multi(std::span<const double> probabilities, unsigned blockers)
{
  check_probabilities(probabilities);
  const std::size_t n = probabilities.size();
  if (blockers < 1 || blockers > n)
    throw InvalidArgument("blocker count must lie in [1, number of candidates]");

  // Walk every k-subset as a selection mask in lexicographic order.
  std::vector<bool> chosen(n, false);
  std::fill(chosen.begin(), chosen.begin() + blockers, true);

  double total = 0.0;
  do
  {
    double term = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      term *= chosen[i] ? probabilities[i] : 1.0 - probabilities[i];
    total += term;
  } while (std::prev_permutation(chosen.begin(), chosen.end()));

  return total;
}

std::vector<double> blocker_count_distribution(std::span<const double> probabilities)
{
  check_probabilities(probabilities);

  std::vector<double> dist(probabilities.size() + 1, 0.0);
  dist[0] = 1.0;
  std::size_t used = 0;
  for (double p : probabilities)
  {
    ++used;
    for (std::size_t k = used; k > 0; --k)
      dist[k] = dist[k] * (1.0 - p) + dist[k - 1] * p;
    dist[0] *= 1.0 - p;
  }
  return dist;
}

GaussianMixtureDb snr_distribution(
  double distance_m,
  LinkCondition static_condition,
  unsigned known_vehicle_blockers,
  std::span<const double> ncav_probabilities,
  const ChannelParams& p)
{
  if (!(distance_m > 0.0))
    throw InvalidArgument("SNR distribution needs a positive distance");

  const double gamma0 = p.snr_reference_db();
  const double shadow_var = p.shadowing_sigma_db * p.shadowing_sigma_db;

  if (static_condition == LinkCondition::nlos_building)
  {
    return GaussianMixtureDb({{1.0,
      gamma0 - path_loss_mean(LinkCondition::nlos_building, distance_m, p),
      shadow_var}});
  }
  if (static_condition == LinkCondition::nlos_foliage)
  {
    return GaussianMixtureDb({{1.0,
      gamma0 - path_loss_mean(LinkCondition::nlos_foliage, distance_m, p),
      p.foliage_sigma_db * p.foliage_sigma_db + shadow_var}});
  }
  if (static_condition == LinkCondition::nlos_vehicle && known_vehicle_blockers == 0)
    throw InvalidArgument("NLoSv static condition requires at least one known blocker");
  if (static_condition == LinkCondition::los && known_vehicle_blockers > 0)
    throw InvalidArgument("LoS static condition is inconsistent with known blockers");

  std::vector<double> probs(known_vehicle_blockers, 1.0);
  probs.insert(probs.end(), ncav_probabilities.begin(), ncav_probabilities.end());
  const std::vector<double> counts = blocker_count_distribution(probs);

  const double los_mean = gamma0 - path_loss_mean(LinkCondition::los, distance_m, p);
  std::vector<MixtureComponent> comps;
  comps.reserve(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k)
  {
    if (counts[k] == 0.0)
      continue;

    MixtureComponent c;
    c.weight = counts[k];
    if (k == 0)
    {
      c.mean_db = los_mean;
      c.variance_db2 = shadow_var;
    }
    else
    {
      const auto kb = static_cast<unsigned>(k);
      const double sv = p.vehicle_loss_sigma_db(kb);
      c.mean_db = los_mean - p.vehicle_loss_db(kb);
      c.variance_db2 = sv * sv + shadow_var;
    }

    // Counts past the loss cap share one law; fold them together.
    if (!comps.empty() && comps.back().mean_db == c.mean_db &&
        comps.back().variance_db2 == c.variance_db2)
    {
      comps.back().weight += c.weight;
    }
    else
    {
      comps.push_back(c);
    }
  }
  return GaussianMixtureDb(std::move(comps));
}

double service_probability(const GaussianMixtureDb& m, double threshold_db)
{
  double out = 0.0;
  for (const auto& c : m.components())
    out += c.weight * q_function((threshold_db - c.mean_db) / std::sqrt(c.variance_db2));
  return std::clamp(out, 0.0, 1.0);
}

} // namespace losmap::channel
