#include "losmap/los_map.hpp"

#include "losmap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

namespace losmap::los_map {

void SensingParams::validate() const
{
  if (!(range > 0.0))
    throw InvalidArgument("sensing range must be positive");
  if (!(footprint_sigma > 0.0) || !(velocity_variance > 0.0))
    throw InvalidArgument("sensing noise must be positive");
  if (!(blocker_half_width > 0.0))
    throw InvalidArgument("blocker half width must be positive");
  if (!(min_blocker_probability >= 0.0 && min_blocker_probability < 1.0))
    throw InvalidArgument("blocker probability floor must lie in [0, 1)");
}

std::vector<sensing::DetectionList> sense(
  const scenario::WorldSnapshot& world, const SensingParams& params, std::uint64_t seed)
{
  params.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> pos_noise(0.0, params.footprint_sigma);
  std::normal_distribution<double> vel_noise(0.0, std::sqrt(params.velocity_variance));

  std::vector<sensing::DetectionList> lists;
  for (const auto& observer : world.vehicles)
  {
    if (!observer.is_cav)
      continue;
    sensing::DetectionList list;
    list.observer_id = observer.id;
    for (const auto& target : world.vehicles)
    {
      if (target.is_cav)
        continue;
      const auto& s = target.true_state;
      if (geometry::distance(observer.true_state.position(), s.position()) > params.range)
        continue;
      const geometry::Point2 seen{s.x + pos_noise(rng), s.y + pos_noise(rng)};
      const std::pair<double, double> vel{s.vx + vel_noise(rng), s.vy + vel_noise(rng)};
      list.objects.emplace_back(
        target.id,
        sensing::initialize_ncav_estimate(
          seen, vel, params.footprint_sigma, params.velocity_variance));
    }
    lists.push_back(std::move(list));
  }
  return lists;
}

PredictedLosMap::PredictedLosMap(
  std::vector<NodeId> ids,
  std::vector<std::vector<channel::GaussianMixtureDb>> per_epoch_pairs)
: _ids(std::move(ids)), _epochs(std::move(per_epoch_pairs))
{
  const std::size_t n = _ids.size();
  const std::size_t pairs = n * (n - (n > 0 ? 1 : 0)) / 2;
  for (const auto& e : _epochs)
  {
    if (e.size() != pairs)
      throw InvalidArgument("one SNR law per unordered node pair is required");
  }
}

std::size_t PredictedLosMap::pair_index(std::size_t i, std::size_t j) const
{
  if (i == j || i >= _ids.size() || j >= _ids.size())
    throw InvalidArgument("pair index out of range");
  if (i > j)
    std::swap(i, j);
  const std::size_t n = _ids.size();
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

const channel::GaussianMixtureDb& PredictedLosMap::law(
  std::size_t epoch, std::size_t i, std::size_t j) const
{
  return _epochs.at(epoch)[pair_index(i, j)];
}

network::AvailabilityMatrix PredictedLosMap::adjacency(std::size_t epoch, double threshold_db) const
{
  network::AvailabilityMatrix a(_ids);
  const auto& laws = _epochs.at(epoch);
  std::size_t k = 0;
  for (std::size_t i = 0; i < _ids.size(); ++i)
  {
    for (std::size_t j = i + 1; j < _ids.size(); ++j)
      a.set(i, j, channel::service_probability(laws[k++], threshold_db));
  }
  return a;
}

network::AvailabilityMatrix PredictedLosMap::average(double threshold_db) const
{
  std::vector<network::AvailabilityMatrix> per_epoch;
  per_epoch.reserve(_epochs.size());
  for (std::size_t e = 0; e < _epochs.size(); ++e)
    per_epoch.push_back(adjacency(e, threshold_db));
  return network::average_availability(per_epoch);
}

namespace {

struct Node
{
  NodeId id = 0;
  geometry::Point2 position;
  /// Index into the epoch's CAV footprint list, or none for RSUs.
  std::optional<std::size_t> footprint;
};

} // namespace

PredictedLosMap build(
  const scenario::WorldSnapshot& world,
  const prediction::PredictionParams& prediction,
  const channel::ChannelParams& channel,
  const SensingParams& sensing,
  std::uint64_t sensing_seed)
{
  prediction.validate();
  channel.validate();
  const std::size_t n_samples = prediction.sample_count();

  const auto lists = sense(world, sensing, sensing_seed);
  const auto fused = sensing::fuse_detection_lists(lists);

  std::vector<std::size_t> cav_index;
  for (std::size_t k = 0; k < world.vehicles.size(); ++k)
  {
    if (world.vehicles[k].is_cav)
      cav_index.push_back(k);
  }
  std::sort(cav_index.begin(), cav_index.end(), [&](std::size_t a, std::size_t b) {
    return world.vehicles[a].id < world.vehicles[b].id;
  });

  std::vector<NodeId> ids;
  for (std::size_t k : cav_index)
    ids.push_back(world.vehicles[k].id);
  for (const auto& r : world.rsus)
    ids.push_back(r.id);
  const std::size_t n = ids.size();

  std::vector<std::vector<channel::GaussianMixtureDb>> epochs;
  epochs.reserve(n_samples);
  std::vector<double> probs;
  for (std::size_t e = 0; e < n_samples; ++e)
  {
    const double t = static_cast<double>(e) * prediction.step;
    const scenario::WorldSnapshot moved = e == 0 ? world : scenario::step(world, t);

    std::vector<geometry::Footprint> cav_footprints;
    std::vector<Node> nodes;
    for (std::size_t k : cav_index)
    {
      const auto& v = moved.vehicles[k];
      nodes.push_back({v.id, v.true_state.position(), cav_footprints.size()});
      cav_footprints.push_back(v.footprint);
    }
    for (const auto& r : moved.rsus)
      nodes.push_back({r.id, r.position, std::nullopt});

    std::vector<sensing::StateEstimate> blockers;
    blockers.reserve(fused.size());
    for (const auto& [id, est] : fused)
      blockers.push_back(prediction::predict(est, t, prediction));

    std::vector<channel::GaussianMixtureDb> laws;
    laws.reserve(n * (n > 0 ? n - 1 : 0) / 2);
    for (std::size_t i = 0; i < n; ++i)
    {
      for (std::size_t j = i + 1; j < n; ++j)
      {
        const geometry::Point2 tx = nodes[i].position;
        const geometry::Point2 rx = nodes[j].position;
        const double d = geometry::distance(tx, rx);
        // Path loss is evaluated no closer than 1 m; coincident nodes have
        // no blockers between them.
        const double d_eff = std::max(d, 1.0);
        if (d == 0.0)
        {
          laws.push_back(channel::snr_distribution(
            d_eff, channel::LinkCondition::los, 0, {}, channel));
          continue;
        }

        const channel::LinkCondition stat =
          channel::classify_static(tx, rx, moved.static_map);
        if (stat != channel::LinkCondition::los)
        {
          laws.push_back(channel::snr_distribution(d_eff, stat, 0, {}, channel));
          continue;
        }

        unsigned known = 0;
        for (std::size_t f = 0; f < cav_footprints.size(); ++f)
        {
          if (f == nodes[i].footprint || f == nodes[j].footprint)
            continue;
          if (geometry::segment_intersects_footprint(tx, rx, cav_footprints[f]))
            ++known;
        }

        probs.clear();
        for (const auto& b : blockers)
        {
          const double p = channel::blockage_probability_single(
            b, tx, rx, sensing.blocker_half_width);
          if (p >= sensing.min_blocker_probability && p > 0.0)
            probs.push_back(p);
        }
        laws.push_back(channel::snr_distribution(
          d_eff,
          known > 0 ? channel::LinkCondition::nlos_vehicle : channel::LinkCondition::los,
          known, probs, channel));
      }
    }
    epochs.push_back(std::move(laws));
  }
  return PredictedLosMap(std::move(ids), std::move(epochs));
}

} // namespace losmap::los_map
