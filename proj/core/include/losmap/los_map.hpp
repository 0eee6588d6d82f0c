#pragma once

#include "losmap/channel.hpp"
#include "losmap/network.hpp"
#include "losmap/prediction.hpp"
#include "losmap/scenario.hpp"

#include <cstdint>
#include <vector>

namespace losmap::los_map {

struct SensingParams
{
  /// CAVs detect nCAVs within this range [m].
  double range = 200.0;
  /// Position noise of one detection [m]; also its reported sigma.
  double footprint_sigma = 1.0;
  /// Velocity variance of one detection [m^2/s^2].
  double velocity_variance = 0.25;
  /// Half width of the blocker disc used for the blockage region [m].
  double blocker_half_width = 0.9;
  /// Uncertain blockers below this probability are left out of the mixture.
  double min_blocker_probability = 1e-12;

  void validate() const;
};

/// Noisy detection lists of every CAV: each nCAV within range is reported
/// with its true state perturbed by the stated noise.
std::vector<sensing::DetectionList> sense(
  const scenario::WorldSnapshot& world, const SensingParams& params, std::uint64_t seed);

/// SNR laws of every node pair over the prediction window. Nodes are the
/// CAVs (ascending id) followed by the RSUs.
class PredictedLosMap
{
public:
  PredictedLosMap() = default;
  PredictedLosMap(
    std::vector<NodeId> ids,
    std::vector<std::vector<channel::GaussianMixtureDb>> per_epoch_pairs);

  const std::vector<NodeId>& ids() const { return _ids; }
  std::size_t epoch_count() const { return _epochs.size(); }

  /// Law of the pair (i, j), i != j, at `epoch`.
  const channel::GaussianMixtureDb& law(std::size_t epoch, std::size_t i, std::size_t j) const;

  /// Per-epoch service probabilities at `threshold_db`.
  network::AvailabilityMatrix adjacency(std::size_t epoch, double threshold_db) const;

  /// Window average of `adjacency`.
  network::AvailabilityMatrix average(double threshold_db) const;

private:
  std::size_t pair_index(std::size_t i, std::size_t j) const;

  std::vector<NodeId> _ids;
  std::vector<std::vector<channel::GaussianMixtureDb>> _epochs;
};

/// Sense, fuse, predict and classify every node pair at each of the N_s
/// epochs of the window starting at `world.time`. CAV positions come from
/// stepping the world; nCAVs enter as uncertain blockers through their
/// fused and predicted estimates.
PredictedLosMap build(
  const scenario::WorldSnapshot& world,
  const prediction::PredictionParams& prediction,
  const channel::ChannelParams& channel,
  const SensingParams& sensing,
  std::uint64_t sensing_seed);

} // namespace losmap::los_map
