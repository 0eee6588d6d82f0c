#pragma once

#include "losmap/geometry.hpp"
#include "losmap/sensing.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace losmap::channel {

/// Propagation condition of a link, in decreasing order of attenuation
/// precedence after LoS: building, foliage, vehicle.
enum class LinkCondition { los, nlos_building, nlos_foliage, nlos_vehicle };

std::string_view to_string(LinkCondition c);

enum class Environment { urban, highway };

/// Link budget and blockage attenuation parameters. Defaults: P_Tx, P_n and
/// f follow the FR2 simulation setup; the shadowing and excess-loss values
/// are implementer choices.
struct ChannelParams
{
  double tx_power_dbm = 10.0;
  double beam_gain_dbi = 18.061799739838872;  ///< 10 log10(4 x 16), per end
  double noise_power_dbm = -85.5;
  double carrier_ghz = 28.0;
  Environment environment = Environment::urban;
  double shadowing_sigma_db = 3.0;
  double foliage_loss_db = 9.0;
  double foliage_sigma_db = 3.0;
  double vehicle_loss_base_db = 12.0;
  double vehicle_loss_step_db = 6.0;
  double vehicle_loss_cap_db = 30.0;
  double vehicle_sigma_db = 4.5;

  void validate() const;

  /// gamma_0 = P_Tx + 2 G_b - P_n.
  double snr_reference_db() const;

  /// Excess loss A_v(k) for k >= 1 simultaneous vehicle blockers.
  double vehicle_loss_db(unsigned blockers) const;

  /// Spread sigma_v(k) of the vehicular excess loss.
  double vehicle_loss_sigma_db(unsigned blockers) const;
};

struct MixtureComponent
{
  double weight = 0.0;
  double mean_db = 0.0;
  double variance_db2 = 0.0;
};

/// Mixture of normal laws over SNR in dB. Weights are nonnegative and sum
/// to one within 1e-9; variances are positive.
class GaussianMixtureDb
{
public:
  GaussianMixtureDb() = default;

  /// Throws InvalidArgument if the invariants do not hold.
  explicit GaussianMixtureDb(std::vector<MixtureComponent> components);

  const std::vector<MixtureComponent>& components() const { return _components; }
  std::size_t size() const { return _components.size(); }
  bool empty() const { return _components.empty(); }

  double pdf(double snr_db) const;

private:
  std::vector<MixtureComponent> _components;
};

/// Standard normal upper tail, via erfc.
double q_function(double x);

/// Pr{lo < X < hi} for X ~ N(mean, sigma^2). `sigma == 0` is a point mass;
/// a mean sitting on an edge then counts one half.
double interval_probability(double lo, double hi, double mean, double sigma);

/// Mean path loss A_PL(d) in dB. `vehicle_blockers` selects A_v(k) for
/// NLoSv and is ignored otherwise.
double path_loss_mean(
  LinkCondition cond, double distance_m, const ChannelParams& p,
  unsigned vehicle_blockers = 1);

enum class ObstacleKind { building, foliage };

struct Obstacle
{
  ObstacleKind kind = ObstacleKind::building;
  geometry::Footprint footprint;
};

struct StaticMap
{
  std::vector<Obstacle> obstacles;
};

/// Condition from static obstacles alone: NLoSb, NLoSf or LoS.
LinkCondition classify_static(
  geometry::Point2 tx, geometry::Point2 rx, const StaticMap& map);

/// Number of known-position vehicles whose footprint the link crosses.
unsigned count_vehicle_blockers(
  geometry::Point2 tx, geometry::Point2 rx,
  std::span<const geometry::Footprint> vehicles);

/// Deterministic classification with building > foliage > vehicle
/// precedence. Throws DegenerateLinkError for `tx == rx`.
LinkCondition classify_link(
  geometry::Point2 tx, geometry::Point2 rx, const StaticMap& map,
  std::span<const geometry::Footprint> vehicles);

/// Probability that a blocker with Gaussian position blocks tx-rx, using the
/// rectangular blockage region and the product of two Q-function
/// differences. The position covariance must be isotropic.
double blockage_probability_single(
  const sensing::StateEstimate& blocker,
  geometry::Point2 tx, geometry::Point2 rx,
  double blocker_half_width);

/// Probability that exactly `blockers` of the independent candidates block
/// the link, summing over every `blockers`-tuple explicitly. Cost grows as
/// C(N, k); use `blocker_count_distribution` for long candidate lists.
double blockage_probability_multi(std::span<const double> probabilities, unsigned blockers);

/// Distribution of the number of simultaneous blockers: entry k is
/// Pr{exactly k block}, k = 0..N. Same law as `blockage_probability_multi`,
/// computed by the O(N^2) convolution recurrence.
std::vector<double> blocker_count_distribution(std::span<const double> probabilities);

/// SNR law of a link of length `distance_m`.
///
/// `static_condition` is NLoSb or NLoSf for obstructed links (single
/// component); otherwise LoS or NLoSv, in which case each of the
/// `known_vehicle_blockers` counts as a certain blocker and `ncav_probabilities`
/// lists the uncertain ones. Zero-weight components are dropped.
GaussianMixtureDb snr_distribution(
  double distance_m,
  LinkCondition static_condition,
  unsigned known_vehicle_blockers,
  std::span<const double> ncav_probabilities,
  const ChannelParams& p);

/// Pr{SNR > threshold} = sum_i w_i Q((threshold - mu_i) / sigma_i).
double service_probability(const GaussianMixtureDb& m, double threshold_db);

} // namespace losmap::channel
