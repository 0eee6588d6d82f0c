#pragma once

#include "losmap/geometry.hpp"

#include <Eigen/Core>

#include <map>
#include <span>
#include <utility>
#include <vector>

namespace losmap::sensing {

using StateVector = Eigen::Vector4d;
using StateCovariance = Eigen::Matrix4d;

/// Kinematic state [x, y, vx, vy] of a tracked object (m, m/s).
struct ObjectState
{
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;

  geometry::Point2 position() const { return {x, y}; }
  StateVector as_vector() const { return {x, y, vx, vy}; }
  static ObjectState from_vector(const StateVector& s) { return {s[0], s[1], s[2], s[3]}; }
};

/// Gaussian estimate of an object state.
struct StateEstimate
{
  ObjectState mean;
  StateCovariance covariance = StateCovariance::Zero();

  Eigen::Matrix2d position_covariance() const { return covariance.topLeftCorner<2, 2>(); }
};

using ObjectId = std::uint32_t;

/// Objects reported by one cooperative observer at the sensing instant.
struct DetectionList
{
  NodeId observer_id = 0;
  std::vector<std::pair<ObjectId, StateEstimate>> objects;
  unsigned relay_capability = 0;

  /// Throws InvalidArgument if an object id appears twice.
  void validate() const;
};

/// Information-form fusion of independent estimates of the same object:
/// covariance `(sum_i inv(P_i))^-1`, mean `P * sum_i inv(P_i) m_i`.
/// Throws SingularCovarianceError naming the first non positive-definite
/// input, or InvalidArgument on an empty list.
StateEstimate fuse_estimates(std::span<const StateEstimate> estimates);

/// Initial estimate of a non-connected vehicle seen by a single observer.
/// Position covariance is `footprint_sigma^2 I`, velocity covariance is
/// `velocity_variance I`.
StateEstimate initialize_ncav_estimate(
  geometry::Point2 center,
  std::pair<double, double> velocity,
  double footprint_sigma,
  double velocity_variance = 0.25);

/// Fuses every object id over the observers that reported it. Objects seen
/// by a single observer pass through unchanged.
std::map<ObjectId, StateEstimate> fuse_detection_lists(
  std::span<const DetectionList> lists);

} // namespace losmap::sensing
