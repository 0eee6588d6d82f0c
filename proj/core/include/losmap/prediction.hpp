#pragma once

#include "losmap/sensing.hpp"

#include <cstddef>
#include <vector>

namespace losmap::prediction {

/// Prediction window and constant-velocity process noise.
///
/// The noise is the white-noise-acceleration discretisation per axis
///   [ q_pos t^3/3   q_pos t^2/2 ]
///   [ q_pos t^2/2   q_vel t     ]
/// which is positive-semidefinite only when 4 q_vel >= 3 q_pos.
struct PredictionParams
{
  double horizon = 1.0;   ///< T_p [s]
  double step = 0.1;      ///< T_s [s]
  double q_pos = 0.5;
  double q_vel = 0.5;

  /// Throws InvalidArgument on invalid values.
  void validate() const;

  /// N_s = T_p / T_s; throws InvalidArgument if not an integer.
  std::size_t sample_count() const;
};

struct PredictedTrajectory
{
  std::vector<double> epochs;
  std::vector<sensing::StateEstimate> states;
};

/// Constant-velocity transition [I, t I; 0, I]. Throws on negative `t`.
sensing::StateCovariance transition_matrix(double t);

sensing::StateCovariance process_noise(double t, const PredictionParams& p);

/// Propagates `est` by `t` seconds, `t` in [0, horizon].
sensing::StateEstimate predict(
  const sensing::StateEstimate& est, double t, const PredictionParams& p);

/// Samples `predict` at `n * step` for n = 0 .. N_s - 1.
PredictedTrajectory predict_window(
  const sensing::StateEstimate& est, const PredictionParams& p);

/// Exactly-known state of a connected vehicle moved along its velocity.
sensing::ObjectState predict_known(const sensing::ObjectState& s, double t);

} // namespace losmap::prediction
