#include "losmap/prediction.hpp"

#include "losmap/errors.hpp"

#include <cmath>

namespace losmap::prediction {

namespace {

constexpr double window_slack = 1e-9;

} // namespace

void PredictionParams::validate() const
{
  if (!(horizon > 0.0))
    throw InvalidArgument("prediction horizon must be positive");
  if (!(step > 0.0) || step > horizon * (1.0 + window_slack))
    throw InvalidArgument("prediction step must lie in (0, horizon]");
  if (q_pos < 0.0 || q_vel < 0.0)
    throw InvalidArgument("process noise coefficients must be nonnegative");
  if (4.0 * q_vel < 3.0 * q_pos)
    throw InvalidArgument(
      "process noise is indefinite: q_vel must be at least 0.75 q_pos");
  sample_count();
}

std::size_t PredictionParams::sample_count() const
{
  const double ratio = horizon / step;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > window_slack * std::max(1.0, ratio))
    throw InvalidArgument("prediction horizon must be an integer multiple of the step");
  return static_cast<std::size_t>(rounded);
}

sensing::StateCovariance transition_matrix(double t)
{
  if (!(t >= 0.0))
    throw InvalidArgument("transition time must be nonnegative");

  sensing::StateCovariance m = sensing::StateCovariance::Identity();
  m(0, 2) = t;
  m(1, 3) = t;
  return m;
}

sensing::StateCovariance process_noise(double t, const PredictionParams& p)
{
  sensing::StateCovariance q = sensing::StateCovariance::Zero();
  const double pos = p.q_pos * t * t * t / 3.0;
  const double cross = p.q_pos * t * t / 2.0;
  const double vel = p.q_vel * t;
  for (int axis = 0; axis < 2; ++axis)
  {
    q(axis, axis) = pos;
    q(axis + 2, axis + 2) = vel;
    q(axis, axis + 2) = cross;
    q(axis + 2, axis) = cross;
  }
  return q;
}

sensing::StateEstimate predict(
  const sensing::StateEstimate& est, double t, const PredictionParams& p)
{
  if (!(t >= 0.0) || t > p.horizon * (1.0 + window_slack))
    throw InvalidArgument("prediction time outside the window");
  if (t == 0.0)
    return est;

  const sensing::StateCovariance tm = transition_matrix(t);
  sensing::StateEstimate out;
  out.mean = sensing::ObjectState::from_vector(tm * est.mean.as_vector());
  sensing::StateCovariance cov = tm * est.covariance * tm.transpose() + process_noise(t, p);
  out.covariance = 0.5 * (cov + cov.transpose());
  return out;
}

PredictedTrajectory predict_window(
  const sensing::StateEstimate& est, const PredictionParams& p)
{
  p.validate();
  const std::size_t n = p.sample_count();

  PredictedTrajectory traj;
  traj.epochs.reserve(n);
  traj.states.reserve(n);
  for (std::size_t k = 0; k < n; ++k)
  {
    const double t = static_cast<double>(k) * p.step;
    traj.epochs.push_back(t);
    traj.states.push_back(predict(est, t, p));
  }
  return traj;
}

sensing::ObjectState predict_known(const sensing::ObjectState& s, double t)
{
  return {s.x + s.vx * t, s.y + s.vy * t, s.vx, s.vy};
}

} // namespace losmap::prediction
