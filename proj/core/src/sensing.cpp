#include "losmap/sensing.hpp"

#include "losmap/errors.hpp"

#include <Eigen/Cholesky>

#include <set>

namespace losmap::sensing {

void DetectionList::validate() const
{
  std::set<ObjectId> seen;
  for (const auto& [id, est] : objects)
  {
    if (!seen.insert(id).second)
      throw InvalidArgument(
        "detection list of observer " + std::to_string(observer_id) +
        " reports object " + std::to_string(id) + " twice");
  }
}

StateEstimate fuse_estimates(std::span<const StateEstimate> estimates)
{
  if (estimates.empty())
    throw InvalidArgument("fusion needs at least one estimate");

  if (estimates.size() == 1)
  {
    Eigen::LLT<StateCovariance> llt(estimates[0].covariance);
    if (llt.info() != Eigen::Success)
      throw SingularCovarianceError(0);
    return estimates[0];
  }

  StateCovariance information = StateCovariance::Zero();
  StateVector information_mean = StateVector::Zero();
  for (std::size_t i = 0; i < estimates.size(); ++i)
  {
    const StateCovariance& p = estimates[i].covariance;
    Eigen::LLT<StateCovariance> llt(p);
    if (llt.info() != Eigen::Success || !p.isApprox(p.transpose(), 1e-12))
      throw SingularCovarianceError(i);

    const StateCovariance inv = llt.solve(StateCovariance::Identity());
    information += inv;
    information_mean += inv * estimates[i].mean.as_vector();
  }

  Eigen::LLT<StateCovariance> info_llt(information);
  StateCovariance fused = info_llt.solve(StateCovariance::Identity());
  fused = 0.5 * (fused + fused.transpose()).eval();

  StateEstimate out;
  out.covariance = fused;
  out.mean = ObjectState::from_vector(fused * information_mean);
  return out;
}

StateEstimate initialize_ncav_estimate(
  geometry::Point2 center,
  std::pair<double, double> velocity,
  double footprint_sigma,
  double velocity_variance)
{
  if (!(footprint_sigma > 0.0))
    throw InvalidArgument("footprint sigma must be positive");
  if (!(velocity_variance > 0.0))
    throw InvalidArgument("velocity variance must be positive");

  StateEstimate est;
  est.mean = {center.x, center.y, velocity.first, velocity.second};
  est.covariance.setZero();
  const double var = footprint_sigma * footprint_sigma;
  est.covariance(0, 0) = var;
  est.covariance(1, 1) = var;
  est.covariance(2, 2) = velocity_variance;
  est.covariance(3, 3) = velocity_variance;
  return est;
}

std::map<ObjectId, StateEstimate> fuse_detection_lists(
  std::span<const DetectionList> lists)
{
  std::map<ObjectId, std::vector<StateEstimate>> grouped;
  for (const auto& list : lists)
  {
    list.validate();
    for (const auto& [id, est] : list.objects)
      grouped[id].push_back(est);
  }

  std::map<ObjectId, StateEstimate> fused;
  for (const auto& [id, group] : grouped)
    fused.emplace(id, fuse_estimates(group));
  return fused;
}

} // namespace losmap::sensing
