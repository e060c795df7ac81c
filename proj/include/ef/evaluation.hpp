#pragma once

#include "ef/se3.hpp"
#include "ef/synth.hpp"

#include <stdexcept>
#include <vector>

namespace ef {

struct metric_undefined_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Relative pose error over consecutive frame pairs, translation and rotation
/// aggregated independently as RMSE.
struct RpeResult {
  double rmse_trans = 0.0;  // meters
  double rmse_rot = 0.0;    // degrees
  std::vector<double> per_pair_trans;
  std::vector<double> per_pair_rot;
};

/// E_i = (T_i^-1 T_{i+1})^-1 (That_i^-1 That_{i+1}); trajectories must have
/// equal length >= 2.
RpeResult rpe(const std::vector<Pose>& reference,
              const std::vector<Pose>& estimate);

/// Map every local point into the global frame with its pose.
std::vector<Vec3> aggregate_map(const Dataset& dataset,
                                const std::vector<Pose>& trajectory);

struct MapMetrics {
  double mme = 0.0;  // nats
  double mpv = 0.0;  // meters
  double neighborhood_radius = 0.0;
  double valid_point_fraction = 0.0;
};

/// Mean Map Entropy: per point the differential entropy of the Gaussian
/// fitted to its radius neighborhood (point included),
/// h = 0.5 ln((2 pi e)^3 det Sigma). Points with fewer than 5 neighbors or a
/// non-positive determinant are excluded and accounted in
/// valid_point_fraction. Throws metric_undefined_error if nothing is valid.
MapMetrics mme(const std::vector<Vec3>& cloud, double radius);

/// Mean Plane Variance: per point the square root of the smallest eigenvalue
/// of the local covariance; same validity rules as mme.
MapMetrics mpv(const std::vector<Vec3>& cloud, double radius);

}  // namespace ef
