#include "ef/evaluation.hpp"

#include "ef/kdtree.hpp"

#include <Eigen/LU>
#include "ef/kernels.hpp"
#include "ef/sym_eigen.hpp"

#include <cmath>

namespace ef {

RpeResult rpe(const std::vector<Pose>& reference,
              const std::vector<Pose>& estimate) {
  if (reference.size() != estimate.size()) {
    throw std::invalid_argument("rpe: trajectory lengths differ");
  }
  if (reference.size() < 2) {
    throw std::invalid_argument("rpe: need at least two poses");
  }
  RpeResult out;
  double st = 0.0, sr = 0.0;
  for (std::size_t i = 0; i + 1 < reference.size(); ++i) {
    const Pose rel_ref = reference[i].inverse() * reference[i + 1];
    const Pose rel_est = estimate[i].inverse() * estimate[i + 1];
    const Pose err = rel_ref.inverse() * rel_est;
    const double dt = err.translation().norm();
    double ctheta = 0.5 * (err.rotation().trace() - 1.0);
    ctheta = std::clamp(ctheta, -1.0, 1.0);
    const double dr = std::acos(ctheta) * 180.0 / M_PI;
    out.per_pair_trans.push_back(dt);
    out.per_pair_rot.push_back(dr);
    st += dt * dt;
    sr += dr * dr;
  }
  const double n = static_cast<double>(out.per_pair_trans.size());
  out.rmse_trans = std::sqrt(st / n);
  out.rmse_rot = std::sqrt(sr / n);
  return out;
}

std::vector<Vec3> aggregate_map(const Dataset& dataset,
                                const std::vector<Pose>& trajectory) {
  if (dataset.clouds.size() != trajectory.size()) {
    throw std::invalid_argument("aggregate_map: pose count mismatch");
  }
  std::size_t total = 0;
  for (const auto& c : dataset.clouds) total += c.size();
  std::vector<Vec3> out(total);

  std::size_t at = 0;
  std::vector<Vec3> local;
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    const auto& cloud = dataset.clouds[t];
    if (cloud.empty()) continue;
    local.resize(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) local[i] = cloud[i].p;
    kernels::transform_points(trajectory[t].rotation(),
                              trajectory[t].translation(),
                              local.front().data(), out[at].data(),
                              cloud.size());
    at += cloud.size();
  }
  return out;
}

namespace {

constexpr int kMinNeighbors = 5;

template <typename PerPoint>
MapMetrics LocalCovarianceMetric(const std::vector<Vec3>& cloud, double radius,
                                 PerPoint&& value_of) {
  if (radius <= 0) throw std::invalid_argument("map metric: radius must be positive");
  const KdTree3 tree(cloud);
  std::vector<int> idx;
  double sum = 0.0;
  std::size_t valid = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    tree.radius_search(cloud[i], radius, idx);
    if (static_cast<int>(idx.size()) < kMinNeighbors) continue;
    Vec3 mean = Vec3::Zero();
    for (int j : idx) mean += cloud[static_cast<size_t>(j)];
    mean /= static_cast<double>(idx.size());
    Mat3 cov = Mat3::Zero();
    for (int j : idx) {
      const Vec3 c = cloud[static_cast<size_t>(j)] - mean;
      cov += c * c.transpose();
    }
    cov /= static_cast<double>(idx.size());
    double v;
    if (!value_of(cov, v)) continue;
    sum += v;
    ++valid;
  }
  if (valid == 0) {
    throw metric_undefined_error("map metric: no point has a usable neighborhood");
  }
  MapMetrics m;
  m.neighborhood_radius = radius;
  m.valid_point_fraction =
      static_cast<double>(valid) / static_cast<double>(cloud.size());
  m.mme = m.mpv = sum / static_cast<double>(valid);
  return m;
}

}  // namespace

MapMetrics mme(const std::vector<Vec3>& cloud, double radius) {
  MapMetrics m = LocalCovarianceMetric(cloud, radius, [](const Mat3& cov, double& v) {
    const double det = cov.determinant();
    if (det <= 0) return false;
    v = 0.5 * std::log(std::pow(2.0 * M_PI * std::exp(1.0), 3) * det);
    return true;
  });
  m.mpv = 0.0;
  return m;
}

MapMetrics mpv(const std::vector<Vec3>& cloud, double radius) {
  MapMetrics m = LocalCovarianceMetric(cloud, radius, [](const Mat3& cov, double& v) {
    const SymEigen<3> eig = eigen_sym3(cov);
    v = std::sqrt(std::max(eig.values[0], 0.0));
    return true;
  });
  m.mme = 0.0;
  return m;
}

}  // namespace ef
