#pragma once

#include "ef/factor.hpp"
#include "ef/plane.hpp"
#include "ef/se3.hpp"

#include <cstdint>
#include <vector>

namespace ef {

/// Generation recipe. Defaults follow the standard synthetic benchmark
/// configuration: 10 poses, 10 planes, 50 points per plane per pose,
/// 0.04 m point-to-plane noise, 0.05 m / 5 degree trajectory perturbation.
struct WorldSpec {
  int n_poses = 10;
  int n_planes = 10;
  int points_per_plane = 50;      // per pose
  double point_noise_sigma = 0.04;  // meters, along the plane normal
  double perturb_trans = 0.05;      // meters (exact magnitude per pose)
  double perturb_rot_deg = 5.0;     // degrees (exact magnitude per pose)
  std::uint64_t seed = 1;
  double scene_radius = 5.0;        // plane offsets drawn in [-r, r]
  double patch_half_side = 1.0;     // square patch extent in plane coords

  void validate() const;
};

struct LabeledPoint {
  Vec3 p;        // sensor-local coordinates
  int plane_id;
};

struct Dataset {
  WorldSpec spec;
  std::vector<Pose> gt_trajectory;
  std::vector<Pose> initial_trajectory;  // perturbed
  std::vector<Plane> planes_gt;
  std::vector<std::vector<LabeledPoint>> clouds;  // one list per pose

  /// Summation matrices grouped per plane, one block per pose, built from the
  /// local-frame points.
  std::vector<std::vector<SummationMatrix>> s_blocks_per_plane() const;
};

/// Deterministic synthetic world: smooth random-walk trajectory, planes with
/// uniform normals and offsets, square patches sampled per pose, Gaussian
/// normal-direction noise clipped at 4 sigma. Every plane is observed from
/// every pose; substreams are split per (plane, pose) so datasets are stable
/// under parameter changes elsewhere.
Dataset generate(const WorldSpec& spec);

/// Left-multiply every pose except the anchor (index 0) by exp of a twist
/// with exact rotation magnitude rot_deg (uniform axis) and exact translation
/// part magnitude trans (uniform direction).
std::vector<Pose> perturb(const std::vector<Pose>& trajectory, double trans,
                          double rot_deg, std::uint64_t seed);

/// Problem assembly: one factor per plane with its per-pose S blocks, starting
/// at the dataset's perturbed trajectory.
Problem make_problem(const Dataset& d, const OptimizerConfig& config = {},
                     bool start_at_ground_truth = false);

}  // namespace ef
