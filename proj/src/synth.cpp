#include "ef/synth.hpp"

#include "ef/rng.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <stdexcept>

namespace ef {

namespace {

constexpr std::uint64_t kStreamTrajectory = 1;
constexpr std::uint64_t kStreamPlanes = 2;
constexpr std::uint64_t kStreamPoints = 3;
constexpr std::uint64_t kStreamPerturb = 4;

// Deterministic in-plane orthonormal basis for a unit normal.
void PlaneBasis(const Vec3& n, Vec3& a, Vec3& b) {
  const Vec3 ref = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  a = n.cross(ref).normalized();
  b = n.cross(a);
}

}  // namespace

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] so the log is finite.
  const double u1 =
      (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_ = r * std::sin(angle);
  have_spare_ = true;
  return r * std::cos(angle);
}

Vec3 Rng::unit_vector() {
  while (true) {
    const Vec3 v(gaussian(), gaussian(), gaussian());
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

void WorldSpec::validate() const {
  if (n_poses < 1 || n_planes < 1 || points_per_plane < 1) {
    throw std::invalid_argument("WorldSpec: counts must be >= 1");
  }
  if (point_noise_sigma < 0 || perturb_trans < 0 || perturb_rot_deg < 0) {
    throw std::invalid_argument("WorldSpec: noise and perturbation must be >= 0");
  }
  if (scene_radius <= 0 || patch_half_side <= 0) {
    throw std::invalid_argument("WorldSpec: scene dimensions must be positive");
  }
}

std::vector<std::vector<SummationMatrix>> Dataset::s_blocks_per_plane() const {
  std::vector<std::vector<SummationMatrix>> blocks(
      static_cast<size_t>(spec.n_planes));
  for (auto& b : blocks) b.resize(clouds.size());

  std::vector<std::vector<std::vector<Vec3>>> grouped(
      static_cast<size_t>(spec.n_planes));
  for (auto& g : grouped) g.resize(clouds.size());
  for (std::size_t t = 0; t < clouds.size(); ++t) {
    for (const auto& lp : clouds[t]) {
      grouped[static_cast<size_t>(lp.plane_id)][t].push_back(lp.p);
    }
  }
  for (std::size_t m = 0; m < grouped.size(); ++m) {
    for (std::size_t t = 0; t < clouds.size(); ++t) {
      blocks[m][t] = s_accumulate(grouped[m][t]);
    }
  }
  return blocks;
}

Dataset generate(const WorldSpec& spec) {
  spec.validate();
  Dataset d;
  d.spec = spec;

  // Smooth random-walk trajectory; first pose at identity.
  {
    Rng rng(spec.seed, kStreamTrajectory);
    d.gt_trajectory.push_back(Pose());
    const double rot_std = 2.0 * M_PI / 180.0;
    const double trans_std = 0.2;
    for (int t = 1; t < spec.n_poses; ++t) {
      Twist step;
      for (int i = 0; i < 3; ++i) step[i] = rng.gaussian(rot_std);
      for (int i = 3; i < 6; ++i) step[i] = rng.gaussian(trans_std);
      d.gt_trajectory.push_back(exp(step) * d.gt_trajectory.back());
    }
  }

  // Planes: uniform normals, offsets uniform in [-r, r].
  {
    Rng rng(spec.seed, kStreamPlanes);
    for (int m = 0; m < spec.n_planes; ++m) {
      Plane pl;
      pl.eta = rng.unit_vector();
      pl.d = rng.uniform(-spec.scene_radius, spec.scene_radius);
      d.planes_gt.push_back(pl);
    }
  }

  // Points: square patch in plane coordinates, Gaussian displacement along
  // the normal clipped at 4 sigma, stored in the sensor-local frame.
  d.clouds.resize(static_cast<size_t>(spec.n_poses));
  for (int m = 0; m < spec.n_planes; ++m) {
    const Plane& pl = d.planes_gt[static_cast<size_t>(m)];
    Vec3 a, b;
    PlaneBasis(pl.eta, a, b);
    const Vec3 origin = -pl.d * pl.eta;
    for (int t = 0; t < spec.n_poses; ++t) {
      Rng rng(spec.seed, kStreamPoints, static_cast<std::uint64_t>(m),
              static_cast<std::uint64_t>(t));
      const Pose inv = d.gt_trajectory[static_cast<size_t>(t)].inverse();
      for (int n = 0; n < spec.points_per_plane; ++n) {
        const double u = rng.uniform(-spec.patch_half_side, spec.patch_half_side);
        const double v = rng.uniform(-spec.patch_half_side, spec.patch_half_side);
        double h = 0.0;
        if (spec.point_noise_sigma > 0) {
          h = rng.gaussian(spec.point_noise_sigma);
          const double cap = 4.0 * spec.point_noise_sigma;
          h = std::clamp(h, -cap, cap);
        }
        const Vec3 global = origin + u * a + v * b + h * pl.eta;
        d.clouds[static_cast<size_t>(t)].push_back({inv * global, m});
      }
    }
  }

  d.initial_trajectory = perturb(d.gt_trajectory, spec.perturb_trans,
                                 spec.perturb_rot_deg,
                                 Rng(spec.seed, kStreamPerturb).next_u64());
  return d;
}

std::vector<Pose> perturb(const std::vector<Pose>& trajectory, double trans,
                          double rot_deg, std::uint64_t seed) {
  if (trans < 0 || rot_deg < 0) {
    throw std::invalid_argument("perturb: magnitudes must be >= 0");
  }
  Rng rng(seed);
  std::vector<Pose> out = trajectory;
  const double rot = rot_deg * M_PI / 180.0;
  for (std::size_t t = 1; t < out.size(); ++t) {
    Twist xi;
    xi.head<3>() = rot * rng.unit_vector();
    xi.tail<3>() = trans * rng.unit_vector();
    out[t] = exp(xi) * out[t];
  }
  return out;
}

Problem make_problem(const Dataset& d, const OptimizerConfig& config,
                     bool start_at_ground_truth) {
  Problem p;
  p.trajectory = start_at_ground_truth ? d.gt_trajectory : d.initial_trajectory;
  p.config = config;
  p.anchor = 0;
  const auto blocks = d.s_blocks_per_plane();
  for (int m = 0; m < d.spec.n_planes; ++m) {
    EigenFactor f;
    f.id = m;
    for (int t = 0; t < d.spec.n_poses; ++t) {
      f.s_blocks.emplace_back(t, blocks[static_cast<size_t>(m)][static_cast<size_t>(t)]);
    }
    p.factors.push_back(std::move(f));
  }
  return p;
}

}  // namespace ef
