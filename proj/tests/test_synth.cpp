#include "ef/synth.hpp"

#include "ef/io.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <map>
#include <sstream>

using namespace ef;

TEST_CASE("generation is deterministic to the byte") {
  WorldSpec spec;
  spec.seed = 7;
  const Dataset a = generate(spec);
  const Dataset b = generate(spec);
  std::ostringstream sa, sb;
  write_dataset(sa, a);
  write_dataset(sb, b);
  CHECK(sa.str() == sb.str());

  WorldSpec other = spec;
  other.seed = 8;
  std::ostringstream sc;
  write_dataset(sc, generate(other));
  CHECK(sa.str() != sc.str());
}

TEST_CASE("zero-noise points lie exactly on their planes") {
  WorldSpec spec;
  spec.point_noise_sigma = 0.0;
  spec.seed = 12;
  const Dataset d = generate(spec);
  for (std::size_t t = 0; t < d.clouds.size(); ++t) {
    for (const auto& lp : d.clouds[t]) {
      const Vec3 global = d.gt_trajectory[t] * lp.p;
      CHECK(std::abs(d.planes_gt[static_cast<size_t>(lp.plane_id)].distance(global)) < 1e-12);
    }
  }
}

TEST_CASE("noisy points stay within the 4-sigma clip") {
  WorldSpec spec;
  spec.seed = 13;
  const Dataset d = generate(spec);
  const double cap = 4.0 * spec.point_noise_sigma + 1e-9;
  for (std::size_t t = 0; t < d.clouds.size(); ++t) {
    for (const auto& lp : d.clouds[t]) {
      const Vec3 global = d.gt_trajectory[t] * lp.p;
      CHECK(std::abs(d.planes_gt[static_cast<size_t>(lp.plane_id)].distance(global)) <= cap);
    }
  }
}

TEST_CASE("per-plane residual variance estimates sigma^2") {
  WorldSpec spec;
  spec.seed = 29;
  const Dataset d = generate(spec);
  const auto blocks = d.s_blocks_per_plane();
  const double n_per_plane = static_cast<double>(spec.n_poses * spec.points_per_plane);
  double ratio_sum = 0;
  for (int m = 0; m < spec.n_planes; ++m) {
    const QMatrix q = q_assemble(d.gt_trajectory, blocks[static_cast<size_t>(m)]);
    const double lambda = plane_from_q(center_transform(q).Qc).lambda;
    ratio_sum += lambda / n_per_plane;
  }
  const double sigma2 = spec.point_noise_sigma * spec.point_noise_sigma;
  const double mean_ratio = ratio_sum / spec.n_planes;
  CHECK(mean_ratio == doctest::Approx(sigma2).epsilon(0.25));
}

TEST_CASE("labels are exhaustive and unique") {
  WorldSpec spec;
  spec.n_poses = 4;
  spec.n_planes = 5;
  spec.points_per_plane = 11;
  spec.seed = 31;
  const Dataset d = generate(spec);
  for (const auto& cloud : d.clouds) {
    CHECK(cloud.size() == static_cast<size_t>(spec.n_planes * spec.points_per_plane));
    std::map<int, int> counts;
    for (const auto& lp : cloud) {
      REQUIRE(lp.plane_id >= 0);
      REQUIRE(lp.plane_id < spec.n_planes);
      counts[lp.plane_id]++;
    }
    for (const auto& [id, c] : counts) CHECK(c == spec.points_per_plane);
  }
}

TEST_CASE("perturb with zero magnitudes is the identity") {
  Rng rng(37);
  std::vector<Pose> traj;
  for (int t = 0; t < 5; ++t) traj.push_back(test::random_pose(rng));
  const auto out = perturb(traj, 0.0, 0.0, 99);
  for (std::size_t t = 0; t < traj.size(); ++t) {
    CHECK((out[t].matrix() - traj[t].matrix()).norm() == 0.0);
  }
}

TEST_CASE("perturb applies exact twist magnitudes and keeps the anchor") {
  Rng rng(41);
  std::vector<Pose> traj;
  for (int t = 0; t < 6; ++t) traj.push_back(test::random_pose(rng));
  const double trans = 0.05, rot_deg = 5.0;
  const auto out = perturb(traj, trans, rot_deg, 4242);

  CHECK((out[0].matrix() - traj[0].matrix()).norm() == 0.0);
  for (std::size_t t = 1; t < traj.size(); ++t) {
    const Twist xi =
        log(Pose::FromMatrixUnchecked(out[t].matrix() * traj[t].inverse().matrix()));
    CHECK(xi.head<3>().norm() == doctest::Approx(rot_deg * M_PI / 180.0).epsilon(1e-9));
    CHECK(xi.tail<3>().norm() == doctest::Approx(trans).epsilon(1e-9));
  }
}

TEST_CASE("dataset perturbation honors the anchor in make_problem") {
  WorldSpec spec;
  spec.seed = 47;
  const Dataset d = generate(spec);
  CHECK((d.initial_trajectory[0].matrix() - d.gt_trajectory[0].matrix()).norm() == 0.0);
  bool any_moved = false;
  for (std::size_t t = 1; t < d.gt_trajectory.size(); ++t) {
    any_moved |= (d.initial_trajectory[t].matrix() - d.gt_trajectory[t].matrix()).norm() > 1e-3;
  }
  CHECK(any_moved);
}

TEST_CASE("spec validation") {
  WorldSpec spec;
  spec.n_planes = 0;
  CHECK_THROWS_AS(generate(spec), std::invalid_argument);
  spec = WorldSpec{};
  spec.point_noise_sigma = -0.1;
  CHECK_THROWS_AS(generate(spec), std::invalid_argument);
  CHECK_THROWS_AS(perturb({Pose()}, -1.0, 0.0, 1), std::invalid_argument);
}
