#pragma once

#include "ef/rng.hpp"
#include "ef/se3.hpp"

#include <vector>

namespace ef::test {

inline Twist random_twist(Rng& rng, double rot_range, double trans_range) {
  Twist xi;
  for (int i = 0; i < 3; ++i) xi[i] = rng.uniform(-rot_range, rot_range);
  for (int i = 3; i < 6; ++i) xi[i] = rng.uniform(-trans_range, trans_range);
  return xi;
}

inline Pose random_pose(Rng& rng, double rot_range = 2.0,
                        double trans_range = 3.0) {
  return exp(random_twist(rng, rot_range, trans_range));
}

/// Truncated matrix-exponential series: independent oracle for exp().
inline Mat4 expm_series(const Mat4& A, int terms = 30) {
  Mat4 acc = Mat4::Identity();
  Mat4 term = Mat4::Identity();
  for (int k = 1; k <= terms; ++k) {
    term = (term * A / static_cast<double>(k)).eval();
    acc += term;
  }
  return acc;
}

/// Points sampled on the plane eta . p + d = 0 over a square patch, with
/// optional displacement along the normal.
inline std::vector<Vec3> patch_points(const Vec3& eta_in, double d, int n,
                                      double half_side, double sigma, Rng& rng) {
  const Vec3 eta = eta_in.normalized();
  const Vec3 ref = std::abs(eta.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 a = eta.cross(ref).normalized();
  const Vec3 b = eta.cross(a);
  std::vector<Vec3> pts;
  pts.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform(-half_side, half_side);
    const double v = rng.uniform(-half_side, half_side);
    const double h = sigma > 0 ? rng.gaussian(sigma) : 0.0;
    pts.push_back(-d * eta + u * a + v * b + h * eta);
  }
  return pts;
}

}  // namespace ef::test
