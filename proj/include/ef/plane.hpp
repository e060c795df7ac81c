#pragma once

#include "ef/se3.hpp"
#include "ef/sym_eigen.hpp"

#include <stdexcept>
#include <vector>

namespace ef {

struct degenerate_plane_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Plane eta . p + d = 0 with unit normal eta (d in meters, signed).
struct Plane {
  Vec3 eta = Vec3::UnitZ();
  double d = 0.0;

  Vec4 homogeneous() const { return Vec4(eta.x(), eta.y(), eta.z(), d); }

  /// Signed point-to-plane distance.
  double distance(const Vec3& p) const { return eta.dot(p) + d; }

  /// Covariant transform of plane coordinates: pi' = T^-T pi, renormalized to
  /// unit normal. Maps a plane expressed in the local frame of T to the parent
  /// frame.
  Plane transformed(const Pose& T) const;
};

/// Sum of outer products of homogeneous points observed from one pose.
/// entry(3,3) carries the exact point count.
struct SummationMatrix {
  Mat4 S = Mat4::Zero();

  std::size_t count() const { return static_cast<std::size_t>(S(3, 3)); }
};

/// Pose-dependent quadratic form of one plane landmark: sum over poses of
/// T_t S_t T_t^T, expressed in the global frame and recomputed from the
/// stored S blocks every time the trajectory changes.
struct QMatrix {
  Mat4 Q = Mat4::Zero();

  Eigen::Block<const Mat4, 3, 3> p_block() const {
    return Q.topLeftCorner<3, 3>();
  }
  Vec3 q_vector() const { return Q.topRightCorner<3, 1>(); }
  double point_count() const { return Q(3, 3); }
  Vec3 mean() const { return q_vector() / Q(3, 3); }
};

struct PlaneFit {
  Plane plane;
  double lambda = 0.0;        // scaled minimum eigenvalue == point-to-plane SSE
  bool ill_conditioned = false;  // near-degenerate eigenvalue gap
};

SummationMatrix s_accumulate(const std::vector<Vec3>& points);
SummationMatrix s_transform(const SummationMatrix& S, const Pose& T);

/// Sum of transformed S blocks over a trajectory. Throws on length mismatch.
QMatrix q_assemble(const std::vector<Pose>& trajectory,
                   const std::vector<SummationMatrix>& s_blocks);

/// Closed-form plane from the minimum eigenvector of Q, scaled so the normal
/// is unit (pi = k v_min, lambda = k^2 lambda_min). Sign convention: d >= 0;
/// when |d| < 1e-12 the first nonzero normal component is made positive.
/// Throws degenerate_plane_error when the normal part of v_min vanishes.
PlaneFit plane_from_q(const QMatrix& Q);

/// Reference estimator over raw points: normal from the 3x3 centered scatter,
/// d = -eta . mean. Returns the plane and its exact SSE.
PlaneFit plane_estimate_centered(const std::vector<Vec3>& points);

struct CenterTransform {
  Pose Tc;     // [I, -mean; 0, 1]
  QMatrix Qc;  // Tc Q Tc^T: zero off-diagonal block, p-block = N * covariance
};

/// Data-centering translation that zeroes the mean of Q. Off-diagonal block of
/// Qc is zero by construction. Throws std::invalid_argument when N < 1.
CenterTransform center_transform(const QMatrix& Q);

}  // namespace ef
