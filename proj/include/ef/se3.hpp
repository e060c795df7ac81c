#pragma once

#include <Eigen/Core>

namespace ef {

using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

/// Tangent-space coordinates of SE(3), rotation-first: [theta1..theta3, rho1..rho3].
/// theta in radians, rho in meters. This ordering is a hard contract for every
/// serialization and generator index in the library.
using Twist = Vec6;

/// Rigid body transform. Wraps a 4x4 homogeneous matrix with rotation block R
/// and translation t; maps local points into the parent (global) frame.
class Pose {
 public:
  Pose() : m_(Mat4::Identity()) {}

  /// Validating constructor: R orthonormal and det(R)=+1 within 1e-9,
  /// bottom row exactly [0,0,0,1]. Throws std::invalid_argument otherwise.
  explicit Pose(const Mat4& m);

  static Pose FromRt(const Mat3& R, const Vec3& t);

  /// No validity check; for internal composition where the invariant is
  /// preserved by construction.
  static Pose FromMatrixUnchecked(const Mat4& m) {
    Pose p;
    p.m_ = m;
    return p;
  }

  const Mat4& matrix() const { return m_; }
  Mat3 rotation() const { return m_.topLeftCorner<3, 3>(); }
  Vec3 translation() const { return m_.topRightCorner<3, 1>(); }

  Pose inverse() const;
  Pose operator*(const Pose& rhs) const {
    return FromMatrixUnchecked(m_ * rhs.m_);
  }

  Vec3 operator*(const Vec3& p) const {
    return m_.topLeftCorner<3, 3>() * p + m_.topRightCorner<3, 1>();
  }

  /// Frobenius deviation from a rigid transform (orthonormality + det + bottom row).
  double rigidity_error() const;

  bool is_valid(double tol = 1e-9) const { return rigidity_error() <= tol; }

 private:
  Mat4 m_;
};

/// se(3) basis matrix G_i, i in [0,6): the derivative of the exponential map
/// at zero along coordinate i. Indices 0..2 are the rotation generators,
/// 3..5 the translation ones.
const Mat4& generator(int i);

/// hat(xi): the 4x4 Lie-algebra matrix. Linear in xi, zero bottom row.
Mat4 hat(const Twist& xi);

Mat3 hat3(const Vec3& w);

/// Closed-form exponential map (Rodrigues rotation + V-matrix translation),
/// with a Taylor branch below |theta| = 1e-6.
Pose exp(const Twist& xi);

/// Inverse of exp. Requires rotation angle < pi - 1e-6; throws
/// std::domain_error at or beyond the branch cut.
Twist log(const Pose& T);

/// d(Exp)/dxi_i at xi = 0. Equals generator(i).
const Mat4& dexp_at_zero(int i);

/// d2(Exp)/dxi_i dxi_j at xi = 0: (G_i G_j + G_j G_i) / 2.
Mat4 d2exp_at_zero(int i, int j);

/// Left retraction: Exp(xi) * T.
Pose retract(const Pose& T, const Twist& xi);

}  // namespace ef
