#include "ef/se3.hpp"

#include <array>

#include <Eigen/LU>
#include <cmath>
#include <stdexcept>

namespace ef {

namespace {

constexpr double kSmallAngle = 1e-6;

std::array<Mat4, 6> MakeGenerators() {
  std::array<Mat4, 6> G;
  for (int i = 0; i < 6; ++i) {
    Twist xi = Twist::Zero();
    xi[i] = 1.0;
    G[i] = hat(xi);
  }
  return G;
}

const std::array<Mat4, 6>& Generators() {
  static const std::array<Mat4, 6> G = MakeGenerators();
  return G;
}

}  // namespace

Pose::Pose(const Mat4& m) : m_(m) {
  Pose p = FromMatrixUnchecked(m);
  if (!m.allFinite() || p.rigidity_error() > 1e-9) {
    throw std::invalid_argument("Pose: matrix is not a rigid transform");
  }
}

Pose Pose::FromRt(const Mat3& R, const Vec3& t) {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = R;
  m.topRightCorner<3, 1>() = t;
  return FromMatrixUnchecked(m);
}

Pose Pose::inverse() const {
  const Mat3 Rt = m_.topLeftCorner<3, 3>().transpose();
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = Rt;
  m.topRightCorner<3, 1>() = -Rt * m_.topRightCorner<3, 1>();
  return FromMatrixUnchecked(m);
}

double Pose::rigidity_error() const {
  const Mat3 R = m_.topLeftCorner<3, 3>();
  double err = (R.transpose() * R - Mat3::Identity()).norm();
  err = std::max(err, std::abs(R.determinant() - 1.0));
  err = std::max(err, (m_.row(3) - Eigen::RowVector4d(0, 0, 0, 1)).norm());
  return err;
}

const Mat4& generator(int i) {
  if (i < 0 || i >= 6) throw std::out_of_range("generator: index must be in [0,6)");
  return Generators()[static_cast<size_t>(i)];
}

Mat3 hat3(const Vec3& w) {
  Mat3 m;
  m << 0, -w.z(), w.y(),
       w.z(), 0, -w.x(),
       -w.y(), w.x(), 0;
  return m;
}

Mat4 hat(const Twist& xi) {
  if (!xi.allFinite()) throw std::invalid_argument("hat: non-finite twist");
  Mat4 m = Mat4::Zero();
  m.topLeftCorner<3, 3>() = hat3(xi.head<3>());
  m.topRightCorner<3, 1>() = xi.tail<3>();
  return m;
}

Pose exp(const Twist& xi) {
  if (!xi.allFinite()) throw std::invalid_argument("exp: non-finite twist");
  const Vec3 theta = xi.head<3>();
  const Vec3 rho = xi.tail<3>();
  const double t = theta.norm();
  const Mat3 W = hat3(theta);
  const Mat3 W2 = W * W;

  double a, b, c;  // sin t / t, (1 - cos t) / t^2, (t - sin t) / t^3
  if (t < kSmallAngle) {
    const double t2 = t * t;
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
    c = 1.0 / 6.0 - t2 / 120.0;
  } else {
    const double t2 = t * t;
    a = std::sin(t) / t;
    b = (1.0 - std::cos(t)) / t2;
    c = (t - std::sin(t)) / (t2 * t);
  }

  const Mat3 R = Mat3::Identity() + a * W + b * W2;
  const Mat3 V = Mat3::Identity() + b * W + c * W2;
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = R;
  m.topRightCorner<3, 1>() = V * rho;
  return Pose::FromMatrixUnchecked(m);
}

Twist log(const Pose& T) {
  const Mat3 R = T.rotation();
  double ctheta = 0.5 * (R.trace() - 1.0);
  ctheta = std::clamp(ctheta, -1.0, 1.0);
  const double phi = std::acos(ctheta);
  if (phi >= M_PI - 1e-6) {
    throw std::domain_error("log: rotation angle at or near pi");
  }

  const Vec3 axis_raw(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
  Vec3 w;
  if (phi < kSmallAngle) {
    w = 0.5 * (1.0 + phi * phi / 6.0) * axis_raw;
  } else {
    w = (phi / (2.0 * std::sin(phi))) * axis_raw;
  }

  const double t = w.norm();
  const Mat3 W = hat3(w);
  const Mat3 W2 = W * W;
  double coeff;  // (1 - t sin t / (2 (1 - cos t))) / t^2
  if (t < kSmallAngle) {
    coeff = 1.0 / 12.0 + t * t / 720.0;
  } else {
    coeff = (1.0 - t * std::sin(t) / (2.0 * (1.0 - std::cos(t)))) / (t * t);
  }
  const Mat3 Vinv = Mat3::Identity() - 0.5 * W + coeff * W2;

  Twist xi;
  xi.head<3>() = w;
  xi.tail<3>() = Vinv * T.translation();
  return xi;
}

const Mat4& dexp_at_zero(int i) { return generator(i); }

Mat4 d2exp_at_zero(int i, int j) {
  const Mat4& Gi = generator(i);
  const Mat4& Gj = generator(j);
  return 0.5 * (Gi * Gj + Gj * Gi);
}

Pose retract(const Pose& T, const Twist& xi) { return exp(xi) * T; }

}  // namespace ef
