#include "ef/plane.hpp"

#include "ef/kernels.hpp"

#include <cmath>

namespace ef {

namespace {

// d >= 0, ties broken by the first nonzero normal component.
void ApplySignConvention(Vec4& pi) {
  bool flip = false;
  if (pi[3] < -1e-12) {
    flip = true;
  } else if (std::abs(pi[3]) <= 1e-12) {
    for (int i = 0; i < 3; ++i) {
      if (pi[i] != 0.0) {
        flip = pi[i] < 0;
        break;
      }
    }
  }
  if (flip) pi = -pi;
}

PlaneFit FitFromEigen(const SymEigen<4>& eig, double scale) {
  const Vec4 v = eig.vectors.col(0);
  const double nn = v.head<3>().norm();
  if (nn < 1e-8) {
    throw degenerate_plane_error("plane_from_q: plane at infinity (normal part of v_min vanishes)");
  }
  const double k = 1.0 / nn;
  Vec4 pi = k * v;
  ApplySignConvention(pi);

  double lambda = k * k * eig.values[0];
  if (lambda < 0) {
    if (lambda < -1e-9 * std::max(scale, 1.0)) {
      throw std::invalid_argument("plane_from_q: Q is not positive semidefinite");
    }
    lambda = 0.0;  // eigenvalue roundoff below the PSD floor
  }

  PlaneFit fit;
  fit.plane.eta = pi.head<3>();
  fit.plane.d = pi[3];
  fit.lambda = lambda;
  fit.ill_conditioned = (eig.values[1] - eig.values[0]) <= 1e-12 * std::max(scale, 1.0);
  return fit;
}

}  // namespace

Plane Plane::transformed(const Pose& T) const {
  // T^-T acting on homogeneous plane coordinates: normal rotates, offset
  // shifts by -n . t.
  const Mat3 R = T.rotation();
  Plane out;
  out.eta = R * eta;
  out.d = d - out.eta.dot(T.translation());
  const double n = out.eta.norm();
  out.eta /= n;
  out.d /= n;
  return out;
}

SummationMatrix s_accumulate(const std::vector<Vec3>& points) {
  for (const auto& p : points) {
    if (!p.allFinite()) throw std::invalid_argument("s_accumulate: non-finite point");
  }
  SummationMatrix out;
  if (points.empty()) return out;
  out.S = kernels::accumulate_outer(points.front().data(), points.size());
  return out;
}

SummationMatrix s_transform(const SummationMatrix& S, const Pose& T) {
  SummationMatrix out;
  out.S = T.matrix() * S.S * T.matrix().transpose();
  out.S = 0.5 * (out.S + out.S.transpose()).eval();
  out.S(3, 3) = S.S(3, 3);  // exact point count survives the similarity
  return out;
}

QMatrix q_assemble(const std::vector<Pose>& trajectory,
                   const std::vector<SummationMatrix>& s_blocks) {
  if (trajectory.size() != s_blocks.size()) {
    throw std::invalid_argument("q_assemble: trajectory and S-block counts differ");
  }
  QMatrix q;
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    q.Q += s_transform(s_blocks[t], trajectory[t]).S;
  }
  return q;
}

PlaneFit plane_from_q(const QMatrix& Q) {
  return FitFromEigen(eigen_sym4(Q.Q), Q.Q.norm());
}

PlaneFit plane_estimate_centered(const std::vector<Vec3>& points) {
  if (points.size() < 3) {
    throw std::invalid_argument("plane_estimate_centered: need at least 3 points");
  }
  Vec3 mean = Vec3::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());

  Mat3 scatter = Mat3::Zero();
  for (const auto& p : points) {
    const Vec3 c = p - mean;
    scatter += c * c.transpose();
  }
  const SymEigen<3> eig = eigen_sym3(scatter);
  if (eig.values[1] <= 1e-12 * std::max(scatter.trace(), 1.0)) {
    throw degenerate_plane_error("plane_estimate_centered: points are collinear");
  }

  Vec4 pi;
  pi.head<3>() = eig.vectors.col(0);
  pi[3] = -eig.vectors.col(0).dot(mean);
  ApplySignConvention(pi);

  PlaneFit fit;
  fit.plane.eta = pi.head<3>();
  fit.plane.d = pi[3];
  fit.lambda = std::max(eig.values[0], 0.0);
  fit.ill_conditioned =
      (eig.values[1] - eig.values[0]) <= 1e-12 * std::max(scatter.norm(), 1.0);
  return fit;
}

CenterTransform center_transform(const QMatrix& Q) {
  const double n = Q.point_count();
  if (!(n >= 1.0)) {
    throw std::invalid_argument("center_transform: empty Q (N < 1)");
  }
  const Vec3 mu = Q.q_vector() / n;

  CenterTransform out;
  Mat4 tc = Mat4::Identity();
  tc.topRightCorner<3, 1>() = -mu;
  out.Tc = Pose::FromMatrixUnchecked(tc);

  // Blocks written directly: the off-diagonal block of Tc Q Tc^T is zero in
  // exact arithmetic, so it is stored as exact zero.
  Mat4 qc = Mat4::Zero();
  const Vec3 q = Q.q_vector();
  Mat3 pb = Q.p_block() - (q * q.transpose()) / n;
  qc.topLeftCorner<3, 3>() = 0.5 * (pb + pb.transpose());
  qc(3, 3) = n;
  out.Qc.Q = qc;
  return out;
}

}  // namespace ef
