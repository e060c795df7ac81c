#include "ef/plane.hpp"

#include "ef/kernels.hpp"
#include "test_util.hpp"

#include <doctest.h>

using namespace ef;

namespace {

double brute_force_sse(const std::vector<Vec3>& pts, const Plane& pl) {
  double acc = 0;
  for (const auto& p : pts) {
    const double e = pl.distance(p);
    acc += e * e;
  }
  return acc;
}

QMatrix q_of_points(const std::vector<Vec3>& pts) {
  QMatrix q;
  q.Q = s_accumulate(pts).S;
  return q;
}

}  // namespace

TEST_CASE("s_accumulate basics") {
  CHECK(s_accumulate({}).S.isZero(0.0));
  CHECK(s_accumulate({}).count() == 0);

  const Vec3 p(1, 2, 3);
  const SummationMatrix s = s_accumulate({p});
  const Vec4 ph(1, 2, 3, 1);
  CHECK((s.S - ph * ph.transpose()).norm() == 0.0);
  CHECK(s.S(3, 3) == 1.0);

  const SummationMatrix k3 = s_accumulate({Vec3::Zero(), Vec3::Zero(), Vec3::Zero()});
  CHECK(k3.S(3, 3) == 3.0);
  CHECK(k3.S.topLeftCorner<3, 4>().isZero(0.0));
}

TEST_CASE("s_accumulate superposition") {
  Rng rng(101);
  std::vector<Vec3> a, b, all;
  for (int i = 0; i < 17; ++i) a.push_back(Vec3(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)));
  for (int i = 0; i < 9; ++i) b.push_back(Vec3(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)));
  all = a;
  all.insert(all.end(), b.begin(), b.end());
  CHECK((s_accumulate(all).S - (s_accumulate(a).S + s_accumulate(b).S)).norm() <
        1e-12);
}

TEST_CASE("s_transform") {
  Rng rng(103);
  const Vec3 p(0.3, -1.2, 2.0);
  const SummationMatrix s = s_accumulate({p});

  CHECK((s_transform(s, Pose()).S - s.S).norm() == 0.0);

  const Pose T = test::random_pose(rng);
  const SummationMatrix st = s_transform(s, T);
  const SummationMatrix direct = s_accumulate({T * p});
  CHECK((st.S - direct.S).norm() < 1e-12 * direct.S.norm());

  // point count is preserved exactly
  std::vector<Vec3> pts;
  for (int i = 0; i < 23; ++i) pts.push_back(Vec3(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)));
  CHECK(s_transform(s_accumulate(pts), T).S(3, 3) == 23.0);
}

TEST_CASE("q_assemble matches the point-level brute force") {
  Rng rng(107);
  const int H = 3;
  std::vector<Pose> traj;
  std::vector<SummationMatrix> blocks;
  std::vector<Vec3> global_points;
  for (int t = 0; t < H; ++t) {
    traj.push_back(test::random_pose(rng));
    std::vector<Vec3> local;
    for (int i = 0; i < 40; ++i) {
      local.push_back(Vec3(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)));
      global_points.push_back(traj.back() * local.back());
    }
    blocks.push_back(s_accumulate(local));
  }
  const QMatrix q = q_assemble(traj, blocks);
  const Mat4 ref = s_accumulate(global_points).S;
  CHECK((q.Q - ref).norm() <= 1e-9 * ref.norm());
  CHECK((q.Q - q.Q.transpose()).norm() <= 1e-12 * ref.norm());

  // identity trajectory degenerates to the plain sum
  std::vector<Pose> ident(H);
  Mat4 sum = Mat4::Zero();
  for (const auto& b : blocks) sum += b.S;
  CHECK((q_assemble(ident, blocks).Q - sum).norm() == 0.0);

  CHECK_THROWS_AS(q_assemble(traj, {blocks[0]}), std::invalid_argument);
}

TEST_CASE("plane_from_q recovers exact planes") {
  // grid on z = 0
  std::vector<Vec3> pts;
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j) pts.push_back(Vec3(i * 0.5, j * 0.5, 0.0));
  const PlaneFit f0 = plane_from_q(q_of_points(pts));
  CHECK(std::abs(std::abs(f0.plane.eta.z()) - 1.0) < 1e-12);
  CHECK(std::abs(f0.plane.d) < 1e-12);
  CHECK(f0.lambda <= 1e-12);

  // z = 5: sign convention forces d >= 0, hence eta = -z
  for (auto& p : pts) p.z() = 5.0;
  const PlaneFit f5 = plane_from_q(q_of_points(pts));
  CHECK(f5.plane.d == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(f5.plane.eta.z() == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(f5.lambda <= 1e-9);
}

TEST_CASE("plane_from_q lambda equals the brute-force SSE of its plane") {
  Rng rng(109);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 eta = rng.unit_vector();
    const double d = rng.uniform(-5, 5);
    auto pts = test::patch_points(eta, d, 50, 1.0, 0.04, rng);
    const PlaneFit fit = plane_from_q(q_of_points(pts));
    const double sse = brute_force_sse(pts, fit.plane);
    CHECK(fit.lambda == doctest::Approx(sse).epsilon(1e-10));
    CHECK(fit.lambda >= 0.0);
  }
}

TEST_CASE("plane_from_q rejects a plane at infinity") {
  // isotropic blob: the minimum eigenvector of the centered Q is e4
  Rng rng(113);
  std::vector<Vec3> pts;
  for (int i = 0; i < 200; ++i) pts.push_back(5.0 * rng.unit_vector());
  const CenterTransform c = center_transform(q_of_points(pts));
  CHECK_THROWS_AS(plane_from_q(c.Qc), degenerate_plane_error);
}

TEST_CASE("plane_from_q flags a near-degenerate eigenvalue gap") {
  QMatrix q;
  q.Q = Mat4::Zero();
  q.Q.diagonal() << 1.0, 1.0, 2.0, 3.0;
  const PlaneFit fit = plane_from_q(q);
  CHECK(fit.ill_conditioned);
}

TEST_CASE("plane_estimate_centered basics") {
  std::vector<Vec3> pts;
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j) pts.push_back(Vec3(0.4 * i, 0.4 * j, 0.0));
  const PlaneFit f = plane_estimate_centered(pts);
  CHECK(std::abs(std::abs(f.plane.eta.z()) - 1.0) < 1e-12);
  CHECK(std::abs(f.plane.d) < 1e-12);

  // translation equivariance: same normal, offset shifts by -eta . delta
  const Vec3 delta(0.7, -0.3, 2.1);
  auto shifted = pts;
  for (auto& p : shifted) p += delta;
  const PlaneFit g = plane_estimate_centered(shifted);
  const double flip = f.plane.eta.dot(g.plane.eta) >= 0 ? 1.0 : -1.0;
  CHECK((flip * g.plane.eta - f.plane.eta).norm() < 1e-12);
  CHECK(flip * g.plane.d == doctest::Approx(f.plane.d - f.plane.eta.dot(delta)).epsilon(1e-10));

  CHECK_THROWS_AS(plane_estimate_centered({pts[0], pts[1]}), std::invalid_argument);
  CHECK_THROWS_AS(
      plane_estimate_centered({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(3, 0, 0)}),
      degenerate_plane_error);
}

TEST_CASE("centered fit agrees with the centered eigendecomposition route") {
  Rng rng(127);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 eta = rng.unit_vector();
    const double d = rng.uniform(-5, 5);
    auto pts = test::patch_points(eta, d, 80, 1.0, 0.04, rng);
    const PlaneFit direct = plane_estimate_centered(pts);

    const CenterTransform c = center_transform(q_of_points(pts));
    const PlaneFit via_q = plane_from_q(c.Qc);
    CHECK(via_q.lambda == doctest::Approx(direct.lambda).epsilon(1e-8));
    CHECK(direct.lambda ==
          doctest::Approx(brute_force_sse(pts, direct.plane)).epsilon(1e-9));
  }
}

TEST_CASE("center_transform structure") {
  Rng rng(131);
  // centered data: Tc = identity, Qc = Q
  std::vector<Vec3> sym;
  for (int i = 0; i < 60; ++i) {
    const Vec3 p(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    sym.push_back(p);
    sym.push_back(-p);
  }
  const QMatrix q0 = q_of_points(sym);
  const CenterTransform c0 = center_transform(q0);
  CHECK((c0.Tc.matrix() - Mat4::Identity()).norm() < 1e-12);
  CHECK((c0.Qc.Q - q0.Q).norm() < 1e-9 * q0.Q.norm());

  // single point: zero covariance block
  const QMatrix q1 = q_of_points({Vec3(3, -1, 2)});
  const CenterTransform c1 = center_transform(q1);
  CHECK(c1.Qc.Q.topLeftCorner<3, 3>().norm() < 1e-12);
  CHECK(c1.Qc.Q.topRightCorner<3, 1>().norm() == 0.0);
  CHECK(c1.Qc.Q(3, 3) == 1.0);

  QMatrix empty;
  CHECK_THROWS_AS(center_transform(empty), std::invalid_argument);
}

TEST_CASE("centering leaves the cost of a transported plane unchanged") {
  Rng rng(137);
  for (int trial = 0; trial < 20; ++trial) {
    auto pts = test::patch_points(rng.unit_vector(), rng.uniform(-4, 4), 60, 1.0,
                                  0.03, rng);
    const QMatrix q = q_of_points(pts);
    const CenterTransform c = center_transform(q);
    const PlaneFit cfit = plane_from_q(c.Qc);
    // transport the centered plane to the raw frame and evaluate both forms
    const Vec4 cpi = cfit.plane.homogeneous();
    const Vec4 pi = c.Tc.matrix().transpose() * cpi;
    const double raw = pi.dot(q.Q * pi);
    const double centered = cpi.dot(c.Qc.Q * cpi);
    CHECK(raw == doctest::Approx(centered).epsilon(1e-9));
    CHECK(cfit.lambda == doctest::Approx(raw).epsilon(1e-9));
  }
}

TEST_CASE("q mean matches the point mean") {
  Rng rng(139);
  std::vector<Vec3> pts;
  Vec3 mean = Vec3::Zero();
  for (int i = 0; i < 77; ++i) {
    pts.push_back(Vec3(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)));
    mean += pts.back();
  }
  mean /= 77.0;
  const QMatrix q = q_of_points(pts);
  CHECK((q.mean() - mean).norm() <= 1e-9 * std::max(mean.norm(), 1.0));
}

TEST_CASE("cost is invariant to a common rigid transform of the trajectory") {
  Rng rng(149);
  const int H = 4;
  std::vector<Pose> traj;
  std::vector<SummationMatrix> blocks;
  const Vec3 eta = rng.unit_vector();
  const double d = rng.uniform(-3, 3);
  for (int t = 0; t < H; ++t) {
    traj.push_back(test::random_pose(rng, 0.4, 1.0));
    auto local = test::patch_points(eta, d, 40, 1.0, 0.05, rng);
    for (auto& p : local) p = traj.back().inverse() * p;
    blocks.push_back(s_accumulate(local));
  }
  auto lambda_of = [&](const std::vector<Pose>& tr) {
    const CenterTransform c = center_transform(q_assemble(tr, blocks));
    return plane_from_q(c.Qc).lambda;
  };
  const double base = lambda_of(traj);
  const Pose W = test::random_pose(rng);
  std::vector<Pose> moved;
  for (const auto& T : traj) moved.push_back(W * T);
  CHECK(lambda_of(moved) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("plane constraint survives covariant transforms") {
  Rng rng(151);
  const Vec3 eta = rng.unit_vector();
  const double d = rng.uniform(-2, 2);
  const auto pts = test::patch_points(eta, d, 30, 1.0, 0.0, rng);
  Plane pl{eta, d};
  const Pose T = test::random_pose(rng);
  const Plane moved = pl.transformed(T);
  for (const auto& p : pts) {
    CHECK(std::abs(moved.distance(T * p)) < 1e-12);
  }
}
