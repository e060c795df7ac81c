#include "ef/kernels.hpp"

#include "ef/rng.hpp"

#include <doctest.h>

#include <vector>

using namespace ef;
namespace k = ef::kernels;

namespace {

std::vector<double> random_xyz(Rng& rng, std::size_t n, double scale) {
  std::vector<double> v(3 * n);
  for (auto& x : v) x = rng.uniform(-scale, scale);
  return v;
}

struct IsaGuard {
  k::Isa saved = k::active_isa();
  ~IsaGuard() { k::force_isa(saved); }
};

const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 31, 100, 1001};

}  // namespace

TEST_CASE("scalar and vector accumulate_outer agree") {
  IsaGuard guard;
  Rng rng(61);
  for (const std::size_t n : kSizes) {
    const auto xyz = random_xyz(rng, n, 20.0);
    const Mat4 ref = k::detail::accumulate_outer_scalar(xyz.data(), n);
    k::force_isa(k::Isa::kAvx2);
    const Mat4 got = k::accumulate_outer(xyz.data(), n);
    CHECK((got - ref).norm() <= 1e-12 * std::max(ref.norm(), 1.0));
    CHECK(got(3, 3) == static_cast<double>(n));
    CHECK((got - got.transpose()).norm() == 0.0);
  }
}

TEST_CASE("scalar and vector point_plane_sse agree") {
  IsaGuard guard;
  Rng rng(67);
  for (const std::size_t n : kSizes) {
    const auto xyz = random_xyz(rng, n, 5.0);
    const Vec3 eta = rng.unit_vector();
    const double d = rng.uniform(-3.0, 3.0);
    const double ref = k::detail::point_plane_sse_scalar(xyz.data(), n, eta, d);
    k::force_isa(k::Isa::kAvx2);
    const double got = k::point_plane_sse(xyz.data(), n, eta, d);
    CHECK(got == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("scalar and vector transform_points agree") {
  IsaGuard guard;
  Rng rng(71);
  for (const std::size_t n : kSizes) {
    const auto xyz = random_xyz(rng, n, 5.0);
    const Pose T = exp([&] {
      Twist xi;
      for (int i = 0; i < 6; ++i) xi[i] = rng.uniform(-1.0, 1.0);
      return xi;
    }());
    std::vector<double> ref(3 * n), got(3 * n);
    k::detail::transform_points_scalar(T.rotation(), T.translation(),
                                       xyz.data(), ref.data(), n);
    k::force_isa(k::Isa::kAvx2);
    k::transform_points(T.rotation(), T.translation(), xyz.data(), got.data(), n);
    for (std::size_t i = 0; i < 3 * n; ++i) {
      CHECK(got[i] == doctest::Approx(ref[i]).epsilon(1e-13));
    }
  }
}

TEST_CASE("transform_points works in place") {
  IsaGuard guard;
  Rng rng(73);
  const std::size_t n = 37;
  auto xyz = random_xyz(rng, n, 2.0);
  auto expected = xyz;
  const Mat3 R = Mat3::Identity();
  const Vec3 t(1, -2, 0.5);
  k::detail::transform_points_scalar(R, t, expected.data(), expected.data(), n);
  k::transform_points(R, t, xyz.data(), xyz.data(), n);
  for (std::size_t i = 0; i < 3 * n; ++i) {
    CHECK(xyz[i] == doctest::Approx(expected[i]).epsilon(1e-14));
  }
}

TEST_CASE("isa can be forced to scalar") {
  IsaGuard guard;
  k::force_isa(k::Isa::kScalar);
  CHECK(k::active_isa() == k::Isa::kScalar);
  if (k::avx2_supported()) {
    k::force_isa(k::Isa::kAvx2);
    CHECK(k::active_isa() == k::Isa::kAvx2);
  }
}
