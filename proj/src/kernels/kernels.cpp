#include "ef/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace ef::kernels {

namespace detail {

Mat4 accumulate_outer_scalar(const double* xyz, std::size_t n) {
  double xx = 0, xy = 0, xz = 0, yy = 0, yz = 0, zz = 0;
  double sx = 0, sy = 0, sz = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = xyz[3 * i], y = xyz[3 * i + 1], z = xyz[3 * i + 2];
    xx += x * x;
    xy += x * y;
    xz += x * z;
    yy += y * y;
    yz += y * z;
    zz += z * z;
    sx += x;
    sy += y;
    sz += z;
  }
  Mat4 S;
  S << xx, xy, xz, sx,
       xy, yy, yz, sy,
       xz, yz, zz, sz,
       sx, sy, sz, static_cast<double>(n);
  return S;
}

double point_plane_sse_scalar(const double* xyz, std::size_t n,
                              const Vec3& eta, double d) {
  double acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = eta.x() * xyz[3 * i] + eta.y() * xyz[3 * i + 1] +
                     eta.z() * xyz[3 * i + 2] + d;
    acc += e * e;
  }
  return acc;
}

void transform_points_scalar(const Mat3& R, const Vec3& t, const double* src,
                             double* dst, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double x = src[3 * i], y = src[3 * i + 1], z = src[3 * i + 2];
    const double ox = R(0, 0) * x + R(0, 1) * y + R(0, 2) * z + t.x();
    const double oy = R(1, 0) * x + R(1, 1) * y + R(1, 2) * z + t.y();
    const double oz = R(2, 0) * x + R(2, 1) * y + R(2, 2) * z + t.z();
    dst[3 * i] = ox;
    dst[3 * i + 1] = oy;
    dst[3 * i + 2] = oz;
  }
}

}  // namespace detail

namespace {

Isa InitialIsa() {
  if (const char* env = std::getenv("EF_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Isa::kScalar;
    if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return Isa::kAvx2;
  }
  return avx2_supported() ? Isa::kAvx2 : Isa::kScalar;
}

Isa g_isa = InitialIsa();

}  // namespace

bool avx2_supported() {
#ifdef EF_HAVE_AVX2_KERNELS
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() { return g_isa; }

void force_isa(Isa isa) {
  g_isa = (isa == Isa::kAvx2 && !avx2_supported()) ? Isa::kScalar : isa;
}

Mat4 accumulate_outer(const double* xyz, std::size_t n) {
#ifdef EF_HAVE_AVX2_KERNELS
  if (g_isa == Isa::kAvx2) return detail::accumulate_outer_avx2(xyz, n);
#endif
  return detail::accumulate_outer_scalar(xyz, n);
}

double point_plane_sse(const double* xyz, std::size_t n, const Vec3& eta,
                       double d) {
#ifdef EF_HAVE_AVX2_KERNELS
  if (g_isa == Isa::kAvx2) return detail::point_plane_sse_avx2(xyz, n, eta, d);
#endif
  return detail::point_plane_sse_scalar(xyz, n, eta, d);
}

void transform_points(const Mat3& R, const Vec3& t, const double* src,
                      double* dst, std::size_t n) {
#ifdef EF_HAVE_AVX2_KERNELS
  if (g_isa == Isa::kAvx2)
    return detail::transform_points_avx2(R, t, src, dst, n);
#endif
  return detail::transform_points_scalar(R, t, src, dst, n);
}

}  // namespace ef::kernels
