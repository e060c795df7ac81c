#include "ef/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace ef::kernels::detail {

namespace {

// Deinterleave 4 packed xyz points into X/Y/Z lanes.
//   r0 = [x0 y0 z0 x1]  r1 = [y1 z1 x2 y2]  r2 = [z2 x3 y3 z3]
inline void Load3x4(const double* p, __m256d& X, __m256d& Y, __m256d& Z) {
  const __m256d r0 = _mm256_loadu_pd(p);
  const __m256d r1 = _mm256_loadu_pd(p + 4);
  const __m256d r2 = _mm256_loadu_pd(p + 8);

  // X = [r0.0, r0.3, r1.2, r2.1]
  __m256d x01 = _mm256_permute4x64_pd(r0, _MM_SHUFFLE(0, 0, 3, 0));
  __m256d x2 = _mm256_permute4x64_pd(r1, _MM_SHUFFLE(0, 2, 0, 0));
  __m256d x3 = _mm256_permute4x64_pd(r2, _MM_SHUFFLE(1, 0, 0, 0));
  X = _mm256_blend_pd(_mm256_blend_pd(x01, x2, 0b0100), x3, 0b1000);

  // Y = [r0.1, r1.0, r1.3, r2.2]
  __m256d y0 = _mm256_permute4x64_pd(r0, _MM_SHUFFLE(0, 0, 0, 1));
  __m256d y12 = _mm256_permute4x64_pd(r1, _MM_SHUFFLE(0, 3, 0, 0));
  __m256d y3 = _mm256_permute4x64_pd(r2, _MM_SHUFFLE(2, 0, 0, 0));
  Y = _mm256_blend_pd(_mm256_blend_pd(y0, y12, 0b0110), y3, 0b1000);

  // Z = [r0.2, r1.1, r2.0, r2.3]
  __m256d z0 = _mm256_permute4x64_pd(r0, _MM_SHUFFLE(0, 0, 0, 2));
  __m256d z1 = _mm256_permute4x64_pd(r1, _MM_SHUFFLE(0, 0, 1, 0));
  __m256d z23 = _mm256_permute4x64_pd(r2, _MM_SHUFFLE(3, 0, 0, 0));
  Z = _mm256_blend_pd(_mm256_blend_pd(z0, z1, 0b0010), z23, 0b1100);
}

inline double HSum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

Mat4 accumulate_outer_avx2(const double* xyz, std::size_t n) {
  const std::size_t n4 = n / 4 * 4;
  __m256d xx = _mm256_setzero_pd(), xy = xx, xz = xx, yy = xx, yz = xx,
          zz = xx, sx = xx, sy = xx, sz = xx;
  for (std::size_t i = 0; i < n4; i += 4) {
    __m256d X, Y, Z;
    Load3x4(xyz + 3 * i, X, Y, Z);
    xx = _mm256_fmadd_pd(X, X, xx);
    xy = _mm256_fmadd_pd(X, Y, xy);
    xz = _mm256_fmadd_pd(X, Z, xz);
    yy = _mm256_fmadd_pd(Y, Y, yy);
    yz = _mm256_fmadd_pd(Y, Z, yz);
    zz = _mm256_fmadd_pd(Z, Z, zz);
    sx = _mm256_add_pd(sx, X);
    sy = _mm256_add_pd(sy, Y);
    sz = _mm256_add_pd(sz, Z);
  }
  Mat4 S = accumulate_outer_scalar(xyz + 3 * n4, n - n4);
  S(0, 0) += HSum(xx);
  S(0, 1) = S(1, 0) = S(0, 1) + HSum(xy);
  S(0, 2) = S(2, 0) = S(0, 2) + HSum(xz);
  S(1, 1) += HSum(yy);
  S(1, 2) = S(2, 1) = S(1, 2) + HSum(yz);
  S(2, 2) += HSum(zz);
  S(0, 3) = S(3, 0) = S(0, 3) + HSum(sx);
  S(1, 3) = S(3, 1) = S(1, 3) + HSum(sy);
  S(2, 3) = S(3, 2) = S(2, 3) + HSum(sz);
  S(3, 3) = static_cast<double>(n);
  return S;
}

double point_plane_sse_avx2(const double* xyz, std::size_t n, const Vec3& eta,
                            double d) {
  const std::size_t n4 = n / 4 * 4;
  const __m256d ex = _mm256_set1_pd(eta.x());
  const __m256d ey = _mm256_set1_pd(eta.y());
  const __m256d ez = _mm256_set1_pd(eta.z());
  const __m256d dd = _mm256_set1_pd(d);
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < n4; i += 4) {
    __m256d X, Y, Z;
    Load3x4(xyz + 3 * i, X, Y, Z);
    __m256d e = _mm256_fmadd_pd(ex, X, dd);
    e = _mm256_fmadd_pd(ey, Y, e);
    e = _mm256_fmadd_pd(ez, Z, e);
    acc = _mm256_fmadd_pd(e, e, acc);
  }
  return HSum(acc) + point_plane_sse_scalar(xyz + 3 * n4, n - n4, eta, d);
}

void transform_points_avx2(const Mat3& R, const Vec3& t, const double* src,
                           double* dst, std::size_t n) {
  const std::size_t n4 = n / 4 * 4;
  __m256d r[3][3], tv[3];
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) r[a][b] = _mm256_set1_pd(R(a, b));
    tv[a] = _mm256_set1_pd(t[a]);
  }
  alignas(32) double ox[4], oy[4], oz[4];
  for (std::size_t i = 0; i < n4; i += 4) {
    __m256d X, Y, Z;
    Load3x4(src + 3 * i, X, Y, Z);
    __m256d vx = _mm256_fmadd_pd(r[0][0], X, tv[0]);
    vx = _mm256_fmadd_pd(r[0][1], Y, vx);
    vx = _mm256_fmadd_pd(r[0][2], Z, vx);
    __m256d vy = _mm256_fmadd_pd(r[1][0], X, tv[1]);
    vy = _mm256_fmadd_pd(r[1][1], Y, vy);
    vy = _mm256_fmadd_pd(r[1][2], Z, vy);
    __m256d vz = _mm256_fmadd_pd(r[2][0], X, tv[2]);
    vz = _mm256_fmadd_pd(r[2][1], Y, vz);
    vz = _mm256_fmadd_pd(r[2][2], Z, vz);
    _mm256_store_pd(ox, vx);
    _mm256_store_pd(oy, vy);
    _mm256_store_pd(oz, vz);
    for (int k = 0; k < 4; ++k) {
      dst[3 * (i + k)] = ox[k];
      dst[3 * (i + k) + 1] = oy[k];
      dst[3 * (i + k) + 2] = oz[k];
    }
  }
  transform_points_scalar(R, t, src + 3 * n4, dst + 3 * n4, n - n4);
}

}  // namespace ef::kernels::detail

#endif  // x86_64
