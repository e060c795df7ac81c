#pragma once

#include "ef/se3.hpp"

#include <cstddef>

namespace ef::kernels {

/// Instruction sets the point-bulk kernels can run on. The scalar kernels are
/// the reference implementation; vector variants must match them within
/// summation-order roundoff and are equivalence-tested against them.
enum class Isa { kScalar, kAvx2 };

bool avx2_supported();

/// Active implementation. Defaults to the widest supported ISA; the
/// EF_KERNELS environment variable ("scalar" or "avx2") overrides it at
/// process start.
Isa active_isa();
void force_isa(Isa isa);

/// Sum of outer products of homogeneous points [x,y,z,1] over a packed
/// xyz array of n points. Returns the symmetric 4x4 with entry(3,3) = n.
Mat4 accumulate_outer(const double* xyz, std::size_t n);

/// Sum of squared point-to-plane distances (eta . p + d)^2.
double point_plane_sse(const double* xyz, std::size_t n, const Vec3& eta,
                       double d);

/// dst[i] = R * src[i] + t. src and dst are packed xyz arrays; in-place is
/// allowed.
void transform_points(const Mat3& R, const Vec3& t, const double* src,
                      double* dst, std::size_t n);

namespace detail {
Mat4 accumulate_outer_scalar(const double* xyz, std::size_t n);
double point_plane_sse_scalar(const double* xyz, std::size_t n,
                              const Vec3& eta, double d);
void transform_points_scalar(const Mat3& R, const Vec3& t, const double* src,
                             double* dst, std::size_t n);
#if defined(__x86_64__) || defined(_M_X64)
Mat4 accumulate_outer_avx2(const double* xyz, std::size_t n);
double point_plane_sse_avx2(const double* xyz, std::size_t n, const Vec3& eta,
                            double d);
void transform_points_avx2(const Mat3& R, const Vec3& t, const double* src,
                           double* dst, std::size_t n);
#endif
}  // namespace detail

}  // namespace ef::kernels
