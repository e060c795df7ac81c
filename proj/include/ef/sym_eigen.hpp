#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace ef {

/// Eigendecomposition of a small symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues ascending; eigenvectors orthonormal columns matching the value
/// order. Sign convention: the largest-magnitude component of each eigenvector
/// is made positive, so results are deterministic across runs and platforms.
template <int N>
struct SymEigen {
  Eigen::Matrix<double, N, 1> values;
  Eigen::Matrix<double, N, N> vectors;  // column i pairs with values[i]
};

namespace detail {

template <int N>
SymEigen<N> JacobiEigen(Eigen::Matrix<double, N, N> A) {
  using MatN = Eigen::Matrix<double, N, N>;
  const double scale = A.norm();
  MatN V = MatN::Identity();

  // Convergence: off-diagonal Frobenius norm below 1e-13 * ||A||, max 50 sweeps.
  const double off_tol = 1e-13 * scale;
  for (int sweep = 0; sweep < 50; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < N; ++p)
      for (int q = p + 1; q < N; ++q) off += 2.0 * A(p, q) * A(p, q);
    if (std::sqrt(off) <= off_tol) break;

    for (int p = 0; p < N; ++p) {
      for (int q = p + 1; q < N; ++q) {
        const double apq = A(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        const double app = A(p, p), aqq = A(q, q);
        A(p, p) = app - t * apq;
        A(q, q) = aqq + t * apq;
        A(p, q) = A(q, p) = 0.0;
        for (int r = 0; r < N; ++r) {
          if (r != p && r != q) {
            const double arp = A(r, p), arq = A(r, q);
            A(r, p) = A(p, r) = arp - s * (arq + tau * arp);
            A(r, q) = A(q, r) = arq + s * (arp - tau * arq);
          }
          const double vrp = V(r, p), vrq = V(r, q);
          V(r, p) = vrp - s * (vrq + tau * vrp);
          V(r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }

  // Sort ascending, then fix signs.
  SymEigen<N> out;
  std::array<int, N> idx;
  for (int i = 0; i < N; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return A(a, a) < A(b, b); });
  for (int i = 0; i < N; ++i) {
    out.values[i] = A(idx[i], idx[i]);
    Eigen::Matrix<double, N, 1> v = V.col(idx[i]);
    int imax = 0;
    for (int r = 1; r < N; ++r)
      if (std::abs(v[r]) > std::abs(v[imax])) imax = r;
    if (v[imax] < 0) v = -v;
    out.vectors.col(i) = v;
  }
  return out;
}

}  // namespace detail

/// Throws std::invalid_argument when A deviates from symmetry by more than
/// 1e-9 * ||A|| (Frobenius).
template <int N>
SymEigen<N> eigen_sym(const Eigen::Matrix<double, N, N>& A) {
  const double asym = (A - A.transpose()).norm();
  if (asym > 1e-9 * std::max(A.norm(), 1.0)) {
    throw std::invalid_argument("eigen_sym: matrix is not symmetric");
  }
  // Work on the symmetrized matrix so roundoff asymmetry cannot leak through.
  Eigen::Matrix<double, N, N> S = 0.5 * (A + A.transpose());
  return detail::JacobiEigen<N>(S);
}

inline SymEigen<3> eigen_sym3(const Eigen::Matrix3d& A) { return eigen_sym<3>(A); }
inline SymEigen<4> eigen_sym4(const Eigen::Matrix4d& A) { return eigen_sym<4>(A); }

}  // namespace ef
