#include "ef/factor.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace ef {

namespace {

int EnvThreads() {
  if (const char* env = std::getenv("EF_NUM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

Mat4 PoseBlockQ(const SummationMatrix& S, const Pose& T) {
  return s_transform(S, T).S;
}

}  // namespace

void Problem::validate() const {
  const int H = static_cast<int>(trajectory.size());
  if (H == 0) throw std::invalid_argument("Problem: empty trajectory");
  if (anchor < 0 || anchor >= H) throw std::invalid_argument("Problem: anchor out of range");
  for (const auto& f : factors) {
    for (const auto& [t, S] : f.s_blocks) {
      (void)S;
      if (t < 0 || t >= H) throw std::invalid_argument("Problem: factor references invalid pose index");
    }
  }
}

Mat4 dq_dxi(const Mat4& Qt, int i) {
  const Mat4& Gi = generator(i);
  return Gi * Qt + Qt * Gi.transpose();
}

const std::array<Mat4, 6>& canonical_basis() {
  static const std::array<Mat4, 6> basis = [] {
    std::array<Mat4, 6> b;
    for (int i = 0; i < 6; ++i) b[i] = generator(i);
    return b;
  }();
  return basis;
}

std::array<Mat4, 6> conjugated_basis(const Pose& Tc) {
  const Mat4& tc = Tc.matrix();
  const Mat4 tci = Tc.inverse().matrix();
  std::array<Mat4, 6> basis;
  for (int i = 0; i < 6; ++i) basis[i] = tc * generator(i) * tci;
  return basis;
}

Vec6 ef_gradient_block(const Vec4& pi, const Mat4& Qt,
                       const std::array<Mat4, 6>& basis) {
  const Vec4 w = Qt * pi;
  Vec6 g;
  for (int i = 0; i < 6; ++i) g[i] = 2.0 * pi.dot(basis[i] * w);
  return g;
}

Mat6 ef_hessian_block(const Vec4& pi, const Mat4& Qt,
                      const std::array<Mat4, 6>& basis) {
  // H_ij = u_i . z_j + u_j . z_i + 2 u_i . (Qt u_j), with u_i = G_i^T pi and
  // z_i = G_i (Qt pi): the exact Hessian of pi^T Exp(xi) Qt Exp(xi)^T pi.
  const Vec4 w = Qt * pi;
  std::array<Vec4, 6> u, z, y;
  for (int i = 0; i < 6; ++i) {
    u[i] = basis[i].transpose() * pi;
    z[i] = basis[i] * w;
    y[i] = Qt * u[i];
  }
  Mat6 h;
  for (int i = 0; i < 6; ++i) {
    for (int j = i; j < 6; ++j) {
      h(i, j) = u[i].dot(z[j]) + u[j].dot(z[i]) + 2.0 * u[i].dot(y[j]);
      h(j, i) = h(i, j);
    }
  }
  return h;
}

FactorState estimate_factor(const EigenFactor& f,
                            const std::vector<Pose>& trajectory) {
  FactorState st;
  for (const auto& [t, S] : f.s_blocks) {
    st.q.Q += PoseBlockQ(S, trajectory[static_cast<size_t>(t)]);
  }
  st.center = center_transform(st.q);
  const PlaneFit cfit = plane_from_q(st.center.Qc);

  // Transport the centered plane back to the global frame; the d = 0
  // component makes pi = Tc^T cpi the closed-form centered solution.
  st.cpi = cfit.plane.homogeneous();
  Vec4 pi = st.center.Tc.matrix().transpose() * st.cpi;
  if (pi[3] < 0) {
    // keep the d >= 0 convention in the global frame; mirror cpi so the two
    // stay exact transports of one another
    pi = -pi;
    st.cpi = -st.cpi;
  }
  st.pi = pi;
  st.plane.eta = pi.head<3>();
  st.plane.d = pi[3];
  st.lambda = cfit.lambda;
  st.ill_conditioned = cfit.ill_conditioned;
  return st;
}

std::vector<std::pair<int, Vec6>> factor_gradient(
    const EigenFactor& f, const FactorState& state,
    const std::vector<Pose>& trajectory, DerivativeMode mode) {
  std::vector<std::pair<int, Vec6>> out;
  out.reserve(f.s_blocks.size());
  const bool centered = mode == DerivativeMode::kCentered;
  const std::array<Mat4, 6> basis =
      centered ? conjugated_basis(state.center.Tc) : canonical_basis();
  const Vec4& pi = centered ? state.cpi : state.pi;
  const Mat4& tc = state.center.Tc.matrix();
  for (const auto& [t, S] : f.s_blocks) {
    Mat4 Qt = PoseBlockQ(S, trajectory[static_cast<size_t>(t)]);
    if (centered) Qt = tc * Qt * tc.transpose();
    out.emplace_back(t, ef_gradient_block(pi, Qt, basis));
  }
  return out;
}

Mat6 factor_hessian_block(const EigenFactor& f, const FactorState& state,
                          const std::vector<Pose>& trajectory, int t,
                          DerivativeMode mode) {
  for (const auto& [tt, S] : f.s_blocks) {
    if (tt != t) continue;
    Mat4 Qt = PoseBlockQ(S, trajectory[static_cast<size_t>(t)]);
    if (mode == DerivativeMode::kCentered) {
      const Mat4& tc = state.center.Tc.matrix();
      Qt = tc * Qt * tc.transpose();
      return ef_hessian_block(state.cpi, Qt, conjugated_basis(state.center.Tc));
    }
    return ef_hessian_block(state.pi, Qt, canonical_basis());
  }
  return Mat6::Zero();  // pose does not observe this factor
}

std::vector<FactorState> estimate_all(const std::vector<EigenFactor>& factors,
                                      const std::vector<Pose>& trajectory) {
  std::vector<FactorState> states(factors.size());
  const int threads = std::min<int>(EnvThreads(), static_cast<int>(states.size()));
  if (threads <= 1) {
    for (std::size_t m = 0; m < states.size(); ++m) {
      states[m] = estimate_factor(factors[m], trajectory);
    }
    return states;
  }
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t m = next.fetch_add(1); m < states.size();
           m = next.fetch_add(1)) {
        states[m] = estimate_factor(factors[m], trajectory);
      }
    });
  }
  for (auto& th : pool) th.join();
  return states;
}

GradientAndHessian assemble(const std::vector<EigenFactor>& factors,
                            const std::vector<FactorState>& states,
                            const std::vector<Pose>& trajectory, int anchor,
                            DerivativeMode mode) {
  const std::size_t H = trajectory.size();
  const std::size_t M = factors.size();
  GradientAndHessian gh;
  gh.grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(6 * H));
  gh.hess_blocks.assign(H, Mat6::Zero());

  struct Contribution {
    std::vector<std::pair<int, Vec6>> grads;
    std::vector<std::pair<int, Mat6>> blocks;
  };
  std::vector<Contribution> contrib(M);

  auto compute = [&](std::size_t m) {
    const auto& f = factors[m];
    const auto& st = states[m];
    contrib[m].grads = factor_gradient(f, st, trajectory, mode);
    contrib[m].blocks.reserve(f.s_blocks.size());
    for (const auto& [t, S] : f.s_blocks) {
      (void)S;
      contrib[m].blocks.emplace_back(
          t, factor_hessian_block(f, st, trajectory, t, mode));
    }
  };

  const int threads = std::min<int>(EnvThreads(), static_cast<int>(M));
  if (threads <= 1) {
    for (std::size_t m = 0; m < M; ++m) compute(m);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t m = next.fetch_add(1); m < M; m = next.fetch_add(1)) {
          compute(m);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  // Reduction in factor order keeps results bit-identical across thread counts.
  for (std::size_t m = 0; m < M; ++m) {
    for (const auto& [t, g] : contrib[m].grads) {
      gh.grad.segment<6>(6 * t) += g;
    }
    for (const auto& [t, b] : contrib[m].blocks) {
      gh.hess_blocks[static_cast<size_t>(t)] += b;
    }
  }

  gh.grad.segment<6>(6 * anchor).setZero();
  gh.hess_blocks[static_cast<size_t>(anchor)] = Mat6::Identity();
  return gh;
}

double total_cost(const std::vector<FactorState>& states) {
  double c = 0.0;
  for (const auto& st : states) c += st.lambda;
  return c;
}

}  // namespace ef
