#pragma once

#include "ef/plane.hpp"
#include "ef/se3.hpp"

#include <array>
#include <utility>
#include <vector>

namespace ef {

/// One plane landmark: per-pose summation matrices, keyed by pose index and
/// immutable after construction (points are folded into S exactly once).
struct EigenFactor {
  int id = 0;
  std::vector<std::pair<int, SummationMatrix>> s_blocks;  // sorted by pose index
};

/// Per-iteration closed-form state of a factor. The plane is estimated from
/// the centered Q (the eigendecomposition is conditioned by the data-centering
/// translation); lambda equals the point-to-plane SSE of that plane.
struct FactorState {
  QMatrix q;               // raw Q = sum_t T_t S_t T_t^T
  CenterTransform center;  // Tc and the centered Qc
  Plane plane;             // global-frame estimate
  Vec4 pi;                 // plane.homogeneous()
  Vec4 cpi;                // centered-frame plane, d component exactly zero
  double lambda = 0.0;
  bool ill_conditioned = false;
};

/// Which frame the analytic derivatives are evaluated in. Both routes are
/// algebraically identical; the centered one conjugates every quantity by Tc
/// and works with the d = 0 plane, which keeps intermediates small.
enum class DerivativeMode { kPlain, kCentered };

struct OptimizerConfig {
  int max_iters = 50;
  double cost_tolerance = 1e-2;  // relative cost decrease per accepted step
  double lm_lambda0 = 1e-3;      // initial damping
  double lm_up = 10.0;           // damping multiplier on reject
  double lm_down = 3.0;          // damping divisor on accept
  double step_scale = 1.0;       // alpha in the Newton update
  int max_damping_raises = 10;   // per iteration
  double step_floor = 1e-10;     // step norm below which the state is converged
  DerivativeMode mode = DerivativeMode::kCentered;
};

struct Problem {
  std::vector<Pose> trajectory;
  std::vector<EigenFactor> factors;
  int anchor = 0;  // gauge: this pose never moves
  OptimizerConfig config;

  void validate() const;
};

/// Joint gradient (6H, pose-major) and the block-diagonal Hessian, one 6x6
/// block per pose. Blocks of poses observing no plane stay zero.
struct GradientAndHessian {
  Eigen::VectorXd grad;
  std::vector<Mat6> hess_blocks;
};

/// d(Exp(xi) Q Exp(xi)^T)/dxi_i at xi = 0: G_i Q + Q G_i^T. Symmetric output.
Mat4 dq_dxi(const Mat4& Qt, int i);

/// Gradient of the frozen-plane cost pi^T Exp(xi) Qt Exp(xi)^T pi at zero,
/// one component per tangent coordinate, for an arbitrary generator basis.
Vec6 ef_gradient_block(const Vec4& pi, const Mat4& Qt,
                       const std::array<Mat4, 6>& basis);

/// Hessian of the same frozen-plane cost at zero. Upper triangle computed,
/// mirrored, so the block is symmetric to the bit.
Mat6 ef_hessian_block(const Vec4& pi, const Mat4& Qt,
                      const std::array<Mat4, 6>& basis);

const std::array<Mat4, 6>& canonical_basis();

/// Generators conjugated into the centered frame: Tc G_i Tc^-1.
std::array<Mat4, 6> conjugated_basis(const Pose& Tc);

/// Recompute Q from the stored S blocks at the current trajectory and
/// re-estimate the plane in closed form (centered eigendecomposition).
FactorState estimate_factor(const EigenFactor& f,
                            const std::vector<Pose>& trajectory);

/// Per-pose gradient contributions of one factor, in the requested frame.
/// Returned pairs are (pose index, 6-vector); poses not observing the factor
/// contribute nothing.
std::vector<std::pair<int, Vec6>> factor_gradient(
    const EigenFactor& f, const FactorState& state,
    const std::vector<Pose>& trajectory,
    DerivativeMode mode = DerivativeMode::kCentered);

/// 6x6 Hessian block of one factor at pose t. Cross-pose blocks of the
/// frozen-plane cost are identically zero and never materialized.
Mat6 factor_hessian_block(const EigenFactor& f, const FactorState& state,
                          const std::vector<Pose>& trajectory, int t,
                          DerivativeMode mode = DerivativeMode::kCentered);

/// Sum of all factor gradients and Hessian blocks; the anchor block is
/// replaced by identity and its gradient zeroed. States must be current.
/// Honors EF_NUM_THREADS for per-factor parallelism (deterministic reduction
/// in factor order).
GradientAndHessian assemble(const std::vector<EigenFactor>& factors,
                            const std::vector<FactorState>& states,
                            const std::vector<Pose>& trajectory, int anchor,
                            DerivativeMode mode);

inline GradientAndHessian assemble(const Problem& problem,
                                   const std::vector<FactorState>& states) {
  return assemble(problem.factors, states, problem.trajectory, problem.anchor,
                  problem.config.mode);
}

double total_cost(const std::vector<FactorState>& states);

std::vector<FactorState> estimate_all(const std::vector<EigenFactor>& factors,
                                      const std::vector<Pose>& trajectory);

}  // namespace ef
