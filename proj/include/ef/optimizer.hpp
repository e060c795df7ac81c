#pragma once

#include "ef/factor.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ef {

enum class OptStatus {
  kConverged,      // relative cost decrease fell below tolerance
  kMaxIterations,
  kStalled,        // damping raised past its budget without an acceptable step
  kFailed,         // degenerate problem (no usable factor)
};

std::string to_string(OptStatus s);

/// One row per attempted step (plus the initial cost row at iteration 0).
struct IterationRecord {
  int iteration = 0;
  double cost = 0.0;
  double damping = 0.0;
  double step_norm = 0.0;
  bool accepted = false;
};

struct OptReport {
  std::vector<Pose> trajectory;
  std::vector<IterationRecord> trace;
  int iterations = 0;  // accepted iterations
  OptStatus status = OptStatus::kFailed;
  double final_cost = 0.0;
};

/// Solve the damped block-diagonal Newton system: per pose,
/// dxi_t = -alpha (B_t + damping I)^-1 g_t; the anchor step is zero.
/// Returns nullopt when any damped block fails its Cholesky factorization,
/// signalling the caller to raise the damping.
std::optional<std::vector<Twist>> newton_step(const GradientAndHessian& gh,
                                              double damping, double alpha,
                                              int anchor);

/// Alternating loop: closed-form planes, analytic gradient/Hessian, damped
/// Newton step with Levenberg-Marquardt accept/reject. Accepted costs never
/// increase; all pose updates of an iteration are applied simultaneously.
OptReport optimize(const Problem& problem);

}  // namespace ef
