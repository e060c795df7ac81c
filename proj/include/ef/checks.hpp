#pragma once

#include "ef/synth.hpp"

#include <cstdint>

namespace ef {

/// Finite-difference verification harness for the analytic derivatives.
/// Each field is a maximum over all sampled states and coordinates.
struct DerivativeCheckReport {
  int trials = 0;
  double grad_max_rel = 0.0;        // analytic vs FD of the re-estimated cost
  double hess_max_rel = 0.0;        // analytic block vs frozen-plane FD Hessian
  double cross_block_max_rel = 0.0;  // cross-pose FD blocks vs diagonal norm
  double centered_plain_max_rel = 0.0;  // centered vs plain gradient routes

  static constexpr double kGradTol = 1e-6;
  static constexpr double kHessTol = 1e-5;
  static constexpr double kCrossTol = 1e-8;
  static constexpr double kCenteredTol = 1e-9;

  bool pass() const {
    return grad_max_rel <= kGradTol && hess_max_rel <= kHessTol &&
           cross_block_max_rel <= kCrossTol &&
           centered_plain_max_rel <= kCenteredTol;
  }
};

/// Runs all four checks over `trials` randomly generated problem states.
/// `corrupt_generator` injects an off-by-1e-3 entry into one basis matrix of
/// the analytic side only; it exists so tests can confirm the harness
/// actually detects a broken derivative.
DerivativeCheckReport check_derivatives(const WorldSpec& base, int trials,
                                        std::uint64_t seed,
                                        bool corrupt_generator = false);

/// Gradient check alone (used by the acceptance suite, which pins its own
/// problem shape). Returns the max relative gradient error over trials.
double gradient_fd_max_rel_error(const WorldSpec& base, int trials,
                                 std::uint64_t seed,
                                 bool corrupt_generator = false);

struct HessianCheckResult {
  double diag_max_rel = 0.0;
  double cross_max_rel = 0.0;
};

HessianCheckResult hessian_fd_max_rel_error(const WorldSpec& base, int trials,
                                            std::uint64_t seed);

double centered_plain_gradient_max_rel_error(const WorldSpec& base, int trials,
                                             std::uint64_t seed);

}  // namespace ef
