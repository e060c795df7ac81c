#pragma once

#include "ef/factor.hpp"
#include "ef/synth.hpp"

#include <vector>

namespace ef {

/// Frobenius-relative difference between the FD-exact Hessian of the centered
/// cost and the block-diagonal analytic Hessian, at the given state.
///
/// The exact side differentiates the centered cost with the per-factor plane
/// frozen in the centered frame but the centering translation tracking the
/// perturbed poses (the factor mean is recomputed at every FD evaluation).
/// The approximate side is the analytic Hessian the optimizer uses, which
/// freezes the centering at the base state and is therefore block diagonal.
double centered_hessian_rel_error(const std::vector<EigenFactor>& factors,
                                  const std::vector<Pose>& trajectory,
                                  double fd_step = 1e-4);

struct HessianProbePoint {
  int n_poses = 0;
  double rel_diff = 0.0;  // averaged over seeds
};

/// Sweep the relative difference over pose counts, averaging n_seeds
/// generated worlds per entry (base spec's pose count is overridden).
std::vector<HessianProbePoint> centered_hessian_error_probe(
    const WorldSpec& base, const std::vector<int>& h_values, int n_seeds);

}  // namespace ef
