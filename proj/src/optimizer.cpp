#include "ef/optimizer.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>

namespace ef {

std::string to_string(OptStatus s) {
  switch (s) {
    case OptStatus::kConverged: return "converged";
    case OptStatus::kMaxIterations: return "max_iterations";
    case OptStatus::kStalled: return "stalled";
    case OptStatus::kFailed: return "failed";
  }
  return "unknown";
}

std::optional<std::vector<Twist>> newton_step(const GradientAndHessian& gh,
                                              double damping, double alpha,
                                              int anchor) {
  const std::size_t H = gh.hess_blocks.size();
  std::vector<Twist> steps(H, Twist::Zero());
  for (std::size_t t = 0; t < H; ++t) {
    if (static_cast<int>(t) == anchor) continue;
    Mat6 A = gh.hess_blocks[t] + damping * Mat6::Identity();
    Eigen::LLT<Mat6> llt(A);
    if (llt.info() != Eigen::Success) return std::nullopt;
    steps[t] = -alpha * llt.solve(gh.grad.segment<6>(6 * static_cast<Eigen::Index>(t)));
  }
  return steps;
}

OptReport optimize(const Problem& problem) {
  problem.validate();
  const auto& cfg = problem.config;
  OptReport report;
  report.trajectory = problem.trajectory;

  std::vector<FactorState> states;
  try {
    states = estimate_all(problem.factors, report.trajectory);
  } catch (const degenerate_plane_error&) {
    report.status = OptStatus::kFailed;
    return report;
  }
  double cost = total_cost(states);
  double damping = cfg.lm_lambda0;

  // Scale below which cost differences are indistinguishable from roundoff in
  // the per-factor eigenvalue evaluation.
  const auto noise_floor = [](const std::vector<FactorState>& sts) {
    double s = 0.0;
    for (const auto& st : sts) s += st.center.Qc.Q.norm();
    return 64.0 * std::numeric_limits<double>::epsilon() * s;
  };

  report.trace.push_back({0, cost, damping, 0.0, true});
  report.status = OptStatus::kMaxIterations;

  for (int it = 1; it <= cfg.max_iters; ++it) {
    const GradientAndHessian gh =
        assemble(problem.factors, states, report.trajectory, problem.anchor,
                 cfg.mode);

    bool accepted = false;
    double best_attempt = std::numeric_limits<double>::infinity();
    for (int raise = 0; raise <= cfg.max_damping_raises; ++raise) {
      const auto steps = newton_step(gh, damping, cfg.step_scale, problem.anchor);
      if (!steps) {
        damping *= cfg.lm_up;
        continue;
      }
      double step_norm = 0.0;
      for (const auto& s : *steps) step_norm += s.squaredNorm();
      step_norm = std::sqrt(step_norm);

      if (step_norm <= cfg.step_floor) {
        // No meaningful motion left; the cost sits at its numerical floor.
        report.trace.push_back({it, cost, damping, step_norm, true});
        report.status = OptStatus::kConverged;
        accepted = true;
        break;
      }

      std::vector<Pose> candidate(report.trajectory.size());
      for (std::size_t t = 0; t < candidate.size(); ++t) {
        candidate[t] = retract(report.trajectory[t], (*steps)[t]);
      }

      std::vector<FactorState> cand_states;
      double cand_cost;
      try {
        cand_states = estimate_all(problem.factors, candidate);
        cand_cost = total_cost(cand_states);
      } catch (const degenerate_plane_error&) {
        report.trace.push_back({it, cost, damping, step_norm, false});
        damping *= cfg.lm_up;
        continue;
      }

      report.trace.push_back({it, cand_cost, damping, step_norm, cand_cost <= cost});
      best_attempt = std::min(best_attempt, cand_cost);
      if (cand_cost <= cost) {
        const double rel_dec = (cost - cand_cost) / std::max(cost, 1e-300);
        report.trajectory = std::move(candidate);
        states = std::move(cand_states);
        cost = cand_cost;
        damping = std::max(damping / cfg.lm_down, 1e-12);
        report.iterations = it;
        accepted = true;
        if (rel_dec < cfg.cost_tolerance) {
          report.status = OptStatus::kConverged;
        }
        break;
      }
      damping *= cfg.lm_up;
    }

    if (!accepted) {
      // Every damped step was rejected. When the best attempt sits within the
      // eigenvalue roundoff of the current cost, the state is at its numerical
      // floor and reporting convergence is the truthful answer; anything
      // larger is a genuine stall.
      report.status = (best_attempt - cost <= noise_floor(states))
                          ? OptStatus::kConverged
                          : OptStatus::kStalled;
      break;
    }
    if (report.status == OptStatus::kConverged) break;
  }

  report.final_cost = cost;
  return report;
}

}  // namespace ef
