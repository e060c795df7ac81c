#include "ef/checks.hpp"

#include "ef/rng.hpp"

#include <cmath>

namespace ef {

namespace {

// Re-estimated cost of one factor after perturbing pose t by xi (the plane
// and the centering are re-solved, so this is the cost the optimizer sees).
double ReestimatedCost(const EigenFactor& f, std::vector<Pose> traj, int t,
                       const Twist& xi) {
  traj[static_cast<size_t>(t)] = retract(traj[static_cast<size_t>(t)], xi);
  return estimate_factor(f, traj).lambda;
}

// Frozen-plane cost: pi^T Exp(xi) Qt Exp(xi)^T pi.
double FrozenCost(const Vec4& pi, const Mat4& Qt, const Twist& xi) {
  const Mat4 e = exp(xi).matrix();
  return pi.dot(e * Qt * e.transpose() * pi);
}

std::array<Mat4, 6> MaybeCorrupt(bool corrupt) {
  std::array<Mat4, 6> basis = canonical_basis();
  if (corrupt) basis[2](0, 1) += 1e-3;
  return basis;
}

WorldSpec TrialSpec(const WorldSpec& base, std::uint64_t seed, int trial) {
  WorldSpec spec = base;
  spec.seed = seed + static_cast<std::uint64_t>(trial);
  return spec;
}

}  // namespace

double gradient_fd_max_rel_error(const WorldSpec& base, int trials,
                                 std::uint64_t seed, bool corrupt_generator) {
  double worst = 0.0;
  const double h = 1e-5;
  const std::array<Mat4, 6> basis = MaybeCorrupt(corrupt_generator);
  for (int trial = 0; trial < trials; ++trial) {
    const Dataset d = generate(TrialSpec(base, seed, trial));
    const Problem p = make_problem(d);
    const auto states = estimate_all(p.factors, p.trajectory);
    for (std::size_t m = 0; m < p.factors.size(); ++m) {
      const auto& f = p.factors[m];
      const auto& st = states[m];
      Eigen::VectorXd analytic(6 * f.s_blocks.size());
      Eigen::VectorXd fd(6 * f.s_blocks.size());
      Eigen::Index at = 0;
      for (const auto& [t, S] : f.s_blocks) {
        const Mat4 Qt = s_transform(S, p.trajectory[static_cast<size_t>(t)]).S;
        analytic.segment<6>(at) = ef_gradient_block(st.pi, Qt, basis);
        for (int i = 0; i < 6; ++i) {
          Twist xi = Twist::Zero();
          xi[i] = h;
          fd[at + i] = (ReestimatedCost(f, p.trajectory, t, xi) -
                        ReestimatedCost(f, p.trajectory, t, -xi)) /
                       (2.0 * h);
        }
        at += 6;
      }
      const double scale = fd.cwiseAbs().maxCoeff();
      if (scale <= 0) continue;
      worst = std::max(worst, (analytic - fd).cwiseAbs().maxCoeff() / scale);
    }
  }
  return worst;
}

HessianCheckResult hessian_fd_max_rel_error(const WorldSpec& base, int trials,
                                            std::uint64_t seed) {
  HessianCheckResult out;
  const double h = 1e-4;
  const double h_cross = 1e-3;  // true value is zero; larger step, less roundoff
  for (int trial = 0; trial < trials; ++trial) {
    const Dataset d = generate(TrialSpec(base, seed, trial));
    const Problem p = make_problem(d);
    const auto states = estimate_all(p.factors, p.trajectory);
    Rng pick(seed ^ 0x5eedu, static_cast<std::uint64_t>(trial));
    const std::size_t fm = pick.next_u64() % p.factors.size();
    const auto& f = p.factors[fm];
    const auto& st = states[fm];

    const int nb = static_cast<int>(f.s_blocks.size());
    const int bt = static_cast<int>(pick.next_u64() % static_cast<std::uint64_t>(nb));
    const auto& [t, S] = f.s_blocks[static_cast<size_t>(bt)];
    const Mat4 Qt = s_transform(S, p.trajectory[static_cast<size_t>(t)]).S;

    const Mat6 analytic = ef_hessian_block(st.pi, Qt, canonical_basis());
    Mat6 fd;
    const double base_val = FrozenCost(st.pi, Qt, Twist::Zero());
    for (int i = 0; i < 6; ++i) {
      for (int j = i; j < 6; ++j) {
        Twist ei = Twist::Zero(), ej = Twist::Zero();
        ei[i] = h;
        ej[j] = h;
        double v;
        if (i == j) {
          v = (FrozenCost(st.pi, Qt, ei) - 2.0 * base_val +
               FrozenCost(st.pi, Qt, -ei)) /
              (h * h);
        } else {
          v = (FrozenCost(st.pi, Qt, ei + ej) - FrozenCost(st.pi, Qt, ei - ej) -
               FrozenCost(st.pi, Qt, -ei + ej) +
               FrozenCost(st.pi, Qt, -ei - ej)) /
              (4.0 * h * h);
        }
        fd(i, j) = fd(j, i) = v;
      }
    }
    const double scale = fd.cwiseAbs().maxCoeff();
    if (scale > 0) {
      out.diag_max_rel = std::max(
          out.diag_max_rel, (analytic - fd).cwiseAbs().maxCoeff() / scale);
    }

    // Cross-pose second derivatives of the frozen-plane cost. The cost is a
    // sum of per-pose terms, so these vanish identically; FD only sees
    // roundoff.
    if (nb >= 2) {
      const int bt2 = (bt + 1) % nb;
      const auto& [t2, S2] = f.s_blocks[static_cast<size_t>(bt2)];
      const Mat4 Qt2 = s_transform(S2, p.trajectory[static_cast<size_t>(t2)]).S;
      const double diag_norm = analytic.norm();
      auto pair_cost = [&](const Twist& a, const Twist& b) {
        return FrozenCost(st.pi, Qt, a) + FrozenCost(st.pi, Qt2, b);
      };
      for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
          Twist ei = Twist::Zero(), ej = Twist::Zero();
          ei[i] = h_cross;
          ej[j] = h_cross;
          const double v = (pair_cost(ei, ej) - pair_cost(ei, -ej) -
                            pair_cost(-ei, ej) + pair_cost(-ei, -ej)) /
                           (4.0 * h_cross * h_cross);
          out.cross_max_rel =
              std::max(out.cross_max_rel, std::abs(v) / diag_norm);
        }
      }
    }
  }
  return out;
}

double centered_plain_gradient_max_rel_error(const WorldSpec& base, int trials,
                                             std::uint64_t seed) {
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const Dataset d = generate(TrialSpec(base, seed, trial));
    const Problem p = make_problem(d);
    const auto states = estimate_all(p.factors, p.trajectory);
    const GradientAndHessian plain = assemble(
        p.factors, states, p.trajectory, p.anchor, DerivativeMode::kPlain);
    const GradientAndHessian centered = assemble(
        p.factors, states, p.trajectory, p.anchor, DerivativeMode::kCentered);
    const double scale = plain.grad.cwiseAbs().maxCoeff();
    if (scale <= 0) continue;
    worst = std::max(
        worst, (plain.grad - centered.grad).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

DerivativeCheckReport check_derivatives(const WorldSpec& base, int trials,
                                        std::uint64_t seed,
                                        bool corrupt_generator) {
  DerivativeCheckReport r;
  r.trials = trials;
  if (trials <= 0) return r;  // vacuous pass; caller warns
  r.grad_max_rel = gradient_fd_max_rel_error(base, trials, seed, corrupt_generator);
  const HessianCheckResult h = hessian_fd_max_rel_error(base, trials, seed ^ 0x9e37u);
  r.hess_max_rel = h.diag_max_rel;
  r.cross_block_max_rel = h.cross_max_rel;
  r.centered_plain_max_rel =
      centered_plain_gradient_max_rel_error(base, trials, seed ^ 0xc2b2u);
  return r;
}

}  // namespace ef
