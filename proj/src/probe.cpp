#include "ef/probe.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace ef {

namespace {

// Centered cost of one factor with the plane frozen at cpi0 and the centering
// translation recomputed from the perturbed Q. Perturbations touch at most
// two pose blocks, so the base sum is patched instead of rebuilt.
class FrozenCenteredCost {
 public:
  FrozenCenteredCost(const EigenFactor& f, const FactorState& st,
                     const std::vector<Pose>& trajectory)
      : cpi_(st.cpi), n_(st.q.point_count()) {
    for (const auto& [t, S] : f.s_blocks) {
      pose_of_block_.push_back(t);
      qt_.push_back(s_transform(S, trajectory[static_cast<size_t>(t)]).S);
      qsum_ += qt_.back();
    }
  }

  const std::vector<int>& observed_poses() const { return pose_of_block_; }

  /// perturbations: up to two (block index, twist) entries.
  double eval(const std::vector<std::pair<int, Twist>>& perturbations) const {
    Mat4 q = qsum_;
    for (const auto& [b, xi] : perturbations) {
      const Mat4 e = exp(xi).matrix();
      q += e * qt_[static_cast<size_t>(b)] * e.transpose() - qt_[static_cast<size_t>(b)];
    }
    const Vec3 qv = q.topRightCorner<3, 1>();
    const Vec3 mu = qv / n_;
    Mat4 tc = Mat4::Identity();
    tc.topRightCorner<3, 1>() = -mu;
    return cpi_.dot(tc * q * tc.transpose() * cpi_);
  }

 private:
  Vec4 cpi_;
  double n_;
  std::vector<int> pose_of_block_;
  std::vector<Mat4> qt_;
  Mat4 qsum_ = Mat4::Zero();
};

}  // namespace

double centered_hessian_rel_error(const std::vector<EigenFactor>& factors,
                                  const std::vector<Pose>& trajectory,
                                  double fd_step) {
  const int H = static_cast<int>(trajectory.size());
  const int n = 6 * H;
  Eigen::MatrixXd exact = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd approx = Eigen::MatrixXd::Zero(n, n);
  const double h = fd_step;

  const auto states = estimate_all(factors, trajectory);

  for (std::size_t m = 0; m < factors.size(); ++m) {
    const FrozenCenteredCost cost(factors[m], states[m], trajectory);
    const auto& poses = cost.observed_poses();
    const int nb = static_cast<int>(poses.size());
    const double base = cost.eval({});

    auto unit = [&](int i) {
      Twist xi = Twist::Zero();
      xi[i % 6] = h;
      return xi;
    };

    for (int a = 0; a < 6 * nb; ++a) {
      const int ba = a / 6, ia = 6 * poses[static_cast<size_t>(ba)] + a % 6;
      const Twist ea = unit(a);
      exact(ia, ia) +=
          (cost.eval({{ba, ea}}) - 2.0 * base + cost.eval({{ba, -ea}})) / (h * h);
      for (int b = a + 1; b < 6 * nb; ++b) {
        const int bb = b / 6, ib = 6 * poses[static_cast<size_t>(bb)] + b % 6;
        const Twist eb = unit(b);
        double v;
        if (ba == bb) {
          v = (cost.eval({{ba, ea + eb}}) - cost.eval({{ba, ea - eb}}) -
               cost.eval({{ba, -ea + eb}}) + cost.eval({{ba, -ea - eb}})) /
              (4.0 * h * h);
        } else {
          v = (cost.eval({{ba, ea}, {bb, eb}}) - cost.eval({{ba, ea}, {bb, -eb}}) -
               cost.eval({{ba, -ea}, {bb, eb}}) + cost.eval({{ba, -ea}, {bb, -eb}})) /
              (4.0 * h * h);
        }
        exact(ia, ib) += v;
        exact(ib, ia) += v;
      }
    }

    for (const int t : poses) {
      const Mat6 blk = factor_hessian_block(factors[m], states[m], trajectory,
                                            t, DerivativeMode::kCentered);
      approx.block<6, 6>(6 * t, 6 * t) += blk;
    }
  }

  return (exact - approx).norm() / exact.norm();
}

std::vector<HessianProbePoint> centered_hessian_error_probe(
    const WorldSpec& base, const std::vector<int>& h_values, int n_seeds) {
  std::vector<HessianProbePoint> out;
  for (const int H : h_values) {
    double acc = 0.0;
    for (int s = 0; s < n_seeds; ++s) {
      WorldSpec spec = base;
      spec.n_poses = H;
      spec.seed = base.seed + static_cast<std::uint64_t>(s);
      const Dataset d = generate(spec);
      const Problem p = make_problem(d);
      acc += centered_hessian_rel_error(p.factors, p.trajectory);
    }
    out.push_back({H, acc / std::max(n_seeds, 1)});
  }
  return out;
}

}  // namespace ef
