#include "compham/composite_residual.hpp"

#include <cmath>

namespace compham {

CompositeResidual composite_residual(const WorkhorseModel& model, const CompositionRule& rule,
                                     const Trajectory& traj) {
  const std::size_t n = traj.size();
  if (n < 5) throw TooFewSamples("composite residual needs at least 5 samples, got " + std::to_string(n));
  const double h = (traj.back().t - traj.front().t) / static_cast<double>(n - 1);
  if (!(h > 0.0)) throw NonUniformGrid("trajectory times must increase");
  for (std::size_t j = 1; j < n; ++j) {
    double dt = traj.samples[j].t - traj.samples[j - 1].t;
    if (std::abs(dt - h) > 1e-9 * h) {
      throw NonUniformGrid("sample spacing at t=" + std::to_string(traj.samples[j].t) +
                           " deviates from the uniform step");
    }
  }

  const double m = model.mass();
  auto q = [&](std::size_t j) -> const Vec& { return traj.samples[j].q; };
  auto eom = [&](std::size_t j) {
    const Vec qdot = (q(j + 1) - q(j - 1)) / (2.0 * h);
    const Vec qddot = (q(j + 1) - 2.0 * q(j) + q(j - 1)) / (h * h);
    return Vec(m * qddot + omega(model, q(j)) * qdot + model.grad_potential(q(j)));
  };

  CompositeResidual out;
  for (std::size_t j = 2; j + 2 < n; ++j) {
    const Vec& qbar = traj.samples[j].qbar;
    const Vec qbardot = (traj.samples[j + 1].qbar - traj.samples[j - 1].qbar) / (2.0 * h);
    const Vec e = eom(j);
    const Vec g_next = rule.beta(traj.samples[j + 1].qbar).transpose() * eom(j + 1);
    const Vec g_prev = rule.beta(traj.samples[j - 1].qbar).transpose() * eom(j - 1);
    const Mat dalpha = rule.dalpha(qbar);
    const Tensor3 dbeta = rule.dbeta(qbar);

    Vec r(rule.dim_qbar());
    for (Eigen::Index k = 0; k < r.size(); ++k) {
      const Vec lead = dalpha.col(k) + dbeta[static_cast<std::size_t>(k)] * qbardot;
      r[k] = lead.dot(e) - (g_next[k] - g_prev[k]) / (2.0 * h);
    }
    out.max_norm = std::max(out.max_norm, r.norm());
    out.times.push_back(traj.samples[j].t);
    out.residual.push_back(std::move(r));
  }
  return out;
}

}  // namespace compham
