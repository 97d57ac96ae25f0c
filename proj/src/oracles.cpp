#include "compham/oracles.hpp"

#include <cmath>

namespace compham {

PhaseState two_osc_state(const TwoOscParams& params, const TwoOscConstants& c, double t) {
  params.check();
  const double m = params.m, l = params.lambda;
  const double w1 = params.omega1(), w2 = params.omega2();
  const double lw = l * w2;
  const double d = 1.0 + lw * lw;
  const double grow = std::exp(t / l);
  const double decay = std::exp(-t / l);
  const double cos1 = std::cos(w1 * t), sin1 = std::sin(w1 * t);
  const double cos2 = std::cos(w2 * t), sin2 = std::sin(w2 * t);

  PhaseState s = PhaseState::zero(2, 1, t);
  s.qbar[0] = c.cbarp * decay - c.cbar * l / (2.0 * m * d) * grow +
              ((c.c2 - lw * c.c2p) * cos2 + (c.c2p + lw * c.c2) * sin2) / d;
  s.q[0] = c.c1 * cos1 + c.c1p * sin1;
  s.q[1] = c.c2 * cos2 + c.c2p * sin2 - c.cbar * l / (m * d) * grow;
  s.p[0] = m * w1 * (c.c1p * cos1 - c.c1 * sin1);
  s.p[1] = m * w2 * (c.c2p * cos2 - c.c2 * sin2) - c.cbar / d * grow;
  s.pbar[0] = c.cbar * grow;
  return s;
}

std::pair<double, double> two_osc_match(const TwoOscParams& params, double c2, double c2p) {
  params.check();
  const double lw = params.lambda * params.omega2();
  const double d = 1.0 + lw * lw;
  return {(c2 - lw * c2p) / d, (c2p + lw * c2) / d};
}

TwoOscConstants two_osc_constrained_constants(const TwoOscParams& params, double c2, double c2p) {
  auto [c1, c1p] = two_osc_match(params, c2, c2p);
  return TwoOscConstants{c1, c1p, c2, c2p, 0.0, 0.0};
}

PhaseState three_osc_constrained_state(const ThreeOscParams& params, double c1, double c1p, double c2,
                                       double c2p, double t) {
  params.check();
  const double m = params.m, h = params.h, l = params.lambda, w = params.omega();
  const double cs = std::cos(w * t), sn = std::sin(w * t);
  const double q1 = c1 * cs + c1p * sn;
  const double q1dot = w * (c1p * cs - c1 * sn);
  const double q2 = c2 * cs + c2p * sn;
  const double q2dot = w * (c2p * cs - c2 * sn);
  const double q2ddot = -w * w * q2;

  PhaseState s = PhaseState::zero(3, 2, t);
  s.qbar[0] = q1 - l * q2dot;
  s.qbar[1] = q2;
  s.q[0] = q1;
  s.q[1] = q2;
  s.q[2] = l * q1dot - l * l * q2ddot;
  s.p[1] = (m / l) * (s.q[0] - s.qbar[0]);
  s.p[0] = (m / l) * s.q[2] - l * h * s.qbar[1];
  s.p[2] = -l * h * s.qbar[0];
  return s;
}

int mode_count(const FamilyParams& params) {
  struct Counter {
    int operator()(const TwoOscParams& p) const {
      p.check();
      return p.h1 == p.h2 ? 2 : 0;
    }
    int operator()(const ThreeOscParams& p) const {
      p.check();
      return 4;
    }
  };
  return std::visit(Counter{}, params);
}

}  // namespace compham
