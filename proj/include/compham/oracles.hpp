#pragma once

#include "compham/dynamics.hpp"
#include "compham/families.hpp"

namespace compham {

/// Integration constants of the full six-parameter two-oscillator solution:
/// harmonic amplitudes (c1, c1p) and (c2, c2p), plus cbar for the growing
/// e^{t/lambda} mode and cbarp for the decaying e^{-t/lambda} mode.
struct TwoOscConstants {
  double c1 = 0.0;
  double c1p = 0.0;
  double c2 = 0.0;
  double c2p = 0.0;
  double cbar = 0.0;
  double cbarp = 0.0;
};

/// Closed-form solution of the two-oscillator canonical equations at time t.
PhaseState two_osc_state(const TwoOscParams& params, const TwoOscConstants& consts, double t);

/// (c1, c1p) that put the harmonic part of qbar1 on top of q1 (meaningful for h1 = h2).
std::pair<double, double> two_osc_match(const TwoOscParams& params, double c2, double c2p);

/// Matched constants with the exponential modes switched off.
TwoOscConstants two_osc_constrained_constants(const TwoOscParams& params, double c2, double c2p);

/// Four-parameter constrained three-oscillator solution: q1, q2 harmonic,
/// qbar2 = q2, qbar1 = q1 - l q2', q3 = l q1' - l^2 q2'', pbar = 0 and the
/// momenta fixed by the constraint chain.
PhaseState three_osc_constrained_state(const ThreeOscParams& params, double c1, double c1p, double c2,
                                       double c2p, double t);

/// Free real parameters left in the constrained solution family.
int mode_count(const FamilyParams& params);

}  // namespace compham
