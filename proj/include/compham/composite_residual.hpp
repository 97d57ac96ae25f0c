#pragma once

#include "compham/trajectory.hpp"

#include <stdexcept>
#include <vector>

namespace compham {

class TooFewSamples : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonUniformGrid : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CompositeResidual {
  std::vector<double> times;     // interior sample times
  std::vector<Vec> residual;     // K components per interior sample
  double max_norm = 0.0;
};

/// Evaluates the K fourth-order composite equations of motion,
///   (alpha'_ik + beta'_ilk qbardot_l) E_i - d/dt (beta_ik E_i),
///   E = m qddot + omega qdot + dV/dq,
/// on a uniformly sampled trajectory using second-order central differences
/// for every time derivative. Samples 0, 1, N-2, N-1 are consumed by the
/// stencils; needs at least 5 samples.
CompositeResidual composite_residual(const WorkhorseModel& model, const CompositionRule& rule,
                                     const Trajectory& traj);

}  // namespace compham
