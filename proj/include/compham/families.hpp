#pragma once

#include "compham/model.hpp"

#include <variant>

namespace compham {

/// Two oscillators q1, q2 composed from a single qbar1:
/// alpha = (qbar1, qbar1), beta = lambda (0, 1)^T.
struct TwoOscParams {
  double m = 1.0;
  double h1 = 1.0;
  double h2 = 1.0;
  double lambda = 1.0;

  double omega1() const;
  double omega2() const;
  /// Throws std::invalid_argument unless m > 0, lambda != 0, h_i >= 0.
  void check() const;
};

/// Three equal oscillators composed from (qbar1, qbar2):
/// alpha = (qbar1, qbar2, 0), beta = lambda [[0,1],[0,0],[1,0]].
struct ThreeOscParams {
  double m = 1.0;
  double h = 1.0;
  double lambda = 1.0;

  double omega() const;
  void check() const;
};

using FamilyParams = std::variant<TwoOscParams, ThreeOscParams>;

WorkhorseModel two_osc_model(const TwoOscParams& params);
CompositionRule two_osc_rule(double lambda);

WorkhorseModel three_osc_model(const ThreeOscParams& params);
CompositionRule three_osc_rule(double lambda);

}  // namespace compham
