#include "compham/families.hpp"

#include <cmath>
#include <stdexcept>

namespace compham {

double TwoOscParams::omega1() const { return std::sqrt(h1 / m); }
double TwoOscParams::omega2() const { return std::sqrt(h2 / m); }

void TwoOscParams::check() const {
  if (!(m > 0.0)) throw std::invalid_argument("two-oscillator family: m must be positive");
  if (lambda == 0.0 || !std::isfinite(lambda)) throw std::invalid_argument("two-oscillator family: lambda must be nonzero");
  if (!(h1 >= 0.0) || !(h2 >= 0.0)) throw std::invalid_argument("two-oscillator family: spring constants must be >= 0");
}

double ThreeOscParams::omega() const { return std::sqrt(h / m); }

void ThreeOscParams::check() const {
  if (!(m > 0.0)) throw std::invalid_argument("three-oscillator family: m must be positive");
  if (lambda == 0.0 || !std::isfinite(lambda)) throw std::invalid_argument("three-oscillator family: lambda must be nonzero");
  if (!(h >= 0.0)) throw std::invalid_argument("three-oscillator family: spring constant must be >= 0");
}

WorkhorseModel two_osc_model(const TwoOscParams& params) {
  params.check();
  return harmonic_workhorse(params.m, {params.h1, params.h2});
}

CompositionRule two_osc_rule(double lambda) {
  Mat a(2, 1);
  a << 1.0, 1.0;
  Mat beta(2, 1);
  beta << 0.0, lambda;
  return affine_rule(a, Vec::Zero(2), beta, lambda);
}

WorkhorseModel three_osc_model(const ThreeOscParams& params) {
  params.check();
  return harmonic_workhorse(params.m, {params.h, params.h, params.h});
}

CompositionRule three_osc_rule(double lambda) {
  Mat a(3, 2);
  a << 1.0, 0.0,
       0.0, 1.0,
       0.0, 0.0;
  Mat beta(3, 2);
  beta << 0.0, lambda,
          0.0, 0.0,
          lambda, 0.0;
  return affine_rule(a, Vec::Zero(3), beta, lambda);
}

}  // namespace compham
