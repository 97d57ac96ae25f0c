#pragma once

#include "compham/constraints.hpp"
#include "compham/dynamics.hpp"
#include "compham/trajectory.hpp"

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace compham {

enum class Method { rk4_fixed, rk45_adaptive };

std::string to_string(Method m);
Method parse_method(std::string_view name);  // "rk4" | "rk45" (also the enum spellings)

struct IntegratorOptions {
  Method method = Method::rk45_adaptive;
  double step = 1e-3;    // rk4_fixed step
  double rtol = 1e-10;   // rk45_adaptive
  double atol = 1e-12;
  double t_end = 10.0;   // integration runs from the initial state's time to t_end
  std::size_t max_steps = 20'000'000;

  /// Throws std::invalid_argument for non-positive steps/tolerances or rtol < 1e-13.
  void check() const;
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class StepUnderflow : public IntegrationError {
 public:
  using IntegrationError::IntegrationError;
};

class MaxStepsExceeded : public IntegrationError {
 public:
  using IntegrationError::IntegrationError;
};

/// The field produced a non-finite value. last_good holds the last accepted
/// state (flat vector, same layout as the integrated system) at time().
class NonFiniteState : public IntegrationError {
 public:
  NonFiniteState(const std::string& what, double time, Vec last_good)
      : IntegrationError(what, time), last_good_(std::move(last_good)) {}
  const Vec& last_good() const noexcept { return last_good_; }

 private:
  Vec last_good_;
};

class InterpolationGap : public IntegrationError {
 public:
  using IntegrationError::IntegrationError;
};

using OdeRhs = std::function<Vec(double t, const Vec& y)>;

struct OdeSolution {
  std::vector<double> t;
  std::vector<Vec> y;
};

/// Classical RK4 on a uniform grid or Dormand-Prince 5(4) with per-step error
/// control (weighted RMS norm, scale atol + rtol max(|y|, |y_new|)). The final
/// sample lands exactly on t_end.
OdeSolution solve_ode(const OdeRhs& rhs, double t0, const Vec& y0, const IntegratorOptions& opts);

/// Piecewise cubic Hermite interpolant through samples and their derivatives.
class HermiteTrack {
 public:
  HermiteTrack(std::vector<double> times, std::vector<Vec> values, std::vector<Vec> rates);

  /// Throws InterpolationGap outside [front time, back time].
  Vec operator()(double t) const;

  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }

 private:
  std::vector<double> times_;
  std::vector<Vec> values_;
  std::vector<Vec> rates_;
};

Trajectory integrate(const PhaseField& field, const PhaseState& s0, const IntegratorOptions& opts);

/// integrate() on the canonical field with H and constraint norms attached.
Trajectory integrate_canonical(const WorkhorseModel& model, const CompositionRule& rule,
                               const PhaseState& s0, const IntegratorOptions& opts);

/// Solve with pbar = 0 in two stages: (1) the workhorse equations for (q, p);
/// (2) dqbar/dt = (q(t) - alpha) . beta_inv along the stored q(t), using cubic
/// Hermite interpolation of (q, qdot) between stage-1 samples. Returns the
/// merged trajectory (pbar identically zero) with diagnostics.
Trajectory two_step_solve(const WorkhorseModel& model, const CompositionRule& rule, const Vec& q0,
                          const Vec& p0, const Vec& qbar0, const IntegratorOptions& opts,
                          double t0 = 0.0);

struct ConsistencyResult {
  double max_primary = 0.0;
  double tolerance = 1e-6;
  bool passed = true;
};

ConsistencyResult consistency_check(const CompositionRule& rule, const Trajectory& traj,
                                    double tolerance = 1e-6);

}  // namespace compham
