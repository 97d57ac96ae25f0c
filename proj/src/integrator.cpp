#include "compham/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <iostream>
#include <sstream>

namespace compham {

std::string to_string(Method m) { return m == Method::rk4_fixed ? "rk4" : "rk45"; }

Method parse_method(std::string_view name) {
  if (name == "rk4" || name == "rk4_fixed") return Method::rk4_fixed;
  if (name == "rk45" || name == "rk45_adaptive") return Method::rk45_adaptive;
  throw std::invalid_argument("unknown integration method '" + std::string(name) + "' (expected rk4 or rk45)");
}

void IntegratorOptions::check() const {
  if (!std::isfinite(t_end)) throw std::invalid_argument("t_end must be finite");
  if (max_steps == 0) throw std::invalid_argument("max_steps must be positive");
  if (method == Method::rk4_fixed) {
    if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("step must be positive");
  } else {
    if (!(rtol >= 1e-13) || !std::isfinite(rtol)) throw std::invalid_argument("rtol must be >= 1e-13");
    if (!(atol > 0.0) || !std::isfinite(atol)) throw std::invalid_argument("atol must be positive");
  }
}

namespace {

std::string at_time(double t) {
  std::ostringstream os;
  os.precision(17);
  os << " at t=" << t;
  return os.str();
}

// Evaluates rhs, turning failures into IntegrationError subclasses that carry
// the time and the last accepted state.
Vec eval_rhs(const OdeRhs& rhs, double t, const Vec& y, double t_good, const Vec& y_good) {
  Vec f;
  try {
    f = rhs(t, y);
  } catch (const NonFiniteInput& e) {
    throw NonFiniteState(std::string("non-finite state") + at_time(t) + ": " + e.what(), t_good, y_good);
  } catch (const IntegrationError&) {
    throw;
  } catch (const std::exception& e) {
    throw IntegrationError(std::string("field evaluation failed") + at_time(t) + ": " + e.what(), t);
  }
  if (!f.allFinite()) throw NonFiniteState("non-finite field value" + at_time(t), t_good, y_good);
  return f;
}

OdeSolution solve_rk4(const OdeRhs& rhs, double t0, const Vec& y0, const IntegratorOptions& opts) {
  const double span = opts.t_end - t0;
  OdeSolution sol{{t0}, {y0}};
  if (span == 0.0) return sol;
  if (span < 0.0) throw std::invalid_argument("t_end precedes the initial time");
  auto steps = static_cast<std::size_t>(std::llround(span / opts.step));
  bool exact = steps > 0 && std::abs(static_cast<double>(steps) * opts.step - span) <= 1e-9 * span;
  if (!exact) steps = static_cast<std::size_t>(std::ceil(span / opts.step));
  if (steps > opts.max_steps) throw MaxStepsExceeded("rk4 needs more than max_steps steps", t0);
  const double h_grid = exact ? span / static_cast<double>(steps) : opts.step;

  sol.t.reserve(steps + 1);
  sol.y.reserve(steps + 1);
  Vec y = y0;
  double t = t0;
  for (std::size_t n = 1; n <= steps; ++n) {
    const double t_next = n == steps ? opts.t_end : t0 + static_cast<double>(n) * h_grid;
    const double h = t_next - t;
    const Vec k1 = eval_rhs(rhs, t, y, t, y);
    const Vec k2 = eval_rhs(rhs, t + 0.5 * h, y + 0.5 * h * k1, t, y);
    const Vec k3 = eval_rhs(rhs, t + 0.5 * h, y + 0.5 * h * k2, t, y);
    const Vec k4 = eval_rhs(rhs, t + h, y + h * k3, t, y);
    Vec y_next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!y_next.allFinite()) throw NonFiniteState("non-finite state" + at_time(t_next), t, y);
    y = std::move(y_next);
    t = t_next;
    sol.t.push_back(t);
    sol.y.push_back(y);
  }
  return sol;
}

// Dormand-Prince 5(4) tableau.
constexpr std::array<double, 7> kC{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
// Difference between the 5th- and 4th-order weights.
constexpr std::array<double, 7> kE{71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920, -17253.0 / 339200,
                                   22.0 / 525, -1.0 / 40};

double weighted_rms(const Vec& e, const Vec& y0, const Vec& y1, double rtol, double atol) {
  const Vec scale = (y0.cwiseAbs().cwiseMax(y1.cwiseAbs()) * rtol).array() + atol;
  return std::sqrt((e.cwiseQuotient(scale)).squaredNorm() / static_cast<double>(std::max<Eigen::Index>(1, e.size())));
}

double initial_step(const OdeRhs& rhs, double t0, const Vec& y0, const Vec& f0, double span,
                    const IntegratorOptions& opts) {
  const Vec scale = (y0.cwiseAbs() * opts.rtol).array() + opts.atol;
  const double n = static_cast<double>(std::max<Eigen::Index>(1, y0.size()));
  const double d0 = std::sqrt(y0.cwiseQuotient(scale).squaredNorm() / n);
  const double d1 = std::sqrt(f0.cwiseQuotient(scale).squaredNorm() / n);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  const Vec f1 = eval_rhs(rhs, t0 + h0, y0 + h0 * f0, t0, y0);
  const double d2 = std::sqrt((f1 - f0).cwiseQuotient(scale).squaredNorm() / n) / h0;
  const double dmax = std::max(d1, d2);
  const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 1.0 / 5.0);
  return std::min({100.0 * h0, h1, span});
}

OdeSolution solve_rk45(const OdeRhs& rhs, double t0, const Vec& y0, const IntegratorOptions& opts) {
  const double span = opts.t_end - t0;
  OdeSolution sol{{t0}, {y0}};
  if (span == 0.0) return sol;
  if (span < 0.0) throw std::invalid_argument("t_end precedes the initial time");

  Vec y = y0;
  double t = t0;
  std::array<Vec, 7> k;
  k[0] = eval_rhs(rhs, t, y, t, y);
  double h = initial_step(rhs, t0, y0, k[0], span, opts);
  std::size_t attempts = 0;
  bool rejected_last = false;

  while (t < opts.t_end) {
    if (++attempts > opts.max_steps) throw MaxStepsExceeded("exceeded max_steps" + at_time(t), t);
    const double min_step = std::max(1e-14, 16.0 * std::numeric_limits<double>::epsilon() * std::abs(t));
    if (h < min_step) throw StepUnderflow("adaptive step underflow" + at_time(t), t);
    const bool last = t + h >= opts.t_end;
    if (last) h = opts.t_end - t;

    for (int s = 1; s < 7; ++s) {
      Vec ys = y;
      for (int j = 0; j < s; ++j)
        if (kA[s][j] != 0.0) ys += (h * kA[s][j]) * k[static_cast<std::size_t>(j)];
      if (s == 6) {
        k[6] = eval_rhs(rhs, last ? opts.t_end : t + h, ys, t, y);
        break;
      }
      k[static_cast<std::size_t>(s)] = eval_rhs(rhs, t + kC[static_cast<std::size_t>(s)] * h, ys, t, y);
    }
    Vec y_new = y;
    for (int j = 0; j < 6; ++j)
      if (kA[6][j] != 0.0) y_new += (h * kA[6][j]) * k[static_cast<std::size_t>(j)];
    if (!y_new.allFinite()) throw NonFiniteState("non-finite state" + at_time(t + h), t, y);

    Vec err = Vec::Zero(y.size());
    for (std::size_t j = 0; j < 7; ++j)
      if (kE[j] != 0.0) err += (h * kE[j]) * k[j];
    const double e = weighted_rms(err, y, y_new, opts.rtol, opts.atol);

    if (e <= 1.0) {
      t = last ? opts.t_end : t + h;
      y = std::move(y_new);
      k[0] = k[6];  // first-same-as-last
      sol.t.push_back(t);
      sol.y.push_back(y);
      double factor = e == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(e, -0.2), 0.2, 5.0);
      if (rejected_last) factor = std::min(factor, 1.0);
      h *= factor;
      rejected_last = false;
    } else {
      h *= std::max(0.2, 0.9 * std::pow(e, -0.2));
      rejected_last = true;
    }
  }
  return sol;
}

}  // namespace

OdeSolution solve_ode(const OdeRhs& rhs, double t0, const Vec& y0, const IntegratorOptions& opts) {
  opts.check();
  if (!y0.allFinite()) throw NonFiniteState("initial state is not finite", t0, y0);
  return opts.method == Method::rk4_fixed ? solve_rk4(rhs, t0, y0, opts) : solve_rk45(rhs, t0, y0, opts);
}

HermiteTrack::HermiteTrack(std::vector<double> times, std::vector<Vec> values, std::vector<Vec> rates)
    : times_(std::move(times)), values_(std::move(values)), rates_(std::move(rates)) {
  if (times_.empty() || values_.size() != times_.size() || rates_.size() != times_.size()) {
    throw std::invalid_argument("HermiteTrack needs matching, non-empty samples");
  }
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) throw std::invalid_argument("HermiteTrack times must increase strictly");
  }
}

Vec HermiteTrack::operator()(double t) const {
  if (t < times_.front() || t > times_.back()) {
    throw InterpolationGap("interpolation requested" + at_time(t) + " outside stored span", t);
  }
  if (times_.size() == 1) return values_.front();
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t i = it == times_.end() ? times_.size() - 2 : static_cast<std::size_t>(it - times_.begin()) - 1;
  const double h = times_[i + 1] - times_[i];
  const double s = (t - times_[i]) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * values_[i] + (h10 * h) * rates_[i] + h01 * values_[i + 1] + (h11 * h) * rates_[i + 1];
}

Trajectory integrate(const PhaseField& field, const PhaseState& s0, const IntegratorOptions& opts) {
  const auto dim_q = static_cast<int>(s0.q.size());
  const auto dim_qbar = static_cast<int>(s0.qbar.size());
  if (s0.p.size() != dim_q || s0.pbar.size() != dim_qbar) throw DimensionMismatch("inconsistent phase state");
  OdeRhs rhs = [&](double t, const Vec& y) { return pack(field(unpack(y, dim_q, dim_qbar, t))); };
  OdeSolution sol = solve_ode(rhs, s0.t, pack(s0), opts);

  Trajectory traj;
  traj.samples.reserve(sol.t.size());
  for (std::size_t n = 0; n < sol.t.size(); ++n) traj.samples.push_back(unpack(sol.y[n], dim_q, dim_qbar, sol.t[n]));
  if (opts.method == Method::rk4_fixed && sol.t.size() > 1) {
    const double span = sol.t.back() - sol.t.front();
    const double h = span / static_cast<double>(sol.t.size() - 1);
    if (std::abs(h - opts.step) <= 1e-9 * opts.step) traj.uniform_step = h;
  }
  return traj;
}

Trajectory integrate_canonical(const WorkhorseModel& model, const CompositionRule& rule,
                               const PhaseState& s0, const IntegratorOptions& opts) {
  Trajectory traj = integrate(canonical_system(model, rule), s0, opts);
  attach_diagnostics(model, rule, traj);
  return traj;
}

Trajectory two_step_solve(const WorkhorseModel& model, const CompositionRule& rule, const Vec& q0,
                          const Vec& p0, const Vec& qbar0, const IntegratorOptions& opts, double t0) {
  const int dim_q = model.dim();
  const int dim_qbar = rule.dim_qbar();
  require_size(q0, dim_q, "q0");
  require_size(p0, dim_q, "p0");
  require_size(qbar0, dim_qbar, "qbar0");
  if (rule.dim_q() != dim_q) throw DimensionMismatch("model and rule disagree on I");

  const double start_residual = primary_residual(rule, qbar0, q0).norm();
  if (start_residual > 1e-8) {
    std::cerr << "warning: two-step start is off the primary constraint surface (residual "
              << start_residual << ")\n";
  }

  // Stage 1: workhorse dynamics in (q, p).
  OdeRhs workhorse_rhs = [&](double, const Vec& y) {
    WorkhorseRate r = workhorse_field(model, y.head(dim_q), y.tail(dim_q));
    Vec out(2 * dim_q);
    out << r.dq, r.dp;
    return out;
  };
  Vec y0(2 * dim_q);
  y0 << q0, p0;
  const OdeSolution stage1 = solve_ode(workhorse_rhs, t0, y0, opts);

  std::vector<Vec> qs, qdots;
  qs.reserve(stage1.y.size());
  qdots.reserve(stage1.y.size());
  for (const Vec& y : stage1.y) {
    Vec q = y.head(dim_q);
    qdots.push_back((y.tail(dim_q) - model.u(q)) / model.mass());
    qs.push_back(std::move(q));
  }
  const HermiteTrack q_of_t(stage1.t, qs, qdots);

  // Stage 2: qbar post-processing, one sub-integration per stage-1 interval.
  OdeRhs qbar_rhs = [&](double t, const Vec& qbar) { return qbar_dot(bundle_at(rule, qbar), q_of_t(t)); };
  std::vector<Vec> qbars{qbar0};
  qbars.reserve(stage1.t.size());
  for (std::size_t n = 1; n < stage1.t.size(); ++n) {
    IntegratorOptions sub = opts;
    sub.t_end = stage1.t[n];
    if (opts.method == Method::rk4_fixed) sub.step = stage1.t[n] - stage1.t[n - 1];
    const OdeSolution piece = solve_ode(qbar_rhs, stage1.t[n - 1], qbars.back(), sub);
    qbars.push_back(piece.y.back());
  }

  Trajectory traj;
  traj.samples.reserve(stage1.t.size());
  for (std::size_t n = 0; n < stage1.t.size(); ++n) {
    traj.samples.push_back(PhaseState{stage1.t[n], qbars[n], qs[n], Vec::Zero(dim_qbar),
                                      stage1.y[n].tail(dim_q)});
  }
  if (opts.method == Method::rk4_fixed && stage1.t.size() > 1) {
    const double h = (stage1.t.back() - stage1.t.front()) / static_cast<double>(stage1.t.size() - 1);
    if (std::abs(h - opts.step) <= 1e-9 * opts.step) traj.uniform_step = h;
  }
  attach_diagnostics(model, rule, traj);
  return traj;
}

ConsistencyResult consistency_check(const CompositionRule& rule, const Trajectory& traj, double tolerance) {
  ConsistencyResult r;
  r.tolerance = tolerance;
  for (const auto& s : traj.samples) {
    r.max_primary = std::max(r.max_primary, primary_residual(rule, s.qbar, s.q).norm());
  }
  r.passed = r.max_primary <= tolerance;
  return r;
}

}  // namespace compham
