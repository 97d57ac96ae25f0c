// One line per acceptance criterion: PASS/FAIL, the measured worst case and
// the pinned tolerance. Exit status is nonzero if any criterion fails.

#include "cli.hpp"

#include "compham/composite_residual.hpp"
#include "compham/constraints.hpp"
#include "compham/integrator.hpp"
#include "compham/oracles.hpp"
#include "compham/projection.hpp"

#include "test_support.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

using namespace compham;
using namespace compham::testing;

namespace {

struct Measure {
  std::string label;
  double worst;
  double tol;
  bool at_least = false;  // a lower bound instead of an upper one
  bool ok() const { return at_least ? worst >= tol : worst <= tol; }
};

struct Outcome {
  std::vector<Measure> measures;
  std::vector<std::string> notes;
  double time_limit = 0.0;  // seconds; 0 means unbounded
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  std::string error;
  try {
    out = body();
  } catch (const std::exception& e) {
    error = e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool ok = error.empty();
  for (const auto& m : out.measures) ok = ok && m.ok();
  if (out.time_limit > 0.0 && secs >= out.time_limit) ok = false;
  if (!ok) ++failures;

  std::printf("%s  %d  %s  (%.2fs", ok ? "PASS" : "FAIL", id, title, secs);
  if (out.time_limit > 0.0) std::printf(" < %.0fs", out.time_limit);
  std::printf(")\n");
  for (const auto& m : out.measures) {
    std::printf("        %-62s %10.3e %s %.1e%s\n", m.label.c_str(), m.worst, m.at_least ? ">=" : "<=", m.tol,
                m.ok() ? "" : "  <-- violated");
  }
  for (const auto& n : out.notes) std::printf("        %s\n", n.c_str());
  if (!error.empty()) std::printf("        exception: %s\n", error.c_str());
}

Measure exact(const std::string& label, bool holds) { return {label, holds ? 0.0 : 1.0, 0.0}; }

IntegratorOptions rk45(double t_end) {
  IntegratorOptions o;
  o.method = Method::rk45_adaptive;
  o.rtol = 1e-10;
  o.atol = 1e-12;
  o.t_end = t_end;
  return o;
}

IntegratorOptions rk4(double step, double t_end) {
  IntegratorOptions o;
  o.method = Method::rk4_fixed;
  o.step = step;
  o.t_end = t_end;
  return o;
}

// 1 -------------------------------------------------------------------------

Outcome projection_algebra() {
  Outcome out;
  out.time_limit = 5.0;
  const double lambda = 0.7;

  const ProjectionBundle two = bundle_at(two_osc_rule(lambda), Vec::Constant(1, 0.3));
  const Mat two_inv = (Mat(2, 1) << 0.0, 1.0 / lambda).finished();
  const Mat two_p = (Mat(2, 2) << 0, 0, 0, 1).finished();
  out.measures.push_back({"two-oscillator beta_inv, P", std::max(max_abs(two.beta_inv - two_inv), max_abs(two.projector - two_p)), 1e-12});

  const ProjectionBundle three = bundle_at(three_osc_rule(lambda), (Vec(2) << 0.3, -0.4).finished());
  const Mat three_inv = (Mat(3, 2) << 0, 1, 0, 0, 1, 0).finished() / lambda;
  const Mat three_p = Vec((Vec(3) << 1, 0, 1).finished()).asDiagonal();
  out.measures.push_back({"three-oscillator beta_inv, P", std::max(max_abs(three.beta_inv - three_inv), max_abs(three.projector - three_p)), 1e-12});

  Rng rng(1001);
  double ident = 0.0, deriv = 0.0;
  for (int n = 0; n < 50; ++n) {
    const int k = rng.integer(1, 3);
    const int i = rng.integer(k, 5);
    const CompositionRule rule = random_polynomial_rule(i, k, rng);
    const Vec qbar = rng.vec(k);
    const ProjectionBundle b = bundle_at(rule, qbar);
    const Mat& p = b.projector;
    ident = std::max({ident, max_abs(p * p - p), max_abs(p * b.beta - b.beta),
                      max_abs(b.beta_inv.transpose() * b.beta - Mat::Identity(k, k))});
    const Tensor3 fd = fd_matrix_derivative([&](const Vec& x) { return bundle_at(rule, x).projector; }, qbar);
    const Tensor3 an = projector_derivative(b);
    for (int c = 0; c < k; ++c) deriv = std::max(deriv, rel_err(an[c], fd[c]));
  }
  out.measures.push_back({"50 random rules: P^2=P, P beta=beta, beta_inv^T beta=I", ident, 1e-10});
  out.measures.push_back({"50 random rules: dP/dqbar vs finite differences", deriv, 1e-5});
  return out;
}

// 2 -------------------------------------------------------------------------

Outcome field_consistency() {
  Outcome out;
  out.time_limit = 10.0;
  Rng rng(2002);
  for (const auto& sys : system_zoo()) {
    const int i = sys.rule.dim_q(), k = sys.rule.dim_qbar();
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
      const PhaseState s = random_state(sys.rule, rng);
      const Vec grad = fd_gradient([&](const Vec& y) { return hamiltonian(sys.model, sys.rule, unpack(y, i, k, 0.0)); }, pack(s));
      // (dqbar, dq, dpbar, dp) = (dH/dpbar, dH/dp, -dH/dqbar, -dH/dq)
      Vec jgrad(grad.size());
      jgrad << grad.segment(k + i, k), grad.segment(2 * k + i, i), -grad.segment(0, k), -grad.segment(k, i);
      worst = std::max(worst, rel_err(pack(canonical_field(sys.model, sys.rule, s)), jgrad));
    }
    out.measures.push_back({sys.name + ": field vs symplectic gradient of H", worst, 1e-5});
  }
  return out;
}

// 3 -------------------------------------------------------------------------

Outcome two_osc_closed_form() {
  Outcome out;
  out.time_limit = 5.0;
  const TwoOscParams params{1.0, 1.0, 1.0, 1.0};
  TwoOscConstants c = two_osc_constrained_constants(params, 0.8, -0.3);
  c.cbar = 1e-6;
  c.cbarp = 0.2;
  const Trajectory traj = integrate_canonical(two_osc_model(params), two_osc_rule(params.lambda), two_osc_state(params, c, 0.0), rk45(10.0));
  double worst = 0.0, pbar = 0.0;
  for (const auto& s : traj.samples) {
    const PhaseState ref = two_osc_state(params, c, s.t);
    worst = std::max(worst, rel_err(pack(ref), pack(s)));
    pbar = std::max(pbar, std::abs(s.pbar[0] - ref.pbar[0]) / std::abs(ref.pbar[0]));
  }
  out.measures.push_back({"state vs closed form over [0, 10], rtol 1e-10", worst, 1e-6});
  out.measures.push_back({"unstable mode pbar_1 vs 1e-6 e^t (relative)", pbar, 1e-6});
  std::ostringstream note;
  note << "pbar_1 amplification " << std::abs(traj.back().pbar[0]) / 1e-6;
  out.notes.push_back(note.str());
  return out;
}

// 4 -------------------------------------------------------------------------

/// Stacks the chain rows with their images under every power of the linear
/// canonical flow and returns the rank.
int chain_rank(const WorkhorseModel& model, const CompositionRule& rule, const FamilyParams& params) {
  const int i = rule.dim_q(), k = rule.dim_qbar(), n = 2 * (i + k);
  Mat a(n, n);
  Mat c(example_chain_residual(params, PhaseState::zero(i, k)).size(), n);
  for (int j = 0; j < n; ++j) {
    const PhaseState e = unpack(Vec::Unit(n, j), i, k, 0.0);
    a.col(j) = pack(canonical_field(model, rule, e));
    c.col(j) = example_chain_residual(params, e);
  }
  Mat stacked = c, block = c;
  for (int g = 0; g < n; ++g) {
    block = block * a;
    Mat next(stacked.rows() + block.rows(), n);
    next << stacked, block;
    stacked = next;
  }
  Eigen::FullPivLU<Mat> lu(stacked);
  lu.setThreshold(1e-10);
  return static_cast<int>(lu.rank());
}

Outcome constraint_chains() {
  Outcome out;
  const TwoOscParams two{1.0, 1.0, 1.0, 0.8};
  const ThreeOscParams three{1.0, 1.0, 0.8};
  const TwoOscConstants tc = two_osc_constrained_constants(two, 0.7, -0.4);

  double chain = 0.0;
  for (int n = 0; n < 50; ++n) {
    const double t = 10.0 * n / 49.0;
    chain = std::max(chain, max_abs(example_chain_residual(two, two_osc_state(two, tc, t))));
    chain = std::max(chain, max_abs(example_chain_residual(three, three_osc_constrained_state(three, 0.6, -0.2, 0.4, 0.5, t))));
  }
  out.measures.push_back({"chain residual of oracle states, 50 times, both families", chain, 1e-12});

  auto drift = [](const WorkhorseModel& m, const CompositionRule& r, const PhaseState& s0) {
    const DriftReport d = drift_report(m, r, integrate_canonical(m, r, s0, rk45(10.0)));
    return std::max({d.max.primary_norm, d.max.secondary_norm, d.max.pbar_norm});
  };
  out.measures.push_back({"two-oscillator run: primary/secondary/pbar norms on [0, 10]",
                          drift(two_osc_model(two), two_osc_rule(two.lambda), two_osc_state(two, tc, 0.0)), 1e-7});
  out.measures.push_back({"three-oscillator run: primary/secondary/pbar norms on [0, 10]",
                          drift(three_osc_model(three), three_osc_rule(three.lambda), three_osc_constrained_state(three, 0.6, -0.2, 0.4, 0.5, 0.0)), 1e-7});

  const TwoOscParams unequal{1.0, 1.0, 2.0, 0.8};
  const int rank = chain_rank(two_osc_model(unequal), two_osc_rule(unequal.lambda), unequal);
  out.measures.push_back(exact("h1 != h2: chain system has full rank 6 (trivial solution only)", rank == 6));
  return out;
}

// 5 -------------------------------------------------------------------------

Outcome parameter_counting() {
  Outcome out;
  const TwoOscParams equal{1.0, 1.0, 1.0, 1.0};
  const TwoOscParams unequal{1.0, 1.0, 2.0, 1.0};
  const ThreeOscParams three{1.0, 1.0, 1.0};
  struct Row {
    std::string name;
    FamilyParams params;
    WorkhorseModel model;
    CompositionRule rule;
    int expected;
  };
  const std::vector<Row> rows{
      {"two-osc h1=h2", equal, two_osc_model(equal), two_osc_rule(1.0), 2},
      {"two-osc h1!=h2", unequal, two_osc_model(unequal), two_osc_rule(1.0), 0},
      {"three-osc", three, three_osc_model(three), three_osc_rule(1.0), 4},
  };
  for (const auto& r : rows) {
    const int phase = 2 * (r.rule.dim_q() + r.rule.dim_qbar());
    const int count = mode_count(r.params);
    const int brute = phase - chain_rank(r.model, r.rule, r.params);
    const int closure = constraint_closure(r.model, r.rule).free_dim;
    std::ostringstream label;
    label << r.name << ": mode_count " << count << ", from chain " << brute << ", closure " << closure << " (want "
          << r.expected << " of " << phase << ")";
    out.measures.push_back(exact(label.str(), count == r.expected && brute == r.expected && closure == r.expected));
  }
  return out;
}

// 6 -------------------------------------------------------------------------

Outcome two_step() {
  Outcome out;
  const ThreeOscParams params{1.0, 1.0, 0.8};
  const double l = params.lambda, m = params.m, h = params.h;
  const auto model = three_osc_model(params);
  const auto rule = three_osc_rule(l);
  const PhaseState s0 = three_osc_constrained_state(params, 0.6, -0.2, 0.4, 0.5, 0.0);

  double rel = 0.0;
  const Trajectory traj = two_step_solve(model, rule, s0.q, s0.p, s0.qbar, rk45(10.0));
  for (const auto& s : traj.samples) {
    const double q1dot = s.p[0] / m, q2dot = s.p[1] / m, q2ddot = -h * s.q[1] / m;
    rel = std::max(rel, std::abs(s.qbar[0] - (s.q[0] - l * q2dot)));
    rel = std::max(rel, std::abs(s.q[2] - (l * q1dot - l * l * q2ddot)));
  }
  out.measures.push_back({"qbar1 = q1 - l q2', q3 = l q1' - l^2 q2'' on [0, 10]", rel, 1e-6});

  const auto grid = rk4(1e-3, 10.0);
  const Trajectory a = two_step_solve(model, rule, s0.q, s0.p, s0.qbar, grid);
  const Trajectory b = integrate_canonical(model, rule, s0, grid);
  double diff = a.size() == b.size() ? 0.0 : 1.0;
  for (std::size_t n = 0; diff < 1.0 && n < a.size(); ++n) diff = std::max(diff, max_abs(pack(a.samples[n]) - pack(b.samples[n])));
  out.measures.push_back({"two-step vs direct canonical run with pbar = 0 (rk4 grid)", diff, 1e-7});
  return out;
}

// 7 -------------------------------------------------------------------------

Outcome instability_law() {
  Outcome out;
  cli::RunConfig cfg;
  cfg.model.mass = 1.0;
  cfg.model.spring_constants = {1.0, 1.0};
  cfg.model.alpha_matrix = (Mat(2, 1) << 1.0, 1.0).finished();
  cfg.model.alpha_offset = Vec::Zero(2);
  cfg.model.beta = Mat((Mat(2, 1) << 0.0, 1.0).finished());
  cfg.integrator = rk45(10.0);
  cli::InitialSpec init;
  init.family = "two_osc";
  init.constants = {0, 0, 0.5, 0.3, 0, 0};
  init.match = true;
  cfg.initial = init;
  cfg.sweep = cli::SweepSpec{{0.5, 1.0, 2.0}, {1e-8, 0.0}};

  for (const auto& c : cli::run_sweep(cfg)) {
    std::ostringstream label;
    if (c.epsilon != 0.0) {
      label << "lambda " << c.lambda << ": fitted rate " << c.rate << " vs 1/lambda";
      const double err = c.status == "ok" ? std::abs(c.rate - 1.0 / c.lambda) * std::abs(c.lambda) : 1.0;
      out.measures.push_back({label.str(), err, 1e-4});
    } else {
      label << "lambda " << c.lambda << ", pbar(0) = 0: max |pbar_1| (" << c.status << ")";
      out.measures.push_back({label.str(), c.status == "failed" ? 1.0 : c.max_pbar, 1e-9});
    }
  }

  // Same statement with a field-dependent beta, where pbar couples to q.
  const auto zoo = system_zoo();
  const auto& sys = zoo[2];
  Rng rng(7007);
  PhaseState s0 = random_state(sys.rule, rng, 0.5);
  s0.pbar.setZero();
  double worst = 0.0;
  for (const auto& s : integrate(canonical_system(sys.model, sys.rule), s0, rk45(10.0)).samples) {
    worst = std::max(worst, max_abs(s.pbar));
  }
  out.measures.push_back({sys.name + ", pbar(0) = 0: max |pbar|", worst, 1e-9});
  return out;
}

// 8 -------------------------------------------------------------------------

Outcome lagrangian_equivalence() {
  Outcome out;
  const TwoOscParams params{1.0, 1.0, 2.0, 1.0};
  const auto model = two_osc_model(params);
  const auto rule = two_osc_rule(params.lambda);
  const PhaseState s0 = two_osc_state(params, {0.3, -0.2, 0.5, 0.4, 0.02, 0.1}, 0.0);
  auto residual = [&](double h) {
    return composite_residual(model, rule, integrate(canonical_system(model, rule), s0, rk4(h, 3.2))).max_norm;
  };

  // Third time derivatives by differencing hit a rounding floor near
  // eps |q| / h^3, so the order is read on grids from 1.6e-2 to 2e-3.
  const std::vector<double> hs{1.6e-2, 8e-3, 4e-3, 2e-3};
  std::vector<double> r;
  for (double h : hs) r.push_back(residual(h));
  double min_order = 1e300;
  std::ostringstream note;
  note << "residuals";
  for (std::size_t n = 0; n < hs.size(); ++n) {
    note << "  h=" << hs[n] << ": " << r[n];
    if (n + 1 < hs.size()) min_order = std::min(min_order, std::log2(r[n] / r[n + 1]));
  }
  out.measures.push_back({"minimum observed order between successive grids", min_order, 1.8, true});
  out.measures.push_back({"max residual at h = 1e-3", residual(1e-3), 1e-6});
  out.notes.push_back(note.str());
  return out;
}

}  // namespace

int main() {
  report(1, "projection algebra", projection_algebra);
  report(2, "Hamiltonian and canonical field consistency", field_consistency);
  report(3, "two-oscillator closed form, unstable mode included", two_osc_closed_form);
  report(4, "constraint chains", constraint_chains);
  report(5, "parameter counting", parameter_counting);
  report(6, "two-step procedure", two_step);
  report(7, "instability law", instability_law);
  report(8, "Lagrangian and Hamiltonian equivalence", lagrangian_equivalence);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
