#include "compham/constraints.hpp"
#include "compham/integrator.hpp"
#include "compham/oracles.hpp"

#include "test_support.hpp"

#include <doctest.h>

using namespace compham;
using namespace compham::testing;

namespace {

Vec fd_time_derivative(const std::function<PhaseState(double)>& f, double t, double h = 1e-6) {
  return (pack(f(t + h)) - pack(f(t - h))) / (2 * h);
}

}  // namespace

TEST_CASE("two_osc_state at t = 0") {
  const TwoOscParams p{1.0, 1.0, 1.0, 1.0};
  TwoOscConstants c;
  c.c2 = 1.0;
  PhaseState s = two_osc_state(p, c, 0.0);
  CHECK(s.qbar[0] == doctest::Approx(0.5));
  CHECK(s.q[0] == doctest::Approx(0.0));
  CHECK(s.q[1] == doctest::Approx(1.0));
  CHECK(s.p[0] == doctest::Approx(0.0));
  CHECK(s.p[1] == doctest::Approx(0.0));
  CHECK(s.pbar[0] == doctest::Approx(0.0));

  c = TwoOscConstants{};
  c.cbar = 1.0;
  s = two_osc_state(p, c, 0.0);
  CHECK(s.qbar[0] == doctest::Approx(-0.25));
  CHECK(s.q[0] == doctest::Approx(0.0));
  CHECK(s.q[1] == doctest::Approx(-0.5));
  CHECK(s.p[1] == doctest::Approx(-0.5));
  CHECK(s.pbar[0] == doctest::Approx(1.0));
  CHECK(s.t == 0.0);
}

TEST_CASE("two_osc_state solves the canonical equations") {
  Rng rng(101);
  for (int n = 0; n < 20; ++n) {
    const TwoOscParams p{rng.uniform(0.5, 2.0), rng.uniform(0.2, 3.0), rng.uniform(0.2, 3.0),
                         rng.uniform(0.5, 2.0) * (n % 3 == 0 ? -1.0 : 1.0)};
    const TwoOscConstants c{rng.normal(), rng.normal(), rng.normal(), rng.normal(), 0.1 * rng.normal(), rng.normal()};
    const double t = rng.uniform(0.0, 3.0);
    const auto model = two_osc_model(p);
    const auto rule = two_osc_rule(p.lambda);
    const Vec fd = fd_time_derivative([&](double x) { return two_osc_state(p, c, x); }, t);
    const Vec field = pack(canonical_field(model, rule, two_osc_state(p, c, t)));
    CHECK(rel_err(field, fd) <= 1e-6);
  }
}

TEST_CASE("two_osc_match") {
  const TwoOscParams p{1.0, 1.0, 1.0, 1.0};
  auto [c1, c1p] = two_osc_match(p, 1.0, 0.0);
  CHECK(c1 == doctest::Approx(0.5));
  CHECK(c1p == doctest::Approx(0.5));
  auto [z1, z1p] = two_osc_match(p, 0.0, 0.0);
  CHECK(z1 == 0.0);
  CHECK(z1p == 0.0);

  const TwoOscParams q{1.4, 0.9, 0.9, -0.6};
  const auto c = two_osc_constrained_constants(q, 0.7, -1.2);
  CHECK(c.cbar == 0.0);
  CHECK(c.cbarp == 0.0);
  for (int n = 0; n < 50; ++n) {
    const double t = 0.2 * n;
    const PhaseState s = two_osc_state(q, c, t);
    CHECK(std::abs(s.qbar[0] - s.q[0]) <= 1e-12);
    CHECK(max_abs(example_chain_residual(q, s)) <= 1e-12);
  }
}

TEST_CASE("three_osc_constrained_state") {
  const ThreeOscParams p{1.0, 1.0, 1.0};
  const PhaseState s = three_osc_constrained_state(p, 1.0, 0.0, 1.0, 0.0, 0.0);
  CHECK(s.q[0] == doctest::Approx(1.0));
  CHECK(s.q[1] == doctest::Approx(1.0));
  CHECK(s.q[2] == doctest::Approx(1.0));
  CHECK(s.qbar[0] == doctest::Approx(1.0));
  CHECK(s.qbar[1] == doctest::Approx(1.0));
  CHECK(max_abs(example_chain_residual(p, s)) <= 1e-12);

  CHECK(max_abs(pack(three_osc_constrained_state(p, 0, 0, 0, 0, 2.3))) == 0.0);

  SUBCASE("the closed form is a canonical trajectory") {
    Rng rng(55);
    for (int n = 0; n < 20; ++n) {
      const ThreeOscParams q{rng.uniform(0.5, 2.0), rng.uniform(0.2, 3.0), rng.uniform(0.3, 2.0)};
      const double c1 = rng.normal(), c1p = rng.normal(), c2 = rng.normal(), c2p = rng.normal();
      const double t = rng.uniform(0.0, 5.0);
      auto f = [&](double x) { return three_osc_constrained_state(q, c1, c1p, c2, c2p, x); };
      CHECK(rel_err(pack(canonical_field(three_osc_model(q), three_osc_rule(q.lambda), f(t))), fd_time_derivative(f, t)) <= 1e-6);
    }
  }

  SUBCASE("integration over a short interval matches the oracle") {
    IntegratorOptions opts;
    opts.t_end = 1.1;
    PhaseState s0 = three_osc_constrained_state(p, 0.3, 0.8, -0.5, 0.2, 1.0);
    const Trajectory traj = integrate(canonical_system(three_osc_model(p), three_osc_rule(1.0)), s0, opts);
    CHECK(traj.back().t == 1.1);
    CHECK(max_abs(pack(traj.back()) - pack(three_osc_constrained_state(p, 0.3, 0.8, -0.5, 0.2, 1.1))) <= 1e-8);
  }
}

TEST_CASE("mode_count") {
  CHECK(mode_count(TwoOscParams{1.0, 1.0, 1.0, 1.0}) == 2);
  CHECK(mode_count(TwoOscParams{1.0, 1.0, 2.0, 1.0}) == 0);
  CHECK(mode_count(ThreeOscParams{1.0, 1.0, 1.0}) == 4);

  Rng rng(8);
  for (int n = 0; n < 10; ++n) {
    const double h = rng.uniform(0.2, 3.0);
    const TwoOscParams eq{rng.uniform(0.5, 2.0), h, h, rng.uniform(0.3, 2.0)};
    const TwoOscParams ne{eq.m, h, h + rng.uniform(0.1, 1.0), eq.lambda};
    const ThreeOscParams th{eq.m, h, eq.lambda};
    CHECK(constraint_closure(two_osc_model(eq), two_osc_rule(eq.lambda)).free_dim == mode_count(eq));
    CHECK(constraint_closure(two_osc_model(ne), two_osc_rule(ne.lambda)).free_dim == mode_count(ne));
    CHECK(constraint_closure(three_osc_model(th), three_osc_rule(th.lambda)).free_dim == mode_count(th));
  }
}
