import math
import os

import numpy as np
import pytest

import compham as ch

CONFIGS = os.environ.get(
    "COMPHAM_CONFIG_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "configs")
)


def test_projection_of_the_two_oscillator_rule():
    b = ch.bundle_at(ch.two_osc_rule(2.0), [0.3])
    np.testing.assert_array_equal(b.projector, [[0.0, 0.0], [0.0, 1.0]])
    np.testing.assert_array_equal(b.beta_inv, [[0.0], [0.5]])


def test_rank_deficient_rule_raises():
    spec = ch.load_model_spec(os.path.join(CONFIGS, "rank_deficient.ini"))
    with pytest.raises(ch.RankDeficient):
        ch.bundle_at(ch.build_rule(spec), [0.0, 0.0])


def test_spec_round_trip_and_errors():
    spec = ch.load_model_spec(os.path.join(CONFIGS, "polynomial.ini"))
    assert spec.dim_q == 3 and spec.dim_qbar == 2
    assert not spec.beta_is_constant
    assert ch.parse_model_spec(ch.format_model_spec(spec)) == spec
    with pytest.raises(ch.SpecError):
        ch.load_model_spec(os.path.join(CONFIGS, "malformed.ini"))
    with pytest.raises(ValueError):
        ch.parse_model_spec("[workhorse]\nmass = -1\n")


def test_field_and_hamiltonian():
    params = ch.TwoOscParams(m=1.0, h1=1.0, h2=1.0, lam=1.0)
    model, rule = ch.two_osc_model(params), ch.two_osc_rule(1.0)
    h = ch.PhaseState(qbar=[1.0], q=[1.0, 0.0], pbar=[0.0], p=[0.0, 1.0])
    assert ch.hamiltonian(model, rule, h) == pytest.approx(1.0)
    s = ch.PhaseState(qbar=[0.5], q=[0.5, 1.0], pbar=[0.0], p=[0.5, 0.5])
    np.testing.assert_allclose(ch.canonical_field(model, rule, s), [0.5, 0.5, 0.5, 0.0, -0.5, -1.0])


def test_unstable_mode_grows_as_exp_t_over_lambda():
    params = ch.TwoOscParams(lam=1.0)
    c = ch.two_osc_constrained_constants(params, 1.0, 0.0)
    c.cbar = 1e-6
    model, rule = ch.two_osc_model(params), ch.two_osc_rule(1.0)
    traj = ch.integrate_canonical(model, rule, ch.two_osc_state(params, c, 0.0), t_end=10.0)
    expected = 1e-6 * np.exp(traj.t)
    assert np.max(np.abs(np.abs(traj.pbar[:, 0]) - expected) / expected) <= 1e-6
    assert traj.q.shape == (len(traj), 2)


def test_two_step_on_three_oscillators():
    params = ch.ThreeOscParams(m=1.0, h=1.0, lam=0.8)
    model, rule = ch.three_osc_model(params), ch.three_osc_rule(0.8)
    s0 = ch.three_osc_constrained_state(params, 0.6, -0.2, 0.4, 0.5, 0.0)
    traj = ch.two_step_solve(model, rule, s0.q, s0.p, s0.qbar, method="rk4", step=1e-3, t_end=5.0)
    assert ch.consistency_check(rule, traj).passed
    np.testing.assert_array_equal(traj.pbar, 0.0)
    ref = np.array([ch.three_osc_constrained_state(params, 0.6, -0.2, 0.4, 0.5, t).q for t in traj.t])
    assert np.max(np.abs(traj.q - ref)) <= 1e-8


def test_counting_and_validation():
    assert ch.mode_count(ch.TwoOscParams(h1=1.0, h2=1.0)) == 2
    assert ch.mode_count(ch.TwoOscParams(h1=1.0, h2=2.0)) == 0
    assert ch.mode_count(ch.ThreeOscParams()) == 4
    closure = ch.constraint_closure(ch.three_osc_model(ch.ThreeOscParams()), ch.three_osc_rule(1.0))
    assert (closure.phase_dim, closure.free_dim) == (10, 4)
    checks = ch.validate(ch.three_osc_model(ch.ThreeOscParams()), ch.three_osc_rule(1.0), count=10, seed=3)
    assert {c.name for c in checks} >= {"dalpha", "dbeta", "rank"}
    assert all(c.passed for c in checks)


def test_composite_residual_is_small_on_a_canonical_run():
    params = ch.TwoOscParams(h1=1.0, h2=2.0)
    model, rule = ch.two_osc_model(params), ch.two_osc_rule(1.0)
    s0 = ch.two_osc_state(params, ch.TwoOscConstants(0.3, -0.2, 0.5, 0.4, 0.02, 0.1), 0.0)
    traj = ch.integrate_canonical(model, rule, s0, method="rk4", step=1e-3, t_end=3.2)
    assert ch.composite_residual(model, rule, traj).max_norm <= 1e-6


def test_csv_export():
    traj = ch.integrate_canonical(
        ch.two_osc_model(ch.TwoOscParams()), ch.two_osc_rule(1.0),
        ch.PhaseState.zero(2, 1), method="rk4", step=0.5, t_end=1.0,
    )
    lines = traj.to_csv().splitlines()
    assert lines[0].startswith("t,qbar_1,q_1,q_2")
    assert len(lines) == 4
    assert math.isclose(float(lines[-1].split(",")[0]), 1.0)
