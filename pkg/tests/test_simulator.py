import math
from dataclasses import replace

import pytest

from lipwalk.controller import FootPlacementCommand, baseline_L_error, predict_L_next_end
from lipwalk.errors import ConfigError, InvariantError
from lipwalk.lip_core import PendulumParams, PendulumState
from lipwalk.simulator import (
    Kick,
    PlacementError,
    RandomDisturbances,
    ScenarioConfig,
    TargetEntry,
    run_comparison,
    run_scenario,
)

P = PendulumParams(mass=32.0, com_height=0.9, step_duration=0.4)
T = P.step_duration
mH = P.mass * P.com_height


def make_config(**kwargs):
    base = dict(
        params=P,
        initial=PendulumState(0.05, 2.0),
        n_steps=10,
        sample_dt=0.004,
        target_schedule=(TargetEntry(0, 10.0),),
    )
    base.update(kwargs)
    return ScenarioConfig(**base)


def rel_errors(log):
    return [e.L_err_rel for e in log.step_events]


def test_equilibrium():
    log = run_scenario(make_config(initial=PendulumState(0.0, 0.0), target_schedule=()))
    assert all(s.p == 0.0 and s.L == 0.0 for s in log.samples)
    assert all(e.p_cmd == 0.0 and e.p_applied == 0.0 for e in log.step_events)


def test_log_structure():
    config = make_config(n_steps=4, sample_dt=0.01)
    log = run_scenario(config)
    times = [s.time for s in log.samples]
    assert all(b > a for a, b in zip(times, times[1:]))
    assert len(log.samples) == 4 * 40 + 1
    assert [e.step for e in log.step_events] == [0, 1, 2, 3]
    assert times[-1] == pytest.approx(4 * T)


@pytest.mark.parametrize("initial", [
    PendulumState(0.05, 2.0),
    PendulumState(-0.4, 50.0),
    PendulumState(0.3, -40.0, 0.12),
])
@pytest.mark.parametrize("L_des", [0.0, 10.0, -25.0])
def test_deadbeat_from_any_initial_state(initial, L_des):
    log = run_scenario(make_config(initial=initial, target_schedule=(TargetEntry(0, L_des),),
                                   max_step_reach=10.0))
    for e in log.step_events[1:]:
        assert abs(e.pre.L - L_des) <= 1e-9 * max(1.0, abs(L_des))


def test_step_ends_match_one_step_prediction():
    log = run_scenario(make_config(disturbances=(Kick(1.3, 4.0),)))
    for prev, cur in zip(log.step_events, log.step_events[1:]):
        start = PendulumState(prev.pre.p, prev.pre.L, T)
        predicted = predict_L_next_end(start, FootPlacementCommand(prev.p_applied), P)
        if 1.2 < cur.t_abs - T < 1.6:
            continue  # the kicked step
        assert cur.pre.L == pytest.approx(predicted, rel=1e-10)


def test_kick_recovered_in_one_step():
    config = make_config(n_steps=10, disturbances=(Kick(5 * T + 0.2, 0.3 * mH),))
    log = run_scenario(config)
    assert log.summary["steps_off_target"] == [5]
    assert log.step_events[6].L_err_rel <= 1e-9


def test_kick_after_decision_takes_two_steps():
    config = make_config(controller_mode="at_decision", t_decide=0.1,
                         disturbances=(Kick(5 * T + 0.35, 0.3 * mH),))
    log = run_scenario(config)
    assert log.summary["steps_off_target"] == [5, 6]


def test_at_decision_without_disturbance_is_deadbeat():
    log = run_scenario(make_config(controller_mode="at_decision", t_decide=0.1))
    assert log.summary["max_step_L_rel_error"] <= 1e-9
    first = log.samples[0]
    assert math.isnan(first.p_des_current)


def test_kick_applied_at_first_sample_at_or_after_its_time():
    config = make_config(sample_dt=0.01, disturbances=(Kick(0.1234, 1.0),))
    log = run_scenario(config)
    clean = run_scenario(replace(config, disturbances=()))
    jumps = [s.time for s, c in zip(log.samples, clean.samples) if s.L != c.L]
    assert jumps[0] == pytest.approx(0.13)


def test_kick_at_step_boundary_lands_after_impact():
    config = make_config(sample_dt=0.01, disturbances=(Kick(2 * T, 1.0),))
    log = run_scenario(config)
    clean = run_scenario(replace(config, disturbances=()))
    assert log.step_events[1].pre.L == clean.step_events[1].pre.L
    assert log.step_events[2].L_err_rel > 1e-3
    assert log.step_events[3].L_err_rel <= 1e-9


def test_placement_error_shifts_next_step():
    dp = 0.02
    log = run_scenario(make_config(placement_errors=(PlacementError(3, dp),)))
    assert log.step_events[3].p_applied == log.step_events[3].p_cmd + dp
    miss = log.step_events[4].pre.L - 10.0
    assert miss == pytest.approx(P.mHl * math.sinh(P.ell * T) * dp, rel=1e-9)
    assert log.summary["steps_off_target"] == [4]


def test_saturation_clips_and_is_logged():
    log = run_scenario(make_config(target_schedule=(TargetEntry(0, 200.0),), max_step_reach=0.3))
    assert log.summary["saturation_count"] > 0
    assert all(abs(e.p_applied) <= 0.3 for e in log.step_events)
    saturated = [e for e in log.step_events if e.saturated]
    assert all(abs(e.p_cmd) > 0.3 for e in saturated)


def test_velocity_targets_and_schedule_hold():
    config = make_config(n_steps=8, target_schedule=(TargetEntry(0, 0.3, "v"), TargetEntry(4, 0.8, "v")))
    log = run_scenario(config)
    L_des = [e.L_des for e in log.step_events]
    assert L_des == [0.3 * mH] * 4 + [0.8 * mH] * 4
    assert log.summary["max_step_L_rel_error"] <= 1e-9


def test_conservation_at_every_impact():
    config = make_config(random=RandomDisturbances(kick_count=5, kick_std=3.0, placement_std=0.01))
    for e in run_scenario(config).step_events:
        assert e.post.L == e.pre.L


def test_deterministic_with_seed():
    config = make_config(random=RandomDisturbances(kick_count=5, kick_std=3.0, placement_std=0.01), seed=3)
    a, b = run_scenario(config), run_scenario(config)
    assert a.samples == b.samples and a.step_events == b.step_events
    c = run_scenario(replace(config, seed=4))
    assert c.step_events != a.step_events


def test_grid_refinement_without_disturbances():
    coarse = run_scenario(make_config(sample_dt=0.008))
    fine = run_scenario(make_config(sample_dt=0.004))
    for a, b in zip(coarse.step_events, fine.step_events):
        assert b.pre.L == pytest.approx(a.pre.L, rel=1e-12)
        assert b.pre.p == pytest.approx(a.pre.p, rel=1e-12)


def test_comparison_identical_without_noise():
    am, base = run_comparison(make_config())
    assert am.samples == base.samples
    assert am.step_events == base.step_events


def test_comparison_with_velocity_offset():
    am, base = run_comparison(make_config(n_steps=20, baseline_velocity_offset=0.1))
    expected = baseline_L_error(0.1, P)
    for e in base.step_events[1:]:
        assert e.pre.L - e.L_des == pytest.approx(expected, rel=1e-9)
    assert am.summary["max_step_L_rel_error"] <= 1e-9


def test_baseline_velocity_lag_degrades_tracking():
    am, base = run_comparison(make_config(baseline_velocity_lag=5))
    assert am.summary["max_step_L_rel_error"] <= 1e-9
    assert base.summary["max_step_L_rel_error"] > 1e-6


@pytest.mark.parametrize("kwargs, field", [
    (dict(n_steps=0), "n_steps"),
    (dict(sample_dt=0.003), "sample_dt"),
    (dict(sample_dt=-0.1), "sample_dt"),
    (dict(target_schedule=(TargetEntry(2, 1.0), TargetEntry(2, 3.0))), "target"),
    (dict(controller="pid"), "controller.kind"),
    (dict(controller_mode="sometimes"), "controller.mode"),
    (dict(initial=PendulumState(0.0, 0.0, 0.5)), "initial.t"),
    (dict(baseline_velocity_lag=-1), "controller.velocity_lag"),
])
def test_invalid_config(kwargs, field):
    with pytest.raises(ConfigError) as info:
        run_scenario(make_config(**kwargs))
    assert info.value.field == field


def test_non_finite_state_names_step():
    with pytest.raises(InvariantError, match="step 2"):
        run_scenario(make_config(disturbances=(Kick(2 * T + 0.1, 1e308),)))
