"""Hybrid step-to-step simulation of the LIP under foot-placement control.

Each step runs three phases: continuous flow up to t = T, the impact, then
the flow of the next step. Within a step the state is sampled on a fixed
grid; the controller may be re-evaluated at every sample (``continuous``) or
once at a decision time (``at_decision``).

Disturbances are impulsive additions to L applied at the first grid sample
whose absolute time is >= the disturbance time. A sample that coincides with
a step boundary belongs to the new step, so a kick there lands after the
impact.
"""

import math
from dataclasses import dataclass, field, replace
from typing import List, Tuple

import numpy as np

from lipwalk.controller import (
    MomentumTarget,
    desired_foot_placement,
    velocity_feedback_placement,
    velocity_to_momentum,
)
from lipwalk.errors import ConfigError, InvalidArgumentError, InvariantError
from lipwalk.estimator import predict_L_end_of_step
from lipwalk.impact import DEFAULT_MAX_STEP_REACH, FootPlacementCommand, apply_impact, clip_placement
from lipwalk.lip_core import PendulumParams, PendulumState, flow

CONTROLLERS = ("am", "baseline")
MODES = ("continuous", "at_decision")
GRID_TOL = 1e-9
TIME_TOL = 1e-12
# Steps with a relative end-of-step error above this count as off target.
ON_TARGET_TOL = 1e-9


@dataclass(frozen=True)
class TargetEntry:
    """From ``step`` on, the desired L at the end of each step is ``value``.

    ``kind`` is "L" (kg m^2/s) or "v" (m/s, converted with L = m H v).
    """

    step: int
    value: float
    kind: str = "L"


@dataclass(frozen=True)
class Kick:
    time: float
    dL: float


@dataclass(frozen=True)
class PlacementError:
    step: int
    dp: float


@dataclass(frozen=True)
class RandomDisturbances:
    kick_count: int = 0
    kick_std: float = 0.0
    placement_std: float = 0.0


@dataclass(frozen=True)
class ScenarioConfig:
    params: PendulumParams
    initial: PendulumState
    n_steps: int
    sample_dt: float
    target_schedule: Tuple[TargetEntry, ...] = ()
    disturbances: Tuple[Kick, ...] = ()
    placement_errors: Tuple[PlacementError, ...] = ()
    random: RandomDisturbances = RandomDisturbances()
    controller: str = "am"
    controller_mode: str = "continuous"
    t_decide: float = 0.0
    baseline_velocity_offset: float = 0.0
    baseline_velocity_lag: int = 0
    max_step_reach: float = DEFAULT_MAX_STEP_REACH
    seed: int = 0

    def validate(self):
        T = self.params.step_duration
        if not isinstance(self.n_steps, int) or self.n_steps < 1:
            raise ConfigError(f"must be an integer >= 1, got {self.n_steps!r}", "n_steps")
        if not (math.isfinite(self.sample_dt) and 0 < self.sample_dt <= T):
            raise ConfigError(f"must satisfy 0 < sample_dt <= T, got {self.sample_dt!r}", "sample_dt")
        n = round(T / self.sample_dt)
        if abs(n * self.sample_dt - T) > GRID_TOL:
            raise ConfigError(f"{self.sample_dt!r} does not divide step_duration {T!r}", "sample_dt")
        if not self.initial.is_finite():
            raise ConfigError("initial state must be finite", "initial")
        if not (0 <= self.initial.t < T):
            raise ConfigError(f"initial.t must lie in [0, T), got {self.initial.t!r}", "initial.t")
        steps = [e.step for e in self.target_schedule]
        if any(b <= a for a, b in zip(steps, steps[1:])):
            raise ConfigError("step indices must be strictly increasing", "target")
        for i, e in enumerate(self.target_schedule):
            if e.kind not in ("L", "v") or not math.isfinite(e.value) or e.step < 0:
                raise ConfigError(f"invalid entry {e!r}", f"target[{i}]")
        for i, kick in enumerate(self.disturbances):
            if not (math.isfinite(kick.time) and math.isfinite(kick.dL)):
                raise ConfigError(f"non-finite kick {kick!r}", f"kick[{i}]")
        for i, err in enumerate(self.placement_errors):
            if not math.isfinite(err.dp) or err.step < 0:
                raise ConfigError(f"invalid placement error {err!r}", f"placement_error[{i}]")
        r = self.random
        if r.kick_count < 0 or r.kick_std < 0 or r.placement_std < 0:
            raise ConfigError("counts and standard deviations must be >= 0", "random")
        if self.controller not in CONTROLLERS:
            raise ConfigError(f"must be one of {CONTROLLERS}, got {self.controller!r}", "controller.kind")
        if self.controller_mode not in MODES:
            raise ConfigError(f"must be one of {MODES}, got {self.controller_mode!r}", "controller.mode")
        if not (0 <= self.t_decide <= T):
            raise ConfigError(f"must lie in [0, T], got {self.t_decide!r}", "controller.t_decide")
        if not math.isfinite(self.baseline_velocity_offset):
            raise ConfigError("must be finite", "controller.velocity_offset")
        if not isinstance(self.baseline_velocity_lag, int) or self.baseline_velocity_lag < 0:
            raise ConfigError("must be an integer >= 0", "controller.velocity_lag")
        if not (self.max_step_reach > 0):
            raise ConfigError("must be > 0", "max_step_reach")
        return self

    def target_for_step(self, k: int) -> MomentumTarget:
        """Desired L at the end of step ``k``; the schedule is held, 0 before its first entry."""
        entry = None
        for e in self.target_schedule:
            if e.step <= k:
                entry = e
        if entry is None:
            return MomentumTarget(0.0)
        if entry.kind == "v":
            return velocity_to_momentum(entry.value, self.params)
        return MomentumTarget(entry.value)


@dataclass(frozen=True)
class Sample:
    time: float
    step: int
    p: float
    L: float
    L_hat_end: float
    p_des_current: float


@dataclass(frozen=True)
class StepEvent:
    step: int
    t_abs: float
    pre: PendulumState
    p_cmd: float
    p_applied: float
    saturated: bool
    post: PendulumState
    L_des: float

    @property
    def L_err_rel(self) -> float:
        return abs(self.pre.L - self.L_des) / max(1.0, abs(self.L_des))


@dataclass
class TrajectoryLog:
    samples: List[Sample] = field(default_factory=list)
    step_events: List[StepEvent] = field(default_factory=list)
    summary: dict = field(default_factory=dict)


def _draw_random(config: ScenarioConfig):
    rng = np.random.default_rng(config.seed)
    r = config.random
    horizon = config.n_steps * config.params.step_duration
    kicks = []
    if r.kick_count:
        times = rng.uniform(0.0, horizon, size=r.kick_count)
        dLs = rng.normal(0.0, r.kick_std, size=r.kick_count)
        kicks = [Kick(float(t), float(d)) for t, d in zip(times, dLs)]
    placement_noise = np.zeros(config.n_steps)
    if r.placement_std:
        placement_noise = rng.normal(0.0, r.placement_std, size=config.n_steps)
    return kicks, placement_noise


def _step_grid(T: float, sample_dt: float) -> List[float]:
    n = round(T / sample_dt)
    return [i * sample_dt for i in range(n)] + [T]


def run_scenario(config: ScenarioConfig) -> TrajectoryLog:
    config.validate()
    log = TrajectoryLog()
    run = _Run(config, log)
    state = config.initial
    for k in range(config.n_steps):
        try:
            state = run.step(k, state)
        except InvalidArgumentError as exc:
            raise InvariantError(f"step {k}: {exc}") from exc
    log.summary = summarize(log)
    return log


class _Run:
    """Mutable bookkeeping for one scenario execution."""

    def __init__(self, config: ScenarioConfig, log: TrajectoryLog):
        self.config = config
        self.params = config.params
        self.log = log
        random_kicks, self.placement_noise = _draw_random(config)
        # stable sort keeps file order for simultaneous kicks
        self.kicks = sorted(list(config.disturbances) + random_kicks, key=lambda k: k.time)
        self.next_kick = 0
        self.dp_by_step = {}
        for err in config.placement_errors:
            self.dp_by_step[err.step] = self.dp_by_step.get(err.step, 0.0) + err.dp
        self.grid = _step_grid(self.params.step_duration, config.sample_dt)
        self.L_history = []

    def command(self, s: PendulumState, target: MomentumTarget) -> float:
        config = self.config
        if config.controller == "am":
            return desired_foot_placement(s, target, self.params).p_sw_to_com
        history = self.L_history
        lagged = history[max(0, len(history) - 1 - config.baseline_velocity_lag)]
        offset = config.baseline_velocity_offset
        measured = lagged
        if offset != 0:
            measured = lagged + self.params.mass * self.params.com_height * offset
        return velocity_feedback_placement(s, target, self.params, measured).p_sw_to_com

    def collect_kicks(self, t_abs: float) -> float:
        dL = 0.0
        while self.next_kick < len(self.kicks) and self.kicks[self.next_kick].time <= t_abs + TIME_TOL:
            dL += self.kicks[self.next_kick].dL
            self.next_kick += 1
        return dL

    def step(self, k: int, state: PendulumState) -> PendulumState:
        config, params = self.config, self.params
        T = params.step_duration
        last_step = k == config.n_steps - 1
        target_next = config.target_for_step(k + 1)
        t0 = k * T

        times = self.grid
        if k == 0:
            times = [state.t] + [t for t in self.grid if t > state.t + TIME_TOL]
        anchor = state
        command = None
        for t in times:
            if t > anchor.t:
                moved = flow(anchor, t - anchor.t, params)
                state = PendulumState(moved.p, moved.L, t)
            else:
                state = PendulumState(anchor.p, anchor.L, t)
            if not state.is_finite():
                raise InvariantError(f"non-finite state in step {k} at t={t!r}: {state!r}")
            # the step-end sample of an inner step is logged as the next step's start
            logged = t != T or last_step

            if logged:
                dL = self.collect_kicks(t0 + t)
                if dL:
                    state = PendulumState(state.p, state.L + dL, t)
                    anchor = state

            self.L_history.append(state.L)
            if config.controller_mode == "continuous":
                command = self.command(state, target_next)
            elif command is None and (t >= T - config.t_decide - TIME_TOL or t == T):
                command = self.command(state, target_next)

            if logged:
                self.log.samples.append(Sample(
                    time=t0 + t, step=k, p=state.p, L=state.L,
                    L_hat_end=predict_L_end_of_step(state, params),
                    p_des_current=math.nan if command is None else command,
                ))

        pre = state
        raw = command + self.dp_by_step.get(k, 0.0) + float(self.placement_noise[k])
        applied, saturated = clip_placement(FootPlacementCommand(raw), config.max_step_reach)
        post = apply_impact(pre, applied, params)
        if post.L != pre.L:
            raise InvariantError(f"impact changed L in step {k}: {pre.L!r} -> {post.L!r}")
        self.log.step_events.append(StepEvent(
            step=k, t_abs=t0 + T, pre=pre, p_cmd=command, p_applied=applied.p_sw_to_com,
            saturated=saturated, post=post, L_des=config.target_for_step(k).L_des,
        ))
        return post


def summarize(log: TrajectoryLog) -> dict:
    errors = [e.L_err_rel for e in log.step_events]
    # the first step's end is fixed by the initial condition, not by the controller
    controlled = errors[1:]
    return {
        "n_steps": len(log.step_events),
        "per_step_L_rel_error": errors,
        "max_step_L_rel_error": max(controlled) if controlled else None,
        "steps_off_target": [e.step for e in log.step_events[1:] if e.L_err_rel > ON_TARGET_TOL],
        "saturation_count": sum(e.saturated for e in log.step_events),
    }


def run_comparison(config: ScenarioConfig) -> Tuple[TrajectoryLog, TrajectoryLog]:
    """Run the same scenario with the AM controller and with the velocity baseline."""
    return (run_scenario(replace(config, controller="am")),
            run_scenario(replace(config, controller="baseline")))
