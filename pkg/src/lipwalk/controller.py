"""Angular-momentum foot-placement law and a velocity-based baseline.

The placement chosen at the end of step k is what sets L at the end of step
k+1::

    L(T_{k+1}^-) = mHl sinh(l T) p_sw(T_k^-) + cosh(l T) L(T_k^-)

Solving this for p_sw with L(T_k^-) known only at the impact would need a
future value. Replacing it with the running estimate from
``predict_L_end_of_step`` gives a placement that can be computed at any time
during the step and is constant along undisturbed motion.
"""

import math
from dataclasses import dataclass

from lipwalk.errors import InvalidArgumentError
from lipwalk.estimator import predict_L_end_of_step, time_to_go
from lipwalk.impact import FootPlacementCommand
from lipwalk.lip_core import PendulumParams, PendulumState


@dataclass(frozen=True)
class MomentumTarget:
    """Desired angular momentum at the end of the next step."""

    L_des: float

    def __post_init__(self):
        if not math.isfinite(self.L_des):
            raise InvalidArgumentError(f"non-finite momentum target {self.L_des!r}")


def _step_gains(params: PendulumParams):
    lT = params.ell * params.step_duration
    return params.mHl * math.sinh(lT), math.cosh(lT)


def desired_foot_placement(state: PendulumState, target: MomentumTarget,
                           params: PendulumParams) -> FootPlacementCommand:
    """Placement for the end of this step that puts L(T_{k+1}^-) at ``target``."""
    gain, ch = _step_gains(params)
    L_hat = predict_L_end_of_step(state, params)
    return FootPlacementCommand((target.L_des - ch * L_hat) / gain)


def predict_L_next_end(state: PendulumState, placement: FootPlacementCommand,
                       params: PendulumParams) -> float:
    """L at the end of the next step if ``placement`` is used at the coming impact."""
    gain, ch = _step_gains(params)
    return gain * placement.p_sw_to_com + ch * predict_L_end_of_step(state, params)


def velocity_to_momentum(v_des: float, params: PendulumParams) -> MomentumTarget:
    if not math.isfinite(v_des):
        raise InvalidArgumentError(f"non-finite velocity {v_des!r}")
    return MomentumTarget(params.mass * params.com_height * v_des)


def velocity_feedback_placement(state: PendulumState, target: MomentumTarget,
                                params: PendulumParams, measured_L: float) -> FootPlacementCommand:
    """Deadbeat placement computed from a velocity measurement instead of L.

    ``measured_L`` is m H times the measured CoM velocity. With a perfect
    measurement it equals ``state.L`` and the result is identical to
    ``desired_foot_placement``.
    """
    return desired_foot_placement(PendulumState(state.p, measured_L, state.t), target, params)


def baseline_velocity_placement(state: PendulumState, v_des: float, params: PendulumParams,
                                velocity_offset: float = 0.0) -> FootPlacementCommand:
    """Baseline controller reading the CoM velocity with an additive error ``velocity_offset``."""
    measured_L = state.L + params.mass * params.com_height * velocity_offset
    return velocity_feedback_placement(state, velocity_to_momentum(v_des, params), params, measured_L)


def baseline_placement_offset(velocity_offset: float, t: float, params: PendulumParams) -> float:
    """Closed-form difference baseline minus AM placement at step time ``t``.

    -cosh(l T) cosh(l (T - t)) m H dv / (m H l sinh(l T))
    """
    gain, ch = _step_gains(params)
    tau = time_to_go(PendulumState(0.0, 0.0, t), params)
    mH = params.mass * params.com_height
    return -ch * math.cosh(params.ell * tau) * mH * velocity_offset / gain


def baseline_L_error(velocity_offset: float, params: PendulumParams, t_command: float = None) -> float:
    """Resulting error L(T_{k+1}^-) - L_des when the baseline command from ``t_command``
    (default: the step end) is applied."""
    if t_command is None:
        t_command = params.step_duration
    gain, _ = _step_gains(params)
    return gain * baseline_placement_offset(velocity_offset, t_command, params)
