"""Running estimate of the angular momentum at the end of the current step."""

import math

from lipwalk.errors import OutOfWindowError
from lipwalk.lip_core import PendulumParams, PendulumState, _require_finite

# Slack on the step window for times produced by float grid arithmetic.
WINDOW_TOL = 1e-12


def time_to_go(state: PendulumState, params: PendulumParams) -> float:
    T = params.step_duration
    if state.t < -WINDOW_TOL or state.t > T + WINDOW_TOL:
        raise OutOfWindowError(f"t={state.t!r} outside step window [0, {T!r}]")
    return max(T - state.t, 0.0)


def predict_L_end_of_step(state: PendulumState, params: PendulumParams) -> float:
    """Predicted L just before the upcoming impact, given the state at time t.

    mHl sinh(l (T - t)) p + cosh(l (T - t)) L. Along an undisturbed trajectory
    this is constant, so it can be evaluated at any point of the step.
    """
    _require_finite(state)
    tau = time_to_go(state, params)
    return (params.mHl * math.sinh(params.ell * tau) * state.p
            + math.cosh(params.ell * tau) * state.L)
