"""Linear inverted pendulum in (position, angular momentum) coordinates.

The state is ``p``, the CoM x-position minus the stance-contact x-position,
and ``L``, the angular momentum of the point mass about the stance contact.
With constant CoM height H the dynamics are linear::

    dp/dt = L / (m H)
    dL/dt = m g p

and the flow over ``dt`` is the matrix exponential::

    M(dt) = [[cosh(l dt),          sinh(l dt) / (m H l)],
             [m H l sinh(l dt),    cosh(l dt)          ]]

with ``l = sqrt(g / H)``. Only the second row of M is needed by the
foot-placement law; the first row is the unique completion that makes M the
exponential of the generator above (it reproduces the usual LIP solution
x(t) = x0 cosh(l t) + xd0 sinh(l t) / l with L = m H xd).

All relative positions use the convention "CoM minus foot", positive forward.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from lipwalk.errors import InvalidArgumentError, InvariantError

# l^2 H = g after rounding: sqrt, square and product each add up to ~1 ulp.
ELL_CONSISTENCY_ULPS = 4


@dataclass(frozen=True)
class PendulumParams:
    """Physical constants of the LIP.

    ``ell`` is normally derived as sqrt(g / H). It may be given explicitly (e.g.
    copied from an older scenario file); in that case it must still satisfy
    ell**2 * H == g to within a few ulp, otherwise InvariantError is raised.
    """

    mass: float
    com_height: float
    step_duration: float
    gravity: float = 9.81
    ell: Optional[float] = None

    def __post_init__(self):
        for name in ("mass", "com_height", "step_duration", "gravity"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidArgumentError(f"{name} must be finite and > 0, got {value!r}")
        derived = math.sqrt(self.gravity / self.com_height)
        if self.ell is None:
            object.__setattr__(self, "ell", derived)
        else:
            check_ell_consistency(self.ell, self.com_height, self.gravity)

    @property
    def mHl(self) -> float:
        """The recurring gain m * H * ell."""
        return self.mass * self.com_height * self.ell


def check_ell_consistency(ell: float, com_height: float, gravity: float) -> None:
    if not math.isfinite(ell) or ell <= 0:
        raise InvariantError(f"ell must be finite and > 0, got {ell!r}")
    residual = abs(ell * ell * com_height - gravity)
    if residual > ELL_CONSISTENCY_ULPS * math.ulp(gravity):
        raise InvariantError(
            f"ell^2 * H = {ell * ell * com_height!r} does not match g = {gravity!r} "
            f"(ell={ell!r}, H={com_height!r})"
        )


@dataclass(frozen=True)
class PendulumState:
    p: float
    L: float
    t: float = 0.0

    def is_finite(self) -> bool:
        return math.isfinite(self.p) and math.isfinite(self.L) and math.isfinite(self.t)


def _require_finite(state: PendulumState) -> None:
    if not state.is_finite():
        raise InvalidArgumentError(f"non-finite state {state!r}")


def transition_matrix(dt: float, params: PendulumParams) -> np.ndarray:
    """M(dt) as a 2x2 array."""
    ch = math.cosh(params.ell * dt)
    sh = math.sinh(params.ell * dt)
    k = params.mHl
    return np.array([[ch, sh / k], [k * sh, ch]])


def flow(state: PendulumState, dt: float, params: PendulumParams) -> PendulumState:
    """Advance ``state`` by ``dt`` seconds along the closed-form LIP solution."""
    _require_finite(state)
    if not math.isfinite(dt) or dt < 0:
        raise InvalidArgumentError(f"dt must be finite and >= 0, got {dt!r}")
    if dt == 0:
        return state
    ch = math.cosh(params.ell * dt)
    sh = math.sinh(params.ell * dt)
    k = params.mHl
    return PendulumState(
        p=ch * state.p + sh / k * state.L,
        L=k * sh * state.p + ch * state.L,
        t=state.t + dt,
    )


def derivative(state: PendulumState, params: PendulumParams):
    """Time derivative (dp/dt, dL/dt) of the LIP state."""
    _require_finite(state)
    return _rhs(state.p, state.L, params)


def _rhs(p, L, params):
    # Works elementwise on floats or numpy arrays.
    return L / (params.mass * params.com_height), params.mass * params.gravity * p


def energy(state: PendulumState, params: PendulumParams) -> float:
    """L^2 - (m H l p)^2, conserved by the flow."""
    return state.L ** 2 - (params.mHl * state.p) ** 2


def rk4_arrays(p, L, dt: float, substep: float, params: PendulumParams):
    """Classical RK4 on arrays of (p, L); used as an independent oracle for ``flow``.

    The last substep is shortened so that the integration ends exactly at ``dt``.
    """
    if not math.isfinite(dt) or dt < 0:
        raise InvalidArgumentError(f"dt must be finite and >= 0, got {dt!r}")
    p = np.array(p, dtype=float)
    L = np.array(L, dtype=float)
    if dt == 0:
        return p, L
    if not math.isfinite(substep) or substep <= 0 or substep > dt * (1 + 1e-12):
        raise InvalidArgumentError(f"substep must satisfy 0 < substep <= dt, got {substep!r}")
    n_full = int(dt // substep)
    remainder = dt - n_full * substep
    steps = [substep] * n_full
    if remainder > 1e-12 * substep:
        steps.append(remainder)
    for h in steps:
        k1p, k1L = _rhs(p, L, params)
        k2p, k2L = _rhs(p + 0.5 * h * k1p, L + 0.5 * h * k1L, params)
        k3p, k3L = _rhs(p + 0.5 * h * k2p, L + 0.5 * h * k2L, params)
        k4p, k4L = _rhs(p + h * k3p, L + h * k3L, params)
        p = p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        L = L + h / 6.0 * (k1L + 2.0 * k2L + 2.0 * k3L + k4L)
    return p, L


def integrate_rk4(state: PendulumState, dt: float, substep: float,
                  params: PendulumParams) -> PendulumState:
    """Integrate ``derivative`` with fixed-step RK4. Verification use only."""
    _require_finite(state)
    if dt == 0:
        return state
    p, L = rk4_arrays(state.p, state.L, dt, substep, params)
    return PendulumState(float(p), float(L), state.t + dt)
