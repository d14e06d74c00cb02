"""Step-to-step map of the controlled LIP and a numerical deadbeat certificate."""

import math
from dataclasses import dataclass, field
from typing import List

import numpy as np

from lipwalk.controller import MomentumTarget, desired_foot_placement
from lipwalk.impact import apply_impact
from lipwalk.lip_core import PendulumParams, PendulumState, flow, transition_matrix

DEADBEAT_TOL = 1e-9
EIGEN_PRODUCT_TOL = 1e-10
CLOSED_LOOP_TOL = 1e-12


@dataclass(frozen=True)
class StepMap:
    """Linear maps between consecutive step starts.

    A: (p, L) at step start -> (p, L) at step end.
    b_placement: sensitivity of the next step-start state to the placement.
    closed_loop_L_eigen: gain of the L-error recursion e_{k+1} = gain * e_k under
        the deadbeat law (analytically zero).
    closed_loop: 2x2 map of the step-start state with the law in the loop and
        a constant target (the target enters as an affine term).
    """

    A: np.ndarray
    b_placement: np.ndarray
    closed_loop_L_eigen: float
    closed_loop: np.ndarray

    def open_loop_eigenvalues(self) -> np.ndarray:
        return np.sort(np.linalg.eigvals(self.A).real)

    def closed_loop_eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.closed_loop)


def build_step_map(params: PendulumParams) -> StepMap:
    T = params.step_duration
    A = transition_matrix(T, params)
    gain, ch = A[1, 0], A[1, 1]
    # impact: next start = (placement, L_end)
    b = np.array([1.0, 0.0])
    # law: u = (L_des - ch * L_hat) / gain, so du/dL_hat = -ch / gain
    du_dLhat = -ch / gain
    # next-end L = gain * u + ch * L_hat
    L_eigen = gain * du_dLhat + ch
    # L_hat at the step start is the second row of A applied to the start state
    closed = np.array([
        [du_dLhat * A[1, 0], du_dLhat * A[1, 1]],
        [A[1, 0], A[1, 1]],
    ])
    return StepMap(A=A, b_placement=b, closed_loop_L_eigen=float(L_eigen), closed_loop=closed)


def deadbeat_error(state: PendulumState, L_des: float, params: PendulumParams) -> float:
    """Relative miss of L at the end of the next step: flow to T, impact, flow over T."""
    T = params.step_duration
    command = desired_foot_placement(state, MomentumTarget(L_des), params)
    end = flow(state, T - state.t, params)
    pre = PendulumState(end.p, end.L, T)
    post = apply_impact(pre, command, params)
    final = flow(post, T, params)
    return abs(final.L - L_des) / max(1.0, abs(L_des))


@dataclass
class DeadbeatReport:
    n_random: int
    seed: int
    max_rel_error: float
    decile_max_rel_error: List[float]
    det_A: float
    open_loop_eigenvalues: List[float]
    eigen_product_error: float
    closed_loop_L_eigen: float
    closed_loop_residue: float
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def as_dict(self) -> dict:
        return {
            "n_random": self.n_random,
            "seed": self.seed,
            "max_rel_error": self.max_rel_error,
            "decile_max_rel_error": self.decile_max_rel_error,
            "det_A": self.det_A,
            "open_loop_eigenvalues": self.open_loop_eigenvalues,
            "eigen_product_error": self.eigen_product_error,
            "closed_loop_L_eigen": self.closed_loop_L_eigen,
            "closed_loop_residue": self.closed_loop_residue,
            "checks": dict(self.checks),
            "passed": self.passed,
        }


def sample_envelope(params: PendulumParams, n: int, seed: int):
    """Random (state, L_des) pairs: |p| <= 0.5 m, |L|, |L_des| <= 2 m H, t in [0, T]."""
    rng = np.random.default_rng(seed)
    mH = params.mass * params.com_height
    p = rng.uniform(-0.5, 0.5, n)
    L = rng.uniform(-2 * mH, 2 * mH, n)
    L_des = rng.uniform(-2 * mH, 2 * mH, n)
    t = rng.uniform(0.0, params.step_duration, n)
    return [(PendulumState(float(p[i]), float(L[i]), float(t[i])), float(L_des[i])) for i in range(n)]


def verify_deadbeat(params: PendulumParams, n_random: int = 1000, seed: int = 0) -> DeadbeatReport:
    if n_random < 1:
        raise ValueError("n_random must be >= 1")
    T = params.step_duration
    samples = sample_envelope(params, n_random, seed)
    errors = np.array([deadbeat_error(s, L_des, params) for s, L_des in samples])
    times = np.array([s.t for s, _ in samples])
    deciles = np.minimum((times / T * 10).astype(int), 9)
    decile_max = [float(errors[deciles == d].max()) if np.any(deciles == d) else 0.0
                  for d in range(10)]

    smap = build_step_map(params)
    eig = smap.open_loop_eigenvalues()
    det_A = float(np.linalg.det(smap.A))
    product_error = abs(float(eig[0] * eig[1]) - 1.0)
    ch = math.cosh(params.ell * T)
    residue = abs(smap.closed_loop_L_eigen) / ch
    expected = np.array([math.exp(-params.ell * T), math.exp(params.ell * T)])

    report = DeadbeatReport(
        n_random=n_random,
        seed=seed,
        max_rel_error=float(errors.max()),
        decile_max_rel_error=decile_max,
        det_A=det_A,
        open_loop_eigenvalues=[float(e) for e in eig],
        eigen_product_error=product_error,
        closed_loop_L_eigen=smap.closed_loop_L_eigen,
        closed_loop_residue=residue,
    )
    report.checks = {
        "deadbeat": report.max_rel_error <= DEADBEAT_TOL,
        "det_A": abs(det_A - 1.0) <= EIGEN_PRODUCT_TOL,
        "eigen_product": product_error <= EIGEN_PRODUCT_TOL,
        "open_loop_spectrum": bool(np.allclose(eig, expected, rtol=1e-10, atol=0.0)),
        "closed_loop_L_eigen": residue <= CLOSED_LOOP_TOL,
    }
    return report
