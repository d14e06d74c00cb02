"""Angular-momentum foot placement for linear-inverted-pendulum walking."""

from lipwalk.analysis import StepMap, build_step_map, deadbeat_error, verify_deadbeat
from lipwalk.controller import (
    MomentumTarget,
    baseline_velocity_placement,
    desired_foot_placement,
    predict_L_next_end,
    velocity_to_momentum,
)
from lipwalk.estimator import predict_L_end_of_step
from lipwalk.impact import FootPlacementCommand, apply_impact, clip_placement
from lipwalk.lip_core import PendulumParams, PendulumState, derivative, flow, integrate_rk4
from lipwalk.simulator import ScenarioConfig, TrajectoryLog, run_comparison, run_scenario

__all__ = [
    "FootPlacementCommand", "MomentumTarget", "PendulumParams", "PendulumState",
    "ScenarioConfig", "StepMap", "TrajectoryLog", "apply_impact",
    "baseline_velocity_placement", "build_step_map", "clip_placement", "deadbeat_error",
    "derivative", "desired_foot_placement", "flow", "integrate_rk4", "predict_L_end_of_step",
    "predict_L_next_end", "run_comparison", "run_scenario", "velocity_to_momentum",
    "verify_deadbeat",
]
