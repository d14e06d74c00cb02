"""Step exchange: the swing foot becomes the new stance contact.

On flat ground at constant CoM height the angular momentum about the new
contact equals the angular momentum about the old one, and the CoM position
relative to the new stance foot is the commanded swing-foot placement. The
swing foot is assumed to land exactly where commanded.
"""

import math
from dataclasses import dataclass

from lipwalk.errors import InvalidArgumentError, NotAtStepEndError
from lipwalk.lip_core import PendulumParams, PendulumState, _require_finite

STEP_END_TOL = 1e-12
DEFAULT_MAX_STEP_REACH = 1.0


@dataclass(frozen=True)
class FootPlacementCommand:
    """CoM minus swing-foot position at the end of the step.

    A foot placed ahead of the CoM gives a negative value.
    """

    p_sw_to_com: float

    def __post_init__(self):
        if not math.isfinite(self.p_sw_to_com):
            raise InvalidArgumentError(f"non-finite foot placement {self.p_sw_to_com!r}")


def clip_placement(command: FootPlacementCommand, max_step_reach: float = DEFAULT_MAX_STEP_REACH):
    """Saturate a command to the reachable range. Returns (command, saturated)."""
    p = command.p_sw_to_com
    if abs(p) <= max_step_reach:
        return command, False
    return FootPlacementCommand(math.copysign(max_step_reach, p)), True


def apply_impact(pre: PendulumState, placement: FootPlacementCommand,
                 params: PendulumParams) -> PendulumState:
    _require_finite(pre)
    if abs(pre.t - params.step_duration) > STEP_END_TOL:
        raise NotAtStepEndError(
            f"impact at t={pre.t!r}, expected step end T={params.step_duration!r}"
        )
    return PendulumState(p=placement.p_sw_to_com, L=pre.L, t=0.0)
