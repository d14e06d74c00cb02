import math

import pytest
from hypothesis import given, strategies as st

from lipwalk.errors import InvalidArgumentError, NotAtStepEndError
from lipwalk.impact import FootPlacementCommand, apply_impact, clip_placement
from lipwalk.lip_core import PendulumParams, PendulumState

P = PendulumParams(mass=32.0, com_height=0.9, step_duration=0.4)


def test_relabel_and_conserve():
    post = apply_impact(PendulumState(0.1, 5.0, 0.4), FootPlacementCommand(-0.08), P)
    assert post == PendulumState(-0.08, 5.0, 0.0)


def test_stepping_in_place():
    pre = PendulumState(0.137, 12.3, 0.4)
    assert apply_impact(pre, FootPlacementCommand(pre.p), P).p == pre.p


@given(st.floats(-1, 1), st.floats(-1e3, 1e3), st.floats(-2, 2))
def test_L_bit_identical(p, L, placement):
    post = apply_impact(PendulumState(p, L, 0.4), FootPlacementCommand(placement), P)
    assert math.copysign(1.0, post.L) == math.copysign(1.0, L)
    assert post.L == L
    assert post.p == placement
    assert post.t == 0.0


def test_tolerates_float_step_end():
    apply_impact(PendulumState(0.0, 1.0, 0.4 + 5e-13), FootPlacementCommand(0.0), P)


@pytest.mark.parametrize("t", [0.0, 0.39, 0.4001])
def test_rejects_mid_step(t):
    with pytest.raises(NotAtStepEndError):
        apply_impact(PendulumState(0.0, 1.0, t), FootPlacementCommand(0.0), P)


def test_command_must_be_finite():
    with pytest.raises(InvalidArgumentError):
        FootPlacementCommand(math.nan)


def test_clip_placement():
    cmd, saturated = clip_placement(FootPlacementCommand(-0.3), 1.0)
    assert cmd.p_sw_to_com == -0.3 and not saturated
    cmd, saturated = clip_placement(FootPlacementCommand(-1.7), 1.0)
    assert cmd.p_sw_to_com == -1.0 and saturated
    cmd, saturated = clip_placement(FootPlacementCommand(2.0), 0.5)
    assert cmd.p_sw_to_com == 0.5 and saturated
