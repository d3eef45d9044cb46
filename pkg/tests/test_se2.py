import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from halfdisk.se2 import IDENTITY, Pose, compose, inverse, normalize_angle, relative_target

coord = st.floats(-50, 50, allow_nan=False)
angle = st.floats(-20, 20, allow_nan=False)
poses = st.builds(Pose, coord, coord, angle)


def close(a: Pose, b: Pose, tol=1e-9):
    return (
        abs(a.x - b.x) <= tol
        and abs(a.y - b.y) <= tol
        and abs(normalize_angle(a.theta - b.theta)) <= tol
    )


@pytest.mark.parametrize(
    "a, expected",
    [(0.0, 0.0), (3 * math.pi, math.pi), (-math.pi, math.pi), (math.pi, math.pi), (2 * math.pi, 0.0)],
)
def test_normalize_angle_examples(a, expected):
    assert normalize_angle(a) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("bad", [math.inf, -math.inf, math.nan])
def test_normalize_angle_rejects_non_finite(bad):
    with pytest.raises(ValueError):
        normalize_angle(bad)


@given(st.floats(-1e6, 1e6, allow_nan=False))
def test_normalize_angle_range_and_congruence(a):
    r = normalize_angle(a)
    assert -math.pi < r <= math.pi
    k = (a - r) / (2 * math.pi)
    assert abs(k - round(k)) < 1e-9 * max(1.0, abs(a))


def test_compose_examples():
    q = Pose(0.3, -2.0, 1.1)
    assert close(compose(IDENTITY, q), q)
    assert close(compose(Pose(1, 0, math.pi / 2), Pose(1, 0, 0)), Pose(1, 1, math.pi / 2))
    assert close(compose(q, inverse(q)), IDENTITY)


def test_inverse_examples():
    assert close(inverse(IDENTITY), IDENTITY)
    assert close(inverse(Pose(1, 0, 0)), Pose(-1, 0, 0))
    assert close(inverse(Pose(0, 0, math.pi / 2)), Pose(0, 0, -math.pi / 2))


def test_relative_target_examples():
    assert close(relative_target(IDENTITY, Pose(1, 2, 0.3)), Pose(1, 2, 0.3))
    assert close(relative_target(Pose(5, -1, 1), Pose(5, -1, 1)), IDENTITY)
    assert close(relative_target(Pose(1, 0, math.pi / 2), Pose(1, 1, math.pi / 2)), Pose(1, 0, 0))


def test_pose_normalizes_heading():
    assert Pose(0, 0, -math.pi).theta == math.pi
    assert Pose(0, 0, 7.0).theta == pytest.approx(7.0 - 2 * math.pi)


@given(poses, poses, poses)
def test_compose_is_associative(a, b, c):
    assert close(compose(compose(a, b), c), compose(a, compose(b, c)), 1e-8)


@given(poses)
def test_inverse_is_two_sided(a):
    assert close(compose(a, inverse(a)), IDENTITY, 1e-9)
    assert close(compose(inverse(a), a), IDENTITY, 1e-9)


@given(poses, poses)
def test_relative_target_recovers_goal(q0, q1):
    assert close(compose(q0, relative_target(q0, q1)), q1, 1e-8)
