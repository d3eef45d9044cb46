"""Poses on SE(2) and the group operations used by the planner.

A pose ``(x, y, theta)`` is read as the rigid motion "rotate by theta, then
translate by (x, y)". Headings are always stored in ``(-pi, pi]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "Pose",
    "IDENTITY",
    "normalize_angle",
    "compose",
    "inverse",
    "relative_target",
]


def normalize_angle(a: float) -> float:
    """Map an angle onto ``(-pi, pi]``.

    >>> normalize_angle(3 * math.pi) == math.pi
    True
    >>> normalize_angle(-math.pi) == math.pi
    True
    """
    a = float(a)
    if not math.isfinite(a):
        raise ValueError(f"angle must be finite, got {a!r}")
    r = math.remainder(a, 2.0 * math.pi)  # in [-pi, pi]
    if r <= -math.pi:
        r += 2.0 * math.pi
    return r


@dataclass(frozen=True)
class Pose:
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    @classmethod
    def from_iterable(cls, values) -> "Pose":
        x, y, theta = (float(v) for v in values)
        return cls(x, y, theta)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.theta)

    def __iter__(self):
        return iter(self.as_tuple())

    def __matmul__(self, other: "Pose") -> "Pose":
        return compose(self, other)


IDENTITY = Pose(0.0, 0.0, 0.0)


def compose(a: Pose, b: Pose) -> Pose:
    """Group product ``a * b``: express ``b`` in the frame of ``a``."""
    c, s = math.cos(a.theta), math.sin(a.theta)
    return Pose(
        a.x + c * b.x - s * b.y,
        a.y + s * b.x + c * b.y,
        a.theta + b.theta,
    )


def inverse(a: Pose) -> Pose:
    c, s = math.cos(a.theta), math.sin(a.theta)
    return Pose(-c * a.x - s * a.y, s * a.x - c * a.y, -a.theta)


def relative_target(q0: Pose, q1: Pose) -> Pose:
    """Target pose seen from ``q0``.

    Planning from the identity to the returned pose is equivalent to
    planning ``q0 -> q1``; left-multiplying planned poses by ``q0`` maps
    them back to world coordinates.
    """
    return compose(inverse(q0), q1)
