"""Extremal trajectories from an initial covector.

:func:`exp_map` chains closed-form segments: rotations in place while
``h1 <= 0`` and sub-Riemannian arcs while ``h1 > 0``, switching whenever
``h1`` returns to zero. At every switch the covector is snapped back onto
``h1 = 0, |h2| = 1`` so that long trajectories do not drift off ``H = 1``.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import elliptic
from .se2 import IDENTITY, Pose
from .vertical import (
    SEPARATRIX_TOL,
    Branch,
    Control,
    Covector,
    EllipticArcParams,
    _require_normal,
    arc_argument,
    arc_vertical,
    branch_of,
    elliptic_arc_params,
    elliptic_switch_time,
    extremal_control,
    project_to_level,
    rotation_switch_time,
)

__all__ = [
    "ExtremalSegment",
    "Trajectory",
    "exp_map",
    "evaluate",
    "sample_trajectory",
    "arclength",
    "end_state",
    "max_segments_for",
]


@dataclass(frozen=True)
class ExtremalSegment:
    kind: Branch
    start_pose: Pose
    start_covector: Covector
    duration: float
    t_start: float = 0.0
    params: Optional[EllipticArcParams] = None

    @property
    def t_end(self) -> float:
        return self.t_start + self.duration

    def state(self, tau: float) -> tuple[Pose, Covector]:
        """Pose and covector ``tau`` time units after the segment starts."""
        return _segment_state(self, tau)


@dataclass(frozen=True)
class Trajectory:
    segments: tuple[ExtremalSegment, ...]
    total_time: float
    origin: Pose = field(default=IDENTITY)

    @property
    def kinds(self) -> list[Branch]:
        return [s.kind for s in self.segments]

    def __len__(self):
        return len(self.segments)


def max_segments_for(T: float) -> int:
    # interior rotations last exactly pi, so each arc/rotation pair costs >= pi
    return 10 + 2 * math.ceil(T / math.pi)


# ---------------------------------------------------------------------------
# closed forms


def _lncosh(u: float) -> float:
    a = abs(u)
    return a + math.log1p(math.exp(-2.0 * a)) - math.log(2.0)


def _log_dn_minus_kcn(dn: float, cn: float, k: float, kprime2: float) -> float:
    # dn - k cn == (1 - k^2) / (dn + k cn); the quotient avoids cancellation
    if cn > 0.0:
        return math.log(kprime2) - math.log(dn + k * cn)
    return math.log(dn - k * cn)


def arc_horizontal(p: EllipticArcParams, u: float) -> tuple[float, float, float]:
    """``(x, y, theta)`` in the arc's rotated frame at reduced argument ``u``.

    The frame is centred at the arc's start point and turned by ``beta0``.
    """
    s, sigma = p.s, p.sigma
    if p.regime == "separatrix":
        x = -sigma * (1.0 / math.cosh(u) - 1.0 / math.cosh(p.u0))
        y = -s * ((u - p.u0) - (math.tanh(u) - math.tanh(p.u0)))
        th = -s * math.atan(math.sinh(abs(u)))
        return x, y, th
    k = p.modulus
    sn, cn, dn, _ = elliptic.jacobi(u, k)
    _, cn0, dn0, _ = elliptic.jacobi(p.u0, k)
    eps = elliptic.epsilon(u, k) - elliptic.epsilon(p.u0, k)
    if p.regime == "above":
        x = -k * (cn - cn0)
        y = -s * ((u - p.u0) - eps)
        th = -s * math.atan2(k * sn, dn)
    else:
        x = -sigma / k * (dn - dn0)
        y = -s / k * ((u - p.u0) - eps)
        th = -s * sigma * math.atan2(max(sn, 0.0), cn)
    return x, y, th


def arc_length(p: EllipticArcParams, u: float) -> float:
    """Planar length travelled from the arc start to reduced argument ``u``."""
    if p.regime == "separatrix":
        return p.sigma * (_lncosh(u) - _lncosh(p.u0))
    k = p.modulus
    _, cn, dn, _ = elliptic.jacobi(u, k)
    _, cn0, dn0, _ = elliptic.jacobi(p.u0, k)
    kp2 = (p.E - 1.0) / p.E if p.regime == "above" else 1.0 - p.E
    val = _log_dn_minus_kcn(dn, cn, k, kp2) - _log_dn_minus_kcn(dn0, cn0, k, kp2)
    return val if p.regime == "above" else p.sigma * val


def _arc_pose(p: EllipticArcParams, u: float) -> Pose:
    xt, yt, tht = arc_horizontal(p, u)
    c, s = math.cos(p.beta0), math.sin(p.beta0)
    return Pose(p.frame.x + c * xt - s * yt, p.frame.y + s * xt + c * yt, tht + p.beta0)


def _segment_state(seg: ExtremalSegment, tau: float) -> tuple[Pose, Covector]:
    q, h = seg.start_pose, seg.start_covector
    if seg.kind in (Branch.Rotation, Branch.StableEquilibrium):
        s2 = 1.0 if h.h2 > 0 else -1.0
        c, s = math.cos(tau), math.sin(tau)
        cov = Covector(h.h1 * c - s2 * h.h3 * s, s2, h.h3 * c + s2 * h.h1 * s)
        return Pose(q.x, q.y, q.theta + s2 * tau), cov
    if seg.kind is Branch.Line:
        return Pose(q.x + tau * math.cos(q.theta), q.y + tau * math.sin(q.theta), q.theta), h
    p = seg.params
    u = arc_argument(p, p.t_start + tau)
    return _arc_pose(p, u), Covector(*arc_vertical(p, u))


# ---------------------------------------------------------------------------
# assembly


def _snap_switch(h: Covector) -> Covector:
    return project_to_level(Covector(0.0, h.h2, h.h3))


def exp_map(
    h0: Covector,
    T: float,
    q0: Pose = IDENTITY,
    separatrix_tol: float = SEPARATRIX_TOL,
    max_segments: Optional[int] = None,
) -> Trajectory:
    """Extremal trajectory of duration ``T`` leaving ``q0`` with covector ``h0``.

    Raises :class:`ContractViolation` if ``H(h0) != 1`` and ``ValueError`` if
    ``T < 0``.
    """
    h0 = h0 if isinstance(h0, Covector) else Covector(*h0)
    _require_normal(h0)
    T = float(T)
    if not T >= 0.0 or not math.isfinite(T):
        raise ValueError(f"total time must be finite and >= 0, got {T!r}")
    limit = max_segments if max_segments is not None else max_segments_for(T)

    segments: list[ExtremalSegment] = []
    t, q, h = 0.0, q0, h0
    while True:
        kind = branch_of(h, separatrix_tol=separatrix_tol)
        params = None
        if kind in (Branch.Rotation, Branch.StableEquilibrium):
            t_switch = rotation_switch_time(h)
        elif kind is Branch.Line:
            t_switch = math.inf
        else:
            params = elliptic_arc_params(h, t, q, separatrix_tol=separatrix_tol)
            t_switch = elliptic_switch_time(params)
        remaining = T - t
        seg = ExtremalSegment(kind, q, h, min(t_switch, remaining), t, params)
        segments.append(seg)
        if t_switch >= remaining:
            break
        if len(segments) >= limit:
            raise RuntimeError(f"more than {limit} segments for T = {T}; switching logic failed")
        q, h = seg.state(t_switch)
        h = _snap_switch(h)
        t += t_switch
    return Trajectory(tuple(segments), T, q0)


def _locate(traj: Trajectory, t: float) -> ExtremalSegment:
    starts = [s.t_start for s in traj.segments]
    i = bisect.bisect_right(starts, t) - 1
    return traj.segments[max(i, 0)]


def evaluate(traj: Trajectory, t: float) -> tuple[Pose, Covector]:
    """State at time ``t``; at a switch instant the post-switch covector is used."""
    if not -1e-12 <= t <= traj.total_time + 1e-12:
        raise ValueError(f"t = {t} outside [0, {traj.total_time}]")
    if not traj.segments:
        raise ValueError("empty trajectory has no covector")
    seg = _locate(traj, t)
    return seg.state(min(max(t - seg.t_start, 0.0), seg.duration))


def end_state(traj: Trajectory) -> tuple[Pose, Covector]:
    if not traj.segments:
        return traj.origin, None
    seg = traj.segments[-1]
    return seg.state(seg.duration)


def sample_trajectory(traj: Trajectory, n: int) -> list[tuple[float, Pose, Covector, Control]]:
    """``n`` evenly spaced samples ``(t, pose, covector, control)`` over ``[0, T]``."""
    if n < 2:
        raise ValueError("need at least two samples")
    out = []
    for t in np.linspace(0.0, traj.total_time, n):
        q, h = evaluate(traj, float(t))
        out.append((float(t), q, h, extremal_control(h)))
    return out


def arclength(traj: Trajectory, t: float) -> float:
    """Length of the planar projection travelled during ``[0, t]``."""
    if not -1e-12 <= t <= traj.total_time + 1e-12:
        raise ValueError(f"t = {t} outside [0, {traj.total_time}]")
    total = 0.0
    for seg in traj.segments:
        if seg.t_start >= t:
            break
        tau = min(t - seg.t_start, seg.duration)
        if seg.kind is Branch.Line:
            total += tau
        elif seg.kind in (Branch.Elliptic, Branch.Tractrix):
            p = seg.params
            total += arc_length(p, arc_argument(p, p.t_start + tau))
    return total
