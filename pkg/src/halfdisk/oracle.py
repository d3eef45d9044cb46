"""Brute-force integration of the full maximum-principle system.

Classical RK4 on ``(x, y, theta, h1, h2, h3)`` with the control recomputed
from the covector at every stage. The regime (rotation in place vs. forward
arc) is held fixed between switches; a step in which ``h1`` changes sign is
shortened by bisection until it lands on ``h1 = 0`` within ``EVENT_TOL``.
This module shares no formulas with :mod:`halfdisk.expmap` and serves as the
reference it is tested against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import IntegrationError
from .se2 import IDENTITY, Pose
from .vertical import TOL, Covector, _require_normal

__all__ = [
    "OracleState",
    "integrate_pmp",
    "integrate_pmp_arrays",
    "trajectory_distance",
]

EVENT_TOL = 1e-12
DRIFT_TOL = 1e-6
ROTATE, ARC = 0, 1


@dataclass(frozen=True)
class OracleState:
    pose: Pose
    covector: Covector
    t: float


@njit(cache=True)
def _rhs(y, regime):
    h1, h2, h3 = y[3], y[4], y[5]
    if regime == ARC:
        r = math.sqrt(h1 * h1 + h2 * h2)
        u1, u2 = h1 / r, h2 / r
    else:
        u1, u2 = 0.0, 1.0 if h2 > 0 else -1.0
    out = np.empty(6)
    out[0] = u1 * math.cos(y[2])
    out[1] = u1 * math.sin(y[2])
    out[2] = u2
    out[3] = -u2 * h3
    out[4] = u1 * h3
    out[5] = u2 * h1
    return out


@njit(cache=True)
def _step(y, h, regime):
    k1 = _rhs(y, regime)
    k2 = _rhs(y + 0.5 * h * k1, regime)
    k3 = _rhs(y + 0.5 * h * k2, regime)
    k4 = _rhs(y + h * k3, regime)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@njit(cache=True)
def _crossed(y, regime):
    return y[3] < 0.0 if regime == ARC else y[3] > 0.0


@njit(cache=True)
def _run(y0, t0, t_end, dt, regime, ts, ys, start):
    """Step from ``t0`` towards ``t_end``; stop early before a sign change of h1.

    Writes accepted states into ``ts``/``ys`` from index ``start`` and returns
    ``(next_index, t, y, crossed)``. When ``crossed`` is true, ``y`` is the
    last state before the crossing step.
    """
    y = y0.copy()
    t = t0
    i = start
    while t < t_end:
        h = min(dt, t_end - t)
        y_new = _step(y, h, regime)
        if _crossed(y_new, regime):
            return i, t, y, True
        y = y_new
        t = t_end if h < dt else t + h
        ts[i] = t
        ys[i] = y
        i += 1
    return i, t, y, False


@njit(cache=True)
def _locate_event(y, dt, regime, tol):
    lo, hi = 0.0, dt
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _crossed(_step(y, mid, regime), regime):
            hi = mid
        else:
            lo = mid
    return hi, _step(y, hi, regime)


def _regime_after_switch(h2, h3):
    # entering from h1 = 0: rotation when h2*h3 >= 0, arc otherwise
    s2 = 1.0 if h2 > 0 else -1.0
    s3 = s2 if abs(h3) <= TOL else math.copysign(1.0, h3)
    return ROTATE if s2 * s3 > 0 else ARC


def _initial_regime(h1, h2, h3):
    if h1 > TOL:
        return ARC
    if h1 < -TOL:
        return ROTATE
    return _regime_after_switch(h2, h3)


def integrate_pmp_arrays(h0, T, dt=1e-4, q0: Pose = IDENTITY):
    """Integrate for time ``T``; return ``(t, Y)`` with ``Y[:, :] = (x, y, theta, h1, h2, h3)``.

    ``theta`` is left unwrapped. Raises :class:`IntegrationError` if
    ``|H - 1|`` exceeds ``1e-6`` anywhere along the run.
    """
    h0 = h0 if isinstance(h0, Covector) else Covector(*h0)
    _require_normal(h0)
    if not 0.0 < dt <= 1e-3:
        raise ValueError(f"step size must lie in (0, 1e-3], got {dt}")
    if T < 0.0:
        raise ValueError("T must be >= 0")

    n_cap = int(math.ceil(T / dt)) + 64
    ts = np.empty(n_cap)
    ys = np.empty((n_cap, 6))
    y = np.array([q0.x, q0.y, q0.theta, h0.h1, h0.h2, h0.h3], dtype=float)
    ts[0], ys[0] = 0.0, y
    i, t = 1, 0.0
    regime = _initial_regime(h0.h1, h0.h2, h0.h3)
    while t < T:
        if i + 2 >= n_cap:
            ts = np.concatenate([ts, np.empty(n_cap)])
            ys = np.concatenate([ys, np.empty((n_cap, 6))])
            n_cap *= 2
        i, t, y, crossed = _run(y, t, T, dt, regime, ts, ys, i)
        if not crossed:
            break
        h_evt, y = _locate_event(y, min(dt, T - t), regime, EVENT_TOL)
        t = t + h_evt
        y[3] = 0.0
        y[4] = 1.0 if y[4] > 0 else -1.0
        regime = _regime_after_switch(y[4], y[5])
        ts[i], ys[i] = t, y
        i += 1
    ts, ys = ts[:i], ys[:i]
    h1, h2 = ys[:, 3], ys[:, 4]
    H = np.where(h1 <= 0.0, np.abs(h2), np.hypot(h1, h2))
    drift = float(np.max(np.abs(H - 1.0)))
    if drift > DRIFT_TOL:
        raise IntegrationError(f"|H - 1| reached {drift:.3e}; reduce the step size")
    return ts, ys


def integrate_pmp(h0, T, dt=1e-4, q0: Pose = IDENTITY, record_every: int = 1) -> list[OracleState]:
    """Integrate and return every ``record_every``-th state plus the final one."""
    ts, ys = integrate_pmp_arrays(h0, T, dt, q0)
    idx = list(range(0, len(ts), max(1, int(record_every))))
    if idx[-1] != len(ts) - 1:
        idx.append(len(ts) - 1)
    return [
        OracleState(Pose(*ys[j, :3]), Covector(*ys[j, 3:]), float(ts[j]))
        for j in idx
    ]


def _as_samples(traj):
    rows = []
    for s in traj:
        if isinstance(s, OracleState):
            rows.append((s.t, s.pose.x, s.pose.y, s.pose.theta))
        else:
            t, q = s[0], s[1]
            rows.append((float(t), q.x, q.y, q.theta))
    return np.array(rows, dtype=float).reshape(-1, 4)


def trajectory_distance(a, b) -> float:
    """Max over a shared sample grid of planar distance plus wrapped heading gap.

    ``a`` and ``b`` are sequences of :class:`OracleState` or of tuples whose
    first two entries are ``(t, Pose)`` (e.g. from ``sample_trajectory``).
    """
    A, B = _as_samples(a), _as_samples(b)
    if A.shape != B.shape or np.any(np.abs(A[:, 0] - B[:, 0]) > 1e-9):
        raise ValueError("trajectories are not sampled on the same grid")
    if len(A) == 0:
        return 0.0
    dpos = np.hypot(A[:, 1] - B[:, 1], A[:, 2] - B[:, 2])
    dth = np.abs(np.remainder(A[:, 3] - B[:, 3] + np.pi, 2.0 * np.pi) - np.pi)
    return float(np.max(dpos + dth))
