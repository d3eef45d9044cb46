"""Boundary-value solving: feasible plans, shooting and optimal trajectories.

The inverse of the exponential map is found by multi-start shooting. Seeds
cover the unrolled ``H = 1`` surface (coordinates ``psi, h3``) times a grid of
horizons ``T`` bounded by the time of the three-phase feasible plan; the best
seeds are polished by a damped Gauss-Newton (Levenberg-Marquardt) iteration
with finite-difference Jacobians, all seeds advancing together as arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _batch
from .errors import NoConvergence
from .expmap import ExtremalSegment, Trajectory, end_state, evaluate, exp_map
from .se2 import IDENTITY, Pose, normalize_angle, relative_target
from .vertical import Branch, Covector

__all__ = [
    "FeasiblePlan",
    "CylinderPoint",
    "ShootingSolution",
    "SolverConfig",
    "SrezkaResult",
    "feasible_plan",
    "plan_trajectory",
    "pose_error",
    "shooting_residual",
    "solve_bvp",
    "has_optimal_structure",
    "optimal_trajectory",
    "srezka_improve",
]


@dataclass(frozen=True)
class FeasiblePlan:
    """Turn by ``alpha``, drive ``l`` forward, turn by ``beta``."""

    alpha: float
    l: float
    beta: float
    T: float

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "l": self.l, "beta": self.beta, "T": self.T}


@dataclass(frozen=True)
class CylinderPoint:
    """Coordinates on the unrolled level surface ``H = 1``.

    ``|psi| <= pi/2`` is the half-cylinder ``(h1, h2) = (cos psi, sin psi)``;
    beyond it the two half-planes ``h2 = +-1`` continue with ``h1 < 0``.
    """

    psi: float
    h3: float

    def covector(self) -> Covector:
        h1, h2, h3 = _batch.decode_cylinder(self.psi, self.h3)
        return Covector(float(h1), float(h2), float(h3))

    @classmethod
    def from_covector(cls, h: Covector) -> "CylinderPoint":
        if h.h1 > 0.0:
            return cls(math.atan2(h.h2, h.h1), h.h3)
        if h.h2 > 0:
            return cls(math.pi / 2 - h.h1, h.h3)
        return cls(h.h1 - math.pi / 2, h.h3)


@dataclass(frozen=True)
class ShootingSolution:
    start: CylinderPoint
    T: float
    residual: float
    trajectory: Trajectory

    def as_dict(self) -> dict:
        return {"psi": self.start.psi, "h3": self.start.h3, "T": self.T, "residual": self.residual}


@dataclass
class SolverConfig:
    """Knobs of :func:`solve_bvp`.

    ``h3_max`` bounds the seed box in ``h3``; the optimal covector is not
    known to lie inside any particular box, so this is a heuristic.
    """

    grid: tuple[int, int, int] = (32, 32, 32)
    tol: float = 1e-6
    h3_max: float = 10.0
    psi_margin: float = 0.3
    n_refine: int = 256
    max_iter: int = 60
    fd_step: float = 1e-7
    dedup_radius: float = 1e-4
    angle_weight: float = 1.0
    extra_seeds: list = field(default_factory=list)


#: solutions whose times differ by less than this count as tied
TIE_WINDOW = 1e-7


# ---------------------------------------------------------------------------
# feasible plan


def feasible_plan(q0: Pose, q1: Pose) -> FeasiblePlan:
    """Rotate towards the goal point, drive straight, rotate to the goal heading."""
    g = relative_target(q0, q1)
    l = math.hypot(g.x, g.y)
    alpha = normalize_angle(math.atan2(g.y, g.x)) if l > 0.0 else 0.0
    beta = normalize_angle(g.theta - alpha)
    return FeasiblePlan(alpha, l, beta, abs(alpha) + l + abs(beta))


def plan_trajectory(plan: FeasiblePlan, q0: Pose = IDENTITY) -> Trajectory:
    """The feasible plan as rotation / line / rotation segments leaving ``q0``."""
    segments = []
    t, q = 0.0, q0
    pieces = [
        (Branch.StableEquilibrium, Covector(0.0, math.copysign(1.0, plan.alpha), 0.0), abs(plan.alpha)),
        (Branch.Line, Covector(1.0, 0.0, 0.0), plan.l),
        (Branch.StableEquilibrium, Covector(0.0, math.copysign(1.0, plan.beta), 0.0), abs(plan.beta)),
    ]
    for kind, h, d in pieces:
        if d <= 0.0:
            continue
        seg = ExtremalSegment(kind, q, h, d, t)
        segments.append(seg)
        q, _ = seg.state(d)
        t += d
    return Trajectory(tuple(segments), t, q0)


# ---------------------------------------------------------------------------
# shooting


def pose_error(a: Pose, b: Pose, angle_weight: float = 1.0) -> float:
    return math.hypot(a.x - b.x, a.y - b.y) + angle_weight * abs(normalize_angle(a.theta - b.theta))


def shooting_residual(p: CylinderPoint, T: float, target: Pose, angle_weight: float = 1.0):
    """``(residual, endpoint)`` of the extremal from ``p`` after time ``T``."""
    traj = exp_map(p.covector(), T)
    q, _ = end_state(traj)
    return pose_error(q, target, angle_weight), q


def _residuals(Z, target, w):
    h1, h2, h3 = _batch.decode_cylinder(Z[:, 0], Z[:, 1])
    x, y, th, nseg = _batch.endpoints(h1, h2, h3, Z[:, 2])
    R = np.empty((len(Z), 3))
    R[:, 0] = x - target.x
    R[:, 1] = y - target.y
    R[:, 2] = w * _wrap(th - target.theta)
    return R, nseg


def _wrap(a):
    return np.remainder(a + np.pi, 2 * np.pi) - np.pi


def _scalar(R):
    return np.hypot(R[:, 0], R[:, 1]) + np.abs(R[:, 2])


def _refine(Z, target, cfg: SolverConfig):
    """Levenberg-Marquardt on the 3-vector residual, vectorised over seeds."""
    Z = Z.copy()
    w = cfg.angle_weight
    R, _ = _residuals(Z, target, w)
    cost = np.einsum("ij,ij->i", R, R)
    lam = np.full(len(Z), 1e-3)
    live = np.ones(len(Z), dtype=bool)
    eye = np.eye(3)
    for _ in range(cfg.max_iter):
        live &= (_scalar(R) > 1e-3 * cfg.tol) & (lam < 1e12)
        idx = np.flatnonzero(live)
        if idx.size == 0:
            break
        Zi, Ri = Z[idx], R[idx]
        J = np.empty((idx.size, 3, 3))
        for j in range(3):
            h = cfg.fd_step * max(1.0, float(np.max(np.abs(Zi[:, j]))))
            Zp = Zi.copy()
            Zp[:, j] += h
            Rp, _ = _residuals(Zp, target, w)
            dR = Rp - Ri
            dR[:, 2] = w * _wrap(dR[:, 2] / w) if w else dR[:, 2]
            J[:, :, j] = dR / h
        JT = np.transpose(J, (0, 2, 1))
        A = JT @ J
        g = np.einsum("nij,nj->ni", JT, Ri)
        diag = np.einsum("nii->ni", A)
        M = A + lam[idx, None, None] * (diag[:, :, None] * eye + eye)
        try:
            step = -np.linalg.solve(M, g[:, :, None])[:, :, 0]
        except np.linalg.LinAlgError:
            step = -np.stack([np.linalg.lstsq(m, v, rcond=None)[0] for m, v in zip(M, g)])
        Zt = Zi + step
        Zt[:, 2] = np.maximum(Zt[:, 2], 0.0)
        Rt, _ = _residuals(Zt, target, w)
        ct = np.einsum("ij,ij->i", Rt, Rt)
        ok = ct < cost[idx]
        acc = idx[ok]
        Z[acc], R[acc], cost[acc] = Zt[ok], Rt[ok], ct[ok]
        lam[acc] = np.maximum(lam[acc] / 3.0, 1e-12)
        lam[idx[~ok]] *= 4.0
    return Z, _scalar(R)


def _seed_grid(T_ub: float, target: Pose, cfg: SolverConfig):
    n_psi, n_h3, n_T = cfg.grid
    d = cfg.psi_margin
    psi = np.linspace(-math.pi - d, math.pi + d, n_psi)
    h3 = np.linspace(-cfg.h3_max, cfg.h3_max, n_h3)
    Ts = T_ub * np.arange(1, n_T + 1) / n_T
    P, H, TT = np.meshgrid(psi, h3, Ts, indexing="ij")
    Z = np.stack([P.ravel(), H.ravel(), TT.ravel()], axis=1)
    # turning in place and driving straight are exact extremals
    special_seeds = [
        (math.copysign(math.pi / 2, target.theta), 0.0, abs(target.theta)),
        (0.0, 0.0, math.hypot(target.x, target.y)),
    ]
    Z = np.vstack([np.array(special_seeds), Z])
    if cfg.extra_seeds:
        Z = np.vstack([Z, np.asarray(cfg.extra_seeds, dtype=float).reshape(-1, 3)])
    return Z


def solve_bvp(
    target: Pose,
    grid: tuple[int, int, int] = (32, 32, 32),
    tol: float = 1e-6,
    config: Optional[SolverConfig] = None,
) -> list[ShootingSolution]:
    """Extremals from the identity that end at ``target``, sorted by ascending time.

    Raises :class:`NoConvergence` if no seed reaches ``tol``.
    """
    cfg = config or SolverConfig()
    cfg.grid, cfg.tol = tuple(int(g) for g in grid), float(tol)
    if min(cfg.grid) < 8 or tol <= 0.0:
        raise ValueError("grid counts must be >= 8 and tol > 0")
    target = target if isinstance(target, Pose) else Pose(*target)
    plan = feasible_plan(IDENTITY, target)
    if pose_error(IDENTITY, target, cfg.angle_weight) <= tol:
        start = CylinderPoint(0.0, 0.0)
        return [ShootingSolution(start, 0.0, 0.0, exp_map(start.covector(), 0.0))]

    Z = _seed_grid(plan.T, target, cfg)
    R, _ = _residuals(Z, target, cfg.angle_weight)
    f = _scalar(R)
    order = np.lexsort((Z[:, 2], f))[: cfg.n_refine]
    Zr, fr = _refine(Z[order], target, cfg)

    best = float(np.min(fr)) if fr.size else math.inf
    cand = np.flatnonzero((fr <= tol) & (Zr[:, 2] <= plan.T * (1 + 1e-9) + 1e-9))
    # each cluster is represented by its most accurate member
    cand = cand[np.lexsort((Zr[cand, 2], fr[cand]))]
    solutions: list[ShootingSolution] = []
    kept: list[np.ndarray] = []
    for i in cand:
        z = Zr[i]
        if any(np.linalg.norm(z - k) < cfg.dedup_radius for k in kept):
            continue
        p = CylinderPoint(float(z[0]), float(z[1]))
        traj = exp_map(p.covector(), float(z[2]))
        q, _ = end_state(traj)
        res = pose_error(q, target, cfg.angle_weight)
        if res > tol:
            continue
        kept.append(z)
        solutions.append(ShootingSolution(p, float(z[2]), res, traj))
    solutions = _tie_break(solutions)
    if not solutions:
        raise NoConvergence(
            f"no extremal reached {target.as_tuple()} within tol {tol:g}",
            best_residual=best,
            fallback=plan,
        )
    return solutions


def _tie_break(solutions, window=TIE_WINDOW):
    """Order by ``T``; runs of times within ``window`` go by ``|h3|`` then ``psi``."""
    solutions = sorted(solutions, key=lambda s: s.T)
    out, i = [], 0
    while i < len(solutions):
        j = i
        while j + 1 < len(solutions) and solutions[j + 1].T - solutions[i].T <= window:
            j += 1
        out.extend(sorted(solutions[i : j + 1], key=lambda s: (abs(s.start.h3), s.start.psi, s.T)))
        i = j + 1
    return out


# ---------------------------------------------------------------------------
# optimality filters


def _is_rotation(seg: ExtremalSegment) -> bool:
    return seg.kind in (Branch.Rotation, Branch.StableEquilibrium)


def has_optimal_structure(traj: Trajectory, n_check: int = 16) -> bool:
    """Rotations only at the ends and ``u1 > 0`` strictly inside the middle."""
    segs = [s for s in traj.segments if s.duration > 0.0]
    for i, seg in enumerate(segs):
        if _is_rotation(seg) and 0 < i < len(segs) - 1:
            return False
        if not _is_rotation(seg):
            for f in np.linspace(0.0, 1.0, n_check + 2)[1:-1]:
                _, h = seg.state(f * seg.duration)
                if h.h1 <= 0.0:
                    return False
    return True


def optimal_trajectory(q0: Pose, q1: Pose, tol: float = 1e-6, config: Optional[SolverConfig] = None) -> Trajectory:
    """Fastest extremal found from ``q0`` to ``q1`` that passes the structure filter.

    Optimality is only certified relative to the extremals the solver found.
    Raises :class:`NoConvergence` carrying the feasible plan on failure.
    """
    g = relative_target(q0, q1)
    if pose_error(IDENTITY, g) <= tol:
        return Trajectory((), 0.0, q0)
    cfg = config or SolverConfig()
    sols = solve_bvp(g, cfg.grid, tol, cfg)
    for sol in sols:
        traj = exp_map(sol.start.covector(), sol.T, q0)
        if has_optimal_structure(traj):
            return traj
    raise NoConvergence(
        "every extremal found contains an interior turn in place",
        best_residual=sols[0].residual,
        fallback=feasible_plan(q0, q1),
    )


# ---------------------------------------------------------------------------
# cutting corners at interior turns


@dataclass(frozen=True)
class SrezkaResult:
    """Shortcut around the interior turn between times ``t_a`` and ``t_c``.

    ``T`` is the time the trajectory spends between the two points; ``T0`` the
    time of turning by ``theta0``, driving ``l`` and turning by ``theta1``.
    """

    t_a: float
    t_c: float
    T: float
    T0: float
    theta0: float
    l: float
    theta1: float


def _shortcut(qa: Pose, qc: Pose) -> tuple[float, float, float]:
    l = math.hypot(qc.x - qa.x, qc.y - qa.y)
    if l <= 1e-12:
        return normalize_angle(qc.theta - qa.theta), 0.0, 0.0
    heading = math.atan2(qc.y - qa.y, qc.x - qa.x)
    return normalize_angle(heading - qa.theta), l, normalize_angle(qc.theta - heading)


def srezka_improve(traj: Trajectory, fractions=(0.5, 0.25, 0.1, 0.05, 0.02, 0.01)) -> Optional[SrezkaResult]:
    """Shortcut an interior turn in place; ``None`` when the trajectory has none.

    An interior turn is a rotation segment of duration ``pi`` with motion
    segments on both sides. Points ``A`` and ``C`` are taken on the
    neighbouring segments at several distances from the turn and the fastest
    rotate-drive-rotate replacement is returned.
    """
    segs = [s for s in traj.segments if s.duration > 0.0]
    for i in range(1, len(segs) - 1):
        seg = segs[i]
        if not (_is_rotation(seg) and abs(seg.duration - math.pi) < 1e-6):
            continue
        before, after = segs[i - 1], segs[i + 1]
        if _is_rotation(before) or _is_rotation(after):
            continue
        best = None
        for fa in fractions:
            for fc in fractions:
                t_a = seg.t_start - fa * before.duration
                t_c = seg.t_end + fc * after.duration
                qa, _ = evaluate(traj, t_a)
                qc, _ = evaluate(traj, t_c)
                th0, l, th1 = _shortcut(qa, qc)
                T0 = abs(th0) + l + abs(th1)
                cand = SrezkaResult(t_a, t_c, t_c - t_a, T0, th0, l, th1)
                if best is None or cand.T0 - cand.T < best.T0 - best.T:
                    best = cand
        return best
    return None
