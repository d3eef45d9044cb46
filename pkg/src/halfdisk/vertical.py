"""Vertical (covector) part of the maximum-principle system.

The covector is written through the left-invariant Hamiltonians
``(h1, h2, h3)``. Normal extremals live on the level set ``H = 1`` where

* ``h1 <= 0``: ``u = (0, sign h2)`` and the covector turns on a circle in the
  ``(h1, h3)`` plane at unit speed (rotation in place);
* ``h1 > 0``: ``u = (h1, h2)`` and ``h2`` obeys a pendulum equation solved by
  Jacobi functions (sub-Riemannian arc).

``E = h1**2 + h3**2`` is conserved on both sides.

Arc parameterisation on ``h1 > 0`` (``s`` and ``sigma`` are signs)::

    E > 1, k = 1/sqrt(E):   u' = 1/k
        h1 = sn(u, k)   h2 = -s cn(u, k)   h3 = (s/k) dn(u, k)
    E < 1, m = sqrt(E):     u' = sigma
        h1 = m sn(u, m) h2 = -s dn(u, m)   h3 = s sigma m cn(u, m)
    E = 1 (separatrix):     u' = 1,  sigma = sign(u)
        h1 = tanh|u|    h2 = -s sigma sech u   h3 = s sech u

In each case ``h1`` vanishes on a lattice in ``u`` and the next lattice point
in the direction of motion is the switching instant.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from . import elliptic
from .errors import ContractViolation
from .se2 import IDENTITY, Pose, normalize_angle

__all__ = [
    "TOL",
    "H_TOL",
    "SEPARATRIX_TOL",
    "Covector",
    "Control",
    "Branch",
    "EllipticArcParams",
    "hamiltonian_H",
    "casimir_E",
    "extremal_control",
    "branch_of",
    "signs",
    "rotation_vertical_flow",
    "rotation_switch_time",
    "elliptic_arc_params",
    "elliptic_vertical_flow",
    "elliptic_switch_time",
    "project_to_level",
]

#: magnitude below which a covector component counts as zero
TOL = 1e-10
#: admissible deviation of H from 1 for normal covectors
H_TOL = 1e-9
#: |E - 1| at or below which an h1 > 0 arc is evaluated by the k = 1 limit
SEPARATRIX_TOL = 1e-12


@dataclass(frozen=True)
class Covector:
    h1: float
    h2: float
    h3: float

    def __post_init__(self):
        for name in ("h1", "h2", "h3"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)

    @classmethod
    def normal(cls, h1, h2, h3) -> "Covector":
        """Build a covector and check that it lies on ``H = 1``."""
        h = cls(h1, h2, h3)
        _require_normal(h)
        return h

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.h1, self.h2, self.h3)

    def __iter__(self):
        return iter(self.as_tuple())


@dataclass(frozen=True)
class Control:
    u1: float
    u2: float

    def __post_init__(self):
        if self.u1 < 0.0 or self.u1 * self.u1 + self.u2 * self.u2 > 1.0 + 1e-12:
            raise ValueError(f"control ({self.u1}, {self.u2}) outside the half-disk")


class Branch(enum.Enum):
    Rotation = "rotation"
    Elliptic = "elliptic"
    StableEquilibrium = "equilibrium"
    Line = "line"
    Tractrix = "tractrix"


@dataclass(frozen=True)
class EllipticArcParams:
    """Constants of one ``h1 > 0`` arc.

    ``E, M, k, s, alpha, xi0, beta0`` follow the usual pendulum notation
    (``k = 1/sqrt(E)``, possibly above 1 when ``E < 1``). Evaluation uses
    ``modulus`` (always in ``(0, 1]``), the reduced argument ``u0`` and the
    direction ``sigma`` described in the module docstring.
    """

    E: float
    M: float
    k: float
    s: int
    alpha: float
    xi0: float
    beta0: float
    t_start: float
    frame: Pose
    regime: str  # "above" (E > 1), "below" (E < 1) or "separatrix"
    modulus: float
    sigma: int
    u0: float
    h30: float
    quarter: float = field(default=math.inf)  # K(modulus); inf on the separatrix


def _sign(v: float) -> int:
    return 1 if v > 0 else -1


def hamiltonian_H(h: Covector) -> float:
    if h.h1 <= 0.0:
        return abs(h.h2)
    return math.hypot(h.h1, h.h2)


def casimir_E(h: Covector) -> float:
    return h.h1 * h.h1 + h.h3 * h.h3


def _require_normal(h: Covector, tol: float = H_TOL) -> None:
    H = hamiltonian_H(h)
    if abs(H - 1.0) > tol:
        raise ContractViolation(f"covector {h.as_tuple()} has H = {H!r}, expected 1")


def project_to_level(h: Covector) -> Covector:
    """Scale a covector with ``H > 0`` onto ``H = 1``.

    On ``h1 <= 0`` this snaps ``h2`` to ``+-1``; on ``h1 > 0`` it rescales
    ``(h1, h2)`` radially. ``h3`` is unchanged.
    """
    if h.h1 <= 0.0:
        if h.h2 == 0.0:
            raise ContractViolation("cannot project a covector with h1 <= 0 and h2 = 0")
        return Covector(h.h1, math.copysign(1.0, h.h2), h.h3)
    r = math.hypot(h.h1, h.h2)
    return Covector(h.h1 / r, h.h2 / r, h.h3)


def extremal_control(h: Covector) -> Control:
    """Maximiser of ``u1*h1 + u2*h2`` over the half-disk, at ``H = 1``."""
    _require_normal(h)
    if h.h1 > 0.0:
        r = math.hypot(h.h1, h.h2)
        return Control(h.h1 / r, h.h2 / r)
    return Control(0.0, math.copysign(1.0, h.h2))


def signs(h: Covector, tol: float = TOL) -> tuple[int, int]:
    """``(s2, s3)``; a vanishing ``h3`` inherits the sign of ``h2``."""
    s2 = _sign(h.h2) if h.h2 != 0.0 else 1
    s3 = s2 if abs(h.h3) <= tol else _sign(h.h3)
    return s2, s3


def branch_of(h: Covector, tol: float = TOL, separatrix_tol: float = SEPARATRIX_TOL) -> Branch:
    """Which closed-form regime governs the motion starting at ``h``."""
    E = casimir_E(h)
    if h.h1 < -tol:
        return Branch.Rotation
    if h.h1 <= tol:
        if abs(h.h3) <= tol:
            return Branch.StableEquilibrium
        s2, s3 = signs(h, tol)
        if s2 * s3 > 0:
            return Branch.Rotation
    elif abs(h.h1 - 1.0) <= tol and abs(h.h3) <= tol:
        return Branch.Line
    if abs(E - 1.0) <= separatrix_tol:
        return Branch.Tractrix
    return Branch.Elliptic


# ---------------------------------------------------------------------------
# rotation in place (h1 <= 0)


def _require_rotation(h0: Covector) -> int:
    _require_normal(h0)
    b = branch_of(h0)
    if b not in (Branch.Rotation, Branch.StableEquilibrium):
        raise ContractViolation(f"covector {h0.as_tuple()} is on branch {b.name}, not Rotation")
    return _sign(h0.h2)


def rotation_switch_time(h0: Covector) -> float:
    """Time until ``h1`` returns to zero; ``inf`` at the stable equilibrium.

    The result lies in ``(0, pi]`` and equals ``pi`` exactly when the arc
    starts on ``h1 = 0``.
    """
    s2 = _require_rotation(h0)
    if branch_of(h0) is Branch.StableEquilibrium:
        return math.inf
    if abs(h0.h1) <= TOL:
        return math.pi
    # arg(-s2 h30 - i h10), which lies in (0, pi) because h10 < 0
    return math.atan2(-h0.h1, -s2 * h0.h3)


def rotation_vertical_flow(h0: Covector, dt: float) -> Covector:
    s2 = _require_rotation(h0)
    if dt < 0.0 or dt > rotation_switch_time(h0) + 1e-9:
        raise ContractViolation(f"dt = {dt} outside the rotation arc")
    c, s = math.cos(dt), math.sin(dt)
    return Covector(
        h0.h1 * c - s2 * h0.h3 * s,
        float(s2),
        h0.h3 * c + s2 * h0.h1 * s,
    )


# ---------------------------------------------------------------------------
# sub-Riemannian arc (h1 > 0)


def elliptic_arc_params(
    h0: Covector,
    t_start: float = 0.0,
    frame: Pose = IDENTITY,
    separatrix_tol: float = SEPARATRIX_TOL,
) -> EllipticArcParams:
    """Constants of the ``h1 > 0`` arc leaving ``h0`` at ``t_start`` from pose ``frame``.

    Separatrix covectors (``|E - 1| <= separatrix_tol``) get the hyperbolic
    parameterisation; the Line equilibrium is not an arc and is rejected.
    """
    _require_normal(h0)
    b = branch_of(h0, separatrix_tol=separatrix_tol)
    if b not in (Branch.Elliptic, Branch.Tractrix):
        raise ContractViolation(f"covector {h0.as_tuple()} is on branch {b.name}, not an h1 > 0 arc")
    h10 = max(h0.h1, 0.0)
    h20, h30 = h0.h2, h0.h3
    s2, s3 = signs(h0)
    E = casimir_E(h0)
    k = 1.0 / math.sqrt(E)

    if b is Branch.Tractrix:
        s = s3
        # h1 grows towards 1 when h2*h3 < 0, otherwise decays to the switch
        sigma = 1 if s2 * s3 < 0 else -1
        u0 = sigma * math.atanh(min(h10, 1.0 - 1e-16))
        alpha = math.atan2(-s3 * h10, -s3 * h20)
        theta_rel = -s * math.atan(math.sinh(abs(u0)))
        return EllipticArcParams(
            E=E, M=E - 2.0, k=1.0, s=s, alpha=alpha, xi0=u0,
            beta0=normalize_angle(frame.theta - theta_rel), t_start=float(t_start),
            frame=frame, regime="separatrix", modulus=1.0, sigma=sigma, u0=u0, h30=h30,
        )

    if E > 1.0:
        s = s3
        alpha = normalize_angle(math.atan2(-s3 * h10, -s3 * h20))
        phi0 = math.atan2(h10, -s3 * h20)  # am(u0) in [0, pi]
        kk = k
        u0 = elliptic.incomplete_F(phi0, kk)
        _, cn0, dn0, _ = elliptic.jacobi(u0, kk)
        theta_rel = -s * math.atan2(kk * h10, dn0)
        return EllipticArcParams(
            E=E, M=E - 2.0, k=k, s=s, alpha=alpha, xi0=u0,
            beta0=normalize_angle(frame.theta - theta_rel), t_start=float(t_start),
            frame=frame, regime="above", modulus=kk, sigma=1, u0=u0, h30=h30,
            quarter=elliptic.complete_K(kk),
        )

    s = -s2
    sigma = -s2 * s3
    m = math.sqrt(E)
    alpha = normalize_angle(math.atan2(h10, h20) + (1 - s2) * math.pi / 2)
    phi0 = math.atan2(h10, abs(h30))  # am(u0) in [0, pi/2]
    u0 = elliptic.incomplete_F(phi0, m)
    theta_rel = -s * sigma * phi0
    return EllipticArcParams(
        E=E, M=E - 2.0, k=k, s=s, alpha=alpha, xi0=u0 / k,
        beta0=normalize_angle(frame.theta - theta_rel), t_start=float(t_start),
        frame=frame, regime="below", modulus=m, sigma=sigma, u0=u0, h30=h30,
        quarter=elliptic.complete_K(m),
    )


def arc_argument(p: EllipticArcParams, t: float) -> float:
    """Reduced argument ``u(t)`` of the arc."""
    tau = t - p.t_start
    if p.regime == "above":
        return p.u0 + tau / p.k
    if p.regime == "below":
        return p.u0 + p.sigma * tau
    return p.u0 + tau


def arc_vertical(p: EllipticArcParams, u: float) -> tuple[float, float, float]:
    """Covector components at reduced argument ``u``."""
    if p.regime == "separatrix":
        sech = 1.0 / math.cosh(u)
        t0 = 1.0 / math.cosh(p.u0)
        return (math.tanh(abs(u)), -p.s * p.sigma * sech, p.h30 + p.s * (sech - t0))
    sn, cn, dn, _ = elliptic.jacobi(u, p.modulus)
    _, cn0, dn0, _ = elliptic.jacobi(p.u0, p.modulus)
    if p.regime == "above":
        return (sn, -p.s * cn, p.h30 + p.s / p.k * (dn - dn0))
    m = p.modulus
    return (m * sn, -p.s * dn, p.h30 + p.s * p.sigma * m * (cn - cn0))


def elliptic_vertical_flow(p: EllipticArcParams, t: float) -> Covector:
    return Covector(*arc_vertical(p, arc_argument(p, t)))


def _switch_argument(p: EllipticArcParams) -> float:
    """Lattice point in ``u`` where the arc ends (``inf`` if it never does)."""
    if p.regime == "separatrix":
        return 0.0 if p.sigma < 0 else math.inf
    period = 2.0 * p.quarter
    if p.regime == "below" and p.sigma < 0:
        return period * math.ceil(p.u0 / period - 1.0)
    return period * (math.floor(p.u0 / period) + 1.0)


def elliptic_switch_time(p: EllipticArcParams) -> float:
    """Duration of the arc until ``h1`` next vanishes (``inf`` if never)."""
    u_end = _switch_argument(p)
    if math.isinf(u_end):
        return math.inf
    if p.regime == "above":
        dt = p.k * (u_end - p.u0)
    else:
        dt = abs(u_end - p.u0)
    # one Newton pass on h1(t) = 0, rejected if it moves the root noticeably
    t_end = p.t_start + dt
    h1, h2, h3 = arc_vertical(p, arc_argument(p, t_end))
    slope = -h2 * h3
    if slope != 0.0:
        step = h1 / slope
        if abs(step) < 1e-9 and dt - step > 0.0:
            dt -= step
    return dt
