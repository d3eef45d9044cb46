"""Jacobi elliptic functions and Legendre integrals, parameterised by modulus ``k``.

Thin wrappers over :mod:`scipy.special` (which works with the parameter
``m = k**2``), with domain checks, the ``k = 1`` hyperbolic limit, and the
Jacobi epsilon function ``E(am(u, k), k)``. All functions broadcast over
numpy arrays and return plain floats for scalar input.
"""

from __future__ import annotations

import numpy as np
from scipy import special

__all__ = [
    "complete_K",
    "complete_E",
    "incomplete_F",
    "incomplete_E_int",
    "epsilon",
    "jacobi",
]


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def _check_modulus(k, *, allow_one: bool):
    k = np.asarray(k, dtype=float)
    if not np.all(np.isfinite(k)) or np.any(k < 0.0) or np.any(k > 1.0):
        raise ValueError(f"modulus must lie in [0, 1], got {k!r}")
    if not allow_one and np.any(k == 1.0):
        raise ValueError("modulus k = 1 is not allowed here")
    return k


def complete_K(k):
    """Complete integral of the first kind ``K(k) = F(pi/2, k)``.

    Raises :class:`OverflowError` at ``k = 1`` where ``K`` diverges.
    """
    k = _check_modulus(k, allow_one=True)
    if np.any(k == 1.0):
        raise OverflowError("K(k) diverges at k = 1")
    return _out(special.ellipk(k * k))


def complete_E(k):
    """Complete integral of the second kind ``E(k) = E(pi/2, k)``."""
    k = _check_modulus(k, allow_one=True)
    return _out(special.ellipe(k * k))


def incomplete_F(phi, k):
    """Legendre integral of the first kind ``int_0^phi (1 - k^2 sin^2 a)^(-1/2) da``.

    Valid for any finite ``phi``; ``F(phi + n*pi) = F(phi) + 2 n K``.
    """
    k = _check_modulus(k, allow_one=False)
    phi = np.asarray(phi, dtype=float)
    if not np.all(np.isfinite(phi)):
        raise ValueError("phi must be finite")
    return _out(special.ellipkinc(phi, k * k))


def incomplete_E_int(phi, k):
    """Legendre integral of the second kind ``int_0^phi (1 - k^2 sin^2 a)^(1/2) da``."""
    k = _check_modulus(k, allow_one=True)
    phi = np.asarray(phi, dtype=float)
    if not np.all(np.isfinite(phi)):
        raise ValueError("phi must be finite")
    return _out(special.ellipeinc(phi, k * k))


def epsilon(u, k):
    """Jacobi epsilon ``E(am(u, k), k) = int_0^u dn^2(w, k) dw``.

    At ``k = 1`` this is ``tanh(u)``.
    """
    k = _check_modulus(k, allow_one=True)
    u = np.asarray(u, dtype=float)
    _, _, _, am = jacobi(u, k)
    with np.errstate(invalid="ignore"):
        out = np.where(k == 1.0, np.tanh(u), special.ellipeinc(am, np.minimum(k, 1.0) ** 2))
    return _out(out)


def jacobi(u, k):
    """Return ``(sn, cn, dn, am)`` at argument ``u`` and modulus ``k``.

    At ``k = 1`` the hyperbolic limit is used: ``sn = tanh u``,
    ``cn = dn = sech u`` and ``am`` is the Gudermannian of ``u``.
    """
    k = _check_modulus(k, allow_one=True)
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise ValueError("u must be finite")
    sn, cn, dn, am = special.ellipj(u, k * k)
    one = k == 1.0
    if np.any(one):
        sech = 1.0 / np.cosh(u)
        sn = np.where(one, np.tanh(u), sn)
        cn = np.where(one, sech, cn)
        dn = np.where(one, sech, dn)
        am = np.where(one, np.arctan(np.sinh(u)), am)
    return _out(sn), _out(cn), _out(dn), _out(am)
