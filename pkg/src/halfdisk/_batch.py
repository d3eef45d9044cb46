"""Vectorised endpoint of the exponential map.

Same closed forms as :mod:`halfdisk.expmap`, evaluated on whole arrays of
covectors at once so the shooting solver can scan thousands of seeds. Only
the final pose is produced; tests compare it against the scalar path.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .vertical import SEPARATRIX_TOL, TOL


def decode_cylinder(psi, h3):
    """Covectors on ``H = 1`` from unrolled cylinder coordinates ``(psi, h3)``."""
    psi = np.asarray(psi, dtype=float)
    h3 = np.broadcast_to(np.asarray(h3, dtype=float), psi.shape).copy()
    half = math.pi / 2
    h1 = np.where(psi > half, half - psi, np.where(psi < -half, psi + half, np.cos(psi)))
    h2 = np.where(psi > half, 1.0, np.where(psi < -half, -1.0, np.sin(psi)))
    return h1, h2, h3


def endpoints(h1, h2, h3, T, separatrix_tol=SEPARATRIX_TOL, tol=TOL):
    """Final pose ``(x, y, theta)`` and segment count of ``exp_map(h, T)`` for arrays."""
    h1 = np.array(h1, dtype=float, copy=True).ravel()
    h2 = np.array(h2, dtype=float, copy=True).ravel()
    h3 = np.array(h3, dtype=float, copy=True).ravel()
    T = np.broadcast_to(np.asarray(T, dtype=float), h1.shape).ravel()
    n = h1.size
    x, y, th, t = np.zeros(n), np.zeros(n), np.zeros(n), np.zeros(n)
    nseg = np.zeros(n, dtype=int)
    active = np.ones(n, dtype=bool)
    limit = 10 + 2 * int(math.ceil(float(np.max(T, initial=0.0)) / math.pi))

    for _ in range(limit + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        nseg[idx] += 1
        a1, a2, a3 = h1[idx], h2[idx], h3[idx]
        rem = T[idx] - t[idx]
        E = a1 * a1 + a3 * a3
        s2 = np.where(a2 > 0, 1.0, -1.0)
        s3 = np.where(np.abs(a3) <= tol, s2, np.sign(a3))
        zero1 = np.abs(a1) <= tol
        rot = (a1 < -tol) | (zero1 & ((s2 * s3 > 0) | (np.abs(a3) <= tol)))
        line = ~rot & (np.abs(a1 - 1.0) <= tol) & (np.abs(a3) <= tol)
        arc = ~rot & ~line
        sep = arc & (np.abs(E - 1.0) <= separatrix_tol)
        above = arc & ~sep & (E > 1.0)
        below = arc & ~sep & (E < 1.0)

        sw = np.full(idx.size, np.inf)
        n1, n2, n3 = a1.copy(), a2.copy(), a3.copy()
        nx, ny, nth = x[idx].copy(), y[idx].copy(), th[idx].copy()

        if rot.any():
            r = rot
            eq = zero1[r] & (np.abs(a3[r]) <= tol)
            sw_r = np.where(eq, np.inf, np.where(zero1[r], math.pi, np.arctan2(-a1[r], -s2[r] * a3[r])))
            d = np.minimum(sw_r, rem[r])
            c, s = np.cos(d), np.sin(d)
            n1[r] = a1[r] * c - s2[r] * a3[r] * s
            n2[r] = s2[r]
            n3[r] = a3[r] * c + s2[r] * a1[r] * s
            nth[r] = th[idx][r] + s2[r] * d
            sw[r] = sw_r

        if line.any():
            l_ = line
            d = rem[l_]
            nx[l_] += d * np.cos(th[idx][l_])
            ny[l_] += d * np.sin(th[idx][l_])

        if above.any():
            _arc_above(above, a1, a2, a3, E, s3, rem, sw, n1, n2, n3, nx, ny, nth)
        if below.any():
            _arc_below(below, a1, a2, a3, E, s2, s3, rem, sw, n1, n2, n3, nx, ny, nth)
        if sep.any():
            _arc_separatrix(sep, a1, a3, s2, s3, rem, sw, n1, n2, n3, nx, ny, nth)

        done = sw >= rem
        x[idx], y[idx], th[idx] = nx, ny, nth
        cont = ~done
        h1[idx] = np.where(cont, 0.0, n1)
        h2[idx] = np.where(cont, np.where(n2 > 0, 1.0, -1.0), n2)
        h3[idx] = n3
        t[idx] = np.where(cont, t[idx] + sw, T[idx])
        active[idx[done]] = False
    if active.any():
        raise RuntimeError("segment limit exceeded in batch evaluation")

    th = np.remainder(th + math.pi, 2 * math.pi) - math.pi
    th = np.where(th <= -math.pi, th + 2 * math.pi, th)
    return x, y, th, nseg


def _place(mask, nx, ny, nth, xt, yt, tht, tht0):
    beta = nth[mask] - tht0
    c, s = np.cos(beta), np.sin(beta)
    nx[mask] += c * xt - s * yt
    ny[mask] += s * xt + c * yt
    nth[mask] = tht + beta


def _arc_above(m, a1, a2, a3, E, s3, rem, sw, n1, n2, n3, nx, ny, nth):
    h10, h20, h30, s = np.maximum(a1[m], 0.0), a2[m], a3[m], s3[m]
    k = 1.0 / np.sqrt(E[m])
    kk = k * k
    phi0 = np.arctan2(h10, -s * h20)
    u0 = special.ellipkinc(phi0, kk)
    K = special.ellipk(kk)
    sw_m = np.maximum(k * (2.0 * K - u0), 0.0)
    d = np.minimum(sw_m, rem[m])
    u = u0 + d / k
    sn, cn, dn, ph = special.ellipj(u, kk)
    _, cn0, dn0, ph0 = special.ellipj(u0, kk)
    eps = special.ellipeinc(ph, kk) - special.ellipeinc(ph0, kk)
    n1[m], n2[m], n3[m] = sn, -s * cn, h30 + s / k * (dn - dn0)
    xt = -k * (cn - cn0)
    yt = -s * ((u - u0) - eps)
    _place(m, nx, ny, nth, xt, yt, -s * np.arctan2(k * sn, dn), -s * np.arctan2(k * h10, dn0))
    sw[m] = sw_m


def _arc_below(m, a1, a2, a3, E, s2, s3, rem, sw, n1, n2, n3, nx, ny, nth):
    h10, h30 = np.maximum(a1[m], 0.0), a3[m]
    s = -s2[m]
    sigma = -s2[m] * s3[m]
    mod = np.sqrt(E[m])
    mm = E[m]
    phi0 = np.arctan2(h10, np.abs(h30))
    u0 = special.ellipkinc(phi0, mm)
    K = special.ellipk(mm)
    sw_m = np.where(sigma > 0, 2.0 * K - u0, u0)
    d = np.minimum(sw_m, rem[m])
    u = u0 + sigma * d
    sn, cn, dn, ph = special.ellipj(u, mm)
    _, cn0, dn0, ph0 = special.ellipj(u0, mm)
    eps = special.ellipeinc(ph, mm) - special.ellipeinc(ph0, mm)
    n1[m], n2[m], n3[m] = mod * sn, -s * dn, h30 + s * sigma * mod * (cn - cn0)
    xt = -sigma / mod * (dn - dn0)
    yt = -s / mod * ((u - u0) - eps)
    tht = -s * sigma * np.arctan2(np.maximum(sn, 0.0), cn)
    _place(m, nx, ny, nth, xt, yt, tht, -s * sigma * phi0)
    sw[m] = sw_m


def _arc_separatrix(m, a1, a3, s2, s3, rem, sw, n1, n2, n3, nx, ny, nth):
    h10, h30, s = np.maximum(a1[m], 0.0), a3[m], s3[m]
    sigma = np.where(s2[m] * s3[m] < 0, 1.0, -1.0)
    u0 = sigma * np.arctanh(np.minimum(h10, 1.0 - 1e-16))
    sw_m = np.where(sigma > 0, np.inf, -u0)
    d = np.minimum(sw_m, rem[m])
    u = u0 + d
    sech, sech0 = 1.0 / np.cosh(u), 1.0 / np.cosh(u0)
    n1[m], n2[m], n3[m] = np.tanh(np.abs(u)), -s * sigma * sech, h30 + s * (sech - sech0)
    xt = -sigma * (sech - sech0)
    yt = -s * ((u - u0) - (np.tanh(u) - np.tanh(u0)))
    tht = -s * np.arctan(np.sinh(np.abs(u)))
    _place(m, nx, ny, nth, xt, yt, tht, -s * np.arctan(np.sinh(np.abs(u0))))
    sw[m] = sw_m
