"""Covector dynamics: closed forms against RK4, bisection and identities."""

import math

import numpy as np
import pytest

from halfdisk.errors import ContractViolation
from halfdisk.oracle import integrate_pmp_arrays
from halfdisk.vertical import (
    Branch,
    Covector,
    arc_argument,
    branch_of,
    casimir_E,
    elliptic_arc_params,
    elliptic_switch_time,
    elliptic_vertical_flow,
    extremal_control,
    hamiltonian_H,
    project_to_level,
    rotation_switch_time,
    rotation_vertical_flow,
    signs,
)

from conftest import random_arc_covector

R3 = math.sqrt(3) / 2


def vertical_rk4(h, T, dt):
    """RK4 of the covector equations with the arc control u = (h1, h2)/|(h1, h2)|."""

    def f(v):
        h1, h2, h3 = v
        r = math.hypot(h1, h2)
        u1, u2 = h1 / r, h2 / r
        return np.array([-u2 * h3, u1 * h3, u2 * h1])

    v = np.array(h, dtype=float)
    n = int(round(T / dt))
    for _ in range(n):
        k1 = f(v)
        k2 = f(v + dt / 2 * k1)
        k3 = f(v + dt / 2 * k2)
        k4 = f(v + dt * k3)
        v = v + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return v


def bisect_root(f, a, b, tol=1e-14):
    fa = f(a)
    while b - a > tol:
        m = 0.5 * (a + b)
        if (f(m) > 0) == (fa > 0):
            a, fa = m, f(m)
        else:
            b = m
    return 0.5 * (a + b)


def test_hamiltonian_examples():
    assert hamiltonian_H(Covector(-0.5, 1, 7)) == 1.0
    assert hamiltonian_H(Covector(0.6, 0.8, -3)) == pytest.approx(1.0, abs=1e-15)
    assert hamiltonian_H(Covector(0, 0, 1)) == 0.0


def test_casimir_examples():
    assert casimir_E(Covector(0.6, 0.3, 0.8)) == pytest.approx(1.0, abs=1e-15)
    assert casimir_E(Covector(0, 1, 0)) == 0.0
    assert casimir_E(Covector(0, -1, 0)) == 0.0
    assert casimir_E(Covector(R3, 0.5, 1)) == pytest.approx(1.75, abs=1e-15)


def test_extremal_control_examples():
    u = extremal_control(Covector(0.6, 0.8, 5))
    assert (u.u1, u.u2) == pytest.approx((0.6, 0.8), abs=1e-15)
    u = extremal_control(Covector(-1, 1, 0))
    assert (u.u1, u.u2) == (0.0, 1.0)
    u = extremal_control(Covector(-0.3, -1, 2))
    assert (u.u1, u.u2) == (0.0, -1.0)
    with pytest.raises(ContractViolation):
        extremal_control(Covector(1, 1, 0))


def test_branch_examples():
    assert branch_of(Covector(0, 1, 0)) is Branch.StableEquilibrium
    assert branch_of(Covector(1, 0, 0)) is Branch.Line
    assert branch_of(Covector(0, 1, -1)) is Branch.Tractrix
    assert branch_of(Covector(0, 1, 1)) is Branch.Rotation
    assert branch_of(Covector(-0.5, -1, 0)) is Branch.Rotation
    assert branch_of(Covector(R3, 0.5, 1)) is Branch.Elliptic
    assert branch_of(Covector(0.9, -math.sqrt(0.19), 0.1)) is Branch.Elliptic


def test_zero_h3_inherits_sign_of_h2():
    assert signs(Covector(0.5, -R3, 0.0)) == (-1, -1)
    assert signs(Covector(0.5, R3, 1e-13)) == (1, 1)


def test_project_to_level():
    h = project_to_level(Covector(0.3, 0.4, 2.0))
    assert (h.h1, h.h2, h.h3) == pytest.approx((0.6, 0.8, 2.0))
    h = project_to_level(Covector(-0.2, -0.7, 1.0))
    assert h.h2 == -1.0
    with pytest.raises(ContractViolation):
        project_to_level(Covector(-1.0, 0.0, 0.0))


def test_rotation_flow_examples():
    h = rotation_vertical_flow(Covector(-1, 1, 0), math.pi / 2)
    assert (h.h1, h.h2, h.h3) == pytest.approx((0, 1, -1), abs=1e-15)
    h = rotation_vertical_flow(Covector(-1, -1, 0), math.pi / 2)
    assert (h.h1, h.h2, h.h3) == pytest.approx((0, -1, 1), abs=1e-15)
    h0 = Covector(-0.4, 1, 2.0)
    assert rotation_vertical_flow(h0, 0.0) == h0
    with pytest.raises(ContractViolation):
        rotation_vertical_flow(Covector(0.6, 0.8, 0), 0.1)


def test_rotation_switch_examples():
    assert rotation_switch_time(Covector(-1, 1, 0)) == pytest.approx(math.pi / 2, abs=1e-15)
    assert rotation_switch_time(Covector(-1, 1, 1)) == pytest.approx(3 * math.pi / 4, abs=1e-15)
    # entering the rotation half-plane from h1 = 0 takes exactly pi
    assert rotation_switch_time(Covector(0, 1, 1)) == math.pi
    assert rotation_switch_time(Covector(0, -1, -0.3)) == math.pi
    assert rotation_switch_time(Covector(0, 1, 0)) == math.inf
    with pytest.raises(ContractViolation):
        rotation_switch_time(Covector(0, 1, -1))


def test_rotation_flow_matches_rk4(rng):
    for _ in range(20):
        h0 = Covector(-rng.uniform(0.05, 2), rng.choice([-1.0, 1.0]), rng.uniform(-2, 2))
        t = 0.9 * rotation_switch_time(h0)
        s2 = h0.h2
        # rotation regime: u = (0, s2)
        v = np.array(h0.as_tuple())
        n = 4000
        dt = t / n
        f = lambda w: np.array([-s2 * w[2], 0.0, s2 * w[0]])  # noqa: E731
        for _ in range(n):
            k1 = f(v)
            k2 = f(v + dt / 2 * k1)
            k3 = f(v + dt / 2 * k2)
            k4 = f(v + dt * k3)
            v = v + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        assert np.allclose(rotation_vertical_flow(h0, t).as_tuple(), v, atol=1e-11)


def test_rotation_switch_is_first_root(rng):
    for _ in range(100):
        h10, h30, s2 = -rng.uniform(1e-3, 3), rng.uniform(-3, 3), rng.choice([-1.0, 1.0])
        h0 = Covector(h10, s2, h30)
        h1 = lambda t: h10 * math.cos(t) - s2 * h30 * math.sin(t)  # noqa: E731
        grid = np.arange(0.0, math.pi + 1e-3, 1e-3)
        vals = np.array([h1(t) for t in grid])
        first = int(np.argmax(vals >= 0.0))
        assert vals[first] >= 0.0
        root = bisect_root(h1, grid[first - 1], grid[first])
        assert abs(rotation_switch_time(h0) - root) < 1e-10


def test_rotation_preserves_circle(rng):
    for _ in range(20):
        h0 = Covector(-rng.uniform(0, 2), rng.choice([-1.0, 1.0]), rng.uniform(-2, 2))
        E0 = casimir_E(h0)
        for t in np.linspace(0, rotation_switch_time(h0), 50):
            assert abs(casimir_E(rotation_vertical_flow(h0, t)) - E0) < 1e-12


def test_arc_params_examples():
    p = elliptic_arc_params(Covector(R3, 0.5, 1))
    assert p.E == pytest.approx(1.75) and p.k == pytest.approx(2 / math.sqrt(7)) and p.s == 1
    assert p.M == pytest.approx(-0.25)
    p = elliptic_arc_params(Covector(R3, 0.5, -1))
    assert p.E == pytest.approx(1.75) and p.k == pytest.approx(2 / math.sqrt(7)) and p.s == -1
    p = elliptic_arc_params(Covector(0.9, -math.sqrt(0.19), 0.1))
    assert p.E == pytest.approx(0.82) and p.s == 1
    with pytest.raises(ContractViolation):
        elliptic_arc_params(Covector(1, 0, 0))
    with pytest.raises(ContractViolation):
        elliptic_arc_params(Covector(-0.5, 1, 0))


@pytest.mark.parametrize(
    "h0",
    [
        Covector(R3, 0.5, 1),
        Covector(R3, 0.5, -1),
        Covector(0.9, -math.sqrt(0.19), 0.1),
        Covector(0.9, math.sqrt(0.19), 0.1),
        Covector(0.6, 0.8, 0.0),
        Covector(0.3, -math.sqrt(0.91), -2.5),
    ],
)
def test_arc_flow_against_rk4(h0):
    p = elliptic_arc_params(h0, t_start=1.5)
    start = elliptic_vertical_flow(p, 1.5)
    assert np.allclose(start.as_tuple(), h0.as_tuple(), atol=1e-9)
    t = min(0.7, 0.95 * elliptic_switch_time(p))
    ref = vertical_rk4(h0.as_tuple(), t, t / round(t / 1e-5))
    assert np.allclose(elliptic_vertical_flow(p, 1.5 + t).as_tuple(), ref, atol=1e-10)


@pytest.mark.parametrize("h3", [1.0, 0.7, -0.4, 2.0, -3.0])
def test_arc_switch_time_against_oracle_event(h3):
    h0 = Covector(0.5, R3, h3)
    p = elliptic_arc_params(h0)
    dt = elliptic_switch_time(p)
    assert abs(elliptic_vertical_flow(p, dt).h1) < 1e-10
    ts, ys = integrate_pmp_arrays(h0, dt + 0.05, dt=1e-4)
    event = ts[np.flatnonzero(ys[:, 3] == 0.0)[0]]
    assert abs(event - dt) < 1e-9


def test_switch_time_diverges_near_line():
    times = [elliptic_switch_time(elliptic_arc_params(Covector(math.cos(e), math.sin(e), 0.0))) for e in (1e-1, 1e-2, 1e-4)]
    assert times[0] < times[1] < times[2]
    assert times[2] > 10.0  # grows like log(1/e)


def test_first_integrals_along_arcs(rng):
    for _ in range(50):
        h0 = random_arc_covector(rng)
        p = elliptic_arc_params(h0)
        end = elliptic_switch_time(p)
        end = 5.0 if math.isinf(end) else end
        E0 = casimir_E(h0)
        for t in np.linspace(0, end, 100):
            h = elliptic_vertical_flow(p, t)
            assert abs(hamiltonian_H(h) - 1) < 1e-9
            assert abs(casimir_E(h) - E0) < 1e-9


def test_pendulum_equation(rng):
    d = 1e-4
    for _ in range(20):
        h0 = random_arc_covector(rng)
        p = elliptic_arc_params(h0)
        end = elliptic_switch_time(p)
        end = 5.0 if math.isinf(end) else end
        for t in rng.uniform(2 * d, end - 2 * d, 50):
            h2 = [elliptic_vertical_flow(p, t + j * d).h2 for j in (-1, 0, 1)]
            acc = (h2[0] - 2 * h2[1] + h2[2]) / d**2
            assert abs(acc + p.M * h2[1] + 2 * h2[1] ** 3) < 1e-4


def test_arc_is_rotation_by_heading_integral(rng):
    from scipy import integrate

    for _ in range(20):
        h0 = random_arc_covector(rng)
        p = elliptic_arc_params(h0)
        end = elliptic_switch_time(p)
        end = 4.0 if math.isinf(end) else end
        for t in np.linspace(0, end, 7)[1:]:
            H2, _ = integrate.quad(lambda s: elliptic_vertical_flow(p, s).h2, 0.0, t, epsabs=1e-12, limit=200)
            h = elliptic_vertical_flow(p, t)
            c, s = math.cos(H2), math.sin(H2)
            assert abs(h.h1 - (h0.h1 * c - h0.h3 * s)) < 1e-8
            assert abs(h.h3 - (h0.h3 * c + h0.h1 * s)) < 1e-8


def test_arc_argument_runs_backwards_on_one_branch():
    # E < 1 with h2*h3 > 0: h1 decays, the reduced argument decreases
    p = elliptic_arc_params(Covector(0.6, 0.8, 0.3))
    assert p.regime == "below" and p.sigma == -1
    assert arc_argument(p, 0.1) < p.u0
    dt = elliptic_switch_time(p)
    assert abs(elliptic_vertical_flow(p, dt).h1) < 1e-12
    # E < 1 with h2*h3 < 0: h1 first grows
    p = elliptic_arc_params(Covector(0.6, 0.8, -0.3))
    assert p.sigma == 1 and elliptic_vertical_flow(p, 0.1).h1 > 0.6
