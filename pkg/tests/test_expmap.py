"""Exponential map: special solutions, group structure and oracle agreement."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from halfdisk import _batch
from halfdisk.errors import ContractViolation
from halfdisk.expmap import arclength, end_state, evaluate, exp_map, sample_trajectory
from halfdisk.oracle import integrate_pmp
from halfdisk.planner import CylinderPoint
from halfdisk.se2 import Pose, compose, normalize_angle
from halfdisk.vertical import TOL, Branch, Covector, casimir_E, signs

from conftest import random_covector, random_generic_covector

R3 = math.sqrt(3) / 2


def pose_gap(a: Pose, b: Pose) -> float:
    return math.hypot(a.x - b.x, a.y - b.y) + abs(normalize_angle(a.theta - b.theta))


def test_equilibrium_rotation():
    traj = exp_map(Covector(0, 1, 0), 2.0)
    assert traj.kinds == [Branch.StableEquilibrium]
    assert pose_gap(end_state(traj)[0], Pose(0, 0, 2)) < 1e-15


def test_straight_line():
    traj = exp_map(Covector(1, 0, 0), 3.0)
    assert traj.kinds == [Branch.Line]
    assert pose_gap(end_state(traj)[0], Pose(3, 0, 0)) < 1e-15


def test_rotation_ending_at_switch():
    traj = exp_map(Covector(-1, 1, 0), math.pi / 2)
    assert traj.kinds == [Branch.Rotation]
    q, h = end_state(traj)
    assert pose_gap(q, Pose(0, 0, math.pi / 2)) < 1e-15
    assert h.as_tuple() == pytest.approx((0, 1, -1), abs=1e-15)


def test_bad_inputs():
    with pytest.raises(ContractViolation):
        exp_map(Covector(1, 1, 0), 1.0)
    with pytest.raises(ValueError):
        exp_map(Covector(1, 0, 0), -1.0)


def test_sample_examples():
    traj = exp_map(Covector(0, 1, 0), math.pi)
    s = sample_trajectory(traj, 3)
    assert [r[0] for r in s] == [0.0, math.pi / 2, math.pi]
    assert [r[1].theta for r in s] == pytest.approx([0.0, math.pi / 2, math.pi])
    s2 = sample_trajectory(exp_map(Covector(R3, 0.5, 1), 4.0), 2)
    assert s2[0][0] == 0.0 and s2[1][0] == 4.0
    with pytest.raises(ValueError):
        sample_trajectory(traj, 1)


def test_arclength_examples():
    assert arclength(exp_map(Covector(0, -1, 0), 3.0), 2.0) == 0.0
    assert arclength(exp_map(Covector(1, 0, 0), 3.0), 2.0) == 2.0


@pytest.mark.parametrize("h0", [Covector(R3, 0.5, 1), Covector(0.5, R3, 0.7), Covector(0.6, 0.8, 0.3), Covector(0.6, -0.8, 0.0)])
def test_arclength_against_quadrature(h0):
    traj = exp_map(h0, 12.0)
    for t in (0.5, 3.0, 7.5, 12.0):
        ref, _ = integrate.quad(lambda s: max(evaluate(traj, s)[1].h1, 0.0), 0.0, t, limit=400, epsabs=1e-12,
                                points=[g.t_start for g in traj.segments if 0 < g.t_start < t])
        assert abs(arclength(traj, t) - ref) < 1e-9


def test_segments_alternate_and_switch_on_h1_zero(rng):
    for _ in range(40):
        traj = exp_map(random_covector(rng), 15.0)
        segs = traj.segments
        for a, b in zip(segs, segs[1:]):
            rot_a = a.kind in (Branch.Rotation, Branch.StableEquilibrium)
            rot_b = b.kind in (Branch.Rotation, Branch.StableEquilibrium)
            assert rot_a != rot_b
            assert abs(b.start_covector.h1) <= 1e-9
            assert b.t_start == pytest.approx(a.t_end, abs=1e-15)
        for s in segs[1:-1]:
            if s.kind is Branch.Rotation:
                assert s.duration == math.pi
            else:
                tau = np.linspace(0, s.duration, 12)[1:-1]
                assert all(s.state(t)[1].h1 > 0 for t in tau)


def test_switch_rule_at_interior_junctions(rng):
    for _ in range(30):
        traj = exp_map(random_covector(rng), 12.0)
        for seg in traj.segments[1:]:
            s2, s3 = signs(seg.start_covector, TOL)
            is_rot = seg.kind in (Branch.Rotation, Branch.StableEquilibrium)
            assert is_rot == (s2 * s3 > 0)


def test_left_invariance(rng):
    for _ in range(30):
        h0 = random_covector(rng)
        T = rng.uniform(0, 10)
        q0 = Pose(*rng.uniform(-5, 5, 2), rng.uniform(-3, 3))
        a = end_state(exp_map(h0, T, q0))[0]
        b = compose(q0, end_state(exp_map(h0, T))[0])
        assert pose_gap(a, b) < 1e-10


def test_semigroup(rng):
    for _ in range(30):
        h0 = random_covector(rng)
        t1, t2 = rng.uniform(0, 6, 2)
        whole = end_state(exp_map(h0, t1 + t2))[0]
        q, h = end_state(exp_map(h0, t1))
        # the state reached at t1 is re-fed as a fresh initial condition
        h = Covector(h.h1, h.h2, h.h3)
        if abs(h.h1) <= 1e-12:
            h = Covector(0.0, math.copysign(1.0, h.h2), h.h3)
        tail = end_state(exp_map(h, t2, q))[0]
        assert pose_gap(whole, tail) < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.floats(-math.pi - 0.3, math.pi + 0.3), st.floats(-4, 4), st.floats(0, 12))
def test_first_integrals(psi, h3, T):
    h0 = CylinderPoint(psi, h3).covector()
    E0 = casimir_E(h0)
    for _, _, h, _ in sample_trajectory(exp_map(h0, T), 40):
        assert abs((abs(h.h2) if h.h1 <= 0 else math.hypot(h.h1, h.h2)) - 1) < 1e-9
        assert abs(casimir_E(h) - E0) < 1e-9


def test_matches_oracle(rng):
    worst = 0.0
    for _ in range(12):
        h0 = random_generic_covector(rng)
        T = rng.uniform(1, 8)
        ref = integrate_pmp(h0, T, dt=1e-4, record_every=400)
        traj = exp_map(h0, T)
        for st_ in ref:
            q, h = evaluate(traj, min(st_.t, T))
            worst = max(worst, pose_gap(q, st_.pose), float(np.max(np.abs(np.subtract(h.as_tuple(), st_.covector.as_tuple())))))
    assert worst < 1e-7


def test_both_directions_on_low_energy_arcs():
    # E < 1 arcs run forward or backward in the reduced argument depending on sign(h2 h3)
    for h3 in (0.3, -0.3):
        h0 = Covector(0.6, 0.8, h3)
        ref = integrate_pmp(h0, 6.0, dt=1e-4, record_every=500)
        traj = exp_map(h0, 6.0)
        for st_ in ref:
            assert pose_gap(evaluate(traj, st_.t)[0], st_.pose) < 1e-8


def test_tractrix_against_oracle():
    for h0 in (Covector(0, 1, -1), Covector(0.6, -0.8, 0.8), Covector(0.6, 0.8, 0.8)):
        assert abs(casimir_E(h0) - 1) < 1e-12
        ref = integrate_pmp(h0, 6.0, dt=1e-4, record_every=500)
        traj = exp_map(h0, 6.0)
        for st_ in ref:
            assert pose_gap(evaluate(traj, st_.t)[0], st_.pose) < 1e-7


def test_evaluate_bounds():
    traj = exp_map(Covector(R3, 0.5, 1), 2.0)
    with pytest.raises(ValueError):
        evaluate(traj, 2.5)
    with pytest.raises(ValueError):
        arclength(traj, -1.0)


def test_batch_endpoints_match_scalar(rng):
    n = 400
    psi = rng.uniform(-math.pi - 0.3, math.pi + 0.3, n)
    h3 = rng.uniform(-5, 5, n)
    T = rng.uniform(0, 12, n)
    # exact special covectors as well
    psi[:4] = [0.0, math.pi / 2, -math.pi / 2, math.pi / 2]
    h3[:4] = [0.0, 0.0, 0.0, 1.0]
    h1, h2, h3v = _batch.decode_cylinder(psi, h3)
    x, y, th, nseg = _batch.endpoints(h1, h2, h3v, T)
    for i in range(n):
        traj = exp_map(CylinderPoint(psi[i], h3[i]).covector(), T[i])
        q = end_state(traj)[0]
        assert pose_gap(q, Pose(x[i], y[i], th[i])) < 1e-12
        assert nseg[i] == len(traj)
