"""
Why an optimal path never stops to turn around in the middle.

Take an extremal that drives, turns in place by pi, and drives on. Pick a
point A shortly before the stop and a point C shortly after it. Turning at A
towards C, driving the chord and turning to C's heading is faster than the
original detour.

    python3 demos/cut_construction.py
"""
import math

from halfdisk import Covector, evaluate, exp_map, feasible_plan, srezka_improve
from halfdisk.expmap import ExtremalSegment, Trajectory
from halfdisk.se2 import IDENTITY, Pose
from halfdisk.vertical import Branch

traj = exp_map(Covector(0.5, math.sqrt(3) / 2, 1.0), 20.0)
res = srezka_improve(traj)
print("extremal kinds:", [k.value for k in traj.kinds])
print(f"A at t = {res.t_a:.4f}, C at t = {res.t_c:.4f}")
print(f"original time between them {res.T:.4f}, shortcut {res.T0:.4f}")
print(f"shortcut: turn {res.theta0:+.4f}, drive {res.l:.4f}, turn {res.theta1:+.4f}")

qa, qc = evaluate(traj, res.t_a)[0], evaluate(traj, res.t_c)[0]
print("same three phases from the planner:", feasible_plan(qa, qc))

# a hand-made detour: forward 1, spin by pi, forward 1
segs = (
    ExtremalSegment(Branch.Line, IDENTITY, Covector(1, 0, 0), 1.0, 0.0),
    ExtremalSegment(Branch.StableEquilibrium, Pose(1, 0, 0), Covector(0, 1, 0), math.pi, 1.0),
    ExtremalSegment(Branch.Line, Pose(1, 0, math.pi), Covector(1, 0, 0), 1.0, 1.0 + math.pi),
)
print(srezka_improve(Trajectory(segs, 2.0 + math.pi)))

# nothing to cut on a plain forward arc
print(srezka_improve(exp_map(Covector(0.6, 0.8, 0.3), 1.0)))
