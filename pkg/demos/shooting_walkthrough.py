"""
From a goal pose back to an initial covector: the three-phase plan gives an
upper bound on the time, multi-start shooting finds the extremals below it.

    python3 demos/shooting_walkthrough.py
"""
import math

from halfdisk import IDENTITY, Pose, end_state, exp_map, feasible_plan, optimal_trajectory, solve_bvp
from halfdisk.planner import CylinderPoint

goal = Pose(0.0, 1.0, 0.0)   # one unit to the left, same heading

plan = feasible_plan(IDENTITY, goal)
print("turn / drive / turn plan:", plan)

sols = solve_bvp(goal)
print(f"{len(sols)} extremals reach the goal; the five fastest:")
for s in sols[:5]:
    print(f"   psi = {s.start.psi:+.5f}  h3 = {s.start.h3:+.5f}  T = {s.T:.6f}"
          f"  residual = {s.residual:.1e}  kinds = {[k.value for k in s.trajectory.kinds]}")

best = optimal_trajectory(IDENTITY, goal)
print(f"best time {best.total_time:.6f} versus plan {plan.T:.6f}")

# mirror image: (x, y, theta) -> (x, -y, -theta) costs the same
mirror = solve_bvp(Pose(goal.x, -goal.y, -goal.theta))[0].T
print(f"mirrored goal: {mirror:.6f}")

# round trip: shoot at the endpoint of a known extremal
h0 = CylinderPoint(0.4, -1.3).covector()
target = end_state(exp_map(h0, 2.5))[0]
found = solve_bvp(target)[0]
print(f"generated with T = 2.5, recovered T = {found.T:.8f} (never longer)")

# pure turns and straight drives come out exactly
print(solve_bvp(Pose(0, 0, math.pi / 2))[0].T, solve_bvp(Pose(3, 0, 0))[0].T)
