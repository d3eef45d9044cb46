"""
Extremals of the forward-only car: wavy forward arcs glued together by
half-turns in place.

Run from the repository root:

    python3 demos/extremal_gallery.py

Writes two SVG plots next to this file and prints the segment structure.
"""
import math
import os

import numpy as np

from halfdisk import Covector, exp_map, sample_trajectory
from halfdisk.cli import render_svg, trajectory_rows

here = os.path.dirname(os.path.abspath(__file__))

# h1 = 1/2, h2 = sqrt(3)/2 puts the start on the h1 > 0 half-cylinder;
# h3 picks the energy E = h1^2 + h3^2 (above or below the separatrix E = 1)
for h3 in (1.0, 0.7):
    h0 = Covector(0.5, math.sqrt(3) / 2, h3)
    traj = exp_map(h0, 20.0)
    print(f"h3 = {h3}   E = {0.25 + h3 * h3:.2f}   segments = {len(traj)}")
    for seg in traj.segments:
        q = seg.start_pose
        print(f"   {seg.kind.value:12s} t = {seg.t_start:7.4f} .. {seg.t_end:7.4f}"
              f"   start ({q.x:+.3f}, {q.y:+.3f}, {q.theta:+.3f})")

    # the car stands still exactly while it turns in place
    samples = sample_trajectory(traj, 2001)
    u1 = np.array([s[3].u1 for s in samples])
    print(f"   fraction of time spent turning in place: {np.mean(u1 == 0):.3f}")

    path = os.path.join(here, f"extremal_h3_{h3}.svg")
    with open(path, "w") as fh:
        fh.write(render_svg(trajectory_rows(traj, 2001)))
    print("   wrote", path)

# the two exact special solutions
print(exp_map(Covector(0, 1, 0), 2.0).segments[-1].state(2.0)[0])   # turn in place
print(exp_map(Covector(1, 0, 0), 3.0).segments[-1].state(3.0)[0])   # straight line
