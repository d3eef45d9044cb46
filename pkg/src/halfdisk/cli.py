"""Command-line front end.

::

    halfdisk exp   --h0 h1,h2,h3 --T 6 [--samples n] [--format csv|json|svg]
    halfdisk plan  [--q0 x,y,theta] --q1 x,y,theta
    halfdisk shoot [--q0 x,y,theta] --q1 x,y,theta [--grid a,b,c] [--tol t] [--best]
    halfdisk svg   trajectory.csv [--out plot.svg]

Exit codes: 0 success, 2 bad input, 3 I/O failure, 4 solver non-convergence.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass

from .errors import ContractViolation, NoConvergence
from .expmap import Trajectory, exp_map, sample_trajectory
from .planner import SolverConfig, feasible_plan, solve_bvp
from .se2 import IDENTITY, Pose, relative_target
from .vertical import SEPARATRIX_TOL, Covector, project_to_level

EXIT_OK, EXIT_INPUT, EXIT_IO, EXIT_SOLVER = 0, 2, 3, 4

COLUMNS = ("t", "x", "y", "theta", "u1", "u2", "h1", "h2", "h3")


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    tol: float = 1e-6
    separatrix_tol: float = SEPARATRIX_TOL
    grid: tuple[int, int, int] = (32, 32, 32)
    samples: int = 201
    fmt: str = "csv"

    def __post_init__(self):
        if not (self.tol > 0 and self.separatrix_tol > 0):
            raise InputError("tolerances must be positive")
        if self.samples < 2:
            raise InputError("--samples must be at least 2")
        if self.fmt not in ("csv", "json", "svg"):
            raise InputError(f"unknown format {self.fmt!r}")


# ---------------------------------------------------------------------------
# serialisation


def _g(v: float) -> str:
    return format(v, ".17g")


def trajectory_rows(traj: Trajectory, n: int) -> list[tuple[float, ...]]:
    """Sample rows ``(t, x, y, theta, u1, u2, h1, h2, h3)``."""
    rows = []
    for t, q, h, u in sample_trajectory(traj, n):
        rows.append((t, q.x, q.y, q.theta, u.u1, u.u2, h.h1, h.h2, h.h3))
    return rows


def write_csv(rows) -> str:
    out = io.StringIO()
    out.write(",".join(COLUMNS) + "\n")
    for r in rows:
        out.write(",".join(_g(float(v)) for v in r) + "\n")
    return out.getvalue()


def read_csv(text: str) -> list[tuple[float, ...]]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or tuple(c.strip() for c in lines[0].split(",")) != COLUMNS:
        raise InputError("expected CSV header " + ",".join(COLUMNS))
    rows = []
    for no, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != len(COLUMNS):
            raise InputError(f"line {no}: expected {len(COLUMNS)} fields, got {len(parts)}")
        try:
            row = tuple(float(p) for p in parts)
        except ValueError as exc:
            raise InputError(f"line {no}: {exc}") from None
        if not all(math.isfinite(v) for v in row):
            raise InputError(f"line {no}: non-finite value")
        rows.append(row)
    if not rows:
        raise InputError("CSV has no samples")
    return rows


def rows_json(rows) -> list[dict]:
    return [dict(zip(COLUMNS, r)) for r in rows]


def render_svg(rows, tick_every: float = 0.5) -> str:
    """Planar path with heading ticks every ``tick_every`` time units."""
    xs = [r[1] for r in rows]
    ys = [-r[2] for r in rows]  # SVG y axis points down
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0)
    if span <= 0.0:
        span = 1.0
    margin = 0.05 * span
    tick = 0.04 * span
    w, h = (x1 - x0) + 2 * margin, (y1 - y0) + 2 * margin
    if x1 - x0 < span:
        pad = (span - (x1 - x0)) / 2
        x0, w = x0 - pad, span + 2 * margin
    if y1 - y0 < span:
        pad = (span - (y1 - y0)) / 2
        y0, h = y0 - pad, span + 2 * margin
    f = lambda v: format(v, ".6g")  # noqa: E731
    stroke = f(span / 300)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{f(x0 - margin)} {f(y0 - margin)} {f(w)} {f(h)}" width="600" height="{f(600 * h / w)}">',
        f'<polyline fill="none" stroke="black" stroke-width="{stroke}" points="'
        + " ".join(f"{f(x)},{f(y)}" for x, y in zip(xs, ys))
        + '"/>',
    ]
    t_end = rows[-1][0]
    ts = [r[0] for r in rows]
    n_ticks = int(math.floor(t_end / tick_every + 1e-9)) + 1 if t_end > 0 else 1
    j = 0
    for i in range(n_ticks):
        target = i * tick_every
        while j + 1 < len(ts) and abs(ts[j + 1] - target) <= abs(ts[j] - target):
            j += 1
        _, x, y, th = rows[j][:4]
        ex, ey = x + tick * math.cos(th), y + tick * math.sin(th)
        out.append(
            f'<line x1="{f(x)}" y1="{f(-y)}" x2="{f(ex)}" y2="{f(-ey)}" '
            f'stroke="gray" stroke-width="{stroke}"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# commands


def _triple(text: str, name: str) -> tuple[float, float, float]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise InputError(f"{name} must be three comma-separated numbers") from None
    if len(vals) != 3 or not all(math.isfinite(v) for v in vals):
        raise InputError(f"{name} must be three finite comma-separated numbers")
    return vals


def _pose(text, name) -> Pose:
    return IDENTITY if text is None else Pose(*_triple(text, name))


def _grid(text: str) -> tuple[int, int, int]:
    try:
        g = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise InputError("--grid must be three integers") from None
    if len(g) != 3 or min(g) < 8:
        raise InputError("--grid needs three counts, each >= 8")
    return g


def _emit(text: str, path) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _traj_output(traj: Trajectory, cfg: RunConfig, extra: dict) -> str:
    rows = trajectory_rows(traj, cfg.samples)
    if cfg.fmt == "csv":
        return write_csv(rows)
    if cfg.fmt == "svg":
        return render_svg(rows)
    doc = dict(extra)
    doc["segments"] = [
        {"kind": s.kind.value, "t_start": s.t_start, "duration": s.duration} for s in traj.segments
    ]
    last = rows[-1]
    doc["endpoint"] = {"x": last[1], "y": last[2], "theta": last[3]}
    doc["samples"] = rows_json(rows)
    return json.dumps(doc, indent=2) + "\n"


def cmd_exp(args, cfg: RunConfig) -> int:
    if args.h0 is None or args.T is None:
        raise InputError("exp needs --h0 and --T")
    h = Covector(*_triple(args.h0, "--h0"))
    if args.renormalize:
        h = project_to_level(h)
    if not (math.isfinite(args.T) and args.T >= 0):
        raise InputError("--T must be finite and >= 0")
    traj = exp_map(h, args.T, _pose(args.q0, "--q0"), separatrix_tol=cfg.separatrix_tol)
    _emit(_traj_output(traj, cfg, {"h0": list(h), "T": args.T}), args.out)
    return EXIT_OK


def cmd_plan(args, cfg: RunConfig) -> int:
    if args.q1 is None:
        raise InputError("plan needs --q1")
    plan = feasible_plan(_pose(args.q0, "--q0"), _pose(args.q1, "--q1"))
    _emit(json.dumps(plan.as_dict()) + "\n", args.out)
    return EXIT_OK


def cmd_shoot(args, cfg: RunConfig) -> int:
    if args.q1 is None:
        raise InputError("shoot needs --q1")
    q0, q1 = _pose(args.q0, "--q0"), _pose(args.q1, "--q1")
    solver = SolverConfig(h3_max=args.h3_max)
    sols = solve_bvp(relative_target(q0, q1), cfg.grid, cfg.tol, solver)
    listing = [s.as_dict() for s in sols]
    if not args.best:
        if cfg.fmt != "json":
            raise InputError("shoot lists solutions as JSON; use --best for csv or svg")
        _emit(json.dumps(listing, indent=2) + "\n", args.out)
        return EXIT_OK
    best = sols[0]
    traj = exp_map(best.start.covector(), best.T, q0, separatrix_tol=cfg.separatrix_tol)
    _emit(_traj_output(traj, cfg, {"solutions": listing}), args.out)
    return EXIT_OK


def cmd_svg(args, cfg: RunConfig) -> int:
    if args.input is None or args.input == "-":
        text = sys.stdin.read()
    else:
        with open(args.input, encoding="utf-8") as fh:
            text = fh.read()
    _emit(render_svg(read_csv(text)), args.out)
    return EXIT_OK


COMMANDS = {"exp": cmd_exp, "plan": cmd_plan, "shoot": cmd_shoot, "svg": cmd_svg}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="halfdisk", description="Time-optimal paths for a forward-only car that can turn in place.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("input", nargs="?", help="trajectory CSV for svg ('-' reads stdin)")
    p.add_argument("--q0", help="start pose x,y,theta (default 0,0,0)")
    p.add_argument("--q1", help="goal pose x,y,theta")
    p.add_argument("--h0", help="initial covector h1,h2,h3 with H = 1")
    p.add_argument("--T", type=float, help="duration")
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--grid", default="32,32,32", help="seed counts n_psi,n_h3,n_T")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--separatrix-tol", type=float, default=SEPARATRIX_TOL)
    p.add_argument("--h3-max", type=float, default=10.0, help="half-width of the h3 seed box")
    p.add_argument("--format", dest="fmt", default=None, choices=("csv", "json", "svg"))
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--renormalize", action="store_true", help="project --h0 onto H = 1")
    p.add_argument("--best", action="store_true", help="shoot: emit the fastest trajectory")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    default_fmt = "json" if args.command in ("plan", "shoot") else "csv"
    try:
        cfg = RunConfig(args.tol, args.separatrix_tol, _grid(args.grid), args.samples, args.fmt or default_fmt)
        return COMMANDS[args.command](args, cfg)
    except NoConvergence as exc:
        msg = f"halfdisk: {exc} (best residual {exc.best_residual:.3e})"
        if exc.fallback is not None:
            msg += f"; feasible plan {json.dumps(exc.fallback.as_dict())}"
        print(msg, file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"halfdisk: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InputError, ContractViolation, ValueError) as exc:
        print(f"halfdisk: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
