"""Brute-force reference optima for the benchmark problems.

Independent of the solver: a dense grid sweep (401 points per axis,
chunked along the first axis so 3-D grids stay in memory) locates every
candidate basin, and cyclic coordinate descent with golden-section line
searches refines each candidate until the per-axis bracket drops below
1e-10 of the edge length.  Refined points are kept when they tie the best
value found and deduplicated by distance, so problems with several global
minimizers (Shubert has 18) keep them all.

Run ``python -m diagopt.oracle --out src/diagopt/data/reference_optima.txt``
to regenerate the shipped fixture.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .geometry import DiagonalBox
from .problems import domain_for, raw_objective

GRID_POINTS = 401
INVPHI = (math.sqrt(5.0) - 1.0) / 2.0

# The (id, n) pairs the benchmark tables need.
FIXTURE_INSTANCES = (
    [(pid, 2) for pid in range(1, 15)]
    + [(15, 2), (15, 3), (16, 2), (16, 3)]
    + [(pid, 3) for pid in range(17, 21)]
)


def _axis_grids(domain: DiagonalBox, points: int) -> list[np.ndarray]:
    return [np.linspace(lo, hi, points) for lo, hi in zip(domain.a, domain.b)]


def _scan_chunks(func, axes):
    """Yield (points, values) over the full grid, chunked on axis 0."""
    tail = np.stack(np.meshgrid(*axes[1:], indexing="ij"), axis=-1).reshape(-1, len(axes) - 1)
    for x0 in axes[0]:
        points = np.empty((tail.shape[0], len(axes)))
        points[:, 0] = x0
        points[:, 1:] = tail
        yield points, func(points)


MAX_CANDIDATES = 50_000
MAX_SEEDS = 400


def grid_candidates(func, domain: DiagonalBox, points: int = GRID_POINTS):
    """Low points of the grid sweep.

    The margin below which points qualify is 2% of the observed range so
    that every basin tied for the minimum keeps a candidate even when the
    grid samples it off-center.  If the margin catches a flood (flat
    valleys), only the lowest values are kept; tied basins survive the cut
    because they are the lowest by definition.
    """
    axes = _axis_grids(domain, points)
    f_min, f_max = math.inf, -math.inf
    for _, values in _scan_chunks(func, axes):
        f_min = min(f_min, float(values.min()))
        f_max = max(f_max, float(values.max()))
    threshold = f_min + max(1e-7, 0.02 * (f_max - f_min))

    kept_points, kept_values = [], []
    for pts, values in _scan_chunks(func, axes):
        mask = values <= threshold
        if np.any(mask):
            kept_points.append(pts[mask])
            kept_values.append(values[mask])
    candidates = np.concatenate(kept_points)
    candidate_values = np.concatenate(kept_values)
    if candidates.shape[0] > MAX_CANDIDATES:
        lowest = np.argpartition(candidate_values, MAX_CANDIDATES)[:MAX_CANDIDATES]
        candidates = candidates[lowest]
        candidate_values = candidate_values[lowest]
    return candidates, candidate_values


def cluster_representatives(points: np.ndarray, values: np.ndarray, radius: float) -> np.ndarray:
    """Greedy clustering by distance, best value first; one seed per basin."""
    order = np.argsort(values, kind="stable")
    reps = np.empty((MAX_SEEDS, points.shape[1]))
    count = 0
    for idx in order:
        p = points[idx]
        if count == 0 or np.min(np.linalg.norm(reps[:count] - p, axis=1)) > radius:
            reps[count] = p
            count += 1
            if count >= MAX_SEEDS:
                break
    return reps[:count].copy()


def _golden_line_min(func_1d, lo: float, hi: float, tol: float) -> float:
    """Golden-section minimum of func_1d on [lo, hi] to bracket width tol."""
    c = hi - INVPHI * (hi - lo)
    d = lo + INVPHI * (hi - lo)
    fc, fd = func_1d(c), func_1d(d)
    while hi - lo > tol:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - INVPHI * (hi - lo)
            fc = func_1d(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + INVPHI * (hi - lo)
            fd = func_1d(d)
    return (lo + hi) / 2


def coordinate_descent(func, domain: DiagonalBox, x0: np.ndarray, rel_tol: float = 1e-10,
                       max_sweeps: int = 600) -> np.ndarray:
    """Cyclic per-axis golden-section refinement with an adaptive bracket.

    The bracket shrinks only when a full sweep stops moving the point, so
    curved valleys (Rosenbrock) are followed instead of stalling.
    """
    edges = domain.b - domain.a
    x = np.clip(np.asarray(x0, dtype=np.float64), domain.a, domain.b)
    h = edges / (GRID_POINTS - 1)
    floor = rel_tol * edges
    for _ in range(max_sweeps):
        moved = 0.0
        for i in range(x.size):
            lo = max(domain.a[i], x[i] - h[i])
            hi = min(domain.b[i], x[i] + h[i])

            def along(v, i=i):
                trial = x.copy()
                trial[i] = v
                return float(func(trial))

            best = _golden_line_min(along, lo, hi, tol=max(1e-3 * h[i], floor[i] * 1e-3))
            moved = max(moved, abs(best - x[i]) / h[i])
            x[i] = best
        if moved < 0.25:
            h = h / 4
        if np.all(h <= floor):
            break
    return x


def reference_records(pid: int, n: int, points: int = GRID_POINTS):
    """(f_star, minimizers) for one problem instance, from scratch."""
    func = raw_objective(pid)
    domain = domain_for(pid, n)
    edges = domain.b - domain.a
    candidates, values = grid_candidates(func, domain, points)
    radius = 3.5 * float(np.max(edges)) / (points - 1) * math.sqrt(n)
    seeds = cluster_representatives(candidates, values, radius)

    refined = np.array([coordinate_descent(func, domain, seed) for seed in seeds])
    refined_values = np.array([float(func(p)) for p in refined])
    f_star = float(refined_values.min())

    tie_cut = f_star + max(1e-9, 1e-9 * abs(f_star))
    order = np.argsort(refined_values, kind="stable")
    minimizers: list[np.ndarray] = []
    dedupe = 1e-5 * float(np.linalg.norm(edges))
    for idx in order:
        if refined_values[idx] > tie_cut:
            break
        p = refined[idx]
        if not minimizers or np.min(np.linalg.norm(np.array(minimizers) - p, axis=1)) > dedupe:
            minimizers.append(p)
    return f_star, minimizers


def write_fixture(path: str, points: int = GRID_POINTS, instances=FIXTURE_INSTANCES,
                  log=sys.stderr) -> None:
    lines = [
        "# Reference optima for the benchmark problems.",
        "# Produced by diagopt.oracle: dense grid sweep "
        f"({points} points per axis) + coordinate-descent refinement.",
        "# Columns: problem_id  n  f_star  x_1 .. x_n   (one minimizer per line)",
    ]
    for pid, n in instances:
        f_star, minimizers = reference_records(pid, n, points)
        print(f"problem {pid} n={n}: f*={f_star!r} with {len(minimizers)} minimizer(s)",
              file=log)
        for p in minimizers:
            coords = " ".join(repr(float(v)) for v in p)
            lines.append(f"{pid} {n} {f_star!r} {coords}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Regenerate the reference-optima fixture.")
    parser.add_argument("--out", required=True, help="output path for the fixture file")
    parser.add_argument("--points", type=int, default=GRID_POINTS,
                        help="grid points per axis (default %(default)s)")
    args = parser.parse_args(argv)
    write_fixture(args.out, points=args.points)
    return 0


if __name__ == "__main__":
    sys.exit(main())
