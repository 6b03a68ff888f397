"""Command-line front end.

Three subcommands:

* ``solve`` -- run one built-in problem and print the outcome; optionally
  write a per-iteration trace.
* ``bench`` -- run one benchmark table; write the delimited cells, the
  aligned text table, the verdict against the bundled reference counts,
  and a per-problem evaluation-count chart.
* ``plot``  -- run a 2-D problem and write the level-curve grid, the trial
  points, a one-line metadata file, and the rendered contour figure.

All delimited outputs carry a single header line and are byte-identical
across reruns with the same flags.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

import numpy as np

from .bench import (
    METHOD_LABELS,
    METHOD_TITLES,
    METHODS,
    check_against_reference,
    format_table,
    format_verdict,
    run_table,
    write_csv,
    write_text,
)
from .engine import Estimator, SolverConfig, Strategy, solve
from .problems import get_problem

STRATEGIES = {"bisection": Strategy.BISECTION, "p2n": Strategy.PARTITION_2N}
ESTIMATORS = {"local": Estimator.LOCAL_TUNING, "global": Estimator.GLOBAL_ESTIMATE}


@dataclass
class PlotBundle:
    """Level-curve grid plus the trial points of one run."""

    grid: np.ndarray           # (rows*cols, 3) of x1, x2, f
    trials: np.ndarray         # (k, 2)
    problem_id: int
    method: str
    r: float
    eps: float
    evaluations: int


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--problem", type=int, required=True, help="problem id, 1..20")
    parser.add_argument("--n", type=int, default=None,
                        help="dimension for problems 15 and 16")
    parser.add_argument("--strategy", choices=sorted(STRATEGIES), default="bisection")
    parser.add_argument("--estimator", choices=sorted(ESTIMATORS), default="local")
    parser.add_argument("--r", type=float, default=1.1)
    parser.add_argument("--C", type=float, default=10.0)
    parser.add_argument("--xi", type=float, default=1e-6)
    parser.add_argument("--eps", type=float, default=0.01)
    parser.add_argument("--max-evals", type=int, default=1_000_000)


def _build_config(args) -> SolverConfig:
    return SolverConfig(
        r=args.r, C=args.C, xi=args.xi, eps=args.eps,
        strategy=STRATEGIES[args.strategy],
        estimator=ESTIMATORS[args.estimator],
        max_evals=args.max_evals,
    )


def _load_problem(parser: argparse.ArgumentParser, args):
    try:
        return get_problem(args.problem, args.n)
    except KeyError:
        parser.error(f"--problem {args.problem} is not a known problem id (1..20)")
    except ValueError as exc:
        parser.error(f"--problem/--n: {exc}")


def cmd_solve(parser: argparse.ArgumentParser, args) -> int:
    problem = _load_problem(parser, args)
    config = _build_config(args)

    trace_rows = []

    def trace(event):
        trace_rows.append(event)

    result = solve(problem, config, observer=trace if args.trace else None)

    point = " ".join(repr(float(v)) for v in result.best_point)
    print(f"problem        {problem.id} (n={problem.dimension}, {problem.name})")
    print(f"method         {args.estimator} + {args.strategy}")
    print(f"best point     {point}")
    print(f"best value     {result.best_value!r}")
    print(f"evaluations    {result.evaluations}")
    print(f"iterations     {result.iterations}")
    print(f"status         {result.status.value}")

    if args.trace:
        n = problem.dimension
        s = len(trace_rows[0].new_values) if trace_rows else 0
        with open(args.trace, "w", newline="") as fh:
            coords = ",".join(f"x{i + 1}" for i in range(n))
            values = ",".join(f"f{j + 1}" for j in range(s))
            fh.write(f"l,t,{coords},{values},z_star,mu,dmax\n")
            for ev in trace_rows:
                xs = ",".join(repr(float(v)) for v in ev.x_new)
                fs = ",".join(repr(v) for v in ev.new_values)
                fh.write(f"{ev.l},{ev.t},{xs},{fs},{ev.z_star!r},{ev.mu!r},{ev.dmax!r}\n")
        print(f"trace          {args.trace} ({len(trace_rows)} iterations)")
    return 0


def _render_bench_figure(report, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    labels = [METHOD_LABELS[m] for m in METHODS]
    if report.table_id == "T5":
        keys = sorted({(c.r, c.eps) for c in report.cells})
        names = [f"r={r}\neps={eps}" for r, eps in keys]
    else:
        keys = sorted({c.problem_id for c in report.cells})
        names = [str(k) for k in keys]
    x = np.arange(len(keys))
    bar = 0.8 / len(labels)
    fig, ax = plt.subplots(figsize=(max(6, 0.55 * len(keys) * len(labels)), 4))
    for i, lab in enumerate(labels):
        counts = [report.cell(k, lab).evaluations for k in keys]
        ax.bar(x + (i - 1.5) * bar, counts, bar, label=METHOD_TITLES[lab])
    ax.set_yscale("log")
    ax.set_xticks(x)
    ax.set_xticklabels(names, fontsize=8)
    ax.set_xlabel("r / eps" if report.table_id == "T5" else "problem")
    ax.set_ylabel("evaluations")
    ax.set_title(f"{report.table_id}: evaluations to stopping rule")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def cmd_bench(parser: argparse.ArgumentParser, args) -> int:
    os.makedirs(args.out, exist_ok=True)
    report = run_table(args.table)
    verdict = check_against_reference(report)

    base = os.path.join(args.out, args.table)
    write_csv(report, base + "_cells.csv")
    write_text(report, base + "_table.txt")
    with open(base + "_verdict.txt", "w") as fh:
        fh.write(format_verdict(verdict))
    _render_bench_figure(report, base + "_evaluations.png")

    print(format_table(report), end="")
    print(format_verdict(verdict), end="")
    print(f"wrote {base}_cells.csv, _table.txt, _verdict.txt, _evaluations.png")
    if args.strict and not verdict.passed:
        return 1
    return 0


def _render_contour_figure(bundle: PlotBundle, rows: int, cols: int, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    x1 = bundle.grid[:, 0].reshape(rows, cols)
    x2 = bundle.grid[:, 1].reshape(rows, cols)
    f = bundle.grid[:, 2].reshape(rows, cols)
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.contour(x1, x2, f, levels=25, linewidths=0.6, cmap="viridis")
    ax.plot(bundle.trials[:, 0], bundle.trials[:, 1], "k.", markersize=2.5)
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_title(
        f"problem {bundle.problem_id}, {bundle.method}, r={bundle.r}, "
        f"eps={bundle.eps}: {bundle.evaluations} trials"
    )
    ax.set_aspect("equal", adjustable="box")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def cmd_plot(parser: argparse.ArgumentParser, args) -> int:
    problem = _load_problem(parser, args)
    if problem.dimension != 2:
        parser.error(f"--problem {args.problem} is {problem.dimension}-D; "
                     f"plot handles 2-D problems only")
    config = _build_config(args)
    result = solve(problem, config)

    res = args.grid
    a, b = problem.domain.a, problem.domain.b
    x1 = np.linspace(a[0], b[0], res)
    x2 = np.linspace(a[1], b[1], res)
    mesh = np.stack(np.meshgrid(x1, x2, indexing="ij"), axis=-1)
    values = problem.objective(mesh)
    grid = np.column_stack(
        [mesh[..., 0].ravel(), mesh[..., 1].ravel(), np.asarray(values).ravel()]
    )
    trials = np.array([p for p, _ in result.trials])
    method = f"{args.estimator}_{args.strategy}"
    bundle = PlotBundle(
        grid=grid,
        trials=trials,
        problem_id=problem.id,
        method=method,
        r=args.r,
        eps=args.eps,
        evaluations=result.evaluations,
    )

    os.makedirs(args.out, exist_ok=True)
    base = os.path.join(args.out, f"problem{problem.id:02d}_{method}")
    with open(base + "_grid.csv", "w", newline="") as fh:
        fh.write("x1,x2,f\n")
        for row in bundle.grid:
            fh.write(f"{float(row[0])!r},{float(row[1])!r},{float(row[2])!r}\n")
    with open(base + "_trials.csv", "w", newline="") as fh:
        fh.write("x1,x2\n")
        for p in bundle.trials:
            fh.write(f"{float(p[0])!r},{float(p[1])!r}\n")
    with open(base + "_meta.csv", "w", newline="") as fh:
        fh.write("problem,method,r,eps,evaluations\n")
        fh.write(f"{problem.id},{method},{args.r},{args.eps},{result.evaluations}\n")
    _render_contour_figure(bundle, res, res, base + "_contour.png")

    print(f"evaluations    {result.evaluations}")
    print(f"best value     {result.best_value!r}")
    print(f"wrote {base}_grid.csv, _trials.csv, _meta.csv, _contour.png")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diagopt",
        description="Deterministic Lipschitz global optimization over boxes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run one problem and print the outcome")
    _add_solver_flags(p_solve)
    p_solve.add_argument("--trace", default=None,
                         help="write a per-iteration trace CSV to this path")

    p_bench = sub.add_parser("bench", help="run a benchmark table and write reports")
    p_bench.add_argument("--table", choices=("T2", "T3", "T4", "T5"), required=True)
    p_bench.add_argument("--out", default="./reports", help="output directory")
    p_bench.add_argument("--strict", action="store_true",
                         help="exit nonzero if the verdict fails")

    p_plot = sub.add_parser("plot", help="level curves + trial points for a 2-D problem")
    _add_solver_flags(p_plot)
    p_plot.add_argument("--grid", type=int, default=201,
                        help="grid resolution per axis (default %(default)s)")
    p_plot.add_argument("--out", default=".", help="output directory")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"solve": cmd_solve, "bench": cmd_bench, "plot": cmd_plot}
    try:
        return handlers[args.command](parser, args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
