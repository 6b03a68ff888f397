"""Benchmark grids over the four method combinations, report writers, and
the verdict that compares a finished grid against the bundled reference
evaluation counts.

Four tables are built in:

* T2 -- all sixteen 2-D problems, r=1.1, C=10, eps=0.01
* T3 -- the same grid at r=1.3
* T4 -- the six 3-D problems, r=1.2, C=100, eps=0.02
* T5 -- problem 7 across r in {1.1, 1.3} and eps in {0.01, 0.001, 0.0001}

Every cell is one deterministic solver run; rerunning a table reproduces
it byte for byte.
"""

from __future__ import annotations

import io
import time
from dataclasses import dataclass

import numpy as np

from .engine import Estimator, SolverConfig, Strategy, solve
from .problems import get_problem

DEFAULT_XI = 1e-6
DEFAULT_MAX_EVALS = 1_000_000

# Column order used everywhere: global estimate first, local tuning second,
# each with the 2^n split before bisection.
METHODS = (
    (Estimator.GLOBAL_ESTIMATE, Strategy.PARTITION_2N),
    (Estimator.GLOBAL_ESTIMATE, Strategy.BISECTION),
    (Estimator.LOCAL_TUNING, Strategy.PARTITION_2N),
    (Estimator.LOCAL_TUNING, Strategy.BISECTION),
)

METHOD_LABELS = {
    (Estimator.GLOBAL_ESTIMATE, Strategy.PARTITION_2N): "global_p2n",
    (Estimator.GLOBAL_ESTIMATE, Strategy.BISECTION): "global_bisection",
    (Estimator.LOCAL_TUNING, Strategy.PARTITION_2N): "local_p2n",
    (Estimator.LOCAL_TUNING, Strategy.BISECTION): "local_bisection",
}

METHOD_TITLES = {
    "global_p2n": "Global / 2^n",
    "global_bisection": "Global / Bisect",
    "local_p2n": "Local / 2^n",
    "local_bisection": "Local / Bisect",
}

TWO_D_PROBLEMS = tuple((pid, 2) for pid in range(1, 17))
THREE_D_PROBLEMS = tuple((pid, 3) for pid in range(15, 21))

TABLES = ("T2", "T3", "T4", "T5")

# Reference evaluation counts the verdict compares against, in METHODS
# column order.
REFERENCE_COUNTS = {
    "T2": {
        1: (12412, 8950, 4742, 3508),
        2: (8037, 2670, 2947, 1354),
        3: (19427, 20392, 14832, 14244),
        4: (4687, 2762, 1332, 998),
        5: (4187, 2818, 807, 602),
        6: (20522, 17732, 14572, 10924),
        7: (6837, 4766, 5532, 3936),
        8: (4057, 3922, 2822, 3372),
        9: (16187, 16446, 10307, 7328),
        10: (6267, 4384, 1797, 1286),
        11: (312, 256, 272, 146),
        12: (292, 200, 167, 96),
        13: (1827, 2002, 282, 238),
        14: (1127, 96, 592, 186),
        15: (4857, 2736, 2237, 1336),
        16: (1627, 532, 492, 118),
    },
    "T3": {
        1: (13987, 9874, 7012, 5620),
        2: (9862, 4774, 3357, 2072),
        3: (20057, 21608, 16802, 16754),
        4: (5812, 3728, 2332, 1190),
        5: (4817, 3180, 1402, 650),
        6: (21922, 22424, 17812, 12622),
        7: (7267, 7374, 6422, 5128),
        8: (5467, 4504, 3717, 3938),
        9: (16752, 17378, 10852, 8250),
        10: (8852, 6820, 3432, 1858),
        11: (417, 324, 362, 174),
        12: (347, 232, 177, 114),
        13: (2102, 2306, 307, 284),
        14: (1297, 800, 747, 360),
        15: (7167, 3880, 3137, 1740),
        16: (1852, 778, 612, 162),
    },
    "T4": {
        15: (173513, 43780, 98412, 12060),
        16: (26938, 3732, 12625, 1032),
        17: (6879, 1810, 4825, 1020),
        18: (83475, 27760, 15862, 3470),
        19: (8556, 2040, 7568, 1358),
        20: (122436, 74254, 59646, 21756),
    },
    # keyed by (r, eps)
    "T5": {
        (1.1, 0.01): (6837, 4766, 5532, 3936),
        (1.1, 0.001): (10742, 11664, 7012, 4662),
        (1.1, 0.0001): (35697, 32218, 7367, 4694),
        (1.3, 0.01): (7267, 7374, 6422, 5128),
        (1.3, 0.001): (23712, 17322, 8962, 8270),
        (1.3, 0.0001): (54397, 42584, 11862, 8582),
    },
}

# The one benchmark run allowed to miss the optimum: problem 14 with the
# global estimate and bisection at r=1.1 stops before finding it.
LOCATION_EXCEPTIONS = {("T2", 14, "global_bisection")}

TABLE_SETTINGS = {
    "T2": dict(problems=TWO_D_PROBLEMS, r=1.1, C=10.0, eps=0.01),
    "T3": dict(problems=TWO_D_PROBLEMS, r=1.3, C=10.0, eps=0.01),
    "T4": dict(problems=THREE_D_PROBLEMS, r=1.2, C=100.0, eps=0.02),
}
T5_PROBLEM = 7
T5_R_VALUES = (1.1, 1.3)
T5_EPS_VALUES = (0.01, 0.001, 0.0001)


@dataclass
class RunRecord:
    problem_id: int
    n: int
    strategy: Strategy
    estimator: Estimator
    r: float
    C: float
    eps: float
    evaluations: int
    iterations: int
    best_value: float
    located: bool
    wall_time: float

    @property
    def method(self) -> str:
        return METHOD_LABELS[(self.estimator, self.strategy)]


@dataclass
class TableReport:
    table_id: str
    cells: list[RunRecord]
    averages: dict[str, float]

    def cell(self, key, method: str) -> RunRecord:
        """Cell lookup; ``key`` is a problem id for T2-T4, (r, eps) for T5."""
        for record in self.cells:
            if record.method != method:
                continue
            if self.table_id == "T5":
                if (record.r, record.eps) == key:
                    return record
            elif record.problem_id == key:
                return record
        raise KeyError((key, method))


@dataclass
class Verdict:
    passed: bool
    failures: list[str]
    warnings: list[str]


def run_cell(problem_id: int, n: int, strategy: Strategy, estimator: Estimator,
             r: float, C: float, eps: float,
             xi: float = DEFAULT_XI, max_evals: int = DEFAULT_MAX_EVALS) -> RunRecord:
    """One solver run plus its location check against the reference minimizers."""
    problem = get_problem(problem_id, n)
    config = SolverConfig(r=r, C=C, xi=xi, eps=eps, strategy=strategy,
                          estimator=estimator, max_evals=max_evals)
    start = time.perf_counter()
    result = solve(problem, config)
    wall = time.perf_counter() - start

    if result.evaluations != len(result.trials):
        raise AssertionError("evaluation counter disagrees with the trial log")
    if result.best_value != min(v for _, v in result.trials):
        raise AssertionError("best value disagrees with the trial log")

    radius = 2 * eps * float(np.linalg.norm(problem.domain.b - problem.domain.a))
    located = any(
        float(np.linalg.norm(result.best_point - m)) <= radius for m in problem.minimizers
    )
    return RunRecord(
        problem_id=problem_id,
        n=n,
        strategy=strategy,
        estimator=estimator,
        r=r,
        C=C,
        eps=eps,
        evaluations=result.evaluations,
        iterations=result.iterations,
        best_value=result.best_value,
        located=located,
        wall_time=wall,
    )


def run_table(table_id: str) -> TableReport:
    """All cells of one benchmark table, in row-major method order."""
    if table_id not in TABLES:
        raise KeyError(f"unknown table {table_id!r}; expected one of {TABLES}")
    cells: list[RunRecord] = []
    if table_id == "T5":
        for r in T5_R_VALUES:
            for eps in T5_EPS_VALUES:
                for estimator, strategy in METHODS:
                    cells.append(run_cell(T5_PROBLEM, 2, strategy, estimator,
                                          r=r, C=10.0, eps=eps))
    else:
        settings = TABLE_SETTINGS[table_id]
        for pid, n in settings["problems"]:
            for estimator, strategy in METHODS:
                cells.append(run_cell(pid, n, strategy, estimator,
                                      r=settings["r"], C=settings["C"],
                                      eps=settings["eps"]))
    averages = {}
    for estimator, strategy in METHODS:
        label = METHOD_LABELS[(estimator, strategy)]
        counts = [c.evaluations for c in cells if c.method == label]
        averages[label] = sum(counts) / len(counts)
    return TableReport(table_id=table_id, cells=cells, averages=averages)


def _reference_averages(table_id: str) -> dict[str, float]:
    rows = REFERENCE_COUNTS[table_id]
    labels = [METHOD_LABELS[m] for m in METHODS]
    return {
        label: sum(row[i] for row in rows.values()) / len(rows)
        for i, label in enumerate(labels)
    }


def check_against_reference(report: TableReport) -> Verdict:
    """Compare a finished table against the bundled reference counts.

    Hard failures: a cell off by more than a factor of two, a different
    ordering of the per-method averages, counts that drop as eps tightens
    (T5), or a missed optimum outside the documented exception.  Cells
    where local tuning is slower than the global estimate are reported as
    warnings only; single cells are tie-break sensitive.
    """
    failures: list[str] = []
    warnings: list[str] = []
    reference = REFERENCE_COUNTS[report.table_id]
    labels = [METHOD_LABELS[m] for m in METHODS]

    for key, expected_row in reference.items():
        for label, expected in zip(labels, expected_row):
            got = report.cell(key, label).evaluations
            if not expected / 2 <= got <= expected * 2:
                failures.append(
                    f"{report.table_id} {key} {label}: {got} evaluations, "
                    f"reference {expected} (outside x/2..x2)"
                )

    ours = sorted(labels, key=lambda lab: report.averages[lab])
    ref_avg = _reference_averages(report.table_id)
    refs = sorted(labels, key=lambda lab: ref_avg[lab])
    if ours != refs:
        failures.append(
            f"{report.table_id} average ordering {ours} differs from reference {refs}"
        )

    if report.table_id == "T5":
        for r in T5_R_VALUES:
            for label in labels:
                counts = [report.cell((r, eps), label).evaluations for eps in T5_EPS_VALUES]
                if any(b < a for a, b in zip(counts, counts[1:])):
                    failures.append(
                        f"T5 r={r} {label}: counts {counts} not non-decreasing "
                        f"as eps tightens"
                    )

    for record in report.cells:
        if record.located:
            continue
        key = (report.table_id, record.problem_id, record.method)
        if key in LOCATION_EXCEPTIONS:
            warnings.append(
                f"{report.table_id} problem {record.problem_id} {record.method}: "
                f"optimum not located (documented exception)"
            )
        else:
            failures.append(
                f"{report.table_id} problem {record.problem_id} {record.method} "
                f"r={record.r} eps={record.eps}: optimum not located"
            )

    for key in reference:
        for gl, lc in (("global_p2n", "local_p2n"), ("global_bisection", "local_bisection")):
            g = report.cell(key, gl).evaluations
            l = report.cell(key, lc).evaluations
            if l > g:
                warnings.append(
                    f"{report.table_id} {key}: local tuning ({l}) slower than "
                    f"global estimate ({g}) for {gl.split('_')[1]}"
                )

    return Verdict(passed=not failures, failures=failures, warnings=warnings)


def write_csv(report: TableReport, path: str) -> None:
    """Delimited cells, one line per run."""
    with open(path, "w", newline="") as fh:
        fh.write("problem,method,r,C,eps,evaluations,located,best_value\n")
        for c in report.cells:
            fh.write(
                f"{c.problem_id},{c.method},{c.r},{c.C},{c.eps},"
                f"{c.evaluations},{str(c.located).lower()},{c.best_value!r}\n"
            )


def format_table(report: TableReport) -> str:
    """Aligned text table: one row per problem (or per r/eps pair for T5)."""
    labels = [METHOD_LABELS[m] for m in METHODS]
    width = 16
    if report.table_id == "T5":
        keys = [(r, eps) for r in T5_R_VALUES for eps in T5_EPS_VALUES]
        key_head = "r     eps     "
        fmt_key = lambda key: f"{key[0]:<6}{key[1]:<8}"
    else:
        keys = sorted({c.problem_id for c in report.cells})
        key_head = "Problem "
        fmt_key = lambda key: f"{key:<8}"
    out = io.StringIO()
    out.write(key_head + "".join(f"{METHOD_TITLES[lab]:>{width}}" for lab in labels) + "\n")
    for key in keys:
        row = [report.cell(key, lab).evaluations for lab in labels]
        out.write(fmt_key(key) + "".join(f"{v:>{width}}" for v in row) + "\n")
    out.write("Average".ljust(len(key_head))
              + "".join(f"{report.averages[lab]:>{width}.2f}" for lab in labels) + "\n")
    return out.getvalue()


def write_text(report: TableReport, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(format_table(report))


def format_verdict(verdict: Verdict) -> str:
    lines = ["PASS" if verdict.passed else "FAIL"]
    for f in verdict.failures:
        lines.append(f"failure: {f}")
    for w in verdict.warnings:
        lines.append(f"warning: {w}")
    return "\n".join(lines) + "\n"
