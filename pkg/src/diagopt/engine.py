"""The diagonal search state machine.

One iteration: recompute every box's characteristic from the current
Lipschitz estimates, pick the box with the largest characteristic, place a
trial point on its main diagonal, subdivide it with the configured
strategy, evaluate the objective at the vertices that subdivision created,
and give all new boxes a shared slope estimate.  Two estimator modes share
the loop: per-box local tuning balances each box's own observed slope
against a globally scaled term, while the global-estimate mode scores all
boxes with the single running maximum slope.

Characteristics are recomputed for the whole partition every iteration
(they depend on the iteration counter and on the global maxima mu and
dmax), so the interval population lives in flat numpy arrays and the
per-box operations below are also exposed as scalar functions for direct
use and testing.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .geometry import DiagonalBox, bisect, diag_norm, partition_2n, place_on_diagonal

_BOUND_SLACK = 1e-9  # relative slack for the floating-point bound checks


class Strategy(enum.Enum):
    BISECTION = "bisection"
    PARTITION_2N = "p2n"


class Estimator(enum.Enum):
    LOCAL_TUNING = "local"
    GLOBAL_ESTIMATE = "global"


class SolveStatus(enum.Enum):
    TOLERANCE_REACHED = "tolerance"
    BUDGET_EXHAUSTED = "budget"


class ObjectiveEvaluationError(RuntimeError):
    """The objective returned a non-finite value; the run is aborted."""


class KBoundViolation(AssertionError):
    """A per-box Lipschitz estimate escaped its theoretical bounds."""


@dataclass
class SolverConfig:
    r: float = 1.1               # reliability multiplier, > 1
    C: float = 10.0              # iteration-decaying inflation, > 0
    xi: float = 1e-6             # floor keeping estimates positive on flat data
    eps: float = 0.01            # stop when best diagonal <= eps * domain diagonal
    strategy: Strategy = Strategy.BISECTION
    estimator: Estimator = Estimator.LOCAL_TUNING
    max_evals: int = 1_000_000   # safety budget (eps=0 never stops otherwise)

    def __post_init__(self):
        if not self.r > 1:
            raise ValueError(f"r must be > 1, got {self.r}")
        if not self.C > 0:
            raise ValueError(f"C must be > 0, got {self.C}")
        if not self.xi > 0:
            raise ValueError(f"xi must be > 0, got {self.xi}")
        if self.eps < 0:
            raise ValueError(f"eps must be >= 0, got {self.eps}")
        if self.max_evals < 2:
            raise ValueError(f"max_evals must be >= 2, got {self.max_evals}")


@dataclass
class Interval:
    """A partition box plus the data the scoring needs.

    ``lam`` is the slope estimate assigned when the box was created; it
    never changes afterwards and is always >= the box's own diagonal slope
    |f_a - f_b| / diag.
    """

    box: DiagonalBox
    f_a: float
    f_b: float
    lam: float
    created_at: int


@dataclass
class TraceEvent:
    """Per-iteration observer payload."""

    l: int                      # iteration counter after the step
    t: int                      # index of the subdivided interval
    selected: Interval
    x_new: np.ndarray           # the placed diagonal point
    new_points: list[np.ndarray]
    new_values: list[float]
    z_star: float
    mu: float
    dmax: float


@dataclass
class SolverResult:
    best_point: np.ndarray
    best_value: float
    evaluations: int
    iterations: int
    status: SolveStatus
    trials: list[tuple[np.ndarray, float]]


class SolverState:
    """Evolving partition plus counters; confined to one logical thread."""

    _INITIAL_CAPACITY = 256

    def __init__(self, domain: DiagonalBox, n: int):
        cap = self._INITIAL_CAPACITY
        self._a = np.empty((cap, n))
        self._b = np.empty((cap, n))
        self._fa = np.empty(cap)
        self._fb = np.empty(cap)
        self._lam = np.empty(cap)
        self._diag = np.empty(cap)
        self._created = np.empty(cap, dtype=np.int64)
        self.domain = DiagonalBox(domain.a.copy(), domain.b.copy())
        self.domain_diag = diag_norm(domain)
        self.m = 0
        self.l = 0
        self.k = 0
        self.mu = 0.0
        self.dmax = 0.0
        self.z_star = math.inf
        self.x_star: np.ndarray | None = None
        self.creation_counter = 1
        self.trial_points: list[np.ndarray] = []
        self.trial_values: list[float] = []

    def _grow(self, needed: int) -> None:
        cap = self._a.shape[0]
        if self.m + needed <= cap:
            return
        new_cap = max(cap * 2, self.m + needed)
        for name in ("_a", "_b", "_fa", "_fb", "_lam", "_diag", "_created"):
            old = getattr(self, name)
            fresh = np.empty((new_cap,) + old.shape[1:], dtype=old.dtype)
            fresh[: self.m] = old[: self.m]
            setattr(self, name, fresh)

    def _write(self, slot: int, box: DiagonalBox, f_a: float, f_b: float, lam: float) -> None:
        self._a[slot] = box.a
        self._b[slot] = box.b
        self._fa[slot] = f_a
        self._fb[slot] = f_b
        self._lam[slot] = lam
        self._diag[slot] = diag_norm(box)
        self._created[slot] = self.creation_counter
        self.creation_counter += 1

    def interval(self, i: int) -> Interval:
        if not 0 <= i < self.m:
            raise IndexError(i)
        return Interval(
            box=DiagonalBox(self._a[i].copy(), self._b[i].copy()),
            f_a=float(self._fa[i]),
            f_b=float(self._fb[i]),
            lam=float(self._lam[i]),
            created_at=int(self._created[i]),
        )

    @property
    def intervals(self) -> list[Interval]:
        return [self.interval(i) for i in range(self.m)]

    @property
    def trials(self) -> list[tuple[np.ndarray, float]]:
        return [(p.copy(), v) for p, v in zip(self.trial_points, self.trial_values)]

    def _record_trial(self, x: np.ndarray, value: float) -> None:
        if not math.isfinite(value):
            raise ObjectiveEvaluationError(f"objective returned {value} at {x}")
        self.trial_points.append(x.copy())
        self.trial_values.append(value)
        if value < self.z_star:
            self.z_star = value
            self.x_star = x.copy()


def _evaluate(problem, x: np.ndarray) -> float:
    return float(problem.objective(x))


def init_state(problem, config: SolverConfig) -> SolverState:
    """First two trials at the domain corners; one interval covering it all."""
    domain: DiagonalBox = problem.domain
    state = SolverState(domain, domain.dimension)
    f_a = _evaluate(problem, domain.a)
    f_b = _evaluate(problem, domain.b)
    state._record_trial(domain.a, f_a)
    state._record_trial(domain.b, f_b)
    lam = abs(f_a - f_b) / state.domain_diag
    state._write(0, domain, f_a, f_b, lam)
    state.m = 1
    state.l = 1
    state.k = 2
    state.mu = lam
    state.dmax = state.domain_diag
    return state


def gamma(interval: Interval, mu: float, dmax: float) -> float:
    """Globally scaled slope term: mu weighted by relative diagonal size."""
    return mu * diag_norm(interval.box) / dmax


def k_estimate(interval: Interval, state: SolverState, config: SolverConfig) -> float:
    """Inflated Lipschitz estimate for one interval at the current iteration."""
    factor = config.r + config.C / state.l
    if config.estimator is Estimator.GLOBAL_ESTIMATE:
        return factor * max(state.mu, config.xi)
    g = gamma(interval, state.mu, state.dmax)
    return factor * max(interval.lam, g, config.xi)


def characteristic(interval: Interval, K: float) -> float:
    """Merit score: large when the interval is big or its end values low."""
    return 0.5 * (K * diag_norm(interval.box) - (interval.f_a + interval.f_b))


def khat(state: SolverState, config: SolverConfig) -> float:
    """Global estimate used for trial-point placement."""
    return (4 + config.C / state.l) * max(state.mu, config.xi)


def lambda_new(parent: Interval, children: Sequence[tuple[DiagonalBox, float, float]]) -> float:
    """Shared slope estimate for all boxes created by one subdivision."""
    slope = abs(parent.f_a - parent.f_b) / diag_norm(parent.box)
    for box, f_a, f_b in children:
        slope = max(slope, abs(f_a - f_b) / diag_norm(box))
    return slope


def _k_all(state: SolverState, config: SolverConfig) -> np.ndarray:
    """Vectorized per-interval estimates; matches k_estimate bit for bit."""
    m = state.m
    factor = config.r + config.C / state.l
    if config.estimator is Estimator.GLOBAL_ESTIMATE:
        return np.full(m, factor * max(state.mu, config.xi))
    diag = state._diag[:m]
    gam = state.mu * diag / state.dmax
    return factor * np.maximum(np.maximum(state._lam[:m], gam), config.xi)


def _check_k_bounds(K: np.ndarray, state: SolverState, config: SolverConfig) -> None:
    lower = config.r * config.xi
    upper = (config.r + config.C) * max(state.mu, config.xi)
    k_min = float(K.min())
    k_max = float(K.max())
    if not (k_min > lower * (1 - _BOUND_SLACK) and k_min > 0):
        raise KBoundViolation(f"K={k_min} not above r*xi={lower}")
    if k_max > upper * (1 + _BOUND_SLACK):
        raise KBoundViolation(f"K={k_max} above (r+C)*max(mu,xi)={upper}")


def select(state: SolverState, config: SolverConfig) -> int:
    """Index of a maximal-characteristic interval (ties: earliest created)."""
    m = state.m
    K = _k_all(state, config)
    _check_k_bounds(K, state, config)
    R = 0.5 * (K * state._diag[:m] - (state._fa[:m] + state._fb[:m]))
    best = np.flatnonzero(R == R.max())
    if best.size == 1:
        return int(best[0])
    return int(best[np.argmin(state._created[best])])


def should_stop(state: SolverState, t: int, problem, config: SolverConfig) -> bool:
    """True once the chosen diagonal is small enough or the budget is spent."""
    domain_diag = diag_norm(problem.domain)
    if state._diag[t] <= config.eps * domain_diag:
        return True
    return state.k >= config.max_evals


def _stop_status(state: SolverState, t: int, problem, config: SolverConfig) -> SolveStatus | None:
    if state._diag[t] <= config.eps * diag_norm(problem.domain):
        return SolveStatus.TOLERANCE_REACHED
    if state.k >= config.max_evals:
        return SolveStatus.BUDGET_EXHAUSTED
    return None


def iterate(state: SolverState, problem, config: SolverConfig,
            t: int | None = None,
            observer: Optional[Callable[[TraceEvent], None]] = None) -> SolverState:
    """One full iteration; mutates and returns ``state``.

    ``t`` may carry the already-selected interval index to avoid scoring
    the partition twice when the caller just ran the stopping check.
    """
    if t is None:
        t = select(state, config)
    parent = state.interval(t)
    diag_t = float(state._diag[t])

    khat_value = khat(state, config)
    x_new = place_on_diagonal(parent.box, parent.f_a, parent.f_b, khat_value)
    # Diagonal parameter of the placed point; the khat construction keeps
    # it within [3/8, 5/8], so [1/8, 7/8] has real slack.
    s_param = 0.5 - (parent.f_b - parent.f_a) / (2 * khat_value * diag_t)
    if not 0.125 <= s_param <= 0.875:
        raise AssertionError(f"placement parameter {s_param} outside [1/8, 7/8]")

    if config.strategy is Strategy.BISECTION:
        children, new_vertices = bisect(parent.box, x_new)
    else:
        children, new_vertices = partition_2n(parent.box, x_new)

    new_values = []
    for v in new_vertices:
        value = _evaluate(problem, v)
        state._record_trial(v, value)
        new_values.append(value)

    values_at = {tuple(parent.box.a): parent.f_a, tuple(parent.box.b): parent.f_b}
    for v, value in zip(new_vertices, new_values):
        values_at[tuple(v)] = value
    child_data = [(box, values_at[tuple(box.a)], values_at[tuple(box.b)]) for box in children]

    lam = lambda_new(parent, child_data)

    p = len(children)
    state._grow(p - 1)
    slots = [t] + list(range(state.m, state.m + p - 1))
    child_diags = []
    for slot, (box, f_a, f_b) in zip(slots, child_data):
        state._write(slot, box, f_a, f_b, lam)
        child_diags.append(float(state._diag[slot]))

    state.m += p - 1
    state.l += 1
    state.k += len(new_vertices)

    # mu and dmax are maxima over the current partition; a removed carrier
    # forces a rescan, otherwise new entries can only push them up.
    if parent.lam >= state.mu:
        state.mu = float(state._lam[: state.m].max())
    else:
        state.mu = max(state.mu, lam)
    if diag_t >= state.dmax:
        state.dmax = float(state._diag[: state.m].max())
    else:
        state.dmax = max(state.dmax, max(child_diags))

    if observer is not None:
        observer(TraceEvent(
            l=state.l,
            t=t,
            selected=parent,
            x_new=x_new,
            new_points=[v.copy() for v in new_vertices],
            new_values=list(new_values),
            z_star=state.z_star,
            mu=state.mu,
            dmax=state.dmax,
        ))
    return state


def solve(problem, config: SolverConfig,
          observer: Optional[Callable[[TraceEvent], None]] = None) -> SolverResult:
    """Run the search to its stopping rule and report the best trial."""
    state = init_state(problem, config)
    while True:
        t = select(state, config)
        status = _stop_status(state, t, problem, config)
        if status is not None:
            break
        iterate(state, problem, config, t=t, observer=observer)
    return SolverResult(
        best_point=state.x_star.copy(),
        best_value=state.z_star,
        evaluations=state.k,
        iterations=state.l,
        status=status,
        trials=state.trials,
    )
