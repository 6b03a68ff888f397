import math
from types import SimpleNamespace

import numpy as np
import pytest

from diagopt.engine import (
    Estimator,
    Interval,
    ObjectiveEvaluationError,
    SolveStatus,
    SolverConfig,
    Strategy,
    characteristic,
    gamma,
    init_state,
    iterate,
    k_estimate,
    khat,
    lambda_new,
    select,
    should_stop,
    solve,
)
from diagopt.geometry import DiagonalBox, diag_norm


def make_problem(objective, a, b):
    return SimpleNamespace(
        domain=DiagonalBox(np.array(a, dtype=float), np.array(b, dtype=float)),
        objective=objective,
    )


PLANE = make_problem(lambda x: float(x[0] + x[1]), [0, 0], [1, 1])
CONSTANT = make_problem(lambda x: 5.0, [0, 0], [1, 1])
BOWL = make_problem(lambda x: float((x[0] - 0.5) ** 2 + (x[1] - 0.5) ** 2), [0, 0], [1, 1])


class TestConfigValidation:
    @pytest.mark.parametrize("kwargs", [
        dict(r=1.0), dict(r=0.5), dict(C=0.0), dict(xi=0.0),
        dict(eps=-0.1), dict(max_evals=1),
    ])
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            SolverConfig(**kwargs)


class TestInitState:
    def test_plane(self):
        state = init_state(PLANE, SolverConfig())
        assert state.l == 1 and state.m == 1 and state.k == 2
        assert state.mu == pytest.approx(math.sqrt(2), rel=1e-15)  # 2 / sqrt(2)
        assert state.z_star == 0.0
        np.testing.assert_array_equal(state.x_star, [0, 0])
        assert state.dmax == pytest.approx(math.sqrt(2), rel=1e-15)

    def test_constant(self):
        state = init_state(CONSTANT, SolverConfig())
        assert state.mu == 0.0
        assert state.z_star == 5.0

    def test_rosenbrock_table_domain(self):
        rosen = make_problem(
            lambda x: float(100 * (x[1] - x[0] ** 2) ** 2 + (x[0] - 1) ** 2),
            [-2, -2], [8, 8],
        )
        state = init_state(rosen, SolverConfig())
        # f(-2,-2)=3609, f(8,8)=313649, diagonal 10*sqrt(2)
        expected = (313649 - 3609) / (10 * math.sqrt(2))
        assert expected == pytest.approx(21923.1386439, abs=1e-6)
        assert state.intervals[0].lam == pytest.approx(expected, rel=1e-15)
        assert state.z_star == 3609.0

    def test_non_finite_objective_aborts(self):
        bad = make_problem(lambda x: float("nan"), [0, 0], [1, 1])
        with pytest.raises(ObjectiveEvaluationError):
            init_state(bad, SolverConfig())


def interval_for(a, b, f_a, f_b, lam, created_at=1):
    return Interval(
        box=DiagonalBox(np.array(a, dtype=float), np.array(b, dtype=float)),
        f_a=f_a, f_b=f_b, lam=lam, created_at=created_at,
    )


class TestScores:
    def test_gamma_full_weight_for_largest(self):
        iv = interval_for([0, 0], [1, 1], 0, 0, 1.0)
        d = diag_norm(iv.box)
        assert gamma(iv, mu=3.0, dmax=d) == pytest.approx(3.0, rel=1e-15)

    def test_gamma_scales_with_diagonal(self):
        iv = interval_for([0, 0], [0.6, 0.8], 0, 0, 1.0)  # diagonal 1
        assert gamma(iv, mu=4.0, dmax=2.0) == pytest.approx(2.0, rel=1e-15)

    def test_gamma_zero_mu(self):
        iv = interval_for([0, 0], [1, 1], 0, 0, 0.0)
        assert gamma(iv, mu=0.0, dmax=5.0) == 0.0

    def test_k_estimate_local(self):
        state = SimpleNamespace(l=10, mu=3.0, dmax=1.0)
        iv = interval_for([0, 0], [0.2, 0.2], 0, 0, lam=3.0)
        # gamma < lam here; (1.1 + 10/10) * 3 = 6.3
        cfg = SolverConfig(r=1.1, C=10, xi=1e-6)
        assert k_estimate(iv, state, cfg) == pytest.approx(6.3, rel=1e-15)

    def test_k_estimate_global_ignores_lam(self):
        state = SimpleNamespace(l=10, mu=3.0, dmax=1.0)
        cfg = SolverConfig(r=1.1, C=10, xi=1e-6, estimator=Estimator.GLOBAL_ESTIMATE)
        for lam in (0.0, 0.1, 50.0):
            iv = interval_for([0, 0], [0.2, 0.2], 0, 0, lam=lam)
            assert k_estimate(iv, state, cfg) == pytest.approx(6.3, rel=1e-15)

    def test_k_estimate_degenerate_floor(self):
        state = SimpleNamespace(l=4, mu=0.0, dmax=1.0)
        cfg = SolverConfig(r=1.5, C=2, xi=1e-6)
        iv = interval_for([0, 0], [0.5, 0.5], 0, 0, lam=0.0)
        assert k_estimate(iv, state, cfg) == pytest.approx(2.0 * 1e-6, rel=1e-15)

    def test_characteristic_hand_value(self):
        iv = interval_for([0, 0], [3, 4], 1.0, 2.0, 1.0)
        assert characteristic(iv, K=2.0) == pytest.approx(3.5, rel=1e-15)

    def test_characteristic_zero_values(self):
        iv = interval_for([0, 0], [3, 4], 0.0, 0.0, 1.0)
        assert characteristic(iv, K=2.0) == pytest.approx(5.0, rel=1e-15)

    def test_characteristic_cancellation(self):
        iv = interval_for([0, 0], [3, 4], 4.0, 6.0, 1.0)
        assert characteristic(iv, K=2.0) == 0.0

    def test_khat_hand_value(self):
        state = SimpleNamespace(l=10, mu=2.0)
        assert khat(state, SolverConfig(r=1.1, C=10, xi=1e-6)) == pytest.approx(10.0)

    def test_khat_floor(self):
        state = SimpleNamespace(l=1, mu=0.0)
        cfg = SolverConfig(r=1.1, C=10, xi=1e-6)
        assert khat(state, cfg) == pytest.approx(14 * 1e-6, rel=1e-15)


class TestLambdaNew:
    def box2(self, a, b):
        return DiagonalBox(np.array(a, dtype=float), np.array(b, dtype=float))

    def test_constant_children(self):
        parent = interval_for([0, 0], [1, 1], 2.0, 2.0, 0.0)
        children = [(self.box2([0, 0], [0.5, 0.5]), 2.0, 2.0)]
        assert lambda_new(parent, children) == 0.0

    def test_child_slope_dominates(self):
        parent = interval_for([0, 0], [1, 1], 0.0, math.sqrt(2), 1.0)  # slope 1
        children = [
            (self.box2([0, 0], [0.3, 0.4]), 0.0, 0.2),    # slope 0.4
            (self.box2([0.5, 0.5], [0.8, 0.9]), 0.0, 1.25),  # slope 2.5
        ]
        assert lambda_new(parent, children) == pytest.approx(2.5, rel=1e-15)

    def test_parent_slope_dominates(self):
        parent = interval_for([0, 0], [1, 1], 0.0, 3 * math.sqrt(2), 3.0)  # slope 3
        children = [
            (self.box2([0, 0], [0.3, 0.4]), 0.0, 0.05),
            (self.box2([0.5, 0.5], [0.8, 0.9]), 0.0, 0.1),
        ]
        assert lambda_new(parent, children) == pytest.approx(3.0, rel=1e-15)


class TestSelect:
    def test_single_interval(self):
        state = init_state(PLANE, SolverConfig())
        assert select(state, SolverConfig()) == 0

    def test_argmax_and_tie_break(self):
        cfg = SolverConfig()
        state = init_state(BOWL, cfg)
        for _ in range(6):
            iterate(state, BOWL, cfg)
        # cross-check against the scalar operations
        scores = []
        for iv in state.intervals:
            K = k_estimate(iv, state, cfg)
            scores.append(characteristic(iv, K))
        best = max(scores)
        candidates = [i for i, s in enumerate(scores) if s == best]
        expected = min(candidates, key=lambda i: state.intervals[i].created_at)
        assert select(state, cfg) == expected

    def test_exact_ties_use_creation_order(self):
        cfg = SolverConfig()
        state = init_state(CONSTANT, cfg)
        iterate(state, CONSTANT, cfg)
        # two mirror-image halves of a constant field: identical scores
        assert select(state, cfg) == 0


class TestShouldStop:
    def test_eps_zero_keeps_running(self):
        cfg = SolverConfig(eps=0.0)
        state = init_state(PLANE, cfg)
        assert not should_stop(state, 0, PLANE, cfg)

    def test_small_diagonal_stops(self):
        cfg = SolverConfig(eps=0.01)
        state = init_state(PLANE, cfg)
        state._diag[0] = 0.005 * state.domain_diag
        assert should_stop(state, 0, PLANE, cfg)

    def test_budget_stops(self):
        cfg = SolverConfig(max_evals=2)
        state = init_state(PLANE, cfg)
        assert should_stop(state, 0, PLANE, cfg)


class TestIterate:
    def test_bisection_counters(self):
        cfg = SolverConfig(strategy=Strategy.BISECTION)
        state = init_state(BOWL, cfg)
        iterate(state, BOWL, cfg)
        assert (state.l, state.m, state.k) == (2, 2, 4)
        assert len(state.trial_values) == state.k

    def test_partition_2n_counters(self):
        cfg = SolverConfig(strategy=Strategy.PARTITION_2N)
        state = init_state(BOWL, cfg)
        iterate(state, BOWL, cfg)
        assert (state.l, state.m, state.k) == (2, 4, 7)

    def test_constant_splits_at_midpoint(self):
        cfg = SolverConfig(strategy=Strategy.PARTITION_2N)
        state = init_state(CONSTANT, cfg)
        events = []
        iterate(state, CONSTANT, cfg, observer=events.append)
        np.testing.assert_allclose(events[0].x_new, [0.5, 0.5], rtol=0, atol=0)

    def test_tiling_preserved(self):
        for strategy in Strategy:
            cfg = SolverConfig(strategy=strategy)
            state = init_state(BOWL, cfg)
            for _ in range(12):
                iterate(state, BOWL, cfg)
            total = sum(iv.box.volume() for iv in state.intervals)
            assert total == pytest.approx(BOWL.domain.volume(), rel=1e-9)
            assert state.m == len(state.intervals)

    def test_mu_dmax_recomputable(self):
        cfg = SolverConfig(strategy=Strategy.BISECTION)
        state = init_state(BOWL, cfg)
        for _ in range(25):
            iterate(state, BOWL, cfg)
            lams = [iv.lam for iv in state.intervals]
            diags = [diag_norm(iv.box) for iv in state.intervals]
            assert state.mu == max(lams)
            assert state.dmax == max(diags)

    def test_lambda_at_least_own_slope(self):
        cfg = SolverConfig(strategy=Strategy.PARTITION_2N)
        state = init_state(BOWL, cfg)
        for _ in range(15):
            iterate(state, BOWL, cfg)
        for iv in state.intervals:
            slope = abs(iv.f_a - iv.f_b) / diag_norm(iv.box)
            assert iv.lam >= slope - 1e-12 * max(1.0, slope)

    def test_non_finite_value_aborts(self):
        calls = {"n": 0}

        def sometimes_nan(x):
            calls["n"] += 1
            return float("inf") if calls["n"] > 3 else 1.0

        prob = make_problem(sometimes_nan, [0, 0], [1, 1])
        cfg = SolverConfig()
        state = init_state(prob, cfg)
        with pytest.raises(ObjectiveEvaluationError):
            for _ in range(10):
                iterate(state, prob, cfg)


def brute_force_minimum(problem, points=401):
    a, b = problem.domain.a, problem.domain.b
    axes = [np.linspace(a[i], b[i], points) for i in range(len(a))]
    best = math.inf
    arg = None
    for x0 in axes[0]:
        for x1 in axes[1]:
            v = problem.objective(np.array([x0, x1]))
            if v < best:
                best, arg = v, (x0, x1)
    return best, np.array(arg)


class TestSolve:
    def test_bowl_locates_center(self):
        cfg = SolverConfig(eps=0.01)
        result = solve(BOWL, cfg)
        _, grid_arg = brute_force_minimum(BOWL, points=101)
        np.testing.assert_allclose(grid_arg, [0.5, 0.5], atol=1e-12)
        radius = 2 * cfg.eps * math.sqrt(2)
        assert np.linalg.norm(result.best_point - grid_arg) <= radius
        assert result.status is SolveStatus.TOLERANCE_REACHED
        assert result.best_value == min(v for _, v in result.trials)
        assert result.evaluations == len(result.trials)

    def test_constant_terminates(self):
        for strategy in Strategy:
            result = solve(CONSTANT, SolverConfig(eps=0.05, strategy=strategy))
            assert result.best_value == 5.0
            assert result.status is SolveStatus.TOLERANCE_REACHED

    def test_budget_exhaustion_status(self):
        result = solve(BOWL, SolverConfig(eps=1e-9, max_evals=50))
        assert result.status is SolveStatus.BUDGET_EXHAUSTED
        assert result.evaluations >= 50

    def test_determinism(self):
        cfg = SolverConfig(strategy=Strategy.PARTITION_2N)
        r1 = solve(BOWL, cfg)
        r2 = solve(BOWL, cfg)
        assert r1.evaluations == r2.evaluations
        assert r1.best_value == r2.best_value
        for (p1, v1), (p2, v2) in zip(r1.trials, r2.trials):
            assert v1 == v2
            np.testing.assert_array_equal(p1, p2)

    def test_record_monotonicity(self):
        z_values = []
        solve(BOWL, SolverConfig(), observer=lambda ev: z_values.append(ev.z_star))
        assert all(b <= a for a, b in zip(z_values, z_values[1:]))

    def test_constant_degeneracy_modes_identical(self):
        trials = {}
        for estimator in Estimator:
            cfg = SolverConfig(eps=0.05, estimator=estimator)
            trials[estimator] = solve(CONSTANT, cfg).trials
        a, b = trials[Estimator.LOCAL_TUNING], trials[Estimator.GLOBAL_ESTIMATE]
        assert len(a) == len(b)
        for (p1, v1), (p2, v2) in zip(a, b):
            assert v1 == v2
            np.testing.assert_array_equal(p1, p2)

    def test_observer_sees_every_iteration(self):
        events = []
        result = solve(BOWL, SolverConfig(eps=0.05), observer=events.append)
        assert len(events) == result.iterations - 1  # init is iteration 1
        assert events[-1].l == result.iterations
        s = 2  # bisection evaluates two vertices per iteration
        assert result.evaluations == 2 + s * len(events)
        for ev in events:
            assert len(ev.new_points) == len(ev.new_values) == s
