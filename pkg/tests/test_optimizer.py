import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ccaa.benchmarks import make_problem
from ccaa.core import Bounds, CcaaConfig, ContractError, EvaluationError, Problem, SmartCell, make_rng
from ccaa.engineering import setup_of
from ccaa.optimizer import accept, budget_iterations, carry_elites, ccaa_run, ccaa_run_budgeted


class Counting:
    def __init__(self, fn):
        self.fn = fn
        self.calls = 0

    def __call__(self, x):
        self.calls += 1
        return self.fn(x)


def sphere_problem(dim=3, low=-5.0, high=5.0, fn=None):
    obj = Counting(fn or (lambda x: float(np.sum(x * x))))
    return Problem("sphere", obj, Bounds.uniform(low, high, dim)), obj


def random_problem(seed):
    """A random shifted, scaled quadratic-plus-cosine landscape in a random box."""
    rng = np.random.default_rng(seed)
    dim = int(rng.integers(1, 6))
    low = rng.uniform(-50, 0, dim)
    high = low + rng.uniform(0.5, 60, dim)
    shift = rng.uniform(low, high)
    scale = rng.uniform(0.1, 10, dim)

    def f(x):
        d = (x - shift) * scale
        return float(np.sum(d * d) - np.sum(np.cos(d)))

    return Problem(f"rand{seed}", f, Bounds(low, high))


def test_constant_objective():
    p, _ = sphere_problem(fn=lambda x: 7.0)
    rec = ccaa_run(p, CcaaConfig(iteration_n=30, seed=1))
    assert rec.best_fitness == 7.0
    assert np.all(rec.convergence == 7.0)


def test_one_dimensional_parabola():
    # the grid minimum of x^2 on [-1, 1] is 0 at x = 0
    grid = np.linspace(-1, 1, 20001)
    assert grid[np.argmin(grid**2)] == 0.0
    p, _ = sphere_problem(dim=1, low=-1, high=1)
    rec = ccaa_run(p, CcaaConfig(seed=3))
    assert rec.best_fitness <= 1e-6


def test_sphere_reaches_zero():
    rec = ccaa_run(make_problem("F1"), CcaaConfig(seed=0))
    assert rec.best_fitness == 0.0


def test_record_shape():
    p, _ = sphere_problem()
    rec = ccaa_run(p, CcaaConfig(iteration_n=40, seed=2))
    assert rec.iterations == 40
    assert rec.best_fitness == rec.convergence[-1]
    assert rec.best_fitness == float(np.sum(rec.best_position**2))


@settings(max_examples=25)
@given(st.integers(2, 8), st.integers(1, 5), st.integers(1, 15), st.data())
def test_evaluation_count_formula(smart_n, neighbor_n, iteration_n, data):
    elitism_n = data.draw(st.integers(0, smart_n - 1))
    cfg = CcaaConfig(smart_n=smart_n, neighbor_n=neighbor_n, iteration_n=iteration_n, elitism_n=elitism_n, seed=5)
    p, counter = sphere_problem()
    rec = ccaa_run(p, cfg)
    expected = smart_n + (iteration_n - 1) * (smart_n - elitism_n) * neighbor_n
    assert counter.calls == expected == rec.evaluations_used


def test_elites_survive_every_iteration():
    p = make_problem("F12", 10)
    cfg = CcaaConfig(iteration_n=80, seed=4)
    snapshots = []
    ccaa_run(p, cfg, callback=lambda it, cells: snapshots.append(list(cells)))
    for before, after in zip(snapshots, snapshots[1:]):
        best = sorted(before, key=lambda c: c.fitness)[: cfg.elitism_n]
        for cell in best:
            assert any(c is cell or (np.array_equal(c.position, cell.position) and c.fitness == cell.fitness)
                       for c in after)


def test_carry_elites_keeps_slots():
    cells = [SmartCell(np.array([float(k)]), f) for k, f in enumerate([5.0, 3.0, 9.0, 1.0])]
    out = carry_elites(cells, 2)
    assert [c.fitness for c in out] == [1.0, 3.0, 9.0, 1.0]
    assert carry_elites(cells, 0) == cells


@pytest.mark.parametrize("seed", range(100))
def test_bounds_and_monotone_best(seed):
    p = random_problem(seed)
    cfg = CcaaConfig(smart_n=6, neighbor_n=3, iteration_n=50, seed=seed)
    seen = []

    def check(it, cells):
        for c in cells:
            assert p.bounds.contains(c.position)
            assert c.fitness == p.evaluate(c.position)
        seen.append(min(c.fitness for c in cells))

    rec = ccaa_run(p, cfg, callback=check)
    assert np.all(np.diff(rec.convergence) <= 0)
    # best-so-far is never worse than the population at any observation
    assert np.all(rec.convergence <= np.array(seen))


def test_acceptance_frequency_on_worse_candidates():
    rng = make_rng(99)
    hits = sum(accept(1.0, 2.0, rng) for _ in range(10**5))
    assert abs(hits / 10**5 - 0.5) < 0.01


def test_improvement_always_accepted():
    rng = make_rng(1)
    assert all(accept(2.0, 1.0, rng) for _ in range(1000))


def test_bit_reproducible():
    p = make_problem("F13", 5)
    a = ccaa_run(p, CcaaConfig(iteration_n=60, seed=8))
    b = ccaa_run(p, CcaaConfig(iteration_n=60, seed=8))
    assert np.array_equal(a.convergence, b.convergence)
    assert np.array_equal(a.best_position, b.best_position)


def test_noisy_objective_reproducible():
    p = make_problem("F9", 5)
    a = ccaa_run(p, CcaaConfig(iteration_n=20, seed=8))
    b = ccaa_run(p, CcaaConfig(iteration_n=20, seed=8))
    assert np.array_equal(a.convergence, b.convergence)


def test_non_finite_aborts():
    def f(x):
        return math.inf if x[0] > 4.0 else float(x[0])

    p = Problem("cliff", f, Bounds.uniform(-5, 5, 1))
    with pytest.raises(EvaluationError):
        for seed in range(50):
            ccaa_run(p, CcaaConfig(iteration_n=50, seed=seed))


class TestBudget:
    def test_budget_equal_to_population(self):
        p, counter = sphere_problem()
        rec = ccaa_run_budgeted(p, CcaaConfig(seed=1), max_evaluations=12)
        assert counter.calls == 12 and rec.iterations == 1

    def test_budget_below_population(self):
        p, _ = sphere_problem()
        with pytest.raises(ContractError):
            ccaa_run_budgeted(p, CcaaConfig(), max_evaluations=5)

    def test_gear_train_budget(self):
        setup = setup_of("gtd")
        cfg = setup.config(seed=3)
        assert (cfg.smart_n, cfg.neighbor_n) == (5, 4)
        rec = ccaa_run_budgeted(setup.problem.as_problem(), cfg, 200)
        assert rec.evaluations_used <= 200

    @pytest.mark.parametrize("budget", [13, 29, 30, 71, 200])
    def test_partial_neighborhoods(self, budget):
        p, counter = sphere_problem()
        cfg = CcaaConfig(smart_n=5, neighbor_n=4, iteration_n=1000, elitism_n=2, seed=2)
        rec = ccaa_run_budgeted(p, cfg, budget)
        assert counter.calls == rec.evaluations_used == budget
        assert rec.iterations == budget_iterations(cfg, budget)
        assert np.all(np.diff(rec.convergence) <= 0)

    def test_unbounded_budget_matches_plain_run(self):
        p = make_problem("F6", 6)
        cfg = CcaaConfig(iteration_n=100, seed=12)
        a = ccaa_run(p, cfg)
        b = ccaa_run_budgeted(p, cfg, max_evaluations=10**9)
        assert np.array_equal(a.convergence, b.convergence)
        assert np.array_equal(a.best_position, b.best_position)
