"""The CCAA main loop: elitism, per-cell neighborhoods and probabilistic acceptance."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import (
    CcaaConfig,
    ContractError,
    Problem,
    SmartCell,
    clamp,
    make_rng,
    random_init_population,
)
from .rules import RuleContext, apply_random_rule


@dataclass
class RunRecord:
    best_position: np.ndarray
    best_fitness: float
    convergence: np.ndarray
    evaluations_used: int
    seed: int = 0

    @property
    def iterations(self) -> int:
        return len(self.convergence)


def accept(incumbent_fitness: float, candidate_fitness: float, rng) -> bool:
    """Replace the incumbent if the candidate improves on it, or on a coin flip.

    The coin is always drawn so the random stream does not depend on the
    comparison outcome.
    """
    coin = rng.random() < 0.5
    return coin or incumbent_fitness > candidate_fitness


def carry_elites(cells: list, elitism_n: int) -> list:
    """New population: copies of the ``elitism_n`` best cells, then slots
    ``elitism_n..`` of the old one.

    Cells are not reordered, so a slot past the elites keeps evolving its own
    cell even when that cell is the current best; the elite copies are what
    preserve it. Ties go to the lower slot.
    """
    order = sorted(range(len(cells)), key=lambda k: cells[k].fitness)
    return [cells[k] for k in order[:elitism_n]] + list(cells[elitism_n:])


def _pick_partner(j: int, n: int, rng) -> int:
    k = int(rng.integers(n - 1))
    return k + 1 if k >= j else k


def budget_iterations(config: CcaaConfig, max_evaluations: int) -> int:
    """Number of iterations a budget can fund, counting initialization as one."""
    per_iter = (config.smart_n - config.elitism_n) * config.neighbor_n
    return 1 + max(0, math.ceil((max_evaluations - config.smart_n) / per_iter))


def ccaa_run_budgeted(
    problem: Problem,
    config: CcaaConfig,
    max_evaluations: Optional[int] = None,
    callback: Optional[Callable[[int, list], None]] = None,
) -> RunRecord:
    """Run CCAA, stopping when the next evaluation would exceed ``max_evaluations``.

    ``config.iteration_n`` still caps the number of iterations. A neighborhood
    cut short by the budget is still judged on the candidates it did evaluate.
    ``callback(iteration, cells)`` is invoked after initialization and after
    every iteration with the current list of cells.
    """
    if max_evaluations is not None and max_evaluations < config.smart_n:
        raise ContractError("max_evaluations must be at least smart_n")
    rng = make_rng(config.seed)
    bounds = problem.bounds
    n = config.smart_n

    pop = random_init_population(config, problem, rng)
    cells = list(pop.cells)
    best = pop.best
    evaluations = n
    convergence = [best.fitness]
    if callback is not None:
        callback(1, cells)

    for iteration in range(2, config.iteration_n + 1):
        if max_evaluations is not None and evaluations >= max_evaluations:
            break
        cells = carry_elites(cells, config.elitism_n)
        exhausted = False
        for j in range(config.elitism_n, n):
            partner = cells[_pick_partner(j, n, rng)]
            ctx = RuleContext(cells[j], partner, best.fitness, rng)
            chosen = None
            for _ in range(config.neighbor_n):
                if max_evaluations is not None and evaluations >= max_evaluations:
                    exhausted = True
                    break
                candidate = clamp(apply_random_rule(ctx, config), bounds)
                cost = problem.evaluate(candidate, rng)
                evaluations += 1
                if chosen is None or cost < chosen.fitness:
                    chosen = SmartCell(candidate, cost)
            if chosen is not None:
                if accept(cells[j].fitness, chosen.fitness, rng):
                    cells[j] = chosen
                if chosen.fitness < best.fitness:
                    best = chosen
            if exhausted:
                break
        convergence.append(best.fitness)
        if callback is not None:
            callback(iteration, cells)
        if exhausted:
            break

    return RunRecord(
        best_position=problem.design(best.position),
        best_fitness=best.fitness,
        convergence=np.array(convergence),
        evaluations_used=evaluations,
        seed=config.seed,
    )


def ccaa_run(problem: Problem, config: CcaaConfig, callback=None) -> RunRecord:
    """Run CCAA for ``config.iteration_n`` iterations (initialization is the first)."""
    return ccaa_run_budgeted(problem, config, None, callback)
