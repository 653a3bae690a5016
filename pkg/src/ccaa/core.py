"""Domain types, bound repair and the seeded random-number contract."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


class ContractError(ValueError):
    """Raised when an operation is called with arguments that break its contract."""


class EvaluationError(RuntimeError):
    """Raised when an objective returns a non-finite value."""

    def __init__(self, position, value):
        self.position = np.array(position, dtype=float)
        self.value = value
        super().__init__(f"objective returned {value!r} at position {self.position.tolist()}")


@dataclass(frozen=True)
class Bounds:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ContractError("lower and upper bounds must be 1-D vectors of equal length")
        if not np.all(lower < upper):
            raise ContractError("every lower bound must be strictly below its upper bound")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def uniform(cls, low: float, high: float, dim: int) -> "Bounds":
        return cls(np.full(dim, float(low)), np.full(dim, float(high)))

    @property
    def dim(self) -> int:
        return self.lower.size

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))


@dataclass(frozen=True)
class SmartCell:
    """A candidate solution and its cached objective value.

    Cells are immutable: moving a cell means building a new one, so the cached
    fitness can never go stale.
    """

    position: np.ndarray
    fitness: float


@dataclass
class Population:
    cells: list
    best: SmartCell

    @property
    def fitness(self) -> np.ndarray:
        return np.array([c.fitness for c in self.cells])


@dataclass(frozen=True)
class CcaaConfig:
    """Parameters of one CCAA run.

    The defaults are the tuned values used for the benchmark experiments
    (12 cells, 6 neighbors, 500 iterations, 2 elites).
    """

    smart_n: int = 12
    neighbor_n: int = 6
    iteration_n: int = 500
    elitism_n: int = 2
    lower_p: float = 1.0
    upper_p: float = 2.0
    dist_M: float = 1.0
    dist_m: float = 0.3
    lower_d: int = 1
    upper_d: int = 4
    seed: int = 0

    def __post_init__(self):
        for name in ("smart_n", "neighbor_n", "iteration_n"):
            if int(getattr(self, name)) < 1:
                raise ContractError(f"{name} must be a positive integer")
        if self.smart_n < 2:
            raise ContractError("smart_n must be at least 2 so every cell has a partner")
        if not 0 <= self.elitism_n < self.smart_n:
            raise ContractError("elitism_n must satisfy 0 <= elitism_n < smart_n")
        if not 0 <= self.lower_d <= self.upper_d:
            raise ContractError("need 0 <= lower_d <= upper_d")
        for name in ("lower_p", "upper_p", "dist_M", "dist_m"):
            if not getattr(self, name) > 0:
                raise ContractError(f"{name} must be positive")
        if self.seed < 0:
            raise ContractError("seed must be non-negative")

    def replace(self, **changes) -> "CcaaConfig":
        values = {k: getattr(self, k) for k in self.__dataclass_fields__}
        values.update(changes)
        return CcaaConfig(**values)


@dataclass(frozen=True)
class Problem:
    """An objective to minimize over a box.

    ``objective`` takes a position vector; when ``uses_rng`` is set it also
    receives the caller's generator as a second argument (noisy objectives).
    ``snap`` maps a search position onto the design actually evaluated, and is
    used to report final designs.
    """

    name: str
    objective: Callable
    bounds: Bounds
    f_min: Optional[float] = None
    uses_rng: bool = False
    snap: Optional[Callable[[np.ndarray], np.ndarray]] = None
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def dim(self) -> int:
        return self.bounds.dim

    def evaluate(self, x: np.ndarray, rng=None) -> float:
        if self.uses_rng:
            value = self.objective(x, rng)
        else:
            value = self.objective(x)
        value = float(value)
        if not math.isfinite(value):
            raise EvaluationError(x, value)
        return value

    def design(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.snap(x) if self.snap is not None else x.copy()


def clamp(position, bounds: Bounds) -> np.ndarray:
    x = np.asarray(position, dtype=float)
    if x.shape != bounds.lower.shape:
        raise ContractError(f"position has shape {x.shape}, bounds have {bounds.lower.shape}")
    return np.minimum(bounds.upper, np.maximum(bounds.lower, x))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def derive_seed(master_seed: int, index: int) -> int:
    """Seed for run ``index`` of an experiment; independent streams per run."""
    ss = np.random.SeedSequence([int(master_seed), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def random_uniform(rng: np.random.Generator) -> float:
    return float(rng.random())


def random_init_population(config: CcaaConfig, problem: Problem, rng) -> Population:
    lo, hi = problem.bounds.lower, problem.bounds.upper
    positions = lo + (hi - lo) * rng.random((config.smart_n, problem.dim))
    # a wide box times a draw can overshoot by an ulp
    positions = np.minimum(hi, np.maximum(lo, positions))
    cells = [SmartCell(p, problem.evaluate(p, rng)) for p in positions]
    best = min(cells, key=lambda c: c.fitness)
    return Population(cells, SmartCell(best.position.copy(), best.fitness))
