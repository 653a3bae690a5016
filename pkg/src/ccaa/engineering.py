"""Constrained mechanical design problems as penalized objectives.

Four classical problems: gear train (GTD), pressure vessel (PVD, with and
without the steel-gauge restriction), welded beam (WBD) and cantilever beam
(CBD). Each is a :class:`ConstrainedProblem`; ``as_problem()`` turns it into a
plain :class:`~ccaa.core.Problem` the optimizer can minimize.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import Bounds, CcaaConfig, ContractError, Problem
from .optimizer import budget_iterations

PENALTY_WEIGHT = 1e10
# published designs are printed to ~7 significant digits, so an active
# constraint can come out a hair positive
FEASIBILITY_TOL = 1e-6

GAUGE = 0.0625


@dataclass(frozen=True)
class ConstrainedProblem:
    """Raw cost plus constraints ``g(y) <= 0``.

    Every objective call first maps the search vector through ``snap``; the
    optimizer searches a continuous box and only ever sees snapped designs.
    An infeasible design costs ``raw + W * (1 + total violation)``, so with
    raw costs below ``W`` it is worse than every feasible design while still
    ranking infeasible designs by how far out they are.
    """

    name: str
    raw_objective: Callable[[np.ndarray], float]
    constraints: Sequence[Callable[[np.ndarray], float]]
    bounds: Bounds
    snap: Optional[Callable[[np.ndarray], np.ndarray]] = None
    penalty_weight: float = PENALTY_WEIGHT
    tolerance: float = FEASIBILITY_TOL
    metadata: dict = field(default_factory=dict, compare=False)

    def design(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if y.shape != self.bounds.lower.shape:
            raise ContractError(f"{self.name} expects {self.bounds.dim} variables, got shape {y.shape}")
        return self.snap(y) if self.snap is not None else y.copy()

    def constraint_values(self, y) -> np.ndarray:
        d = self.design(y)
        return np.array([g(d) for g in self.constraints], dtype=float)

    def violation(self, y) -> float:
        g = self.constraint_values(y)
        # a constraint that cannot be evaluated counts as violated
        excess = np.where(np.isfinite(g), np.maximum(0.0, g - self.tolerance), 1.0)
        return float(excess.sum())

    def is_feasible(self, y) -> bool:
        return self.violation(y) == 0.0

    def raw(self, y) -> float:
        return float(self.raw_objective(self.design(y)))

    def penalized(self, y) -> float:
        d = self.design(y)
        cost = float(self.raw_objective(d))
        v = self.violation(d)
        if v > 0.0:
            cost += self.penalty_weight * (1.0 + v)
        return cost

    __call__ = penalized

    def as_problem(self) -> Problem:
        return Problem(
            name=self.name,
            objective=self.penalized,
            bounds=self.bounds,
            snap=self.design,
            metadata=dict(self.metadata),
        )


# ---------------------------------------------------------------- snapping

def snap_integer(y, low: float, high: float) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    return np.clip(np.floor(y + 0.5), low, high)


def snap_gauge(v, step: float = GAUGE) -> np.ndarray:
    """Nearest multiple of ``step`` (halves round up)."""
    v = np.asarray(v, dtype=float)
    return np.floor(v / step + 0.5) * step


# ---------------------------------------------------------------- gear train

GTD_RATIO = 1.0 / 6.931
GTD_LOW, GTD_HIGH = 12, 60


def _gtd_raw(y) -> float:
    return (GTD_RATIO - (y[1] * y[2]) / (y[0] * y[3])) ** 2


def _gtd_snap(y) -> np.ndarray:
    return snap_integer(y, GTD_LOW, GTD_HIGH)


GTD = ConstrainedProblem(
    name="gtd",
    raw_objective=_gtd_raw,
    constraints=(),
    bounds=Bounds.uniform(GTD_LOW, GTD_HIGH, 4),
    snap=_gtd_snap,
)


def gtd_cost(y) -> float:
    """Squared error of the gear ratio against 1/6.931, on integer teeth counts."""
    return GTD.penalized(y)


# ---------------------------------------------------------------- pressure vessel

def _pvd_raw(y) -> float:
    y1, y2, y3, y4 = y
    return 0.6224 * y1 * y3 * y4 + 1.7781 * y2 * y3**2 + 3.1661 * y1**2 * y4 + 19.84 * y1**2 * y3


PVD_CONSTRAINTS = (
    lambda y: -y[0] + 0.0193 * y[2],
    lambda y: -y[1] + 0.00954 * y[2],
    lambda y: -math.pi * y[2] ** 2 * y[3] - 4.0 / 3.0 * math.pi * y[2] ** 3 + 1296000.0,
    lambda y: y[3] - 240.0,
)

PVD_BOUNDS = Bounds(np.array([0.0, 0.0, 10.0, 10.0]), np.array([99.0, 99.0, 200.0, 200.0]))


def _pvd_gauge_snap(y) -> np.ndarray:
    out = np.asarray(y, dtype=float).copy()
    out[:2] = np.clip(snap_gauge(out[:2]), 0.0, 99.0)
    return out


PVD = ConstrainedProblem("pvd", _pvd_raw, PVD_CONSTRAINTS, PVD_BOUNDS)
PVD_GAUGE = ConstrainedProblem("pvd-gauge", _pvd_raw, PVD_CONSTRAINTS, PVD_BOUNDS, snap=_pvd_gauge_snap)


def pvd_cost(y, gauge_restricted: bool = False) -> float:
    """Penalized vessel cost; with the gauge restriction thicknesses snap to 1/16 in."""
    return (PVD_GAUGE if gauge_restricted else PVD).penalized(y)


# ---------------------------------------------------------------- welded beam

WBD_P = 6000.0
WBD_L = 14.0
WBD_E = 30e6
WBD_G = 12e6
WBD_TAU_MAX = 13600.0
WBD_SIGMA_MAX = 30000.0
WBD_DELTA_MAX = 0.25


def _wbd_raw(y) -> float:
    y1, y2, y3, y4 = y
    return 1.10471 * y1**2 * y2 + 0.04811 * y3 * y4 * (14.0 + y2)


def wbd_terms(y) -> dict:
    """Shear stress, bending stress, deflection and buckling load of a beam design."""
    y1, y2, y3, y4 = (float(v) for v in y)
    P, L, E, G = WBD_P, WBD_L, WBD_E, WBD_G
    M = P * (L + y2 / 2.0)
    R = math.sqrt(y2**2 / 4.0 + ((y1 + y3) / 2.0) ** 2)
    J = 2.0 * (math.sqrt(2.0) * y1 * y2 * (y2**2 / 12.0 + ((y1 + y3) / 2.0) ** 2))
    tau_p = P / (math.sqrt(2.0) * y1 * y2)
    tau_pp = M * R / J
    radicand = tau_p**2 + 2.0 * tau_p * tau_pp * y2 / (2.0 * R) + tau_pp**2
    tau = math.sqrt(radicand) if radicand >= 0 else math.nan
    sigma = 6.0 * P * L / (y3**2 * y4)
    delta = 4.0 * P * L**3 / (E * y3**3 * y4)
    gamma = 4.013 * E * math.sqrt(y3**2 * y4**6 / 36.0) / L**2 * (1.0 - y3 / (2.0 * L) * math.sqrt(E / (4.0 * G)))
    return {"M": M, "R": R, "J": J, "tau_p": tau_p, "tau_pp": tau_pp,
            "tau": tau, "sigma": sigma, "delta": delta, "gamma": gamma}


WBD_CONSTRAINTS = (
    lambda y: wbd_terms(y)["tau"] - WBD_TAU_MAX,
    lambda y: wbd_terms(y)["sigma"] - WBD_SIGMA_MAX,
    lambda y: wbd_terms(y)["delta"] - WBD_DELTA_MAX,
    lambda y: y[0] - y[3],
    lambda y: WBD_P - wbd_terms(y)["gamma"],
    lambda y: 0.125 - y[0],
    lambda y: 0.10471 * y[0] ** 2 + 0.04811 * y[2] * y[3] * (14.0 + y[1]) - 5.0,
)

WBD = ConstrainedProblem(
    "wbd",
    _wbd_raw,
    WBD_CONSTRAINTS,
    Bounds(np.array([0.1, 0.1, 0.1, 0.1]), np.array([2.0, 10.0, 10.0, 2.0])),
)


def wbd_cost(y) -> float:
    return WBD.penalized(y)


# ---------------------------------------------------------------- cantilever beam

CBD_WEIGHT = 0.0624
CBD_COEF = np.array([61.0, 37.0, 19.0, 7.0, 1.0])


def cbd_deflection(y) -> float:
    y = np.asarray(y, dtype=float)
    return float(np.sum(CBD_COEF / y**3))


def _cbd_raw(y) -> float:
    return CBD_WEIGHT * float(np.sum(y))


CBD = ConstrainedProblem(
    "cbd",
    _cbd_raw,
    (lambda y: cbd_deflection(y) - 1.0,),
    Bounds.uniform(0.01, 100.0, 5),
)


def cbd_cost(y) -> float:
    return CBD.penalized(y)


# ---------------------------------------------------------------- registry

@dataclass(frozen=True)
class DesignSetup:
    """Experiment protocol of one design problem: population size and budget."""

    problem: ConstrainedProblem
    smart_n: int
    neighbor_n: int
    max_evaluations: int
    runs: int = 50

    def config(self, **overrides) -> CcaaConfig:
        base = CcaaConfig(smart_n=self.smart_n, neighbor_n=self.neighbor_n, iteration_n=2, elitism_n=2)
        base = base.replace(**overrides)
        # enough iterations that the evaluation budget is what stops the run
        if "iteration_n" not in overrides:
            base = base.replace(iteration_n=budget_iterations(base, self.max_evaluations))
        return base


REGISTRY = {
    "gtd": DesignSetup(GTD, 5, 4, 200),
    "pvd": DesignSetup(PVD, 6, 10, 15000),
    "pvd-gauge": DesignSetup(PVD_GAUGE, 6, 10, 15000),
    "wbd": DesignSetup(WBD, 5, 4, 2000),
    "cbd": DesignSetup(CBD, 5, 4, 12000),
}

IDS = tuple(REGISTRY)


def setup_of(pid: str) -> DesignSetup:
    try:
        return REGISTRY[pid.lower()]
    except KeyError:
        raise ContractError(f"unknown design problem {pid!r}; expected one of {', '.join(IDS)}") from None


def make_problem(pid: str) -> Problem:
    return setup_of(pid).problem.as_problem()
