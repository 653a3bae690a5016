"""The 33 benchmark functions: 10 unimodal and 13 multimodal scalable ones,
plus 10 fixed-dimension multimodal ones.

Scalable functions run in 30 or 500 dimensions. The fixed-dimension functions
use the classical constant tables (Shekel foxholes, Kowalik, Hartmann,
Shekel).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import Bounds, ContractError, Problem

SCALABLE_DIMS = (30, 500)


# --- unimodal ---------------------------------------------------------------

def f1(x):
    return np.sum(x * x)


def f2(x):
    i = np.arange(1, x.size + 1)
    return np.sum(i * x * x)


def f3(x):
    a = np.abs(x)
    return np.sum(a) + np.prod(a)


def f4(x):
    return np.sum(np.cumsum(x) ** 2)


def f5(x):
    return np.max(np.abs(x))


def f6(x):
    return np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (x[:-1] - 1.0) ** 2)


def f7(x):
    # printed without the floor of the classical step function
    return np.sum((x + 0.5) ** 2)


def f8(x):
    i = np.arange(1, x.size + 1)
    return np.sum(i * x ** 4)


def f9(x, rng):
    """Quartic with additive uniform noise; takes exactly one draw from ``rng``."""
    return f8(x) + rng.random()


def f10(x):
    i = np.arange(1, x.size + 1)
    return np.sum(np.abs(x) ** (i + 1))


# --- multimodal -------------------------------------------------------------

def f11(x):
    return np.sum(-x * np.sin(np.sqrt(np.abs(x))))


def f12(x):
    return np.sum(x * x - 10.0 * np.cos(2 * np.pi * x) + 10.0)


def f13(x):
    n = x.size
    return (
        -20.0 * np.exp(-0.2 * np.sqrt(np.sum(x * x) / n))
        - np.exp(np.sum(np.cos(2 * np.pi * x)) / n)
        + 20.0
        + np.e
    )


def f14(x):
    i = np.arange(1, x.size + 1)
    return np.sum(x * x) / 4000.0 - np.prod(np.cos(x / np.sqrt(i))) + 1.0


def u_penalty(x, a, k, m):
    """Boundary penalty: zero inside [-a, a], polynomial growth outside."""
    return np.where(x > a, k * (x - a) ** m, np.where(x < -a, k * (-x - a) ** m, 0.0))


def f15(x):
    n = x.size
    y = 1.0 + (x + 1.0) / 4.0
    body = (
        10.0 * np.sin(np.pi * y[0]) ** 2
        + np.sum((y[:-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * y[1:]) ** 2))
        + (y[-1] - 1.0) ** 2
    )
    return np.pi / n * body + np.sum(u_penalty(x, 10, 100, 4))


def f16(x):
    body = (
        np.sin(3 * np.pi * x[0]) ** 2
        + np.sum((x[:-1] - 1.0) ** 2 * (1.0 + np.sin(3 * np.pi * x[:-1] + 1.0) ** 2))
        + (x[-1] - 1.0) ** 2 * (1.0 + np.sin(2 * np.pi * x[-1]) ** 2)
    )
    return 0.1 * body + np.sum(u_penalty(x, 5, 100, 4))


def f17(x):
    return np.sum(np.abs(x * np.sin(x) + 0.1 * x))


def f18(x):
    n = x.size
    return 0.1 * n - (0.1 * np.sum(np.cos(5 * np.pi * x)) - np.sum(x * x))


def f19(x):
    a, b = x[:-1] ** 2, x[1:] ** 2
    return np.sum((a + 2.0 * b) ** 0.25 * (1.0 + np.sin(50.0 * (a + b) ** 0.1) ** 2))


def f20(x):
    n = x.size
    w = (1e6) ** (np.arange(n) / (n - 1)) if n > 1 else np.ones(1)
    return np.sum(w * x * x)


def f21(x):
    n = x.size
    return (-1.0) ** (n + 1) * np.prod(np.cos(x)) * np.exp(-np.sum((x - np.pi) ** 2))


def f22(x):
    r = np.sqrt(np.sum(x * x))
    return 1.0 - np.cos(2 * np.pi * r) + 0.1 * r


def f23(x):
    s = np.sum(x * x)
    return 0.5 + (np.sin(np.sqrt(s)) ** 2 - 0.5) / (1.0 + 0.001 * s ** 2)


# --- fixed dimension --------------------------------------------------------

_FOXHOLE_ROW = np.array([-32.0, -16.0, 0.0, 16.0, 32.0])
FOXHOLES = np.vstack([np.tile(_FOXHOLE_ROW, 5), np.repeat(_FOXHOLE_ROW, 5)])

KOWALIK_A = np.array(
    [0.1957, 0.1947, 0.1735, 0.1600, 0.0844, 0.0627, 0.0456, 0.0342, 0.0323, 0.0235, 0.0246]
)
KOWALIK_B = 1.0 / np.array([0.25, 0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0])

HARTMANN_C = np.array([1.0, 1.2, 3.0, 3.2])
HARTMANN3_A = np.array([[3.0, 10, 30], [0.1, 10, 35], [3.0, 10, 30], [0.1, 10, 35]])
HARTMANN3_P = np.array(
    [
        [0.3689, 0.1170, 0.2673],
        [0.4699, 0.4387, 0.7470],
        [0.1091, 0.8732, 0.5547],
        [0.03815, 0.5743, 0.8828],
    ]
)
HARTMANN6_A = np.array(
    [
        [10.0, 3, 17, 3.5, 1.7, 8],
        [0.05, 10, 17, 0.1, 8, 14],
        [3.0, 3.5, 1.7, 10, 17, 8],
        [17.0, 8, 0.05, 10, 0.1, 14],
    ]
)
HARTMANN6_P = np.array(
    [
        [0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886],
        [0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991],
        [0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650],
        [0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381],
    ]
)

SHEKEL_A = np.array(
    [
        [4.0, 4, 4, 4],
        [1.0, 1, 1, 1],
        [8.0, 8, 8, 8],
        [6.0, 6, 6, 6],
        [3.0, 7, 3, 7],
        [2.0, 9, 2, 9],
        [5.0, 5, 3, 3],
        [8.0, 1, 8, 1],
        [6.0, 2, 6, 2],
        [7.0, 3.6, 7, 3.6],
    ]
)
SHEKEL_C = np.array([0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3, 0.7, 0.5, 0.5])


def f24(x):
    j = np.arange(1, 26)
    inner = j + np.sum((x[:, None] - FOXHOLES) ** 6, axis=0)
    return 1.0 / (1.0 / 500.0 + np.sum(1.0 / inner))


def f25(x):
    b = KOWALIK_B
    model = x[0] * (b * b + b * x[1]) / (b * b + b * x[2] + x[3])
    return np.sum((KOWALIK_A - model) ** 2)


def f26(x):
    x1, x2 = x
    return 4 * x1**2 - 2.1 * x1**4 + x1**6 / 3 + x1 * x2 - 4 * x2**2 + 4 * x2**4


def f27(x):
    x1, x2 = x
    return (
        (x2 - 5.1 / (4 * np.pi**2) * x1**2 + 5 / np.pi * x1 - 6) ** 2
        + 10 * (1 - 1 / (8 * np.pi)) * np.cos(x1)
        + 10
    )


def f28(x):
    x1, x2 = x
    a = 1 + (x1 + x2 + 1) ** 2 * (19 - 14 * x1 + 3 * x1**2 - 14 * x2 + 6 * x1 * x2 + 3 * x2**2)
    b = 30 + (2 * x1 - 3 * x2) ** 2 * (18 - 32 * x1 + 12 * x1**2 + 48 * x2 - 36 * x1 * x2 + 27 * x2**2)
    return a * b


def _hartmann(x, a, p):
    return -np.sum(HARTMANN_C * np.exp(-np.sum(a * (x - p) ** 2, axis=1)))


def f29(x):
    return _hartmann(x, HARTMANN3_A, HARTMANN3_P)


def f30(x):
    return _hartmann(x, HARTMANN6_A, HARTMANN6_P)


def _shekel(x, m):
    d = x - SHEKEL_A[:m]
    return -np.sum(1.0 / (np.sum(d * d, axis=1) + SHEKEL_C[:m]))


def f31(x):
    return _shekel(x, 5)


def f32(x):
    return _shekel(x, 7)


def f33(x):
    return _shekel(x, 10)


# --- registry ---------------------------------------------------------------

@dataclass(frozen=True)
class BenchmarkSpec:
    id: str
    function: Callable
    dimension: int
    low: float
    high: float
    f_min: float
    scalable: bool
    noisy: bool = False
    f_min_is_dim_dependent: bool = False

    @property
    def bounds(self) -> Bounds:
        return Bounds.uniform(self.low, self.high, self.dimension)

    def minimum(self) -> float:
        if self.f_min_is_dim_dependent:
            return -418.9829 * self.dimension
        return self.f_min


def _s(fid, fn, low, high, f_min=0.0, **kw):
    return BenchmarkSpec(fid, fn, 30, low, high, f_min, scalable=True, **kw)


def _fixed(fid, fn, dim, low, high, f_min):
    return BenchmarkSpec(fid, fn, dim, low, high, f_min, scalable=False)


_SPECS = [
    _s("F1", f1, -100, 100),
    _s("F2", f2, -10, 10),
    _s("F3", f3, -10, 10),
    _s("F4", f4, -100, 100),
    _s("F5", f5, -100, 100),
    _s("F6", f6, -30, 30),
    _s("F7", f7, -100, 100),
    _s("F8", f8, -1.28, 1.28),
    _s("F9", f9, -1.28, 1.28, noisy=True),
    _s("F10", f10, -1, 1),
    _s("F11", f11, -500, 500, -418.9829, f_min_is_dim_dependent=True),
    _s("F12", f12, -5.12, 5.12),
    _s("F13", f13, -32, 32),
    _s("F14", f14, -600, 600),
    _s("F15", f15, -50, 50),
    _s("F16", f16, -50, 50),
    _s("F17", f17, -10, 10),
    _s("F18", f18, -1, 1),
    _s("F19", f19, -1.28, 1.28),
    _s("F20", f20, -100, 100),
    _s("F21", f21, -100, 100, -1.0),
    _s("F22", f22, -100, 100),
    _s("F23", f23, -100, 100),
    _fixed("F24", f24, 2, -65, 65, 1.0),
    _fixed("F25", f25, 4, -5, 5, 0.00030),
    _fixed("F26", f26, 2, -5, 5, -1.0316),
    _fixed("F27", f27, 2, -5, 5, 0.398),
    _fixed("F28", f28, 2, -2, 2, 3.0),
    # the [1, 3] box sometimes printed for this function excludes its minimum
    _fixed("F29", f29, 3, 0, 1, -3.86),
    _fixed("F30", f30, 6, 0, 1, -3.32),
    _fixed("F31", f31, 4, 0, 10, -10.1532),
    _fixed("F32", f32, 4, 0, 10, -10.4028),
    _fixed("F33", f33, 4, 0, 10, -10.5363),
]
REGISTRY = {s.id: s for s in _SPECS}
IDS = tuple(REGISTRY)


def _lookup(fid) -> BenchmarkSpec:
    key = str(fid).upper()
    if key not in REGISTRY:
        raise KeyError(f"unknown benchmark {fid!r}")
    return REGISTRY[key]


def spec_of(fid, dimension: Optional[int] = None) -> BenchmarkSpec:
    spec = _lookup(fid)
    if dimension is None or dimension == spec.dimension:
        return spec
    if not spec.scalable:
        raise ContractError(f"{spec.id} has fixed dimension {spec.dimension}")
    if dimension < 2:
        raise ContractError("scalable benchmarks need at least 2 dimensions")
    return BenchmarkSpec(
        spec.id, spec.function, int(dimension), spec.low, spec.high, spec.f_min,
        True, spec.noisy, spec.f_min_is_dim_dependent,
    )


def evaluate(fid, x, rng=None) -> float:
    spec = _lookup(fid)
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or (not spec.scalable and x.size != spec.dimension) or x.size < 2:
        raise ContractError(f"{spec.id} cannot be evaluated on a vector of shape {x.shape}")
    if spec.noisy:
        if rng is None:
            raise ContractError(f"{spec.id} is noisy and needs a random generator")
        return float(spec.function(x, rng))
    return float(spec.function(x))


def make_problem(fid, dimension: Optional[int] = None) -> Problem:
    spec = spec_of(fid, dimension)
    return Problem(
        name=spec.id if not spec.scalable else f"{spec.id}-d{spec.dimension}",
        objective=spec.function,
        bounds=spec.bounds,
        f_min=spec.minimum(),
        uses_rng=spec.noisy,
    )
