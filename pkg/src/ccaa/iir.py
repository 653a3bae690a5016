"""System identification of IIR plants with an adaptive IIR model.

Transfer functions use the feedback form

    H(z) = (b0 + b1 z^-1 + ... + bn z^-n) / (1 - a1 z^-1 - ... - am z^-m)

so ``y(k) = sum_i a_i y(k-i) + sum_j b_j u(k-j)``. Plants printed with a
``1 + c1 z^-1 + ...`` denominator are converted once (``a_i = -c_i``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.signal import lfilter

from .core import Bounds, ContractError, Problem

OVERFLOW_LIMIT = 1e150
PENALTY_MSE = 1e10
INPUT_LENGTH = 100
THETA_BOUND = 2.0


class UnstableSimulationError(ArithmeticError):
    """The simulated output blew past the overflow limit."""


@dataclass(frozen=True)
class TransferFunction:
    numerator: np.ndarray
    feedback: np.ndarray

    def __post_init__(self):
        b = np.atleast_1d(np.asarray(self.numerator, dtype=float)).copy()
        a = np.asarray(self.feedback, dtype=float).reshape(-1).copy()
        if b.size == 0:
            raise ContractError("numerator needs at least one coefficient")
        if not (np.all(np.isfinite(b)) and np.all(np.isfinite(a))):
            raise ContractError("transfer function coefficients must be finite")
        b.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "numerator", b)
        object.__setattr__(self, "feedback", a)

    @classmethod
    def from_denominator(cls, numerator, denominator) -> "TransferFunction":
        """Build from a printed denominator ``[1, c1, c2, ...]``."""
        den = np.asarray(denominator, dtype=float)
        if den.size == 0 or den[0] != 1.0:
            raise ContractError("denominator must be monic")
        return cls(numerator, -den[1:])

    @property
    def denominator(self) -> np.ndarray:
        return np.concatenate(([1.0], -self.feedback))


def simulate(tf: TransferFunction, u) -> np.ndarray:
    """Output of ``tf`` driven by ``u`` from rest (zero initial conditions)."""
    u = np.asarray(u, dtype=float)
    if u.ndim != 1 or u.size == 0:
        raise ContractError("input must be a non-empty 1-D signal")
    with np.errstate(over="ignore", invalid="ignore"):
        y = lfilter(tf.numerator, tf.denominator, u)
    if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > OVERFLOW_LIMIT:
        raise UnstableSimulationError("model output exceeded the overflow limit")
    return y


@dataclass(frozen=True)
class ModelStructure:
    """Which numerator and feedback taps of the adaptive model are free.

    Theta lists the free numerator taps, then the free feedback taps, each in
    increasing delay order.
    """

    numerator_mask: tuple
    feedback_mask: tuple

    @property
    def size(self) -> int:
        return int(sum(self.numerator_mask) + sum(self.feedback_mask))

    def names(self) -> list:
        nb = [f"b{j}" for j, free in enumerate(self.numerator_mask) if free]
        na = [f"a{i + 1}" for i, free in enumerate(self.feedback_mask) if free]
        return nb + na

    def build(self, theta) -> TransferFunction:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.size,):
            raise ContractError(f"theta must have {self.size} entries, got shape {theta.shape}")
        nmask = np.array(self.numerator_mask, dtype=bool)
        fmask = np.array(self.feedback_mask, dtype=bool)
        b = np.zeros(nmask.size)
        a = np.zeros(fmask.size)
        k = int(nmask.sum())
        b[nmask] = theta[:k]
        a[fmask] = theta[k:]
        return TransferFunction(b, a)

    def theta_of(self, tf: TransferFunction) -> np.ndarray:
        """Free coefficients of ``tf`` in theta order (taps missing from ``tf`` are 0)."""
        b = np.zeros(len(self.numerator_mask))
        a = np.zeros(len(self.feedback_mask))
        b[: tf.numerator.size] = tf.numerator[: b.size]
        a[: tf.feedback.size] = tf.feedback[: a.size]
        return np.concatenate((b[np.array(self.numerator_mask, dtype=bool)],
                               a[np.array(self.feedback_mask, dtype=bool)]))


@dataclass(frozen=True)
class IdentificationProblem:
    plant: TransferFunction
    structure: ModelStructure
    input: np.ndarray
    noise: np.ndarray
    bounds: Bounds
    name: str = ""
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        u = np.asarray(self.input, dtype=float)
        v = np.asarray(self.noise, dtype=float)
        if u.ndim != 1 or u.size == 0 or v.shape != u.shape:
            raise ContractError("input and noise must be 1-D signals of equal, non-zero length")
        if self.bounds.dim != self.structure.size:
            raise ContractError("bounds must cover every free model coefficient")
        u = u.copy()
        u.setflags(write=False)
        # the plant response is fixed for the life of the problem
        d = simulate(self.plant, u) + v
        d.setflags(write=False)
        object.__setattr__(self, "input", u)
        object.__setattr__(self, "noise", v.copy())
        object.__setattr__(self, "_desired", d)

    @property
    def desired(self) -> np.ndarray:
        return self._desired

    @property
    def true_theta(self) -> np.ndarray:
        return self.structure.theta_of(self.plant)

    def as_problem(self) -> Problem:
        return Problem(self.name, lambda theta: mse(theta, self), self.bounds, f_min=0.0,
                       metadata=dict(self.metadata))


def mse(theta, problem: IdentificationProblem) -> float:
    """Mean squared error between plant and model outputs, capped at ``PENALTY_MSE``."""
    model = problem.structure.build(theta)
    try:
        y_hat = simulate(model, problem.input)
    except UnstableSimulationError:
        return PENALTY_MSE
    e = problem.desired - y_hat
    # a diverging model that stays under the overflow limit must not rank
    # worse than one that overflows
    return float(min(np.mean(e * e), PENALTY_MSE))


# ---------------------------------------------------------------- the ten plants

T, F = True, False

# numerator, printed denominator [1, c1, ...], numerator mask, feedback mask
_PLANTS = {
    "I": ([0.05, -0.4], [1, -1.1314, 0.25], (T, T), (T, T)),
    "II": ([-0.2, -0.4, 0.5], [1, -0.6, 0.25, -0.2], (T, T, T), (T, T, T)),
    "III": ([1, -0.9, 0.81, -0.729], [1, 0.04, 0.2775, -0.2101, 0.14], (T, T, T, T), (T, T, T, T)),
    "IV": ([0.1084, 0.5419, 1.0837, 1.0837, 0.5419, 0.1084],
           [1, 0.9853, 0.9738, -0.3854, 0.1112, 0.0113], (T,) * 6, (T,) * 5),
    "V": ([1, 0, -0.4, 0, -0.65, 0, 0.26], [1, 0, -0.77, 0, -0.8498, 0, 0.6486],
          (T, F, T, F, T, F, T), (F, T, F, T, F, T)),
    "VI": ([1], [1, -1.4, 0.49], (T,), (T, T)),
    "VII": ([1], [1, -1.2, 0.6], (T,), (T, T)),
    "VIII": ([0, 1.25, -0.25], [1, -0.3, 0.4], (F, T, T), (T, T)),
    # (1 - 0.5 z^-1)^3 expanded
    "IX": ([1], [1, -1.5, 0.75, -0.125], (T,), (T, T, T)),
    "X": ([-0.3, 0.4, -0.5], [1, -1.2, 0.5, -0.1], (T, T, T), (T, T, T)),
}

EXAMPLES = tuple(_PLANTS)


def plant_registry(example: str, rng: Optional[np.random.Generator] = None,
                   length: int = INPUT_LENGTH, noise_std: float = 0.0) -> IdentificationProblem:
    """Identification problem for one of the ten plants ("I".."X").

    The excitation is white Gaussian noise of ``length`` samples drawn from
    ``rng``; measurement noise is off unless ``noise_std`` is positive.
    """
    key = str(example).upper()
    if key not in _PLANTS:
        raise ContractError(f"unknown IIR example {example!r}; expected one of {', '.join(EXAMPLES)}")
    if length < 1:
        raise ContractError("input length must be positive")
    num, den, nmask, fmask = _PLANTS[key]
    if rng is None:
        rng = np.random.default_rng(0)
    structure = ModelStructure(nmask, fmask)
    u = rng.standard_normal(length)
    v = noise_std * rng.standard_normal(length) if noise_std > 0 else np.zeros(length)
    return IdentificationProblem(
        plant=TransferFunction.from_denominator(num, den),
        structure=structure,
        input=u,
        noise=v,
        bounds=Bounds.uniform(-THETA_BOUND, THETA_BOUND, structure.size),
        name=f"iir-{EXAMPLES.index(key) + 1}",
        metadata={"example": key},
    )


REGISTRY_IDS = tuple(f"iir-{k}" for k in range(1, 11))


def example_of(pid: str) -> str:
    try:
        k = int(pid.lower().removeprefix("iir-"))
        if not 1 <= k <= len(EXAMPLES):
            raise ValueError(k)
        return EXAMPLES[k - 1]
    except ValueError:
        raise ContractError(f"unknown IIR problem {pid!r}; expected iir-1 .. iir-10") from None


def input_rng(seed: int) -> np.random.Generator:
    """Stream for a run's excitation, kept apart from the optimizer's stream."""
    return np.random.default_rng([int(seed), 1])
