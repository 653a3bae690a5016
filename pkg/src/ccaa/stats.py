"""Run statistics: summaries, the Wilcoxon rank-sum test and rank tables.

All comparisons assume minimization, so the "better" sample is the one with
the smaller values.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .core import ContractError

ALPHA = 0.05
MIN_NORMAL_N = 5


@dataclass(frozen=True)
class SampleSummary:
    best: float
    worst: float
    mean: float
    median: float
    std: float
    n: int

    def as_dict(self) -> dict:
        return {"n": self.n, "best": self.best, "worst": self.worst, "mean": self.mean,
                "median": self.median, "std": self.std}


def summarize(values) -> SampleSummary:
    """Best, worst, mean, median and sample standard deviation (n - 1) of a sample."""
    x = np.asarray(values, dtype=float).reshape(-1)
    if x.size == 0:
        raise ContractError("cannot summarize an empty sample")
    std = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
    return SampleSummary(
        best=float(x.min()),
        worst=float(x.max()),
        mean=float(x.mean()),
        median=float(np.median(x)),
        std=std,
        n=int(x.size),
    )


class Verdict(str, enum.Enum):
    PLUS = "+"
    MINUS = "-"
    APPROX = "="


@dataclass(frozen=True)
class RankSumResult:
    statistic: float
    p_value: float
    verdict: Verdict
    rank_sum: float
    small_sample: bool = False


def _direction(a: np.ndarray, b: np.ndarray) -> Verdict:
    for stat in (np.mean, np.median):
        sa, sb = float(stat(a)), float(stat(b))
        if sa < sb:
            return Verdict.PLUS
        if sa > sb:
            return Verdict.MINUS
    return Verdict.APPROX


def rank_sum_test(a, b, alpha: float = ALPHA) -> RankSumResult:
    """Two-sided Wilcoxon rank-sum test of ``a`` against ``b``.

    Normal approximation with midranks for ties, tie-corrected variance and a
    continuity correction. ``statistic`` is the z score of ``a``'s rank sum
    (negative when ``a`` tends to be smaller). A significant result is ``+``
    when ``a`` has the smaller mean (median on equal means), ``-`` otherwise.
    Samples smaller than five set ``small_sample``; the approximation is
    coarse there.
    """
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    if a.size == 0 or b.size == 0:
        raise ContractError("rank-sum test needs two non-empty samples")
    n1, n2 = a.size, b.size
    n = n1 + n2
    ranks = rankdata(np.concatenate((a, b)))
    r1 = float(ranks[:n1].sum())
    mean = n1 * (n + 1) / 2.0
    _, counts = np.unique(np.concatenate((a, b)), return_counts=True)
    ties = float(np.sum(counts.astype(float) ** 3 - counts))
    var = n1 * n2 / 12.0 * ((n + 1) - ties / (n * (n - 1)))
    d = r1 - mean
    if var <= 0.0:
        z = 0.0
    else:
        z = math.copysign(max(abs(d) - 0.5, 0.0), d) / math.sqrt(var)
    p = min(1.0, math.erfc(abs(z) / math.sqrt(2.0)))
    verdict = _direction(a, b) if p < alpha else Verdict.APPROX
    return RankSumResult(z, p, verdict, r1, min(n1, n2) < MIN_NORMAL_N)


def wrst_net(verdicts) -> int:
    """Number of ``+`` verdicts minus number of ``-`` verdicts."""
    v = [Verdict(x) for x in verdicts]
    return v.count(Verdict.PLUS) - v.count(Verdict.MINUS)


@dataclass(frozen=True)
class RankTable:
    ranks: np.ndarray           # algorithms x problems
    average: np.ndarray         # per algorithm
    overall: np.ndarray         # per algorithm, 1 = best average


def rank_table(means, method: str = "dense") -> RankTable:
    """Rank algorithms (rows) on each problem (column) by mean, smaller first.

    ``method="dense"`` gives ties a shared rank and the next value the next
    integer (1, 1, 2); ``"competition"`` skips ranks after a tie (1, 1, 3).
    The overall rank orders the average ranks with competition ties.
    """
    m = np.asarray(means, dtype=float)
    if m.ndim == 1:
        m = m[:, None]
    if m.ndim != 2 or m.size == 0:
        raise ContractError("means must be a non-empty algorithms x problems matrix")
    if not np.all(np.isfinite(m)):
        raise ContractError("means must be finite; missing entries are not supported")
    kinds = {"dense": "dense", "competition": "min"}
    if method not in kinds:
        raise ContractError(f"method must be one of {sorted(kinds)}")
    ranks = rankdata(m, method=kinds[method], axis=0).astype(int)
    average = ranks.mean(axis=1)
    overall = rankdata(average, method="min").astype(int)
    return RankTable(ranks, average, overall)
