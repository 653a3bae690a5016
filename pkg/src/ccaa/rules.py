"""Evolution rules that turn a smart cell into a candidate neighbor.

Seven templates (approach, away, change, increment, majority/minority,
rounding) are bound to parameters to form the ten rule instances R1..R10.
Every rule is a pure function of its context and the random draws it takes
from ``ctx.rng``; none of them clamp their output.
"""

from __future__ import annotations

import enum
import math
from typing import NamedTuple

import numpy as np

from .core import CcaaConfig, SmartCell


class RuleContext(NamedTuple):
    self_cell: SmartCell
    neighbor_cell: SmartCell
    best_fitness: float
    rng: object


class RuleId(enum.IntEnum):
    R1 = 1
    R2 = 2
    R3 = 3
    R4 = 4
    R5 = 5
    R6 = 6
    R7 = 7
    R8 = 8
    R9 = 9
    R10 = 10


class Condition(enum.Enum):
    DIFFERENT = "different"
    SELF_BETTER = "self_better"


class Mode(enum.Enum):
    MAJORITY = "majority"
    MINORITY = "minority"


def pond(numerator: float, total: float) -> float:
    """Change probability ``1 - numerator / total`` kept inside [0, 1].

    Objectives may be negative, so the raw ratio can leave the unit interval
    or divide by zero; a zero or non-finite total falls back to 0.5.
    """
    if total == 0 or not math.isfinite(total):
        return 0.5
    p = 1.0 - numerator / total
    if math.isnan(p):
        return 0.5
    return min(1.0, max(0.0, p))


def _holds(condition: Condition, f_self: float, f_other: float) -> bool:
    if condition is Condition.DIFFERENT:
        return f_self != f_other
    return f_self < f_other


def rule_approach(ctx: RuleContext, prop: float) -> np.ndarray:
    s_i, s_j = ctx.self_cell, ctx.neighbor_cell
    if s_i.fitness == s_j.fitness:
        return s_i.position.copy()
    r = ctx.rng.random()
    return s_i.position - (s_i.position - s_j.position) * (prop * r)


def rule_away(ctx: RuleContext, prop: float, condition: Condition = Condition.DIFFERENT) -> np.ndarray:
    s_i, s_j = ctx.self_cell, ctx.neighbor_cell
    if not _holds(Condition(condition), s_i.fitness, s_j.fitness):
        return s_i.position.copy()
    r = ctx.rng.random()
    return s_i.position + (s_i.position - s_j.position) * (prop * r)


def rule_change(ctx: RuleContext, dist: float) -> np.ndarray:
    s_i, s_j = ctx.self_cell, ctx.neighbor_cell
    p = pond(s_j.fitness, s_i.fitness + s_j.fitness)
    r = ctx.rng.random() * dist - dist / 2
    selected = ctx.rng.random(s_i.position.size) < p
    out = s_i.position.copy()
    out[selected] += r * s_j.position[selected]
    return out


def rule_increment(ctx: RuleContext, dist: float) -> np.ndarray:
    s_i = ctx.self_cell
    p = pond(s_i.fitness, s_i.fitness + ctx.best_fitness)
    r = ctx.rng.random() * dist - dist / 2
    selected = ctx.rng.random(s_i.position.size) < p
    out = s_i.position.copy()
    out[selected] += r * out[selected]
    return out


def mode_value(x: np.ndarray, mode: Mode = Mode.MAJORITY) -> float:
    """Most (or least) repeated value of ``x``; ties go to the lowest index."""
    values, first, counts = np.unique(x, return_index=True, return_counts=True)
    target = counts.max() if Mode(mode) is Mode.MAJORITY else counts.min()
    candidates = np.flatnonzero(counts == target)
    return float(values[candidates[np.argmin(first[candidates])]])


def rule_mode(ctx: RuleContext, dist: float, variant: Mode = Mode.MAJORITY) -> np.ndarray:
    s = ctx.self_cell.position
    elem = mode_value(s, variant)
    r = ctx.rng.random()
    return s - (s - elem) * (dist * r)


def round_half_away(x: np.ndarray, digits: int) -> np.ndarray:
    # q / 10**d with integral q is the double nearest the decimal literal
    scale = 10.0 ** digits
    return np.copysign(np.floor(np.abs(x) * scale + 0.5) / scale, x)


def rule_round(ctx: RuleContext, num_d: int) -> np.ndarray:
    s_i = ctx.self_cell
    p = pond(s_i.fitness, s_i.fitness + ctx.best_fitness)
    selected = ctx.rng.random(s_i.position.size) < p
    out = s_i.position.copy()
    out[selected] = round_half_away(out[selected], num_d)
    return out


def apply_rule(rule: RuleId, ctx: RuleContext, config: CcaaConfig) -> np.ndarray:
    """Apply one configured rule instance."""
    rule = RuleId(rule)
    if rule is RuleId.R1:
        return rule_approach(ctx, config.lower_p)
    if rule is RuleId.R2:
        return rule_away(ctx, config.upper_p, Condition.DIFFERENT)
    if rule is RuleId.R3:
        return rule_away(ctx, config.lower_p, Condition.SELF_BETTER)
    if rule is RuleId.R4:
        return rule_change(ctx, config.dist_M)
    if rule is RuleId.R5:
        return rule_change(ctx, config.dist_m)
    if rule is RuleId.R6:
        return rule_increment(ctx, config.dist_M)
    if rule is RuleId.R7:
        return rule_increment(ctx, config.dist_m)
    if rule is RuleId.R8:
        return rule_mode(ctx, config.dist_m, Mode.MAJORITY)
    if rule is RuleId.R9:
        return rule_mode(ctx, config.dist_m, Mode.MINORITY)
    num_d = int(ctx.rng.integers(config.lower_d, config.upper_d + 1))
    return rule_round(ctx, num_d)


def choose_rule(rng) -> RuleId:
    return RuleId(int(rng.integers(len(RuleId))) + 1)


def apply_random_rule(ctx: RuleContext, config: CcaaConfig) -> np.ndarray:
    return apply_rule(choose_rule(ctx.rng), ctx, config)
