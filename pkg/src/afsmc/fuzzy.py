"""Fuzzy tuner for the sliding-surface slope lambda.

Each joint has its own two-input system: position error e and velocity
error edot are fuzzified over five evenly spaced triangular sets, the
25-cell rule table selects an output label, and the crisp slope is the
firing-strength weighted average of per-label singleton values (product
firing strength, zero-order Sugeno reading of weighted-average
defuzzification).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

INPUT_LABELS = ("NL", "NS", "ZE", "PS", "PL")
OUTPUT_LABELS = ("S", "MS", "M", "ML", "L")

# rows: edot label, columns: e label, both in INPUT_LABELS order
PUBLISHED_RULES = (
    ("L", "L", "ML", "M", "MS"),
    ("L", "ML", "M", "MS", "S"),
    ("ML", "M", "M", "M", "ML"),
    ("MS", "MS", "M", "ML", "L"),
    ("S", "MS", "ML", "L", "L"),
)

DEGENERATE_FIRING_TOL = 1e-15


class DegenerateFiring(ArithmeticError):
    """Total rule activation vanished; the input partition is corrupted."""


@dataclass(frozen=True)
class InputPartition:
    """Five triangles centred at (-E, -E/2, 0, E/2, E) with saturated shoulders."""

    half_width: float

    def __post_init__(self):
        if not (math.isfinite(self.half_width) and self.half_width > 0):
            raise ValueError(f"half_width must be positive and finite, got {self.half_width}")

    @property
    def centers(self) -> np.ndarray:
        return self.half_width * np.array([-1.0, -0.5, 0.0, 0.5, 1.0])


@dataclass(frozen=True)
class RuleTable:
    rows: tuple[tuple[str, ...], ...] = PUBLISHED_RULES

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.rows)
        if len(rows) != 5 or any(len(r) != 5 for r in rows):
            raise ValueError("rule table must be 5x5")
        for r in rows:
            for label in r:
                if label not in OUTPUT_LABELS:
                    raise ValueError(f"unknown output label {label!r}")
        object.__setattr__(self, "rows", rows)

    def lookup(self, edot_label: str, e_label: str) -> str:
        return self.rows[INPUT_LABELS.index(edot_label)][INPUT_LABELS.index(e_label)]

    def index_matrix(self) -> np.ndarray:
        """Output-label indices as a 5x5 integer array."""
        return np.array([[OUTPUT_LABELS.index(lab) for lab in r] for r in self.rows])


@dataclass(frozen=True)
class OutputSingletons:
    s: float = 10.0
    ms: float = 12.0
    m: float = 14.0
    ml: float = 16.0
    l: float = 18.0

    def __post_init__(self):
        vals = self.as_array()
        if not np.all(np.isfinite(vals)) or vals[0] <= 0:
            raise ValueError(f"singletons must be positive and finite, got {vals.tolist()}")
        if np.any(np.diff(vals) < 0):
            raise ValueError(f"singletons must satisfy S <= MS <= M <= ML <= L, got {vals.tolist()}")

    def as_array(self) -> np.ndarray:
        return np.array([self.s, self.ms, self.m, self.ml, self.l], dtype=float)

    def value(self, label: str) -> float:
        return float(self.as_array()[OUTPUT_LABELS.index(label)])


@dataclass(frozen=True)
class FuzzyConfig:
    e_partition: InputPartition
    edot_partition: InputPartition
    table: RuleTable = field(default_factory=RuleTable)
    singletons: OutputSingletons = field(default_factory=OutputSingletons)

    @cached_property
    def _rule_values(self) -> np.ndarray:
        return self.singletons.as_array()[self.table.index_matrix()]

    def rule_values(self) -> np.ndarray:
        """Crisp consequent of every rule, shaped like the table."""
        return self._rule_values.copy()


DEFAULT_E_HALF_WIDTHS = (1.1, 1.6, 3.2)


def default_fuzzy_configs(singletons: OutputSingletons | None = None) -> tuple[FuzzyConfig, ...]:
    """Per-joint defaults: error universes near the initial setpoint errors, edot twice as wide."""
    singletons = singletons or OutputSingletons()
    return tuple(
        FuzzyConfig(InputPartition(w), InputPartition(2.0 * w), RuleTable(), singletons)
        for w in DEFAULT_E_HALF_WIDTHS
    )


def membership_degrees(partition: InputPartition, x: float) -> np.ndarray:
    """Degrees of (NL, NS, ZE, PS, PL) at ``x``."""
    mu = np.zeros(5)
    half = partition.half_width
    if x <= -half:
        mu[0] = 1.0
        return mu
    if x >= half:
        mu[4] = 1.0
        return mu
    pos = (x + half) / (0.5 * half)
    k = min(int(pos), 3)
    w = pos - k
    mu[k] = 1.0 - w
    mu[k + 1] = w
    return mu


def rule_lookup(table: RuleTable, edot_label: str, e_label: str) -> str:
    return table.lookup(edot_label, e_label)


def _active(partition: InputPartition, x: float) -> list[tuple[int, float]]:
    """Nonzero (label index, degree) pairs; at most two."""
    mu = membership_degrees(partition, x)
    return [(i, float(m)) for i, m in enumerate(mu) if m > 0.0]


def infer_lambda(config: FuzzyConfig, e: float, edot: float) -> float:
    values = config._rule_values
    num = den = 0.0
    lo, hi = np.inf, -np.inf
    for i, mu_ed in _active(config.edot_partition, edot):
        for j, mu_e in _active(config.e_partition, e):
            w = mu_ed * mu_e
            v = values[i, j]
            num += w * v
            den += w
            if w > 0.0:
                lo, hi = min(lo, v), max(hi, v)
    if den < DEGENERATE_FIRING_TOL:
        raise DegenerateFiring(f"rule activation {den:.3e} at e={e}, edot={edot}")
    # a convex combination; rounding may step one ulp outside the fired span
    return float(min(max(num / den, lo), hi))


def lambda_matrix(configs, e, edot) -> np.ndarray:
    """Diagonal slope matrix, one fuzzy system per joint."""
    return np.diag([infer_lambda(cfg, ei, edi) for cfg, ei, edi in zip(configs, e, edot)])
