"""Numeric kernels for the hardness scores.

Everything here is a pure function over plain values: Bloom weighting,
interdisciplinary complexity, the instruction-response expansion index,
cosine distance, min-max normalization, and the intrinsic/extrinsic
aggregation means. Model-dependent judgments live in ``thtb.backends``.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, fields
from typing import Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)


class CognitiveLevel(enum.IntEnum):
    """Six-level cognitive hierarchy, ordered from lower to higher skill.

    The integer value of each member is its scoring weight.
    """

    REMEMBER = 1
    UNDERSTAND = 2
    APPLY = 3
    ANALYZE = 4
    EVALUATE = 5
    CREATE = 6

    @property
    def label(self) -> str:
        return self.name.capitalize()

    @classmethod
    def parse(cls, token: str) -> "CognitiveLevel | None":
        """Case-insensitive lookup of a level name; None when unknown."""
        try:
            return cls[token.strip().upper()]
        except KeyError:
            return None


class LengthUnit(str, enum.Enum):
    """How instruction/response lengths are measured."""

    CHARACTERS = "characters"
    WHITESPACE_TOKENS = "whitespace-tokens"


@dataclass(frozen=True)
class NormalizationContext:
    """Extremes of one raw score over a named record population."""

    min: float
    max: float
    population: str = "unspecified"

    def __post_init__(self) -> None:
        if self.min > self.max:
            raise ValueError(f"normalization context has min {self.min} > max {self.max}")

    @classmethod
    def from_values(cls, values: Iterable[float], population: str) -> "NormalizationContext":
        vals = list(values)
        if not vals:
            raise ValueError(f"empty population for normalization context '{population}'")
        return cls(min=float(min(vals)), max=float(max(vals)), population=population)


@dataclass(frozen=True)
class LengthMeasure:
    """Instruction and response lengths in one unit."""

    unit: LengthUnit
    instruction_length: int
    response_length: int

    @property
    def combined(self) -> int:
        return self.instruction_length + self.response_length


@dataclass
class ScoreCard:
    """Per-record container for every raw and normalized hardness metric.

    Fields default to None and are filled in as scoring passes run; a
    record filtered out early keeps unset metrics as None.
    """

    index: int
    reward: float | None = None
    bloom_levels: frozenset[CognitiveLevel] | None = None
    bloom_raw: float | None = None
    bloom_norm: float | None = None
    disciplines: list[str] | None = None
    ic_raw: float | None = None
    ic_norm: float | None = None
    irei_raw: float | None = None
    irei_norm: float | None = None
    sc: float | None = None
    sc_norm: float | None = None
    intrinsic: float | None = None
    extrinsic: float | None = None
    thtb: float | None = None
    selected_stage: int | None = None

    # Column order of the scored-output schema.
    SCORE_FIELDS = (
        "reward",
        "bloom_levels",
        "bloom_raw",
        "bloom_norm",
        "disciplines",
        "ic_raw",
        "ic_norm",
        "irei_raw",
        "irei_norm",
        "sc",
        "sc_norm",
        "intrinsic",
        "extrinsic",
        "thtb",
        "selected_stage",
    )

    def to_json_dict(self) -> dict:
        out: dict = {}
        for name in self.SCORE_FIELDS:
            value = getattr(self, name)
            if name == "bloom_levels" and value is not None:
                value = [lvl.label for lvl in sorted(value)]
            out[name] = value
        return out

    @classmethod
    def from_json_dict(cls, index: int, payload: dict) -> "ScoreCard":
        card = cls(index=index)
        valid = {f.name for f in fields(cls)}
        for name in cls.SCORE_FIELDS:
            if name not in payload or payload[name] is None or name not in valid:
                continue
            value = payload[name]
            if name == "bloom_levels":
                parsed = [CognitiveLevel.parse(tok) for tok in value]
                if any(lvl is None for lvl in parsed):
                    raise ValueError(f"unknown cognitive level in {value!r}")
                value = frozenset(parsed)
            setattr(card, name, value)
        return card


def minmax_normalize(x: float, ctx: NormalizationContext) -> float:
    """Map ``x`` onto [0, 1] relative to the context extremes.

    A degenerate context (max == min) yields 0.0. Values outside the
    context range can only come from a caller using the wrong population;
    they are clamped and logged rather than rejected.
    """
    if x < ctx.min or x > ctx.max:
        logger.warning(
            "value %s outside normalization population '%s' [%s, %s]; clamping",
            x, ctx.population, ctx.min, ctx.max,
        )
        x = min(max(x, ctx.min), ctx.max)
    if ctx.max == ctx.min:
        return 0.0
    return (x - ctx.min) / (ctx.max - ctx.min)


def bloom_raw(levels: Iterable[CognitiveLevel]) -> float:
    """Weighted sum of assigned cognitive levels (weights 1..6)."""
    level_set = frozenset(levels)
    if not level_set:
        raise ValueError("bloom_raw requires a non-empty level set")
    return float(sum(int(lvl) for lvl in level_set))


def bloom_normalize(raw: float, ctx: NormalizationContext) -> float:
    """Min-max normalize a raw Bloom weight over the dataset extremes."""
    return minmax_normalize(raw, ctx)


def cosine_distance(a: np.ndarray, b: np.ndarray) -> float:
    """1 minus the cosine of the angle between two vectors; range [0, 2]."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ValueError("cosine_distance is undefined for zero-norm vectors")
    return 1.0 - float(np.dot(a, b)) / (norm_a * norm_b)


def interdisciplinary_complexity(
    discipline_embeddings: Sequence[np.ndarray],
    ctx: NormalizationContext,
) -> float:
    """Discipline-count term plus mean pairwise embedding distance.

    The count term is the record's discipline count min-max normalized over
    the dataset's per-record counts. The pairwise term is the mean cosine
    distance over all unordered description pairs; with fewer than two
    disciplines there are no pairs and the term is 0.
    """
    n = len(discipline_embeddings)
    if n == 0:
        raise ValueError("interdisciplinary_complexity requires at least one discipline")
    count_term = minmax_normalize(float(n), ctx)
    if n < 2:
        return count_term
    total = 0.0
    pairs = 0
    for i in range(n - 1):
        for j in range(i + 1, n):
            total += cosine_distance(discipline_embeddings[i], discipline_embeddings[j])
            pairs += 1
    return count_term + total / pairs


def irei(measure: LengthMeasure, ctx: NormalizationContext) -> float:
    """Normalized combined length plus response/instruction length ratio."""
    if measure.instruction_length < 1:
        raise ValueError("irei requires a non-empty instruction")
    return (
        minmax_normalize(float(measure.combined), ctx)
        + measure.response_length / measure.instruction_length
    )


def aggregate_intrinsic(bloom_norm_value: float, ic_norm_value: float) -> float:
    """Mean of the normalized Bloom score and interdisciplinary complexity."""
    return (bloom_norm_value + ic_norm_value) / 2.0


def aggregate_extrinsic(irei_norm_value: float, sc_norm_value: float) -> float:
    """Mean of the normalized expansion index and silhouette coefficient."""
    return (irei_norm_value + sc_norm_value) / 2.0


def measure_lengths(instruction: str, response: str, unit: LengthUnit) -> LengthMeasure:
    """Measure both texts in the configured unit."""
    if unit is LengthUnit.CHARACTERS:
        return LengthMeasure(
            unit=unit, instruction_length=len(instruction), response_length=len(response)
        )
    return LengthMeasure(
        unit=unit,
        instruction_length=len(instruction.split()),
        response_length=len(response.split()),
    )
