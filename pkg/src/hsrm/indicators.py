"""h index, Hirsch core and the h-square area decomposition of a citation record."""

from __future__ import annotations

import enum
import operator
from dataclasses import dataclass, field
from typing import Sequence

from .errors import InvalidProfile, InvalidThresholds, ZeroCitations


@dataclass(frozen=True)
class ScientistProfile:
    """Citation counts of one scientist's publications.

    ``citations`` is normalized to a tuple sorted in non-increasing order on
    construction, so two profiles built from the same multiset compare equal.
    """

    scientist_id: str
    citations: tuple[int, ...]
    total_citations: int = field(init=False, repr=False)

    def __post_init__(self) -> None:
        values = []
        for raw in self.citations:
            try:
                # bool is an int subclass but never a citation count
                if isinstance(raw, bool):
                    raise TypeError
                c = operator.index(raw)
            except TypeError:
                raise InvalidProfile(
                    f"{self.scientist_id}: citation count {raw!r} is not an integer"
                ) from None
            if c < 0:
                raise InvalidProfile(f"{self.scientist_id}: negative citation count {c}")
            values.append(c)
        # sorted() is stable; ties keep input order
        object.__setattr__(self, "citations", tuple(sorted(values, reverse=True)))
        object.__setattr__(self, "total_citations", sum(values))

    @property
    def n(self) -> int:
        return len(self.citations)


@dataclass(frozen=True)
class IndicatorSet:
    h: int
    total_citations: int
    h2_lower_pct: float
    h2_pct: float
    h2_upper_pct: float

    @property
    def hirsch_core_size(self) -> int:
        return self.h


class PerformanceType(str, enum.Enum):
    PERFECTIONIST = "perfectionist"
    PROLIFIC = "prolific"
    MASS_PRODUCER = "mass_producer"


@dataclass(frozen=True)
class ClassificationConfig:
    """Area-share thresholds (percent) separating the three performance types."""

    upper_threshold: float = 75.0
    lower_cap: float = 10.0
    lower_threshold: float = 40.0

    def validate(self) -> None:
        for name in ("upper_threshold", "lower_cap", "lower_threshold"):
            value = getattr(self, name)
            if not 0.0 <= value <= 100.0:
                raise InvalidThresholds(f"{name}={value} outside [0, 100]")
        if self.lower_cap > self.lower_threshold:
            raise InvalidThresholds(
                f"lower_cap={self.lower_cap} exceeds lower_threshold={self.lower_threshold}"
            )


def _as_citations(profile: ScientistProfile | Sequence[int]) -> tuple[int, ...]:
    if isinstance(profile, ScientistProfile):
        return profile.citations
    return ScientistProfile("", tuple(profile)).citations


def compute_h(profile: ScientistProfile | Sequence[int]) -> int:
    """Largest h such that h papers have at least h citations each."""
    h = 0
    for rank, c in enumerate(_as_citations(profile), start=1):
        if c >= rank:
            h = rank
        else:
            break
    return h


def hirsch_core(profile: ScientistProfile | Sequence[int]) -> tuple[int, ...]:
    citations = _as_citations(profile)
    return citations[: compute_h(citations)]


def compute_areas(profile: ScientistProfile | Sequence[int]) -> IndicatorSet:
    """Split total citations into the lower, square and upper areas around h.

    The three numerators are exact integers that add up to the total, so the
    percentages sum to 100 up to float rounding.

    Raises
    ------
    ZeroCitations
        If the record has no citations at all (shares undefined).
    """
    citations = _as_citations(profile)
    total = sum(citations)
    if total == 0:
        raise ZeroCitations("areas are undefined for a record with zero citations")
    h = compute_h(citations)
    core_sum = sum(citations[:h])
    upper = core_sum - h * h
    square = h * h
    lower = total - core_sum
    return IndicatorSet(
        h=h,
        total_citations=total,
        h2_lower_pct=100.0 * lower / total,
        h2_pct=100.0 * square / total,
        h2_upper_pct=100.0 * upper / total,
    )


def classify(
    indicators: IndicatorSet, thresholds: ClassificationConfig | None = None
) -> PerformanceType:
    thresholds = thresholds or ClassificationConfig()
    thresholds.validate()
    if (
        indicators.h2_upper_pct >= thresholds.upper_threshold
        and indicators.h2_lower_pct <= thresholds.lower_cap
    ):
        return PerformanceType.PERFECTIONIST
    if indicators.h2_lower_pct >= thresholds.lower_threshold:
        return PerformanceType.MASS_PRODUCER
    return PerformanceType.PROLIFIC

