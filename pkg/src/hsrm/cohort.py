"""Cohort-level descriptive tables by h-index bin, and a synthetic cohort generator."""

from __future__ import annotations

import statistics
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidBins, InvalidSpec, UnknownMetric, ZeroCitations
from .indicators import ScientistProfile, compute_areas, compute_h
from .srm import FitConfig, SrmOutcome, assess, build_series


@dataclass(frozen=True)
class HBin:
    label: str
    lower: int
    upper: int | None  # None: unbounded above

    def contains(self, h: int) -> bool:
        return h >= self.lower and (self.upper is None or h <= self.upper)


DEFAULT_BINS = (
    HBin("≤7", 0, 7),
    HBin("8–9", 8, 9),
    HBin("10–11", 10, 11),
    HBin("12–13", 12, 13),
    HBin("14–15", 14, 15),
    HBin("16–17", 16, 17),
    HBin("18–19", 18, 19),
    HBin("≥20", 20, None),
)

METRICS = ("h2_lower_pct", "h2_pct", "h2_upper_pct", "srm_value")
METRIC_ALIASES = {
    "h2_lower": "h2_lower_pct",
    "h2": "h2_pct",
    "h2_upper": "h2_upper_pct",
    "srm": "srm_value",
}
METRIC_TITLES = {
    "h2_lower_pct": "h2 lower (%)",
    "h2_pct": "h2 (%)",
    "h2_upper_pct": "h2 upper (%)",
    "srm_value": "sRM value",
}


def resolve_metric(name: str) -> str:
    metric = METRIC_ALIASES.get(name, name)
    if metric not in METRICS:
        raise UnknownMetric(
            f"unknown metric {name!r}; choose from {', '.join(list(METRIC_ALIASES) + list(METRICS))}"
        )
    return metric


def validate_bins(bins: Sequence[HBin]) -> None:
    """Bins must tile 0, 1, 2, ... without gaps or overlaps, last one open."""
    if not bins:
        raise InvalidBins("no bins given")
    expected = 0
    for i, b in enumerate(bins):
        if b.lower != expected:
            raise InvalidBins(f"bin {b.label!r} starts at {b.lower}, expected {expected}")
        if b.upper is None:
            if i != len(bins) - 1:
                raise InvalidBins(f"unbounded bin {b.label!r} must come last")
            return
        if b.upper < b.lower:
            raise InvalidBins(f"bin {b.label!r} is empty")
        expected = b.upper + 1
    raise InvalidBins(f"h values >= {expected} fall outside every bin")


def bin_for(h: int, bins: Sequence[HBin]) -> HBin:
    for b in bins:
        if b.contains(h):
            return b
    raise InvalidBins(f"h={h} falls outside every bin")


def bin_by_h(
    profiles: Iterable[ScientistProfile], bins: Sequence[HBin] = DEFAULT_BINS
) -> dict[str, list[ScientistProfile]]:
    validate_bins(bins)
    out: dict[str, list[ScientistProfile]] = {b.label: [] for b in bins}
    for p in profiles:
        out[bin_for(compute_h(p), bins).label].append(p)
    return out


@dataclass(frozen=True)
class Summary:
    """Descriptive statistics; ``None`` marks an undefined value."""

    count: int
    mean: float | None
    sd: float | None
    min: float | None
    max: float | None


def summarize(values: Sequence[float]) -> Summary:
    values = [float(v) for v in values]
    if not values:
        return Summary(0, None, None, None, None)
    sd = statistics.stdev(values) if len(values) > 1 else None
    return Summary(len(values), statistics.fmean(values), sd, min(values), max(values))


@dataclass(frozen=True)
class CohortRow:
    bin: HBin
    stats: Summary


@dataclass(frozen=True)
class CohortTable:
    metric: str
    rows: tuple[CohortRow, ...]
    total: Summary
    excluded_count: int
    cohort_size: int
    exclusion_reasons: Mapping[str, int] = field(default_factory=dict)


def _metric_value(profile: ScientistProfile, metric: str, outcome: SrmOutcome | None):
    """Return ``(value, None)`` or ``(None, reasons)`` for an excluded scientist."""
    if metric == "srm_value":
        if outcome is None:
            return None, ("no fit available",)
        if outcome.srm_value is None:
            return None, outcome.applicability.reasons or ("not applicable",)
        return outcome.srm_value, None
    try:
        return getattr(compute_areas(profile), metric), None
    except ZeroCitations:
        return None, ("zero citations",)


def build_table(
    profiles: Sequence[ScientistProfile],
    outcomes: Mapping[str, SrmOutcome] | None = None,
    metric: str = "h2_pct",
    bins: Sequence[HBin] = DEFAULT_BINS,
) -> CohortTable:
    """Per-bin statistics of ``metric`` plus a total row.

    ``outcomes`` maps scientist id to its sRM outcome and is only needed for
    the ``srm_value`` metric.  Scientists whose value is undefined (failed
    applicability, zero citations) go to ``excluded_count`` and do not appear
    in any bin row.
    """
    metric = resolve_metric(metric)
    validate_bins(bins)
    per_bin: dict[str, list[float]] = {b.label: [] for b in bins}
    reasons: Counter[str] = Counter()
    excluded = 0
    for p in profiles:
        outcome = outcomes.get(p.scientist_id) if outcomes is not None else None
        value, why = _metric_value(p, metric, outcome)
        if value is None:
            excluded += 1
            reasons.update(why)
            continue
        per_bin[bin_for(compute_h(p), bins).label].append(value)
    rows = tuple(CohortRow(b, summarize(per_bin[b.label])) for b in bins)
    everything = [v for b in bins for v in per_bin[b.label]]
    return CohortTable(
        metric=metric,
        rows=rows,
        total=summarize(everything),
        excluded_count=excluded,
        cohort_size=len(profiles),
        exclusion_reasons=dict(sorted(reasons.items())),
    )


def _assess_profile(args: tuple[ScientistProfile, FitConfig]) -> SrmOutcome:
    profile, config = args
    return assess(build_series(profile), config)


def fit_cohort(
    profiles: Sequence[ScientistProfile], config: FitConfig | None = None, jobs: int = 1
) -> dict[str, SrmOutcome]:
    """sRM outcome for every scientist with at least one publication, keyed by id."""
    config = config or FitConfig()
    work = [(p, config) for p in profiles if p.n > 0]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_assess_profile, work, chunksize=8))
    else:
        results = [_assess_profile(w) for w in work]
    return {p.scientist_id: r for (p, _), r in zip(work, results)}


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of the synthetic cohort generator.

    Publication counts are negative binomial with the given mean and standard
    deviation (at least one paper each).  Each scientist draws a power-law
    exponent uniformly from ``[exponent_min, exponent_max]``; citation counts
    ``c`` are then sampled with probability proportional to
    ``(c + citation_offset) ** -exponent`` on ``0..cap``.
    """

    size: int = 297
    pubs_mean: float = 20.5
    pubs_sd: float = 7.0
    exponent_min: float = 2.6
    exponent_max: float = 3.6
    citation_offset: float = 55.0
    cap: int = 10_000

    def validate(self) -> None:
        if self.size < 0:
            raise InvalidSpec(f"size must be >= 0, got {self.size}")
        if self.pubs_mean <= 0 or self.pubs_sd < 0:
            raise InvalidSpec("pubs_mean must be positive and pubs_sd non-negative")
        if self.exponent_min <= 1 or self.exponent_max < self.exponent_min:
            raise InvalidSpec(
                f"exponents must satisfy 1 < exponent_min <= exponent_max, "
                f"got [{self.exponent_min}, {self.exponent_max}]"
            )
        if self.citation_offset <= 0 or self.cap < 1:
            raise InvalidSpec("citation_offset and cap must be positive")


def _publication_counts(spec: SyntheticSpec, rng: np.random.Generator) -> np.ndarray:
    mean, var = spec.pubs_mean, spec.pubs_sd**2
    if var > mean:
        r = mean * mean / (var - mean)
        counts = rng.negative_binomial(r, r / (r + mean), size=spec.size)
    else:
        counts = rng.poisson(mean, size=spec.size)
    return np.maximum(counts, 1)


def generate_cohort(spec: SyntheticSpec, seed: int) -> list[ScientistProfile]:
    spec.validate()
    rng = np.random.default_rng(seed)
    n_pubs = _publication_counts(spec, rng)
    exponents = rng.uniform(spec.exponent_min, spec.exponent_max, size=spec.size)
    support = np.arange(spec.cap + 1, dtype=float)
    width = max(3, len(str(spec.size)))
    cohort = []
    for i, (n, alpha) in enumerate(zip(n_pubs, exponents), start=1):
        cdf = np.cumsum((support + spec.citation_offset) ** -alpha)
        cdf /= cdf[-1]
        draws = np.searchsorted(cdf, rng.random(int(n)), side="right")
        citations = tuple(int(c) for c in np.minimum(draws, spec.cap))
        cohort.append(ScientistProfile(f"S{i:0{width}d}", citations))
    return cohort

