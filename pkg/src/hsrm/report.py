"""Tab-separated and aligned-text rendering of result tables."""

from __future__ import annotations

from typing import Sequence

from .cohort import METRIC_TITLES, CohortTable
from .indicators import IndicatorSet, PerformanceType, ScientistProfile
from .srm import PART_SEPARATION_NOTE, SrmOutcome

STYLES = ("tsv", "text")

INDICATOR_COLUMNS = (
    "scientist_id",
    "n",
    "total_citations",
    "h",
    "h2_lower_pct",
    "h2_pct",
    "h2_upper_pct",
    "performance_type",
)
INDICATOR_ALIASES = {"h2_lower": "h2_lower_pct", "h2": "h2_pct", "h2_upper": "h2_upper_pct", "type": "performance_type"}

FIT_COLUMNS = (
    "scientist_id", "k", "h", "srm", "r2", "converged",
    "i", "ii", "iii", "iv", "v", "applicable", "exclusion",
)

COHORT_COLUMNS = ("h_index", "count", "mean", "sd", "min", "max")


def fmt(value: float | None, decimals: int) -> str:
    if value is None:
        return "-"
    return f"{value:.{decimals}f}"


def yes_no(flag: bool) -> str:
    return "yes" if flag else "no"


def render(header: Sequence[str], rows: Sequence[Sequence[str]], style: str = "tsv",
           notes: Sequence[str] = ()) -> str:
    """Header plus rows; ``notes`` become trailing ``#`` lines."""
    if style == "tsv":
        lines = ["\t".join(header)] + ["\t".join(r) for r in rows]
    else:
        widths = [max(len(str(c)) for c in col) for col in zip(header, *rows)]
        lines = []
        for r in (header, *rows):
            cells = [r[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(r[1:], widths[1:])]
            lines.append("  ".join(cells).rstrip())
    lines += [f"# {n}" for n in notes]
    return "\n".join(lines) + "\n"


def indicator_row(
    profile: ScientistProfile,
    indicators: IndicatorSet | None,
    kind: PerformanceType | None,
    h: int,
    decimals: int,
) -> list[str]:
    shares = (
        (indicators.h2_lower_pct, indicators.h2_pct, indicators.h2_upper_pct)
        if indicators is not None
        else (None, None, None)
    )
    return [
        profile.scientist_id,
        str(profile.n),
        str(profile.total_citations),
        str(h),
        *(fmt(s, decimals) for s in shares),
        kind.value if kind is not None else "-",
    ]


def fit_row(scientist_id: str, h: int, outcome: SrmOutcome) -> list[str]:
    fit = outcome.fit
    report = outcome.applicability
    return [
        scientist_id,
        str(outcome.series.k),
        str(h),
        fmt(fit.z0 if fit else None, 2),
        fmt(fit.r_squared if fit else None, 3),
        yes_no(fit.converged) if fit else "no",
        *(yes_no(flag) for flag in report.flags),
        yes_no(report.overall),
        "; ".join(report.reasons) if not report.overall else "-",
    ]


def fit_notes() -> list[str]:
    return [PART_SEPARATION_NOTE]


def cohort_rows(table: CohortTable, decimals: int) -> list[list[str]]:
    rows = []
    for row in (*((r.bin.label, r.stats) for r in table.rows), ("Total", table.total)):
        label, s = row
        rows.append([label, str(s.count), fmt(s.mean, decimals), fmt(s.sd, decimals),
                     fmt(s.min, decimals), fmt(s.max, decimals)])
    return rows


def cohort_notes(table: CohortTable) -> list[str]:
    notes = []
    if table.metric == "srm_value":
        notes.append(
            f"sRM values could not be computed for {table.excluded_count} of the total "
            f"{table.cohort_size} scientists, because one or more requirements were not met."
        )
        notes += [f"excluded by {reason}: {count}" for reason, count in table.exclusion_reasons.items()]
    elif table.excluded_count:
        notes.append(f"{table.excluded_count} of {table.cohort_size} scientists excluded (zero citations).")
    return notes


def render_cohort(table: CohortTable, style: str, decimals: int | None = None) -> str:
    if decimals is None:
        decimals = 2 if table.metric == "srm_value" else 1
    title = f"# {METRIC_TITLES[table.metric]} by h index value"
    return title + "\n" + render(COHORT_COLUMNS, cohort_rows(table, decimals), style, cohort_notes(table))
