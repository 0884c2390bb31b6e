"""SVG figures: cumulative citations with the fitted segmented curve, and cohort bin means."""

from __future__ import annotations

import io
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Sequence

import matplotlib
import numpy as np
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure

from .cohort import METRIC_TITLES, CohortTable
from .errors import NotConverged
from .indicators import compute_h
from .srm import CumulativeSeries, SrmFit

# 1 SVG user unit (pt) == 1 pixel
_DPI = 72

_RC = {
    "svg.hashsalt": "hsrm",
    "svg.fonttype": "none",
    "path.simplify": False,
    "font.family": "DejaVu Sans",
    "font.size": 10,
}

SVG_NS = "{http://www.w3.org/2000/svg}"


@dataclass(frozen=True)
class PlotSpec:
    width: int = 640
    height: int = 440
    title: str | None = None
    # points per fitted segment
    samples: int = 200
    # h marker position; derived from the series increments when omitted
    h: int | None = None


def _series_h(series: CumulativeSeries) -> int:
    y = np.asarray(series.y)
    counts = np.diff(y, prepend=0.0)
    return compute_h([int(round(c)) for c in counts])


def segment_polylines(fit: SrmFit, series: CumulativeSeries, samples: int = 200):
    """``(x, y)`` arrays of the quadratic part on ``[1, z0]`` and the linear part on ``[z0, k]``."""
    p = fit.params
    z0 = fit.z0
    xq = np.linspace(min(1.0, z0), z0, samples)
    yq = p.b0 + p.b1 * xq + p.b2 * xq * xq
    xl = np.linspace(z0, max(float(series.k), z0), samples)
    yl = p.b0 + p.b1 * z0 + p.b2 * z0 * z0 + p.b3 * (xl - z0)
    return (xq, yq), (xl, yl)


def _render(fig: Figure) -> str:
    buf = io.StringIO()
    FigureCanvasSVG(fig).print_svg(buf, metadata={"Date": None})
    return buf.getvalue()


def render_svg(fit: SrmFit, series: CumulativeSeries, spec: PlotSpec | None = None) -> str:
    """Cumulative citations by rank with both fitted segments and the sRM/h markers."""
    if not fit.converged:
        raise NotConverged("refusing to plot a fit that did not converge")
    spec = spec or PlotSpec()
    h = spec.h if spec.h is not None else _series_h(series)
    (xq, yq), (xl, yl) = segment_polylines(fit, series, spec.samples)

    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(spec.width / _DPI, spec.height / _DPI), dpi=_DPI)
        ax = fig.add_axes((0.11, 0.16, 0.85, 0.74))
        ax.plot(series.x, series.values(), "o", color="tab:red", ms=4, gid="srm-data",
                label="cumulative citations")
        ax.plot(xq, yq, "-", color="tab:blue", lw=1.5, gid="srm-quadratic", label="quadratic part")
        ax.plot(xl, yl, "-", color="tab:green", lw=1.5, gid="srm-linear", label="linear part")
        ax.axvline(fit.z0, color="0.3", ls="--", lw=1, gid="srm-breakpoint")
        ax.axvline(h, color="0.6", ls=":", lw=1, gid="h-marker")
        top = max(float(np.max(series.values())), float(np.max(yq)), float(np.max(yl)))
        ax.text(fit.z0, top, f" sRM = {fit.z0:.2f}", va="top", ha="left", gid="srm-label")
        ax.text(h, top * 0.06, f"h = {h} ", va="bottom", ha="right", gid="h-label")
        ax.set_xlim(0, series.k + 1)
        ax.set_ylim(0, top * 1.05)
        ax.set_xlabel("publication rank")
        ax.set_ylabel("cumulative citations")
        if spec.title:
            ax.set_title(spec.title)
        ax.legend(loc="lower right", frameon=False)
        fig.text(0.5, 0.02, f"R² = {fit.r_squared:.3f}", ha="center", gid="srm-caption")
        return _render(fig)


def render_cohort_svg(table: CohortTable, spec: PlotSpec | None = None) -> str:
    """Bin means with +/- one SD bars for a cohort table."""
    spec = spec or PlotSpec()
    labels = [row.bin.label for row in table.rows]
    means = [row.stats.mean if row.stats.mean is not None else np.nan for row in table.rows]
    sds = [row.stats.sd if row.stats.sd is not None else 0.0 for row in table.rows]
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(spec.width / _DPI, spec.height / _DPI), dpi=_DPI)
        ax = fig.add_axes((0.12, 0.14, 0.84, 0.76))
        xs = np.arange(len(labels))
        ax.errorbar(xs, means, yerr=sds, fmt="o", color="tab:blue", capsize=3, gid="bin-means")
        ax.set_xticks(xs)
        ax.set_xticklabels(labels)
        ax.set_xlabel("h index")
        ax.set_ylabel(METRIC_TITLES[table.metric])
        ax.set_title(spec.title or f"{METRIC_TITLES[table.metric]} by h index")
        return _render(fig)


_NUMBER = re.compile(r"-?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?")


def polyline_points(svg: str, gid: str) -> list[tuple[float, float]]:
    """Vertices of the first path inside the group ``gid`` (SVG user units)."""
    root = ET.fromstring(svg)
    for group in root.iter(f"{SVG_NS}g"):
        if group.get("id") == gid:
            path = next(group.iter(f"{SVG_NS}path"))
            nums = [float(v) for v in _NUMBER.findall(path.get("d", ""))]
            return list(zip(nums[0::2], nums[1::2]))
    raise KeyError(gid)


def join_gap(svg: str) -> float:
    """Distance in pixels between the end of the quadratic and the start of the linear segment."""
    quad = polyline_points(svg, "srm-quadratic")
    lin = polyline_points(svg, "srm-linear")
    (x1, y1), (x2, y2) = quad[-1], lin[0]
    return float(np.hypot(x1 - x2, y1 - y2))


def svg_texts(svg: str) -> Sequence[str]:
    root = ET.fromstring(svg)
    return ["".join(t.itertext()) for t in root.iter(f"{SVG_NS}text")]
