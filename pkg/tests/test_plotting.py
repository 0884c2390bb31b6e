from __future__ import annotations

import dataclasses
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from hsrm import build_series, build_table, compute_h, fit
from hsrm.errors import NotConverged
from hsrm.plotting import PlotSpec, join_gap, polyline_points, render_cohort_svg, render_svg, segment_polylines, svg_texts
from hsrm.srm import CumulativeSeries

from oracles import segmented


@pytest.fixture(scope="module")
def noise_free():
    s = CumulativeSeries(tuple(segmented((5, 20, -1, 2), np.arange(1, 31))))
    return s, fit(s)


def test_well_formed_and_complete(noise_free):
    s, f = noise_free
    svg = render_svg(f, s)
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")
    assert float(root.get("width").rstrip("pt")) == 640
    for gid in ("srm-data", "srm-quadratic", "srm-linear", "srm-breakpoint", "h-marker"):
        assert polyline_points(svg, gid)
    texts = svg_texts(svg)
    assert any("sRM = 10.00" in t for t in texts)
    assert any("R² = 1.000" in t for t in texts)


def test_segments_join_at_z0(noise_free):
    s, f = noise_free
    (xq, yq), (xl, yl) = segment_polylines(f, s)
    assert xq[-1] == xl[0] == f.z0
    assert abs(yq[-1] - yl[0]) < 1e-9
    assert join_gap(render_svg(f, s)) < 1.0


def test_h14_labels(h14_profile):
    s = build_series(h14_profile)
    f = fit(s)
    svg = render_svg(f, s, PlotSpec(title="h14", h=compute_h(h14_profile)))
    texts = svg_texts(svg)
    assert any(t.strip().startswith("sRM = 25.") for t in texts)
    assert any(t.strip() == "h = 14" for t in texts)
    assert join_gap(svg) < 1.0
    # the h marker sits at rank 14 in data coordinates, between the axes limits
    (hx, _), *_ = polyline_points(svg, "h-marker")
    (x_zero, _), *_ = polyline_points(svg, "srm-breakpoint")
    assert hx < x_zero


def test_deterministic(noise_free):
    s, f = noise_free
    assert render_svg(f, s) == render_svg(f, s)


def test_not_converged(noise_free):
    s, f = noise_free
    with pytest.raises(NotConverged):
        render_svg(dataclasses.replace(f, converged=False), s)


def test_cohort_svg(synthetic_cohort):
    svg = render_cohort_svg(build_table(synthetic_cohort, metric="h2"))
    ET.fromstring(svg)
    assert "14–15" in "".join(svg_texts(svg))
