"""Command-line interface: ``hsrm indicators|fit|cohort|simulate``.

Exit codes: 0 success, 2 usage or input error, 1 internal error.  Tables go
to stdout (or ``--output``), diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import traceback
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from . import __version__
from .cohort import build_table, fit_cohort, generate_cohort, resolve_metric
from .config import Settings, load_settings
from .errors import InputError, ZeroCitations
from .indicators import classify, compute_areas, compute_h
from .ingest import dumps, infer_format, load_profiles
from .plotting import PlotSpec, render_cohort_svg, render_svg
from .report import (
    FIT_COLUMNS,
    INDICATOR_ALIASES,
    INDICATOR_COLUMNS,
    STYLES,
    fit_notes,
    fit_row,
    indicator_row,
    render,
    render_cohort,
)


def _safe_name(scientist_id: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", scientist_id) or "_"


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load(args: argparse.Namespace):
    if not args.input:
        raise InputError("--input is required")
    profiles = load_profiles(args.input, args.format)
    return profiles


def cmd_indicators(args: argparse.Namespace, settings: Settings) -> int:
    profiles = _load(args)
    rows = []
    for p in profiles:
        h = compute_h(p)
        try:
            ind = compute_areas(p)
            kind = classify(ind, settings.thresholds)
        except ZeroCitations:
            ind, kind = None, None
        rows.append(indicator_row(p, ind, kind, h, args.decimals))
    header = list(INDICATOR_COLUMNS)
    if args.metric_only:
        column = INDICATOR_ALIASES.get(args.metric_only, args.metric_only)
        if column not in INDICATOR_COLUMNS:
            raise InputError(f"unknown column {args.metric_only!r}; choose from {', '.join(INDICATOR_COLUMNS)}")
        i = INDICATOR_COLUMNS.index(column)
        header, rows = [column], [[r[i]] for r in rows]
    _emit(render(header, rows, args.style), args.output)
    return 0


def cmd_fit(args: argparse.Namespace, settings: Settings) -> int:
    profiles = [p for p in _load(args) if p.n > 0]
    if not profiles:
        raise InputError("input contains no scientists")
    outcomes = fit_cohort(profiles, settings.fit, jobs=args.jobs)
    rows = []
    records = []
    if args.plot_dir:
        Path(args.plot_dir).mkdir(parents=True, exist_ok=True)
    for p in profiles:
        outcome = outcomes[p.scientist_id]
        h = compute_h(p)
        rows.append(fit_row(p.scientist_id, h, outcome))
        records.append({
            "scientist_id": p.scientist_id,
            "k": outcome.series.k,
            "h": h,
            "fit": outcome.fit.to_dict() if outcome.fit else None,
            "applicability": outcome.applicability.to_dict(),
            "error": outcome.error,
        })
        if args.plot_dir and outcome.fit is not None and outcome.fit.converged:
            svg = render_svg(outcome.fit, outcome.series, PlotSpec(title=p.scientist_id, h=h))
            (Path(args.plot_dir) / f"{_safe_name(p.scientist_id)}.svg").write_text(svg, encoding="utf-8")
        elif args.plot_dir:
            print(f"{p.scientist_id}: no plot, fit did not converge", file=sys.stderr)
    if args.emit_json:
        Path(args.emit_json).write_text(json.dumps(records, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    _emit(render(FIT_COLUMNS, rows, args.style, fit_notes()), args.output)
    return 0


def cmd_cohort(args: argparse.Namespace, settings: Settings) -> int:
    metrics = [resolve_metric(m) for m in (args.metric or ["h2_lower", "h2", "h2_upper"])]
    profiles = _load(args)
    outcomes = fit_cohort(profiles, settings.fit, jobs=args.jobs) if "srm_value" in metrics else None
    if args.plot_dir:
        Path(args.plot_dir).mkdir(parents=True, exist_ok=True)
    blocks = []
    for metric in metrics:
        table = build_table(profiles, outcomes, metric)
        blocks.append(render_cohort(table, args.style, args.decimals))
        if args.plot_dir:
            svg = render_cohort_svg(table)
            (Path(args.plot_dir) / f"cohort_{metric}.svg").write_text(svg, encoding="utf-8")
    _emit("\n".join(blocks), args.output)
    return 0


def cmd_simulate(args: argparse.Namespace, settings: Settings) -> int:
    spec = settings.synthetic
    if args.size is not None:
        spec = replace(spec, size=args.size)
    profiles = generate_cohort(spec, args.seed)
    fmt = args.format or (infer_format(args.output) if args.output else "csv")
    _emit(dumps(profiles, fmt), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--input", metavar="PATH", help="CSV or JSON publication records")
    shared.add_argument("--format", choices=("csv", "json"), help="override format inferred from extension")
    shared.add_argument("--config", metavar="PATH", help="key = value settings file")
    shared.add_argument("--output", metavar="PATH", help="write the result here instead of stdout")

    table = argparse.ArgumentParser(add_help=False)
    table.add_argument("--style", choices=STYLES, default="tsv", help="tab-separated or aligned text")

    parser = argparse.ArgumentParser(prog="hsrm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("indicators", parents=[shared, table], help="h index and area shares per scientist")
    p.add_argument("--decimals", type=int, default=1)
    p.add_argument("--metric-only", metavar="COLUMN", help="print a single column")
    p.set_defaults(func=cmd_indicators)

    p = sub.add_parser("fit", parents=[shared, table], help="sRM value per scientist")
    p.add_argument("--plot-dir", metavar="DIR", help="write one SVG per fitted scientist")
    p.add_argument("--emit-json", metavar="PATH", help="dump full fit records as JSON")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("cohort", parents=[shared, table], help="statistics by h-index bin")
    p.add_argument("--metric", action="append", help="h2_lower, h2, h2_upper or srm (repeatable)")
    p.add_argument("--decimals", type=int, default=None)
    p.add_argument("--plot-dir", metavar="DIR", help="write a bin-means SVG per metric")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_cohort)

    p = sub.add_parser("simulate", parents=[shared], help="write a synthetic power-law cohort")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--size", type=int, default=None)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        settings = load_settings(args.config)
        return args.func(args, settings)
    except InputError as exc:
        print(f"hsrm {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc(file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
