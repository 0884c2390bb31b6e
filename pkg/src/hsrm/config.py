"""Plain ``key = value`` configuration files.

One file may carry fit settings, generator settings and classification
thresholds side by side; keys are disjoint.  ``#`` and ``;`` start comments,
list values are comma-separated.  Example::

    tol = 1e-10
    min_publications = 20
    seed_grid = classic
    exponent_min = 2.2
    upper_threshold = 70
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .cohort import SyntheticSpec
from .errors import InvalidConfig
from .indicators import ClassificationConfig
from .srm import FitConfig

_SECTION = "settings"


@dataclass(frozen=True)
class Settings:
    fit: FitConfig = field(default_factory=FitConfig)
    synthetic: SyntheticSpec = field(default_factory=SyntheticSpec)
    thresholds: ClassificationConfig = field(default_factory=ClassificationConfig)


def _field_types(cls) -> dict[str, Any]:
    return {f.name: f.type for f in dataclasses.fields(cls) if f.init}


def _convert(key: str, raw: str, type_name: str):
    raw = raw.strip()
    try:
        if type_name.startswith("tuple"):
            return tuple(float(v) for v in raw.split(",") if v.strip())
        if type_name == "int":
            return int(raw.replace("_", ""))
        if type_name == "float":
            return float(raw)
        return raw
    except ValueError:
        raise InvalidConfig(f"{key}: cannot parse {raw!r} as {type_name}") from None


def parse_settings(text: str) -> Settings:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        parser.read_string(f"[{_SECTION}]\n{text}")
    except configparser.Error as exc:
        raise InvalidConfig(f"malformed config: {exc}") from None
    values = dict(parser.items(_SECTION))

    targets = {"fit": FitConfig, "synthetic": SyntheticSpec, "thresholds": ClassificationConfig}
    kwargs: dict[str, dict[str, Any]] = {name: {} for name in targets}
    owners = {key: name for name, cls in targets.items() for key in _field_types(cls)}
    for key, raw in values.items():
        if key not in owners:
            raise InvalidConfig(f"unknown config key {key!r}")
        owner = owners[key]
        kwargs[owner][key] = _convert(key, raw, _field_types(targets[owner])[key])
    try:
        settings = Settings(**{name: cls(**kwargs[name]) for name, cls in targets.items()})
    except ValueError as exc:
        raise InvalidConfig(str(exc)) from None
    settings.thresholds.validate()
    return settings


def load_settings(path: str | Path | None) -> Settings:
    if path is None:
        return Settings()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidConfig(f"cannot read config {str(path)!r}: {exc.strerror}") from None
    return parse_settings(text)
