"""Read and write publication records as CSV or JSON."""

from __future__ import annotations

import csv
import io
import json
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, TextIO

from .errors import (
    DuplicateKey,
    IngestError,
    InvalidProfile,
    MalformedRow,
    NegativeCitations,
    NonIntegerCitations,
)
from .indicators import ScientistProfile

CSV_HEADER = ("scientist_id", "publication_id", "citations")
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class RawRecord:
    scientist_id: str
    publication_id: str
    citations: int
    line: int | None = None


def _parse_count(text: str, line: int) -> int:
    try:
        value = int(text.strip())
    except ValueError:
        raise NonIntegerCitations(f"citations {text!r} is not an integer", line) from None
    if value < 0:
        raise NegativeCitations(f"citations must be >= 0, got {value}", line)
    return value


def parse_csv(stream: TextIO | str) -> list[RawRecord]:
    """Parse ``scientist_id,publication_id,citations`` rows.

    Blank lines are skipped.  Line numbers count the header as line 1.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    reader = csv.reader(stream, quoting=csv.QUOTE_NONE)
    records: list[RawRecord] = []
    seen: dict[tuple[str, str], int] = {}
    header_seen = False
    for row in reader:
        line = reader.line_num
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if not header_seen:
            if tuple(row) != CSV_HEADER:
                raise MalformedRow(f"expected header {','.join(CSV_HEADER)!r}, got {','.join(row)!r}", line)
            header_seen = True
            continue
        if len(row) != 3:
            raise MalformedRow(f"expected 3 columns, got {len(row)}", line)
        sid, pid, count = row
        if not sid or not pid:
            raise MalformedRow("empty scientist_id or publication_id", line)
        key = (sid, pid)
        if key in seen:
            raise DuplicateKey(f"duplicate publication {pid!r} for {sid!r} (first on line {seen[key]})", line)
        seen[key] = line
        records.append(RawRecord(sid, pid, _parse_count(count, line), line))
    if not header_seen:
        raise MalformedRow("missing header", 1)
    return records


def assemble_profiles(records: Iterable[RawRecord]) -> list[ScientistProfile]:
    """One profile per scientist, ordered by id."""
    grouped: dict[str, list[int]] = defaultdict(list)
    for r in records:
        grouped[r.scientist_id].append(r.citations)
    return [ScientistProfile(sid, tuple(grouped[sid])) for sid in sorted(grouped)]


def parse_json(stream: TextIO | str) -> list[ScientistProfile]:
    """Parse ``{"scientists": [{"id": ..., "citations": [...]}, ...]}``."""
    text = stream if isinstance(stream, str) else stream.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedRow(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("scientists"), list):
        raise MalformedRow('top level must be an object with a "scientists" list')
    profiles = {}
    for i, entry in enumerate(doc["scientists"]):
        where = f"scientists[{i}]"
        if not isinstance(entry, dict) or not isinstance(entry.get("id"), str):
            raise MalformedRow(f'{where}: expected an object with a string "id"')
        sid = entry["id"]
        counts = entry.get("citations")
        if not isinstance(counts, list):
            raise MalformedRow(f'{where}: "citations" must be a list')
        for c in counts:
            if isinstance(c, bool) or not isinstance(c, int):
                raise NonIntegerCitations(f"{where}: citation count {c!r} is not an integer")
            if c < 0:
                raise NegativeCitations(f"{where}: citations must be >= 0, got {c}")
        if sid in profiles:
            raise DuplicateKey(f"{where}: duplicate scientist id {sid!r}")
        try:
            profiles[sid] = ScientistProfile(sid, tuple(counts))
        except InvalidProfile as exc:
            raise MalformedRow(f"{where}: {exc}") from None
    return [profiles[sid] for sid in sorted(profiles)]


def infer_format(path: str | Path, explicit: str | None = None) -> str:
    if explicit:
        if explicit not in FORMATS:
            raise IngestError(f"unknown format {explicit!r}; use csv or json")
        return explicit
    suffix = Path(path).suffix.lower().lstrip(".")
    if suffix not in FORMATS:
        raise IngestError(f"cannot infer format from {str(path)!r}; pass --format csv|json")
    return suffix


def load_profiles(path: str | Path, fmt: str | None = None) -> list[ScientistProfile]:
    fmt = infer_format(path, fmt)
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            if fmt == "csv":
                return assemble_profiles(parse_csv(fh))
            return parse_json(fh)
    except (OSError, UnicodeDecodeError) as exc:
        raise IngestError(f"cannot read {str(path)!r}: {exc}") from None


def dumps_json(profiles: Sequence[ScientistProfile]) -> str:
    doc = {"scientists": [{"id": p.scientist_id, "citations": list(p.citations)} for p in profiles]}
    return json.dumps(doc, indent=1) + "\n"


def dumps_csv(profiles: Sequence[ScientistProfile]) -> str:
    """CSV with publication ids ``p1..pn`` in descending citation order."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n", quoting=csv.QUOTE_NONE)
    writer.writerow(CSV_HEADER)
    for p in profiles:
        for j, c in enumerate(p.citations, start=1):
            writer.writerow((p.scientist_id, f"p{j}", c))
    return out.getvalue()


def dumps(profiles: Sequence[ScientistProfile], fmt: str) -> str:
    return dumps_csv(profiles) if fmt == "csv" else dumps_json(profiles)
