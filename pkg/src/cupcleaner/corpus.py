"""Sample data model and line-delimited JSON dataset I/O.

One record per line with keys ``id, old_code, new_code, old_comment,
new_comment, split, meta``. Text is opaque unicode and is not normalized at
ingestion; unknown top-level keys are preserved into ``meta`` so cleaning
never destroys upstream provenance. Malformed lines are collected as rejects
with their line number and reason - never silently dropped.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InputError

SPLITS = ("train", "valid", "test")
TEXT_FIELDS = ("old_code", "new_code", "old_comment", "new_comment")
RECORD_KEYS = ("id",) + TEXT_FIELDS + ("split", "meta")


@dataclass
class Sample:
    """One comment-updating instance.

    The four text fields are always present; they may be empty strings, which
    downstream scoring treats as degenerate input. ``meta`` carries free-form
    provenance strings.
    """

    id: str
    old_code: str
    new_code: str
    old_comment: str
    new_comment: str
    split: str = "train"
    meta: dict[str, str] = field(default_factory=dict)


@dataclass
class Reject:
    line_no: int
    reason: str


@dataclass
class Dataset:
    samples: list[Sample] = field(default_factory=list)
    source_path: str = ""
    rejects: list[Reject] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.samples)

    def split_counts(self) -> dict[str, int]:
        counts = {s: 0 for s in SPLITS}
        for sample in self.samples:
            counts[sample.split] = counts.get(sample.split, 0) + 1
        return counts


def _stringify(value) -> str:
    if isinstance(value, str):
        return value
    return json.dumps(value, ensure_ascii=False, sort_keys=True)


def _parse_record(record: dict, line_no: int, split_override: str | None) -> Sample:
    for name in TEXT_FIELDS:
        if name not in record:
            raise ValueError(f"missing field {name!r}")
        if not isinstance(record[name], str):
            raise ValueError(f"field {name!r} is not a string")

    raw_id = record.get("id")
    if raw_id is None or raw_id == "":
        sample_id = f"line-{line_no}"
    elif isinstance(raw_id, str):
        sample_id = raw_id
    else:
        raise ValueError("field 'id' is not a string")

    split = split_override or record.get("split") or "train"
    if split not in SPLITS:
        raise ValueError(f"invalid split {split!r}")

    raw_meta = record.get("meta", {})
    if not isinstance(raw_meta, dict):
        raise ValueError("field 'meta' is not an object")
    meta = {str(k): _stringify(v) for k, v in raw_meta.items()}
    for key, value in record.items():
        if key not in RECORD_KEYS and key not in meta:
            meta[key] = _stringify(value)

    return Sample(
        id=sample_id,
        old_code=record["old_code"],
        new_code=record["new_code"],
        old_comment=record["old_comment"],
        new_comment=record["new_comment"],
        split=split,
        meta=meta,
    )


def load_dataset(path: str | Path, split_override: str | None = None) -> Dataset:
    """Read a line-delimited JSON dataset, collecting per-line rejects.

    ``split_override`` stamps every sample with the given split regardless of
    what the record says (the pipeline passes the role the file plays).
    Records without an id receive the synthetic id ``line-<n>``. An unreadable
    file raises :class:`InputError`; malformed lines become rejects.
    """
    if split_override is not None and split_override not in SPLITS:
        raise InputError(f"invalid split override {split_override!r}")
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc

    # Split on "\n" only: json.dumps leaves U+2028/U+2029 unescaped, and
    # str.splitlines would cut records at them.
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()

    ds = Dataset(source_path=str(path))
    seen_ids: set[str] = set()
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            ds.rejects.append(Reject(line_no, "empty line"))
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            ds.rejects.append(Reject(line_no, f"invalid JSON: {exc.msg}"))
            continue
        if not isinstance(record, dict):
            ds.rejects.append(Reject(line_no, "line is not a JSON object"))
            continue
        try:
            sample = _parse_record(record, line_no, split_override)
        except ValueError as exc:
            ds.rejects.append(Reject(line_no, str(exc)))
            continue
        if sample.id in seen_ids:
            ds.rejects.append(Reject(line_no, f"duplicate id {sample.id!r}"))
            continue
        seen_ids.add(sample.id)
        ds.samples.append(sample)
    return ds


def sample_to_record(sample: Sample) -> dict:
    return {
        "id": sample.id,
        "old_code": sample.old_code,
        "new_code": sample.new_code,
        "old_comment": sample.old_comment,
        "new_comment": sample.new_comment,
        "split": sample.split,
        "meta": sample.meta,
    }


def write_dataset(samples: list[Sample], path: str | Path) -> int:
    """Write samples as line-delimited JSON; returns the record count.

    Round-trips with :func:`load_dataset` field for field: newlines and other
    control characters inside text fields are JSON-escaped into one line.
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            for sample in samples:
                fh.write(json.dumps(sample_to_record(sample), ensure_ascii=False))
                fh.write("\n")
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc
    return len(samples)


def write_rejects(entries: list[dict], path: str | Path) -> int:
    """Write a rejects report (one JSON object per line)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for entry in entries:
            fh.write(json.dumps(entry, ensure_ascii=False))
            fh.write("\n")
    return len(entries)
