"""Subject-level binary outcomes: CSV loading, subgroup counts and interval tables.

The expected CSV layout is UTF-8, comma separated, with a header row. The
``outcome`` column is required; ``subject_id`` is optional (row numbers are
used when absent). Every other column is a categorical attribute usable in
subgroup filters.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping, Sequence

from .errors import PropintError, RowError, SchemaError
from .intervals import Counts, Interval, check_method, compute_interval
from .numerics import as_level

__all__ = [
    "SubjectRecord",
    "SubgroupCounts",
    "AnalysisRow",
    "load_dataset",
    "aggregate",
    "analyze",
    "parse_filter",
    "synthetic_records",
    "demo_records",
    "write_dataset",
]

_TRUE = {"1", "true", "yes"}
_FALSE = {"0", "false", "no"}


@dataclass(frozen=True)
class SubjectRecord:
    subject_id: str
    outcome: int
    attributes: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class SubgroupCounts:
    filter: Mapping[str, str]
    counts: Counts


@dataclass(frozen=True)
class AnalysisRow:
    filter: Mapping[str, str]
    counts: Counts
    method: str
    interval: Interval | None
    error: str | None = None


def _parse_outcome(raw: str, line: int) -> int:
    token = raw.strip().lower()
    if token in _TRUE:
        return 1
    if token in _FALSE:
        return 0
    raise RowError(line, f"outcome {raw!r} is not one of 0/1/true/false/yes/no")


def load_dataset(source) -> list[SubjectRecord]:
    """Read subject records from a CSV stream, bytes, or path.

    Raises:
        SchemaError: missing ``outcome`` column or duplicate ``subject_id``.
        RowError: an unparseable outcome; the message names the file line.
    """
    if isinstance(source, (bytes, bytearray)):
        text: IO[str] = io.StringIO(source.decode("utf-8"))
    elif isinstance(source, str):
        with open(source, encoding="utf-8", newline="") as fh:
            return load_dataset(io.StringIO(fh.read()))
    elif isinstance(source, io.TextIOBase):
        text = source
    else:
        text = io.TextIOWrapper(source, encoding="utf-8", newline="")

    reader = csv.reader(text)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise SchemaError("empty input: header row required") from None
    if "outcome" not in header:
        raise SchemaError("missing required column 'outcome'")
    if len(set(header)) != len(header):
        raise SchemaError("duplicate column names in header")
    i_out = header.index("outcome")
    i_id = header.index("subject_id") if "subject_id" in header else None
    attr_cols = [(i, h) for i, h in enumerate(header) if i not in (i_out, i_id)]

    records: list[SubjectRecord] = []
    seen: set[str] = set()
    for row in reader:
        line = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise RowError(line, f"expected {len(header)} fields, got {len(row)}")
        sid = row[i_id].strip() if i_id is not None else str(len(records) + 1)
        if not sid:
            raise RowError(line, "empty subject_id")
        if sid in seen:
            raise SchemaError(f"duplicate subject_id {sid!r} (line {line})")
        seen.add(sid)
        outcome = _parse_outcome(row[i_out], line)
        attrs = {name: row[i].strip() for i, name in attr_cols}
        records.append(SubjectRecord(sid, outcome, attrs))
    return records


def aggregate(records: Sequence[SubjectRecord], filter: Mapping[str, str] | None = None) -> SubgroupCounts:
    """Count trials and successes among records matching every ``column=value``."""
    filt = dict(filter or {})
    if records:
        known = set(records[0].attributes)
        unknown = [c for c in filt if c not in known]
        if unknown:
            raise SchemaError(f"unknown filter column(s): {', '.join(sorted(unknown))}")
    n = k = 0
    for rec in records:
        if all(rec.attributes.get(col) == val for col, val in filt.items()):
            n += 1
            k += rec.outcome
    return SubgroupCounts(filt, Counts(n, k))


def analyze(
    records: Sequence[SubjectRecord],
    filters: Iterable[Mapping[str, str] | None],
    methods: Sequence[str],
    level=0.95,
) -> list[AnalysisRow]:
    """Interval table over every (filter, method) pair, filters outermost.

    An empty subgroup or an unsupported regime produces a row with ``error``
    set instead of aborting the whole table.
    """
    if not methods:
        raise SchemaError("at least one method is required")
    for m in methods:
        check_method(m)
    lv = as_level(level)
    rows = []
    for filt in filters:
        sub = aggregate(records, filt)
        for method in methods:
            try:
                interval = compute_interval(method, sub.counts, lv)
            except PropintError as exc:
                rows.append(AnalysisRow(sub.filter, sub.counts, method, None, str(exc)))
            else:
                rows.append(AnalysisRow(sub.filter, sub.counts, method, interval))
    return rows


def parse_filter(text: str) -> dict[str, str]:
    """``"sex=female,region=3"`` -> ``{"sex": "female", "region": "3"}``; ``""`` -> ``{}``."""
    out: dict[str, str] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        col, sep, val = part.partition("=")
        if not sep or not col.strip():
            raise SchemaError(f"filter term {part!r} is not of the form column=value")
        out[col.strip()] = val.strip()
    return out


def synthetic_records(
    cells: Sequence[tuple[Mapping[str, str], int, int]],
    seed: int | None = None,
) -> list[SubjectRecord]:
    """Subjects with exactly ``k`` events out of ``n`` in each attribute cell.

    With a ``seed`` the rows are shuffled reproducibly; subject ids stay
    sequential.
    """
    rows = []
    for attrs, n, k in cells:
        if not 0 <= k <= n:
            raise SchemaError(f"cell {dict(attrs)}: need 0 <= k <= n, got n={n}, k={k}")
        rows.extend((dict(attrs), 1 if i < k else 0) for i in range(n))
    if seed is not None:
        random.Random(seed).shuffle(rows)
    return [SubjectRecord(f"S{i + 1:05d}", out, attrs) for i, (attrs, out) in enumerate(rows)]


# Stand-in for a two-arm trial: 2000 subjects, 338 deaths overall, and a
# small female/region-3 subgroup with 10/90 deaths (control) and 3/90
# (treatment).
DEMO_CELLS = (
    ({"sex": "female", "region": "3", "arm": "control"}, 90, 10),
    ({"sex": "female", "region": "3", "arm": "treatment"}, 90, 3),
    ({"sex": "male", "region": "1", "arm": "control"}, 455, 82),
    ({"sex": "male", "region": "1", "arm": "treatment"}, 455, 81),
    ({"sex": "female", "region": "1", "arm": "control"}, 455, 81),
    ({"sex": "female", "region": "2", "arm": "treatment"}, 455, 81),
)


def demo_records(seed: int = 5) -> list[SubjectRecord]:
    return synthetic_records(DEMO_CELLS, seed=seed)


def write_dataset(records: Sequence[SubjectRecord], stream: IO[str]) -> None:
    columns = sorted({c for r in records for c in r.attributes})
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["subject_id", "outcome", *columns])
    for r in records:
        writer.writerow([r.subject_id, r.outcome, *(r.attributes.get(c, "") for c in columns)])
