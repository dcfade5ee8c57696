"""Survey-export parsing and row sampling.

Turns CSV (RFC 4180, as produced by Google Forms) or JSON Lines byte streams
into a uniform :class:`RawTable`, and enforces the analysis row cap with
seeded, order-preserving reservoir sampling.  All functions are pure: they
take bytes or tables and return new tables, so they are safe from any thread.
"""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass, replace

from .errors import EmptyInput, MalformedLine, UnparsableCsv

# Sniffing window for "is this CSV at all".
_SNIFF_BYTES = 64 * 1024


@dataclass(frozen=True)
class SourceMeta:
    """Provenance of a parsed table."""

    format: str                      # "csv" | "jsonl"
    original_row_count: int          # data rows in the source, pre-sampling
    ragged_row_count: int = 0        # CSV rows padded/truncated to header width
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class RawTable:
    """Parsed survey rows with ordered named columns and stable row ids.

    Every row holds exactly the declared columns (missing values are empty
    strings) and ``row_ids`` are strictly increasing ids assigned from source
    order, preserved through sampling and filtering.
    """

    columns: tuple[str, ...]
    rows: tuple[dict[str, str], ...]
    row_ids: tuple[int, ...]
    source_meta: SourceMeta

    def __post_init__(self) -> None:
        if len(self.rows) != len(self.row_ids):
            raise ValueError("rows and row_ids must be aligned")
        if len(set(self.row_ids)) != len(self.row_ids):
            raise ValueError("row_ids must be unique")
        if any(b <= a for a, b in zip(self.row_ids, self.row_ids[1:])):
            raise ValueError("row_ids must be strictly increasing")
        if self.source_meta.original_row_count < len(self.rows):
            raise ValueError("original_row_count cannot be below the held row count")

    def __len__(self) -> int:
        return len(self.rows)

    def row_by_id(self, row_id: int) -> dict[str, str]:
        idx = self._id_index().get(row_id)
        if idx is None:
            raise KeyError(row_id)
        return self.rows[idx]

    def _id_index(self) -> dict[int, int]:
        # Cached lazily on the instance; frozen dataclass, so via __dict__.
        cached = self.__dict__.get("_id_index_cache")
        if cached is None:
            cached = {rid: i for i, rid in enumerate(self.row_ids)}
            object.__setattr__(self, "_id_index_cache", cached)
        return cached


@dataclass(frozen=True)
class SamplingPolicy:
    """Row cap applied at upload time so every analysis sees the same sample."""

    max_rows: int = 5000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.max_rows < 1:
            raise ValueError("max_rows must be >= 1")


def _dedupe_columns(names: list[str]) -> tuple[str, ...]:
    """Disambiguate duplicate headers by appending " (2)", " (3)", ...

    Empty header cells get a positional name first, since downstream code
    addresses columns by name.
    """
    out: list[str] = []
    seen: dict[str, int] = {}
    for pos, raw in enumerate(names, start=1):
        name = raw if raw.strip() else f"Column {pos}"
        n = seen.get(name, 0) + 1
        seen[name] = n
        if n == 1:
            out.append(name)
            continue
        candidate = f"{name} ({n})"
        while candidate in seen:
            n += 1
            candidate = f"{name} ({n})"
        seen[name] = n
        seen[candidate] = 1
        out.append(candidate)
    return tuple(out)


def parse_csv(data: bytes) -> RawTable:
    """Parse an RFC 4180 CSV byte stream; first record is the header.

    Invalid UTF-8 is replaced, not fatal.  Ragged rows are padded/truncated
    to header width and counted in ``source_meta.ragged_row_count``.
    """
    if not data:
        raise EmptyInput("no bytes")
    data = data.removeprefix(b"\xef\xbb\xbf")  # Google Forms exports carry a BOM
    head = data[:_SNIFF_BYTES]
    if len(data) > _SNIFF_BYTES and b"\n" not in head and b"\r" not in head:
        raise UnparsableCsv("no record separator found in the first 64 KiB")

    text = data.decode("utf-8", errors="replace")
    reader = csv.reader(io.StringIO(text, newline=""))
    records = [rec for rec in reader if rec]  # csv yields [] for blank lines
    if not records:
        raise EmptyInput("no records")
    header, body = records[0], records[1:]
    if not body:
        raise EmptyInput("header only")

    columns = _dedupe_columns(header)
    width = len(columns)
    rows: list[dict[str, str]] = []
    ragged = 0
    for rec in body:
        if len(rec) != width:
            ragged += 1
            rec = rec[:width] + [""] * (width - len(rec))
        rows.append(dict(zip(columns, rec)))

    meta = SourceMeta(format="csv", original_row_count=len(rows), ragged_row_count=ragged)
    return RawTable(columns=columns, rows=tuple(rows), row_ids=tuple(range(len(rows))), source_meta=meta)


def _stringify_scalar(value: object) -> str:
    """Canonical string form for JSONL scalar values."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if value.is_integer():
            return str(int(value))
        return repr(value)  # shortest round-trip form, no trailing zeros
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return value
    raise TypeError(f"unexpected scalar type {type(value)!r}")


def parse_jsonl(data: bytes) -> RawTable:
    """Parse JSON Lines: one flat object per line.

    Columns are the union of keys in first-seen order.  Nested values are
    kept as compact JSON with a warning; malformed lines are skipped with a
    warning and fatal only if every line is malformed.
    """
    if not data:
        raise EmptyInput("no bytes")
    text = data.removeprefix(b"\xef\xbb\xbf").decode("utf-8", errors="replace")
    lines = text.splitlines()

    columns: list[str] = []
    seen_cols: set[str] = set()
    parsed: list[dict[str, str]] = []
    warnings: list[str] = []
    first_error: MalformedLine | None = None
    content_lines = 0

    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        content_lines += 1
        try:
            obj = json.loads(line)
            if not isinstance(obj, dict):
                raise ValueError("line is not a JSON object")
        except ValueError as exc:
            warnings.append(f"line {line_no}: skipped ({exc})")
            if first_error is None:
                first_error = MalformedLine(line_no, str(exc))
            continue
        row: dict[str, str] = {}
        for key, value in obj.items():
            if key not in seen_cols:
                seen_cols.add(key)
                columns.append(key)
            if isinstance(value, (dict, list)):
                row[key] = json.dumps(value, separators=(",", ":"), ensure_ascii=False)
                warnings.append(f"line {line_no}: nested value in {key!r} kept as JSON")
            else:
                row[key] = _stringify_scalar(value)
        parsed.append(row)

    if content_lines == 0:
        raise EmptyInput("no JSON lines")
    if not parsed:
        assert first_error is not None
        raise first_error

    cols = tuple(columns)
    rows = tuple({c: r.get(c, "") for c in cols} for r in parsed)
    meta = SourceMeta(
        format="jsonl",
        original_row_count=len(rows),
        warnings=tuple(warnings),
    )
    return RawTable(columns=cols, rows=rows, row_ids=tuple(range(len(rows))), source_meta=meta)


def sample_rows(table: RawTable, policy: SamplingPolicy) -> RawTable:
    """Cap the table at ``policy.max_rows`` rows, chosen uniformly without
    replacement by seeded reservoir sampling (Algorithm R), preserving the
    original relative order and row ids."""
    n = len(table.rows)
    if n <= policy.max_rows:
        return table

    rng = random.Random(policy.seed)
    k = policy.max_rows
    reservoir = list(range(k))
    for i in range(k, n):
        j = rng.randint(0, i)
        if j < k:
            reservoir[j] = i
    keep = sorted(reservoir)

    return replace(
        table,
        rows=tuple(table.rows[i] for i in keep),
        row_ids=tuple(table.row_ids[i] for i in keep),
    )


def to_csv_bytes(table: RawTable) -> bytes:
    """Serialize a table back to RFC 4180 CSV (used for round-trip checks
    and session snapshots)."""
    buf = io.StringIO(newline="")
    # QUOTE_ALL so an all-empty row still emits a record separator-safe line.
    writer = csv.writer(buf, lineterminator="\r\n", quoting=csv.QUOTE_ALL)
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([row[c] for c in table.columns])
    return buf.getvalue().encode("utf-8")
