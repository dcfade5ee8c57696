"""Column-kind inference, value distributions, and categorical filters.

A schema-less export does not say which questions were free text, so we
classify each column from the distribution of its answers: mostly-unique,
longish values read as open-ended; small vocabularies read as categorical;
delimiter-joined small vocabularies read as multi-select.  Thresholds live in
:class:`surveyscope.config.SchemaThresholds` so deployments can tune them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any

from .config import SchemaThresholds
from .errors import NonCategoricalFilter, UnknownColumn
from .ingest import RawTable

# Delimiters tried, in order, when probing for multi-select columns.
MULTI_SELECT_DELIMITERS = (";", ", ")


class ColumnKind(str, Enum):
    OPEN_ENDED = "OpenEnded"
    CATEGORICAL = "Categorical"
    MULTI_SELECT = "MultiSelectCategorical"
    OTHER = "Other"

    def is_categorical(self) -> bool:
        return self in (ColumnKind.CATEGORICAL, ColumnKind.MULTI_SELECT)


@dataclass(frozen=True)
class ColumnProfile:
    name: str
    kind: ColumnKind
    nonempty_count: int
    nonempty_rate: float
    distinct_count: int
    mean_chars: float
    value_counts: dict[str, int] | None = None  # categorical kinds only
    multi_select_delimiter: str | None = None

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "kind": self.kind.value,
            "nonempty_count": self.nonempty_count,
            "nonempty_rate": self.nonempty_rate,
            "distinct_count": self.distinct_count,
            "mean_chars": self.mean_chars,
            "value_counts": self.value_counts,
            "multi_select_delimiter": self.multi_select_delimiter,
        }


@dataclass(frozen=True)
class FilterSpec:
    """Conjunction of per-column accepted-value sets (atomic values for
    multi-select columns)."""

    constraints: dict[str, frozenset[str]]

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "FilterSpec":
        return cls({col: frozenset(str(v) for v in vals) for col, vals in raw.items()})

    def canonical(self) -> dict[str, list[str]]:
        """Sorted form used for cache keys and serialization."""
        return {col: sorted(vals) for col, vals in sorted(self.constraints.items())}


@dataclass(frozen=True)
class ResponseSet:
    """Nonempty, whitespace-trimmed answers to one question."""

    question: str
    items: tuple[tuple[int, str], ...]  # (row_id, text)
    total_rows_considered: int

    def __len__(self) -> int:
        return len(self.items)

    @property
    def row_ids(self) -> tuple[int, ...]:
        return tuple(rid for rid, _ in self.items)

    @property
    def texts(self) -> tuple[str, ...]:
        return tuple(text for _, text in self.items)


def split_atoms(value: str, delimiter: str) -> list[str]:
    """Split a multi-select cell into trimmed, nonempty atomic values."""
    return [part for part in (p.strip() for p in value.split(delimiter)) if part]


def detect_multi_select(
    values: list[str],
    thresholds: SchemaThresholds | None = None,
) -> tuple[str, set[str]] | None:
    """Probe whether ``values`` look like delimiter-joined selections.

    Fires on the first delimiter where (a) at least ``multi_select_min_rate``
    of values contain it, (b) the atomic vocabulary stays small
    (<= max(30, 2*sqrt(N))), and (c) every atomic value also occurs as a
    complete value or in at least 2 distinct combinations.  Free text with
    incidental delimiters fails (b) or (c) because its vocabulary explodes.
    """
    th = thresholds or SchemaThresholds()
    if not values:
        return None
    n = len(values)
    complete = set(values)
    for delim in MULTI_SELECT_DELIMITERS:
        containing = sum(1 for v in values if delim in v)
        if containing / n < th.multi_select_min_rate:
            continue
        atom_combos: dict[str, set[str]] = {}
        for v in values:
            for atom in split_atoms(v, delim):
                atom_combos.setdefault(atom, set()).add(v)
        vocab = set(atom_combos)
        if not vocab or len(vocab) > max(30, 2 * math.sqrt(n)):
            continue
        supported = all(
            atom in complete or len(combos) >= 2
            for atom, combos in atom_combos.items()
        )
        if supported:
            return delim, vocab
    return None


def _classify(nonempty: list[str], th: SchemaThresholds) -> tuple[ColumnKind, str | None]:
    if len(nonempty) < th.min_nonempty:
        return ColumnKind.OTHER, None
    distinct = len(set(nonempty))
    u = distinct / len(nonempty)
    m = sum(len(v) for v in nonempty) / len(nonempty)
    if (u > th.unique_ratio_open and m > th.mean_chars_open) or m > th.mean_chars_always_open:
        return ColumnKind.OPEN_ENDED, None
    ms = detect_multi_select(nonempty, th)
    if ms is not None:
        return ColumnKind.MULTI_SELECT, ms[0]
    if distinct <= th.max_categorical_distinct or u <= th.low_unique_ratio:
        return ColumnKind.CATEGORICAL, None
    return ColumnKind.OPEN_ENDED, None


def profile_columns(
    table: RawTable,
    thresholds: SchemaThresholds | None = None,
) -> list[ColumnProfile]:
    """One profile per column; classification is deterministic and pure."""
    th = thresholds or SchemaThresholds()
    total = len(table.rows)
    profiles: list[ColumnProfile] = []
    for col in table.columns:
        nonempty = [v for v in (row[col].strip() for row in table.rows) if v]
        kind, delim = _classify(nonempty, th)
        counts: dict[str, int] | None = None
        if kind is ColumnKind.CATEGORICAL:
            counts = {}
            for v in nonempty:
                counts[v] = counts.get(v, 0) + 1
        elif kind is ColumnKind.MULTI_SELECT:
            assert delim is not None
            counts = {}
            for v in nonempty:
                for atom in split_atoms(v, delim):
                    counts[atom] = counts.get(atom, 0) + 1
        profiles.append(
            ColumnProfile(
                name=col,
                kind=kind,
                nonempty_count=len(nonempty),
                nonempty_rate=(len(nonempty) / total) if total else 0.0,
                distinct_count=len(set(nonempty)),
                mean_chars=(sum(len(v) for v in nonempty) / len(nonempty)) if nonempty else 0.0,
                value_counts=counts,
                multi_select_delimiter=delim,
            )
        )
    return profiles


def _profile_map(profiles: list[ColumnProfile]) -> dict[str, ColumnProfile]:
    return {p.name: p for p in profiles}


def apply_filters(table: RawTable, profiles: list[ColumnProfile], spec: FilterSpec) -> RawTable:
    """Keep rows matching all constraints; a multi-select cell matches when
    any of its atomic values is accepted.  Row ids are preserved."""
    by_name = _profile_map(profiles)
    checks: list[tuple[str, frozenset[str], str | None]] = []
    for col, accepted in spec.constraints.items():
        prof = by_name.get(col)
        if prof is None:
            raise UnknownColumn(col)
        if not prof.kind.is_categorical():
            raise NonCategoricalFilter(f"{col} is {prof.kind.value}")
        checks.append((col, accepted, prof.multi_select_delimiter))

    if not checks:
        return table

    def matches(row: dict[str, str]) -> bool:
        for col, accepted, delim in checks:
            value = row[col].strip()
            if delim is not None:
                if not any(atom in accepted for atom in split_atoms(value, delim)):
                    return False
            elif value not in accepted:
                return False
        return True

    keep = [i for i, row in enumerate(table.rows) if matches(row)]
    return replace(
        table,
        rows=tuple(table.rows[i] for i in keep),
        row_ids=tuple(table.row_ids[i] for i in keep),
    )


def response_set(table: RawTable, question: str) -> ResponseSet:
    """Trimmed, nonempty answers to ``question`` in row order."""
    if question not in table.columns:
        raise UnknownColumn(question)
    items = []
    for rid, row in zip(table.row_ids, table.rows):
        text = row[question].strip()
        if text:
            items.append((rid, text))
    return ResponseSet(question=question, items=tuple(items), total_rows_considered=len(table.rows))
