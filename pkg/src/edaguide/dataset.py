"""Tabular data ingestion and column role inference.

A loaded table is immutable: every downstream stage (statistics, mining,
sessions) treats it as a shared read-only value.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from enum import Enum

from .config import DEFAULT_CONFIG, EngineConfig, SchemaConfig
from .errors import DuplicateColumnName, EmptyInput, RaggedRows, RoleMismatch, UnknownColumn

# Tokens (case-insensitive, after stripping) treated as missing values.
MISSING_TOKENS = {"", "na", "n/a", "nan", "null", "none"}


class Role(str, Enum):
    CATEGORICAL = "categorical"
    QUANTITATIVE = "quantitative"
    IDENTIFIER = "identifier"


@dataclass(frozen=True)
class Column:
    """One named column; values are str, float, or None (missing).

    After inference a quantitative column holds only floats and Nones;
    categorical and identifier columns hold strings and Nones.
    """

    name: str
    role: Role
    values: tuple = ()

    def non_missing(self) -> list:
        return [v for v in self.values if v is not None]


@dataclass(frozen=True)
class Table:
    name: str
    columns: tuple = ()
    row_count: int = 0

    def __post_init__(self):
        names = [c.name for c in self.columns]
        if len(names) != len(set(names)):
            raise DuplicateColumnName("duplicate column names", names=names)
        for c in self.columns:
            if len(c.values) != self.row_count:
                raise ValueError(f"column {c.name!r} has {len(c.values)} values, expected {self.row_count}")

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise UnknownColumn(f"no column named {name!r}", column=name)

    def has_column(self, name: str) -> bool:
        return any(c.name == name for c in self.columns)

    def categorical_columns(self) -> list[Column]:
        return [c for c in self.columns if c.role == Role.CATEGORICAL]

    def quantitative_columns(self) -> list[Column]:
        return [c for c in self.columns if c.role == Role.QUANTITATIVE]

    def identifier_column(self) -> Column | None:
        for c in self.columns:
            if c.role == Role.IDENTIFIER:
                return c
        return None

    def distinct_values(self, name: str) -> list[str]:
        """Distinct non-missing values of a categorical/identifier column,
        sorted numerically where possible so years and counts read in order."""
        col = self.column(name)
        return sorted({str(v) for v in col.values if v is not None}, key=_value_sort_key)

    def schema_dict(self) -> dict:
        return {
            "name": self.name,
            "rowCount": self.row_count,
            "columns": [
                {
                    "name": c.name,
                    "role": c.role.value,
                    "distinct": len({str(v) for v in c.values if v is not None}),
                    "missing": sum(1 for v in c.values if v is None),
                }
                for c in self.columns
            ],
        }


def _value_sort_key(text: str):
    num = _parse_number(text)
    return (0, num, "") if num is not None else (1, 0.0, text)


def _parse_number(raw) -> float | None:
    """Parse a cell as a finite number; None when it is not one."""
    if raw is None:
        return None
    if isinstance(raw, (int, float)):
        return float(raw) if math.isfinite(raw) else None
    text = str(raw).strip()
    if text.lower() in MISSING_TOKENS:
        return None
    try:
        num = float(text)
    except ValueError:
        return None
    return num if math.isfinite(num) else None


def _is_missing(raw) -> bool:
    if raw is None:
        return True
    return isinstance(raw, str) and raw.strip().lower() in MISSING_TOKENS


def _canonical_text(raw) -> str:
    """Canonical string form of a non-missing cell: integral numbers lose any
    trailing '.0' so '1970' and '1970.0' land in the same group."""
    num = _parse_number(raw)
    if num is not None:
        return str(int(num)) if num.is_integer() else repr(num)
    return str(raw)


def load_table(data: bytes | str, name: str, config: EngineConfig | None = None) -> Table:
    """Parse CSV bytes (UTF-8, header row) and infer column roles.

    Raises EmptyInput when there is no header row, DuplicateColumnName on a
    repeated header, and RaggedRows when a data row's length differs from the
    header's.
    """
    if isinstance(data, bytes):
        text = data.decode("utf-8-sig")
    else:
        text = data.lstrip("﻿")
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise EmptyInput("CSV input has no header row")
    header = rows[0]
    if len(header) != len(set(header)):
        raise DuplicateColumnName("duplicate column names in header", header=header)
    body = []
    for i, row in enumerate(rows[1:]):
        if not row:
            continue        # blank line (e.g. a trailing newline), not data
        if len(row) != len(header):
            raise RaggedRows(
                f"row {i + 2} has {len(row)} fields, header has {len(header)}",
                row=i + 2, expected=len(header), actual=len(row),
            )
        body.append(row)
    columns = tuple(
        Column(name=col, role=Role.CATEGORICAL,
               values=tuple(row[j] for row in body))
        for j, col in enumerate(header)
    )
    table = Table(name=name, columns=columns, row_count=len(body))
    return infer_schema(table, config)


def infer_schema(table: Table, config: EngineConfig | None = None) -> Table:
    """Assign a role to every column from its values and the thresholds.

    A column is numeric when at least ``numeric_share`` of its non-missing
    values parse as numbers. A numeric column is quantitative when it has any
    non-integral value, more than ``max_categorical_distinct`` distinct
    values, or all values distinct (an all-distinct integer column reads as a
    continuous measure, not a grouping dimension); otherwise it groups like a
    categorical column. The first non-numeric column whose values are all
    distinct, or whose distinct count exceeds ``identifier_distinct_cap``, is
    the row identifier.

    Pure: depends only on column values and config. Idempotent on its own
    output. ``role_overrides`` wins over inference per column.
    """
    cfg = (config or DEFAULT_CONFIG).schema
    overrides = {name: Role(role) for name, role in cfg.role_overrides.items()}
    inferred: list[Column] = []
    identifier_taken = any(r == Role.IDENTIFIER for r in overrides.values())
    if sum(1 for r in overrides.values() if r == Role.IDENTIFIER) > 1:
        raise ValueError("role_overrides declare more than one identifier column")

    for col in table.columns:
        role = overrides.get(col.name)
        if role is None:
            role, is_identifier_candidate = _infer_role(col, cfg)
            if is_identifier_candidate and not identifier_taken:
                role = Role.IDENTIFIER
                identifier_taken = True
        inferred.append(_convert(col, role))
    return replace(table, columns=tuple(inferred))


def _infer_role(col: Column, cfg: SchemaConfig) -> tuple[Role, bool]:
    present = [v for v in col.values if not _is_missing(v)]
    if not present:
        return Role.CATEGORICAL, False
    numbers = [n for n in (_parse_number(v) for v in present) if n is not None]
    share = len(numbers) / len(present)
    if share >= cfg.numeric_share:
        distinct = len(set(numbers))
        any_non_integer = any(not n.is_integer() for n in numbers)
        all_distinct = len(numbers) >= 2 and distinct == len(numbers)
        if any_non_integer or distinct > cfg.max_categorical_distinct or all_distinct:
            return Role.QUANTITATIVE, False
        return Role.CATEGORICAL, False
    texts = {_canonical_text(v) for v in present}
    all_distinct = len(texts) == len(present)
    return Role.CATEGORICAL, all_distinct or len(texts) > cfg.identifier_distinct_cap


def _convert(col: Column, role: Role) -> Column:
    if role == Role.QUANTITATIVE:
        values = tuple(_parse_number(v) for v in col.values)
    else:
        values = tuple(None if _is_missing(v) else _canonical_text(v) for v in col.values)
    return Column(name=col.name, role=role, values=values)


def require_role(table: Table, name: str, role: Role) -> Column:
    col = table.column(name)
    if col.role != role:
        raise RoleMismatch(
            f"column {name!r} has role {col.role.value}, expected {role.value}",
            column=name, expected=role.value, actual=col.role.value,
        )
    return col
