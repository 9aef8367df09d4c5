"""Deterministic statistics kernel used by the insight miner.

Pure functions over immutable tables: group aggregation, Pearson correlation,
Tukey-fence outlier detection, and modal-range binning. Missing values are
excluded pairwise/per-operation, never imputed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .dataset import Role, Table, _value_sort_key, require_role
from .errors import InsufficientData, RoleMismatch, ZeroVariance


class Aggregate(str, Enum):
    MEAN = "mean"
    SUM = "sum"
    COUNT = "count"


@dataclass(frozen=True)
class Filter:
    """Single-level drill-down: keep rows where a categorical column equals
    one value. At most one filter per statistics call."""

    column: str
    value: str

    def clause(self) -> str:
        return f"{self.column}={self.value}"


def filter_indices(table: Table, filt: Filter | None) -> list[int]:
    """Row indices surviving the filter (all rows when filt is None)."""
    if filt is None:
        return list(range(table.row_count))
    col = table.column(filt.column)
    if col.role not in (Role.CATEGORICAL, Role.IDENTIFIER):
        raise RoleMismatch(
            f"filter column {filt.column!r} is {col.role.value}, expected categorical",
            column=filt.column,
        )
    return [i for i, v in enumerate(col.values) if v is not None and str(v) == filt.value]


@dataclass(frozen=True)
class GroupAggregate:
    group_by: str
    measure: str
    aggregate: Aggregate
    entries: dict          # group value -> aggregated number
    support: dict          # group value -> non-missing measure count


def group_aggregate(
    table: Table,
    group_by: str,
    measure: str,
    aggregate: Aggregate = Aggregate.MEAN,
    filt: Filter | None = None,
) -> GroupAggregate:
    """Aggregate a quantitative measure per distinct value of a categorical
    column. Groups with zero non-missing measure values are omitted."""
    group_col = require_role(table, group_by, Role.CATEGORICAL)
    measure_col = require_role(table, measure, Role.QUANTITATIVE)
    sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    for i in filter_indices(table, filt):
        g = group_col.values[i]
        m = measure_col.values[i]
        if g is None or m is None:
            continue
        key = str(g)
        sums[key] = sums.get(key, 0.0) + m
        counts[key] = counts.get(key, 0) + 1
    order = sorted(counts, key=_value_sort_key)
    if aggregate == Aggregate.MEAN:
        entries = {k: sums[k] / counts[k] for k in order}
    elif aggregate == Aggregate.SUM:
        entries = {k: sums[k] for k in order}
    else:
        entries = {k: float(counts[k]) for k in order}
    return GroupAggregate(
        group_by=group_by, measure=measure, aggregate=aggregate,
        entries=entries, support={k: counts[k] for k in order},
    )


@dataclass(frozen=True)
class PearsonResult:
    r: float
    n: int


def pearson(table: Table, q1: str, q2: str, filt: Filter | None = None) -> PearsonResult:
    """Pearson product-moment correlation over rows where both values are
    present. Two-pass (mean-centered) computation; exactly symmetric in its
    arguments."""
    if q1 == q2:
        raise ValueError("pearson requires two different columns")
    c1 = require_role(table, q1, Role.QUANTITATIVE)
    c2 = require_role(table, q2, Role.QUANTITATIVE)
    pairs = [
        (c1.values[i], c2.values[i])
        for i in filter_indices(table, filt)
        if c1.values[i] is not None and c2.values[i] is not None
    ]
    n = len(pairs)
    if n < 2:
        raise InsufficientData(f"pearson needs at least 2 complete pairs, got {n}", n=n)
    mx = sum(x for x, _ in pairs) / n
    my = sum(y for _, y in pairs) / n
    sxx = syy = sxy = 0.0
    for x, y in pairs:
        dx, dy = x - mx, y - my
        sxx += dx * dx
        syy += dy * dy
        sxy += dx * dy
    if sxx == 0.0 or syy == 0.0:
        raise ZeroVariance(f"zero variance in {'q1' if sxx == 0 else 'q2'}")
    r = sxy / math.sqrt(sxx * syy)
    return PearsonResult(r=max(-1.0, min(1.0, r)), n=n)


def quantile(sorted_values: list, p: float) -> float:
    """Quantile by linear interpolation between order statistics at position
    h = (n - 1) * p (the 'linear' method, same variant as numpy's default and
    spreadsheet PERCENTILE.INC). Input must be sorted ascending."""
    n = len(sorted_values)
    if n == 0:
        raise InsufficientData("quantile of empty data")
    h = (n - 1) * p
    f = math.floor(h)
    if f + 1 >= n:
        return float(sorted_values[-1])
    return sorted_values[f] + (h - f) * (sorted_values[f + 1] - sorted_values[f])


@dataclass(frozen=True)
class Outlier:
    row_index: int
    value: float
    exceedance: float      # distance beyond the fence in IQR units


def tukey_fences(sorted_values: list, k: float) -> tuple:
    """(lo, hi) fences Q1 - k*IQR and Q3 + k*IQR over pre-sorted values.
    Collapses to (Q1, Q1) when the IQR is zero."""
    q1, q3 = quantile(sorted_values, 0.25), quantile(sorted_values, 0.75)
    iqr = q3 - q1
    return q1 - k * iqr, q3 + k * iqr


def tukey_outliers(
    table: Table, q: str, k: float = 1.5, filt: Filter | None = None
) -> list[Outlier]:
    """Rows whose value lies beyond the Tukey fences Q1 - k*IQR / Q3 + k*IQR.

    Quartiles use linear interpolation (see ``quantile``). When IQR is zero,
    every value different from the median is an outlier with exceedance
    capped at 1.0; otherwise exceedance = distance beyond the fence / IQR.
    Output is ordered by row index and invariant to row order of the input.
    """
    if k <= 0:
        raise ValueError("fence factor k must be positive")
    col = require_role(table, q, Role.QUANTITATIVE)
    indexed = [(i, col.values[i]) for i in filter_indices(table, filt) if col.values[i] is not None]
    if len(indexed) < 4:
        raise InsufficientData(
            f"tukey_outliers needs at least 4 non-missing values, got {len(indexed)}",
            n=len(indexed),
        )
    values = sorted(v for _, v in indexed)
    q1, q3 = quantile(values, 0.25), quantile(values, 0.75)
    iqr = q3 - q1
    out: list[Outlier] = []
    if iqr == 0.0:
        median = quantile(values, 0.5)
        for i, v in indexed:
            if v != median:
                out.append(Outlier(row_index=i, value=v, exceedance=1.0))
        return out
    lo, hi = q1 - k * iqr, q3 + k * iqr
    for i, v in indexed:
        if v < lo:
            out.append(Outlier(row_index=i, value=v, exceedance=(lo - v) / iqr))
        elif v > hi:
            out.append(Outlier(row_index=i, value=v, exceedance=(v - hi) / iqr))
    return out


def nice_width(raw: float) -> float:
    """Smallest 'nice' width (1, 2, 2.5, or 5 times a power of ten) that is
    at least ``raw``."""
    if raw <= 0:
        raise ValueError("raw width must be positive")
    base = 10.0 ** math.floor(math.log10(raw))
    for m in (1.0, 2.0, 2.5, 5.0, 10.0):
        width = m * base
        if width >= raw * (1.0 - 1e-12):
            return width
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class Histogram:
    lo: float              # left edge of the first bin (a multiple of width)
    width: float
    counts: tuple          # per-bin value counts
    total: int

    def edge(self, i: int) -> float:
        return self.lo + i * self.width


def histogram_with_width(values: list, width: float) -> Histogram:
    """Histogram with a fixed bin width, edges aligned to multiples of the
    width, spanning [min, max]. Values on an interior edge fall into the
    right bin; the maximum falls into the last bin. Width 0 collapses to a
    single degenerate bin."""
    if not values:
        raise InsufficientData("histogram of empty data")
    mn, mx = min(values), max(values)
    if width == 0.0 or mn == mx:
        return Histogram(lo=mn, width=0.0, counts=(len(values),), total=len(values))
    lo = math.floor(mn / width) * width
    n_bins = int(math.floor((mx - lo) / width + 1e-9)) + 1
    counts = [0] * n_bins
    for v in values:
        idx = int(math.floor((v - lo) / width + 1e-9))
        counts[min(idx, n_bins - 1)] += 1
    return Histogram(lo=lo, width=width, counts=tuple(counts), total=len(values))


def histogram(values: list, bin_count: int) -> Histogram:
    """Equal-width histogram with a nice width derived from the requested
    bin count; see histogram_with_width for edge handling."""
    if not values:
        raise InsufficientData("histogram of empty data")
    mn, mx = min(values), max(values)
    if mn == mx:
        return Histogram(lo=mn, width=0.0, counts=(len(values),), total=len(values))
    return histogram_with_width(values, nice_width((mx - mn) / bin_count))


@dataclass(frozen=True)
class ModalRange:
    lo: float
    hi: float
    achieved_coverage: float
    bin_width: float


def modal_range(
    table: Table,
    q: str,
    coverage: float = 0.5,
    bin_count: int = 10,
    filt: Filter | None = None,
) -> ModalRange:
    """The shortest run of consecutive histogram bins whose combined frequency
    reaches ``coverage``; ties broken by higher achieved coverage, then lower
    left edge."""
    if not 0 < coverage <= 1:
        raise ValueError("coverage must be in (0, 1]")
    if bin_count < 2:
        raise ValueError("bin_count must be at least 2")
    col = require_role(table, q, Role.QUANTITATIVE)
    values = [col.values[i] for i in filter_indices(table, filt) if col.values[i] is not None]
    if not values:
        raise InsufficientData("modal_range needs at least one non-missing value")
    hist = histogram(values, bin_count)
    if hist.width == 0.0:
        return ModalRange(lo=hist.lo, hi=hist.lo, achieved_coverage=1.0, bin_width=0.0)
    n_bins = len(hist.counts)
    prefix = [0]
    for c in hist.counts:
        prefix.append(prefix[-1] + c)
    for length in range(1, n_bins + 1):
        best = None
        for start in range(n_bins - length + 1):
            cov = (prefix[start + length] - prefix[start]) / hist.total
            if cov >= coverage - 1e-12:
                key = (-cov, hist.edge(start))
                if best is None or key < best[0]:
                    best = (key, start, cov)
        if best is not None:
            _, start, cov = best
            return ModalRange(
                lo=hist.edge(start), hi=hist.edge(start + length),
                achieved_coverage=cov, bin_width=hist.width,
            )
    raise AssertionError("full range always reaches coverage")
