"""Insight mining: enumerate every extremum, correlation, anomaly, and
distribution fact a table supports, scored and rendered, into a frozen
InsightSpace.

Enumeration runs once unfiltered and once per single-level filter
(categorical column = distinct value); correlations are mined unfiltered
only. Candidates that error out (too few groups, insufficient data, zero
variance) are skipped, never fatal.
"""

from __future__ import annotations

import logging
from itertools import combinations

from .charts import chart_for_insight
from .config import DEFAULT_CONFIG, EngineConfig
from .dataset import Table
from .errors import EngineError, InsufficientData, TooFewGroups
from .insights import (
    AnomalyPayload,
    CorrelationPayload,
    Direction,
    DistributionPayload,
    ExtremumPayload,
    Insight,
    InsightSpace,
    InsightType,
    OutlierRow,
    Polarity,
    make_insight_id,
    with_charts,
)
from .stats import (
    Aggregate,
    Filter,
    filter_indices,
    group_aggregate,
    modal_range,
    pearson,
    tukey_fences,
    tukey_outliers,
)
from . import templates

logger = logging.getLogger(__name__)


def score_tier(strength: float, filtered: bool) -> int:
    """Importance level: 1 = unfiltered and strong (>= 0.6), 3 = filtered
    and weak, 2 = the mixed cases."""
    strong = strength >= 0.6
    if not filtered and strong:
        return 1
    if filtered == strong:
        return 2
    return 3


def _clamp(x: float) -> float:
    return max(0.0, min(1.0, x))


def _finish(insight: Insight, config: EngineConfig) -> Insight:
    return with_charts(insight, [chart_for_insight(insight, config.miner.item_chart_limit)])


def mine_extremum(
    table: Table,
    group_by: str,
    measure: str,
    aggregate: Aggregate = Aggregate.MEAN,
    filt: Filter | None = None,
    config: EngineConfig = DEFAULT_CONFIG,
) -> list:
    """Lowest and Highest group-aggregate insights for one
    (group column, measure, aggregate) choice. Winner ties resolve to the
    first group in value order; zero spread across groups emits nothing."""
    agg = group_aggregate(table, group_by, measure, aggregate, filt)
    items = list(agg.entries.items())
    if len(items) < 2:
        raise TooFewGroups(
            f"extremum over {group_by!r} needs >= 2 groups, got {len(items)}",
            groups=len(items),
        )
    lo_group, lo_score = min(items, key=lambda kv: kv[1])
    hi_group, hi_score = max(items, key=lambda kv: kv[1])
    spread = hi_score - lo_score
    if spread == 0:
        return []
    out = []
    for polarity, winner, score in (
        (Polarity.LOWEST, lo_group, lo_score),
        (Polarity.HIGHEST, hi_group, hi_score),
    ):
        rest = [v for k, v in items if k != winner]
        runner_up = min(rest) if polarity == Polarity.LOWEST else max(rest)
        payload = ExtremumPayload(
            group_by=group_by, measure=measure, aggregate=aggregate,
            polarity=polarity, winner_value=winner,
            winner_score=score, runner_up_score=runner_up,
        )
        strength = _clamp(abs(score - runner_up) / spread)
        insight = Insight(
            id=make_insight_id(InsightType.EXTREMUM, group_by,
                               f"{aggregate.value}({measure})", filt, polarity.value),
            type=InsightType.EXTREMUM,
            text=templates.declarative(payload, filt, table.name),
            attributes=frozenset(payload.columns() | ({filt.column} if filt else set())),
            filter=filt,
            tier=score_tier(strength, filt is not None),
            strength=strength,
            payload=payload,
        )
        out.append(_finish(insight, config))
    return out


def mine_item_extremum(
    table: Table,
    measure: str,
    filt: Filter | None = None,
    config: EngineConfig = DEFAULT_CONFIG,
) -> list:
    """Row-level Lowest/Highest insights labeled by the identifier column.
    Value ties resolve to the earliest row."""
    id_col = table.identifier_column()
    if id_col is None:
        return []
    labels = table.column(id_col.name).values
    values = table.column(measure).values
    rows = [
        (i, values[i], str(labels[i]))
        for i in filter_indices(table, filt)
        if values[i] is not None and labels[i] is not None
    ]
    if len(rows) < 2:
        raise InsufficientData(
            f"item extremum over {measure!r} needs >= 2 labeled rows", n=len(rows)
        )
    lo = min(rows, key=lambda r: r[1])
    hi = max(rows, key=lambda r: r[1])
    spread = hi[1] - lo[1]
    if spread == 0:
        return []
    out = []
    for polarity, (idx, score, label) in ((Polarity.LOWEST, lo), (Polarity.HIGHEST, hi)):
        rest = [v for i, v, _ in rows if i != idx]
        runner_up = min(rest) if polarity == Polarity.LOWEST else max(rest)
        payload = ExtremumPayload(
            group_by=id_col.name, measure=measure, aggregate=None,
            polarity=polarity, winner_value=label,
            winner_score=score, runner_up_score=runner_up,
        )
        strength = _clamp(abs(score - runner_up) / spread)
        insight = Insight(
            id=make_insight_id(InsightType.EXTREMUM, id_col.name, measure,
                               filt, polarity.value),
            type=InsightType.EXTREMUM,
            text=templates.declarative(payload, filt, table.name),
            attributes=frozenset(payload.columns() | ({filt.column} if filt else set())),
            filter=filt,
            tier=score_tier(strength, filt is not None),
            strength=strength,
            payload=payload,
        )
        out.append(_finish(insight, config))
    return out


def mine_correlation(
    table: Table, q1: str, q2: str, config: EngineConfig = DEFAULT_CONFIG
) -> Insight | None:
    """Strong-correlation insight for a quantitative pair, or None when
    |r| < strongR or support n < minN."""
    result = pearson(table, q1, q2)
    if result.n < config.miner.min_n or abs(result.r) < config.miner.strong_r:
        return None
    measures = tuple(sorted((q1, q2)))
    direction = Direction.POSITIVE if result.r >= 0 else Direction.NEGATIVE
    payload = CorrelationPayload(measures=measures, r=result.r, n=result.n,
                                 direction=direction)
    strength = _clamp(abs(result.r))
    insight = Insight(
        id=make_insight_id(InsightType.CORRELATION, None, "&".join(measures),
                           None, direction.value),
        type=InsightType.CORRELATION,
        text=templates.declarative(payload, None, table.name),
        attributes=frozenset(measures),
        filter=None,
        tier=score_tier(strength, False),
        strength=strength,
        payload=payload,
    )
    return _finish(insight, config)


def mine_anomaly(
    table: Table,
    measure: str,
    filt: Filter | None = None,
    config: EngineConfig = DEFAULT_CONFIG,
) -> Insight | None:
    """Outlier insight over the Tukey fences, or None when no row falls
    outside them."""
    outliers = tukey_outliers(table, measure, config.miner.fence_k, filt)
    if not outliers:
        return None
    id_col = table.identifier_column()
    labels = id_col.values if id_col is not None else None
    col = table.column(measure).values
    sorted_values = sorted(
        col[i] for i in filter_indices(table, filt) if col[i] is not None
    )
    lo_fence, hi_fence = tukey_fences(sorted_values, config.miner.fence_k)
    rows = tuple(
        OutlierRow(
            row_index=o.row_index, value=o.value,
            label=None if labels is None or labels[o.row_index] is None
            else str(labels[o.row_index]),
        )
        for o in outliers
    )
    payload = AnomalyPayload(
        measure=measure, outlier_rows=rows, count=len(rows),
        lo_fence=lo_fence, hi_fence=hi_fence,
    )
    strength = _clamp(max(o.exceedance for o in outliers))
    insight = Insight(
        id=make_insight_id(InsightType.ANOMALY, None, measure, filt, ""),
        type=InsightType.ANOMALY,
        text=templates.declarative(payload, filt, table.name),
        attributes=frozenset({measure} | ({filt.column} if filt else set())),
        filter=filt,
        tier=score_tier(strength, filt is not None),
        strength=strength,
        payload=payload,
    )
    return _finish(insight, config)


def mine_distribution(
    table: Table,
    measure: str,
    filt: Filter | None = None,
    config: EngineConfig = DEFAULT_CONFIG,
) -> Insight | None:
    """Modal-range insight: the shortest bin run holding most values."""
    try:
        mr = modal_range(table, measure, config.miner.coverage,
                         config.miner.bin_count, filt)
    except InsufficientData:
        return None
    payload = DistributionPayload(
        measure=measure, lo=mr.lo, hi=mr.hi,
        achieved_coverage=mr.achieved_coverage, bin_width=mr.bin_width,
    )
    strength = _clamp(mr.achieved_coverage)
    insight = Insight(
        id=make_insight_id(InsightType.DISTRIBUTION, None, measure, filt, ""),
        type=InsightType.DISTRIBUTION,
        text=templates.declarative(payload, filt, table.name),
        attributes=frozenset({measure} | ({filt.column} if filt else set())),
        filter=filt,
        tier=score_tier(strength, filt is not None),
        strength=strength,
        payload=payload,
    )
    return _finish(insight, config)


def _enumerate_filters(table: Table, config: EngineConfig) -> list:
    filters: list = [None]
    for col in table.categorical_columns():
        values = table.distinct_values(col.name)
        if len(values) > config.miner.filter_value_cap:
            logger.warning(
                "skipping filters on %r: %d distinct values exceeds cap %d",
                col.name, len(values), config.miner.filter_value_cap,
            )
            continue
        filters.extend(Filter(col.name, str(v)) for v in values)
    return filters


def mine_all(table: Table, config: EngineConfig = DEFAULT_CONFIG) -> InsightSpace:
    """The full search space for one table; deterministic for a given
    (table, config) pair."""
    insights: list = []

    def _attempt(fn, *args):
        try:
            produced = fn(*args)
        except EngineError as exc:
            logger.debug("skipped %s%r: %s", fn.__name__, args[1:], exc)
            return
        if produced is None:
            return
        insights.extend(produced if isinstance(produced, list) else [produced])

    quants = [c.name for c in table.quantitative_columns()]
    cats = [c.name for c in table.categorical_columns()]
    for filt in _enumerate_filters(table, config):
        for group_by in cats:
            if filt is not None and filt.column == group_by:
                continue
            for measure in quants:
                for agg in config.miner.aggregates:
                    _attempt(mine_extremum, table, group_by, measure,
                             Aggregate(agg), filt, config)
        if config.miner.item_extremum:
            for measure in quants:
                _attempt(mine_item_extremum, table, measure, filt, config)
        for measure in quants:
            _attempt(mine_anomaly, table, measure, filt, config)
            _attempt(mine_distribution, table, measure, filt, config)
    for q1, q2 in combinations(sorted(quants), 2):
        _attempt(mine_correlation, table, q1, q2, config)
    return InsightSpace.build(table.name, insights)
