"""Declarative chart specifications derived from insights.

The engine never rasterizes anything: a ChartSpec names a mark, two
encodings, an optional filter and an optional highlight predicate, and the
UI (or any renderer) draws it. render_data() produces the plotted tuples
server-side so renderers need no direct table access.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources

import jsonschema

from .dataset import Table
from .errors import InvalidChartSpec, UnsupportedInsight
from .insights import (
    AnomalyPayload,
    CorrelationPayload,
    DistributionPayload,
    ExtremumPayload,
    Insight,
    InsightType,
)
from .stats import Aggregate, Filter, filter_indices, group_aggregate, histogram_with_width


class Mark(str, Enum):
    BAR = "bar"
    POINT = "point"
    TICK = "tick"
    HISTOGRAM = "histogram"


@dataclass(frozen=True)
class Encoding:
    field: str
    role: str                       # "categorical" | "quantitative"
    aggregate: str | None = None    # "mean" | "sum" | "count"
    bin_step: float | None = None

    def to_dict(self) -> dict:
        return {"field": self.field, "role": self.role,
                "aggregate": self.aggregate, "binStep": self.bin_step}

    @staticmethod
    def from_dict(d: dict) -> "Encoding":
        return Encoding(field=d["field"], role=d["role"],
                        aggregate=d.get("aggregate"), bin_step=d.get("binStep"))


@dataclass(frozen=True)
class Highlight:
    field: str
    op: str                         # eq | lt | gt | inside-range | outside-range
    value: object                   # scalar, or (lo, hi) for the range ops

    def to_dict(self) -> dict:
        value = list(self.value) if isinstance(self.value, tuple) else self.value
        return {"field": self.field, "op": self.op, "value": value}

    @staticmethod
    def from_dict(d: dict) -> "Highlight":
        v = d["value"]
        return Highlight(field=d["field"], op=d["op"],
                         value=tuple(v) if isinstance(v, list) else v)


@dataclass(frozen=True)
class ChartSpec:
    mark: Mark
    x: Encoding
    y: Encoding | None
    filter: Filter | None
    highlight: Highlight | None
    title: str
    limit: int | None = None
    sort: str | None = None         # "ascending" | "descending" by y

    def to_dict(self) -> dict:
        return {
            "mark": self.mark.value,
            "x": self.x.to_dict(),
            "y": None if self.y is None else self.y.to_dict(),
            "filter": None if self.filter is None else
                {"column": self.filter.column, "value": self.filter.value},
            "highlight": None if self.highlight is None else self.highlight.to_dict(),
            "title": self.title,
            "limit": self.limit,
            "sort": self.sort,
        }

    @staticmethod
    def from_dict(d: dict) -> "ChartSpec":
        f = d.get("filter")
        h = d.get("highlight")
        return ChartSpec(
            mark=Mark(d["mark"]),
            x=Encoding.from_dict(d["x"]),
            y=None if d.get("y") is None else Encoding.from_dict(d["y"]),
            filter=None if f is None else Filter(f["column"], f["value"]),
            highlight=None if h is None else Highlight.from_dict(h),
            title=d["title"],
            limit=d.get("limit"),
            sort=d.get("sort"),
        )


@lru_cache(maxsize=1)
def _schema() -> dict:
    text = resources.files("edaguide").joinpath("resources/chart_schema.json").read_text("utf-8")
    return json.loads(text)


def validate_spec(spec: ChartSpec, table: Table | None = None) -> None:
    """Structural validation against the shipped JSON schema plus semantic
    checks: fields resolve against the table (when given), histograms carry
    a bin step, highlight fields appear in an encoding or the filter."""
    try:
        jsonschema.validate(spec.to_dict(), _schema())
    except jsonschema.ValidationError as exc:
        raise InvalidChartSpec(f"malformed chart spec: {exc.message}") from exc
    encoded = {spec.x.field} | ({spec.y.field} if spec.y else set())
    referenced = set(encoded)
    if spec.filter is not None:
        referenced.add(spec.filter.column)
    if spec.mark == Mark.HISTOGRAM and spec.x.bin_step is None:
        raise InvalidChartSpec("histogram requires a bin step on the x encoding")
    if spec.highlight is not None and spec.highlight.field not in referenced:
        raise InvalidChartSpec(
            f"highlight field {spec.highlight.field!r} not present in encodings or filter"
        )
    if table is not None:
        for name in referenced:
            if not table.has_column(name):
                raise InvalidChartSpec(f"chart references unknown column {name!r}",
                                       column=name)


def _title_suffix(filt: Filter | None) -> str:
    return "" if filt is None else f" ({filt.column} = {filt.value})"


def chart_for_insight(insight: Insight, item_limit: int = 20) -> ChartSpec:
    """The canonical chart for one insight: bar for extremum, scatter for
    correlation, tick strip for anomaly, histogram for distribution."""
    p = insight.payload
    suffix = _title_suffix(insight.filter)
    if isinstance(p, ExtremumPayload):
        if p.item_level:
            return ChartSpec(
                mark=Mark.BAR,
                x=Encoding(p.group_by, "categorical"),
                y=Encoding(p.measure, "quantitative"),
                filter=insight.filter,
                highlight=Highlight(p.group_by, "eq", p.winner_value),
                title=f"{p.measure} by {p.group_by} ({p.polarity.value} {item_limit}){suffix}",
                limit=item_limit,
                sort="ascending" if p.polarity.value == "lowest" else "descending",
            )
        return ChartSpec(
            mark=Mark.BAR,
            x=Encoding(p.group_by, "categorical"),
            y=Encoding(p.measure, "quantitative", aggregate=p.aggregate.value),
            filter=insight.filter,
            highlight=Highlight(p.group_by, "eq", p.winner_value),
            title=f"{p.aggregate.value.capitalize()} {p.measure} by {p.group_by}{suffix}",
        )
    if isinstance(p, CorrelationPayload):
        q1, q2 = p.measures
        return ChartSpec(
            mark=Mark.POINT,
            x=Encoding(q1, "quantitative"),
            y=Encoding(q2, "quantitative"),
            filter=insight.filter,
            highlight=None,
            title=f"{q1} vs {q2}{suffix}",
        )
    if isinstance(p, AnomalyPayload):
        return ChartSpec(
            mark=Mark.TICK,
            x=Encoding(p.measure, "quantitative"),
            y=None,
            filter=insight.filter,
            highlight=Highlight(p.measure, "outside-range", (p.lo_fence, p.hi_fence)),
            title=f"Outliers in {p.measure}{suffix}",
        )
    if isinstance(p, DistributionPayload):
        return ChartSpec(
            mark=Mark.HISTOGRAM,
            x=Encoding(p.measure, "quantitative", bin_step=p.bin_width),
            y=Encoding(p.measure, "quantitative", aggregate="count"),
            filter=insight.filter,
            highlight=Highlight(p.measure, "inside-range", (p.lo, p.hi)),
            title=f"Distribution of {p.measure}{suffix}",
        )
    raise UnsupportedInsight(f"no chart mapping for insight type {insight.type!r}")


def answer_insight_order(answer, space) -> list:
    """Insight ids of an answer in display order: extremum charts precede
    correlation charts in combos, ties keep answer order."""
    return sorted(
        answer.insight_ids,
        key=lambda i: (0 if space.get(i).type == InsightType.EXTREMUM else 1,
                       answer.insight_ids.index(i)),
    )


def charts_for_answer(answer, space) -> list:
    """One spec per insight in the answer; extremum charts first in combos."""
    specs = []
    for insight_id in answer_insight_order(answer, space):
        insight = space.get(insight_id)
        specs.append(insight.vis_objects[0] if insight.vis_objects
                     else chart_for_insight(insight))
    return specs


def render_data(table: Table, spec: ChartSpec) -> list:
    """The plotted tuples for a spec, so renderers never touch the table.

    bar+aggregate -> {x, y} per group; bar raw -> {x, y} per row (sorted,
    truncated per limit); point -> {x, y} per complete pair; tick -> {x};
    histogram -> {x0, x1, y} per bin.
    """
    if spec.mark == Mark.BAR and spec.y is not None and spec.y.aggregate:
        agg = group_aggregate(table, spec.x.field, spec.y.field,
                              Aggregate(spec.y.aggregate), spec.filter)
        return [{"x": k, "y": v} for k, v in agg.entries.items()]
    rows = filter_indices(table, spec.filter)
    xs = table.column(spec.x.field).values
    if spec.mark == Mark.BAR:
        ys = table.column(spec.y.field).values
        data = [
            {"x": str(xs[i]), "y": ys[i]}
            for i in rows if xs[i] is not None and ys[i] is not None
        ]
        data.sort(key=lambda d: (d["y"], d["x"]), reverse=(spec.sort == "descending"))
        return data[: spec.limit] if spec.limit else data
    if spec.mark == Mark.POINT:
        ys = table.column(spec.y.field).values
        return [
            {"x": xs[i], "y": ys[i]}
            for i in rows if xs[i] is not None and ys[i] is not None
        ]
    if spec.mark == Mark.TICK:
        return [{"x": xs[i]} for i in rows if xs[i] is not None]
    if spec.mark == Mark.HISTOGRAM:
        values = [xs[i] for i in rows if xs[i] is not None]
        if not values:
            return []
        hist = histogram_with_width(values, spec.x.bin_step or 0.0)
        return [
            {"x0": hist.edge(i), "x1": hist.edge(i + 1) if hist.width else hist.lo,
             "y": c}
            for i, c in enumerate(hist.counts)
        ]
    raise InvalidChartSpec(f"unknown mark {spec.mark!r}")
