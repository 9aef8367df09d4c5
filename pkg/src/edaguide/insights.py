"""Insight records and the mined search space.

An Insight is an immutable fact about a table: which columns it involves,
the display sentence, an importance tier, a normalized strength, candidate
chart specs, and a typed payload. An InsightSpace holds every insight mined
from one table plus the lookup indexes the recommender needs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum

from .errors import NoMatchingInsight
from .stats import Aggregate, Filter


class InsightType(str, Enum):
    EXTREMUM = "extremum"
    CORRELATION = "correlation"
    ANOMALY = "anomaly"
    DISTRIBUTION = "distribution"


class Polarity(str, Enum):
    LOWEST = "lowest"
    HIGHEST = "highest"


class Direction(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


@dataclass(frozen=True)
class ExtremumPayload:
    """Group-level extremum, or item-level when aggregate is None (then
    group_by is the identifier column and winner_value an item label)."""

    group_by: str
    measure: str
    aggregate: Aggregate | None
    polarity: Polarity
    winner_value: str
    winner_score: float
    runner_up_score: float

    @property
    def item_level(self) -> bool:
        return self.aggregate is None

    def columns(self) -> set:
        return {self.group_by, self.measure}

    def to_dict(self) -> dict:
        return {
            "groupBy": self.group_by,
            "measure": self.measure,
            "aggregate": None if self.aggregate is None else self.aggregate.value,
            "polarity": self.polarity.value,
            "winnerValue": self.winner_value,
            "winnerScore": self.winner_score,
            "runnerUpScore": self.runner_up_score,
        }


@dataclass(frozen=True)
class OutlierRow:
    row_index: int
    value: float
    label: str | None       # identifier value when the table has one

    def to_dict(self) -> dict:
        return {"rowIndex": self.row_index, "value": self.value, "label": self.label}


@dataclass(frozen=True)
class AnomalyPayload:
    measure: str
    outlier_rows: tuple     # of OutlierRow
    count: int
    lo_fence: float
    hi_fence: float

    def columns(self) -> set:
        return {self.measure}

    def to_dict(self) -> dict:
        return {
            "measure": self.measure,
            "outlierRows": [r.to_dict() for r in self.outlier_rows],
            "count": self.count,
            "loFence": self.lo_fence,
            "hiFence": self.hi_fence,
        }


@dataclass(frozen=True)
class CorrelationPayload:
    measures: tuple         # (q1, q2) sorted ascending
    r: float
    n: int
    direction: Direction

    def columns(self) -> set:
        return set(self.measures)

    def to_dict(self) -> dict:
        return {
            "measures": list(self.measures),
            "r": self.r,
            "n": self.n,
            "direction": self.direction.value,
        }


@dataclass(frozen=True)
class DistributionPayload:
    measure: str
    lo: float
    hi: float
    achieved_coverage: float
    bin_width: float

    def columns(self) -> set:
        return {self.measure}

    def to_dict(self) -> dict:
        return {
            "measure": self.measure,
            "lo": self.lo,
            "hi": self.hi,
            "achievedCoverage": self.achieved_coverage,
            "binWidth": self.bin_width,
        }


def make_insight_id(
    type_: InsightType,
    group_by: str | None,
    measures_segment: str,
    filt: Filter | None,
    polarity_segment: str,
) -> str:
    """Canonical key: type|groupBy|measures|filter|polarity (empty segments
    for fields a type does not use)."""
    return "|".join([
        type_.value,
        group_by or "",
        measures_segment,
        filt.clause() if filt is not None else "",
        polarity_segment,
    ])


@dataclass(frozen=True)
class Insight:
    id: str
    type: InsightType
    text: str
    attributes: frozenset
    filter: Filter | None
    tier: int
    strength: float
    payload: object
    vis_objects: tuple = ()

    @property
    def measure_set(self) -> frozenset:
        if self.type == InsightType.CORRELATION:
            return frozenset(self.payload.measures)
        return frozenset({self.payload.measure})

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "type": self.type.value,
            "text": self.text,
            "attributes": sorted(self.attributes),
            "filter": None if self.filter is None else
                {"column": self.filter.column, "value": self.filter.value},
            "tier": self.tier,
            "strength": self.strength,
            "visObjects": [spec.to_dict() for spec in self.vis_objects],
            "payload": self.payload.to_dict(),
        }


def with_charts(insight: Insight, charts) -> Insight:
    return replace(insight, vis_objects=tuple(charts))


@dataclass(frozen=True)
class InsightSpace:
    """Frozen result of mining one table. ``insights`` is sorted by id;
    the index dicts are derived views over the same objects."""

    table_name: str
    insights: tuple
    by_id: dict = field(repr=False, default_factory=dict)
    by_type: dict = field(repr=False, default_factory=dict)
    by_attribute: dict = field(repr=False, default_factory=dict)
    by_type_measures: dict = field(repr=False, default_factory=dict)

    @staticmethod
    def build(table_name: str, insights) -> "InsightSpace":
        ordered = tuple(sorted(insights, key=lambda i: i.id))
        by_id: dict = {}
        by_type: dict = {}
        by_attr: dict = {}
        by_tm: dict = {}
        for ins in ordered:
            if ins.id in by_id:
                raise ValueError(f"duplicate insight id {ins.id!r}")
            by_id[ins.id] = ins
            by_type.setdefault(ins.type, []).append(ins)
            for a in ins.attributes:
                by_attr.setdefault(a, []).append(ins)
            by_tm.setdefault((ins.type, ins.measure_set), []).append(ins)
        return InsightSpace(
            table_name=table_name, insights=ordered, by_id=by_id,
            by_type={k: tuple(v) for k, v in by_type.items()},
            by_attribute={k: tuple(v) for k, v in by_attr.items()},
            by_type_measures={k: tuple(v) for k, v in by_tm.items()},
        )

    def get(self, insight_id: str) -> Insight:
        try:
            return self.by_id[insight_id]
        except KeyError:
            raise NoMatchingInsight(f"no insight with id {insight_id!r}",
                                    insight_id=insight_id) from None

    def of_type(self, type_: InsightType) -> tuple:
        return self.by_type.get(type_, ())

    def to_dict(self) -> dict:
        return {
            "table": self.table_name,
            "insights": [i.to_dict() for i in self.insights],
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())


def canonical_json(doc: dict) -> str:
    """Stable serialization: sorted keys, no whitespace drift, trailing
    newline. Equal documents serialize to equal bytes."""
    return json.dumps(doc, sort_keys=True, ensure_ascii=False,
                      separators=(",", ": "), indent=1) + "\n"


def space_from_dict(doc: dict) -> InsightSpace:
    insights = []
    for rec in doc["insights"]:
        insights.append(insight_from_dict(rec))
    return InsightSpace.build(doc["table"], insights)


def insight_from_dict(rec: dict) -> Insight:
    from .charts import ChartSpec

    type_ = InsightType(rec["type"])
    p = rec["payload"]
    payload: object
    if type_ == InsightType.EXTREMUM:
        payload = ExtremumPayload(
            group_by=p["groupBy"], measure=p["measure"],
            aggregate=None if p["aggregate"] is None else Aggregate(p["aggregate"]),
            polarity=Polarity(p["polarity"]), winner_value=p["winnerValue"],
            winner_score=p["winnerScore"], runner_up_score=p["runnerUpScore"],
        )
    elif type_ == InsightType.CORRELATION:
        payload = CorrelationPayload(
            measures=tuple(p["measures"]), r=p["r"], n=p["n"],
            direction=Direction(p["direction"]),
        )
    elif type_ == InsightType.ANOMALY:
        payload = AnomalyPayload(
            measure=p["measure"],
            outlier_rows=tuple(
                OutlierRow(row_index=r["rowIndex"], value=r["value"], label=r["label"])
                for r in p["outlierRows"]
            ),
            count=p["count"], lo_fence=p["loFence"], hi_fence=p["hiFence"],
        )
    else:
        payload = DistributionPayload(
            measure=p["measure"], lo=p["lo"], hi=p["hi"],
            achieved_coverage=p["achievedCoverage"], bin_width=p["binWidth"],
        )
    filt = rec["filter"]
    return Insight(
        id=rec["id"], type=type_, text=rec["text"],
        attributes=frozenset(rec["attributes"]),
        filter=None if filt is None else Filter(filt["column"], filt["value"]),
        tier=rec["tier"], strength=rec["strength"], payload=payload,
        vis_objects=tuple(ChartSpec.from_dict(s) for s in rec["visObjects"]),
    )
