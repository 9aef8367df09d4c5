"""Sentence rendering for insights and questions.

All wording lives in resources/templates.json; this module only computes the
substitution context per insight type. Three renderings exist: declarative
(the insight text shown in a cell), interrogative (a question asking about
the insight), and why (the causal question about an extremum/correlation,
used as the aggregated lead question).
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from .insights import (
    AnomalyPayload,
    CorrelationPayload,
    DistributionPayload,
    ExtremumPayload,
)
from .stats import Filter

_COUNT_WORDS = (
    "zero", "one", "two", "three", "four", "five", "six",
    "seven", "eight", "nine", "ten", "eleven", "twelve",
)


@lru_cache(maxsize=1)
def _templates() -> dict:
    text = resources.files("edaguide").joinpath("resources/templates.json").read_text("utf-8")
    return json.loads(text)


def entity_nouns(table_name: str) -> tuple:
    """(plural, singular) nouns for the table's rows, from the table name."""
    plural = table_name.strip().lower() or "items"
    singular = plural[:-1] if len(plural) > 1 and plural.endswith("s") else plural
    return plural, singular


def format_number(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return f"{float(v):.1f}"
    return f"{v:.6g}"


def count_word(n: int) -> str:
    return _COUNT_WORDS[n] if 0 <= n < len(_COUNT_WORDS) else str(n)


def sentence_case(text: str) -> str:
    return text[0].upper() + text[1:] if text else text


def _filter_clause(filt: Filter | None) -> str:
    if filt is None:
        return ""
    return _templates()["filterClause"].format(
        filterColumn=filt.column.lower(), filterValue=filt.value
    )


def _context(payload, filt: Filter | None, table_name: str) -> tuple:
    """(template-group key, substitution dict) for a payload."""
    t = _templates()
    plural, singular = entity_nouns(table_name)
    ctx = {"filterClause": _filter_clause(filt)}
    if isinstance(payload, ExtremumPayload):
        ctx.update(polarity=payload.polarity.value, measure=payload.measure,
                   winner=payload.winner_value)
        if payload.item_level:
            ctx["entitySingular"] = singular
            return "extremumItem", ctx
        ctx.update(entity=plural, groupBy=payload.group_by.lower(),
                   aggregate=t["aggregateWords"][payload.aggregate.value])
        return "extremumGroup", ctx
    if isinstance(payload, CorrelationPayload):
        ctx.update(q1=payload.measures[0], q2=payload.measures[1])
        return "correlation", ctx
    if isinstance(payload, AnomalyPayload):
        ctx.update(measure=payload.measure, entitySingular=singular,
                   count=count_word(payload.count))
        if payload.count == 1:
            label = payload.outlier_rows[0].label
            if label is not None:
                ctx["label"] = label
                return "anomalySingle", ctx
            return "anomalySingleUnlabeled", ctx
        return "anomalyMulti", ctx
    if isinstance(payload, DistributionPayload):
        ctx.update(measure=payload.measure,
                   lo=format_number(payload.lo), hi=format_number(payload.hi))
        return "distribution", ctx
    raise TypeError(f"no templates for payload {type(payload).__name__}")


def declarative(payload, filt: Filter | None, table_name: str) -> str:
    key, ctx = _context(payload, filt, table_name)
    return sentence_case(_templates()[key]["declarative"].format(**ctx))


def why_question(payload, filt: Filter | None, table_name: str) -> str:
    """Causal lead question; defined for extremum and correlation only."""
    key, ctx = _context(payload, filt, table_name)
    group = _templates()[key]
    if "why" not in group:
        raise TypeError(f"no why-question template for {key}")
    return group["why"].format(**ctx)


def interrogative(payload, filt: Filter | None, table_name: str) -> str:
    key, ctx = _context(payload, filt, table_name)
    if isinstance(payload, AnomalyPayload):
        key = "anomaly"
    if isinstance(payload, DistributionPayload):
        variant = "interrogativeFiltered" if filt is not None else "interrogativeUnfiltered"
        return _templates()[key][variant].format(**ctx)
    return _templates()[key]["interrogative"].format(**ctx)
