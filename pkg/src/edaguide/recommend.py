"""Follow-up question retrieval: logically-related answers per insight-type
rule, attribute-overlap answers, template questions, and panel ordering.

The retrieval rules, by source insight type (c1 = group column, q = measure):

* Extremum(c1, q1, polarity, winner w):
    R1  every Extremum(c1, q2, same filter) with the same winner w, paired
        with the Correlation(q1, q2) insight when it exists; the candidate's
        polarity must match the source's under a positive correlation and be
        opposite under a negative one. Two-id combo answer, extremum first.
    R2  every Anomaly(q1) filtered to c1 = w.
    R3  every Extremum(c2, q1, same polarity) with c2 != c1, filtered to
        c1 = w (group-level, same aggregate).
* Correlation(q1, q2): for every q3 with both Correlation(q1, q3) and
  Correlation(q2, q3) present, the two-id combo of those insights.
* Anomaly(q1): the unfiltered Distribution(q1) insight.
* Distribution(q1, filter f): the Anomaly(q1) with the same filter f; when
  the source is unfiltered, additionally every filtered Distribution(q1).

Attribute-related answers are every other insight sharing at least one
attribute, minus the source and everything already retrieved logically.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .insights import Direction, Insight, InsightSpace, InsightType
from .stats import Filter
from . import templates


class QuestionKind(str, Enum):
    LOGICALLY_RELATED = "LogicallyRelated"
    ATTRIBUTE_RELATED = "AttributeRelated"


@dataclass(frozen=True)
class Answer:
    insight_ids: tuple      # one id, or (extremum, correlation) for combos
    action_text: str

    def to_dict(self) -> dict:
        return {"insightIds": list(self.insight_ids), "actionText": self.action_text}


@dataclass(frozen=True)
class Question:
    id: str
    kind: QuestionKind
    text: str
    source_insight_id: str
    answers: tuple
    rank_tier: int          # best (lowest) tier over the answer insights
    rank_strength: float    # best (highest) strength over the answer insights

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "text": self.text,
            "sourceInsightId": self.source_insight_id,
            "answers": [a.to_dict() for a in self.answers],
            "rankTier": self.rank_tier,
            "rankStrength": self.rank_strength,
        }


def _combo_text(first: Insight, second: Insight) -> str:
    return f"{first.text}; {second.text}"


def _correlation_for(space: InsightSpace, q1: str, q2: str) -> Insight | None:
    found = space.by_type_measures.get((InsightType.CORRELATION, frozenset({q1, q2})))
    return found[0] if found else None


def logically_related(insight: Insight, space: InsightSpace) -> list:
    if insight.type == InsightType.EXTREMUM:
        return _related_to_extremum(insight, space)
    if insight.type == InsightType.CORRELATION:
        return _related_to_correlation(insight, space)
    if insight.type == InsightType.ANOMALY:
        return _related_to_anomaly(insight, space)
    return _related_to_distribution(insight, space)


def _related_to_extremum(insight: Insight, space: InsightSpace) -> list:
    p = insight.payload
    answers = []
    # R1: same grouping, another measure, same winner, correlation backs it.
    for e in space.of_type(InsightType.EXTREMUM):
        ep = e.payload
        if (ep.group_by != p.group_by or ep.aggregate != p.aggregate
                or ep.measure == p.measure or e.filter != insight.filter
                or ep.winner_value != p.winner_value):
            continue
        corr = _correlation_for(space, p.measure, ep.measure)
        if corr is None:
            continue
        same_polarity = ep.polarity == p.polarity
        if same_polarity != (corr.payload.direction == Direction.POSITIVE):
            continue
        answers.append(Answer(insight_ids=(e.id, corr.id),
                              action_text=_combo_text(e, corr)))
    drill = Filter(p.group_by, p.winner_value)
    # R2: anomalies of the measure inside the winning group.
    for a in space.by_type_measures.get((InsightType.ANOMALY, frozenset({p.measure})), ()):
        if a.filter == drill:
            answers.append(Answer(insight_ids=(a.id,), action_text=a.text))
    # R3: the same extremum under another grouping, inside the winning group.
    for e in space.of_type(InsightType.EXTREMUM):
        ep = e.payload
        if (ep.measure == p.measure and ep.aggregate == p.aggregate
                and ep.group_by != p.group_by and ep.polarity == p.polarity
                and e.filter == drill):
            answers.append(Answer(insight_ids=(e.id,), action_text=e.text))
    return answers


def _related_to_correlation(insight: Insight, space: InsightSpace) -> list:
    q1, q2 = insight.payload.measures
    answers = []
    for c13 in space.of_type(InsightType.CORRELATION):
        if c13.id == insight.id or q1 not in c13.payload.measures:
            continue
        (q3,) = set(c13.payload.measures) - {q1}
        c23 = _correlation_for(space, q2, q3)
        if c23 is None:
            continue
        first, second = sorted((c13, c23), key=lambda i: i.id)
        answers.append(Answer(insight_ids=(first.id, second.id),
                              action_text=_combo_text(first, second)))
    return answers


def _related_to_anomaly(insight: Insight, space: InsightSpace) -> list:
    measure = insight.payload.measure
    key = (InsightType.DISTRIBUTION, frozenset({measure}))
    return [
        Answer(insight_ids=(d.id,), action_text=d.text)
        for d in space.by_type_measures.get(key, ())
        if d.filter is None
    ]


def _related_to_distribution(insight: Insight, space: InsightSpace) -> list:
    measure = insight.payload.measure
    answers = []
    for a in space.by_type_measures.get((InsightType.ANOMALY, frozenset({measure})), ()):
        if a.filter == insight.filter:
            answers.append(Answer(insight_ids=(a.id,), action_text=a.text))
    if insight.filter is None:
        for d in space.by_type_measures.get((InsightType.DISTRIBUTION, frozenset({measure})), ()):
            if d.filter is not None:
                answers.append(Answer(insight_ids=(d.id,), action_text=d.text))
    return answers


def attribute_related(insight: Insight, space: InsightSpace, exclude_ids=None) -> list:
    """One answer per insight sharing an attribute with the source, skipping
    the source itself and everything logically_related already returned."""
    if exclude_ids is None:
        exclude_ids = {
            i for a in logically_related(insight, space) for i in a.insight_ids
        }
    seen: set = set()
    answers = []
    for attr in sorted(insight.attributes):
        for other in space.by_attribute.get(attr, ()):
            if other.id == insight.id or other.id in exclude_ids or other.id in seen:
                continue
            seen.add(other.id)
            answers.append(Answer(insight_ids=(other.id,), action_text=other.text))
    answers.sort(key=lambda a: a.insight_ids)
    return answers


def _rank(space: InsightSpace, answers) -> tuple:
    tiers = [space.get(i).tier for a in answers for i in a.insight_ids]
    strengths = [space.get(i).strength for a in answers for i in a.insight_ids]
    return min(tiers), max(strengths)


def _answer_question(source: Insight, answer: Answer, kind: QuestionKind,
                     space: InsightSpace) -> Question:
    """A question asking about the answer insight, phrased from its own
    interrogative template."""
    target = space.get(answer.insight_ids[0])
    prefix = "rel" if kind == QuestionKind.LOGICALLY_RELATED else "attr"
    tier, strength = _rank(space, [answer])
    return Question(
        id=f"{prefix}|{source.id}|{'+'.join(answer.insight_ids)}",
        kind=kind,
        text=templates.interrogative(target.payload, target.filter, space.table_name),
        source_insight_id=source.id,
        answers=(answer,),
        rank_tier=tier,
        rank_strength=strength,
    )


def to_questions(source: Insight, answers, kind: QuestionKind,
                 space: InsightSpace) -> list:
    """Extremum/correlation sources aggregate every logical answer under one
    causal why-question; all other cases yield one question per answer."""
    if not answers:
        return []
    if kind == QuestionKind.LOGICALLY_RELATED and source.type in (
        InsightType.EXTREMUM, InsightType.CORRELATION
    ):
        tier, strength = _rank(space, answers)
        return [Question(
            id=f"why|{source.id}",
            kind=kind,
            text=templates.why_question(source.payload, source.filter, space.table_name),
            source_insight_id=source.id,
            answers=tuple(answers),
            rank_tier=tier,
            rank_strength=strength,
        )]
    return [_answer_question(source, a, kind, space) for a in answers]


def recommend_for_insight(
    source: Insight,
    space: InsightSpace,
    seen_ids: frozenset = frozenset(),
    k: int = 6,
) -> list:
    """The ordered question panel for one source insight.

    Logically-related questions come first (the why-question leading),
    attribute-related after; within each group questions sort by
    (tier ascending, strength descending, id ascending). A question is
    suppressed when every insight it would reveal is in ``seen_ids``.
    """
    logical_answers = logically_related(source, space)
    logical = to_questions(source, logical_answers, QuestionKind.LOGICALLY_RELATED, space)
    covered = {i for a in logical_answers for i in a.insight_ids}
    attr_answers = attribute_related(source, space, exclude_ids=covered)
    attr = to_questions(source, attr_answers, QuestionKind.ATTRIBUTE_RELATED, space)

    def visible(q: Question) -> bool:
        revealed = {i for a in q.answers for i in a.insight_ids}
        return not revealed <= seen_ids

    def order(qs) -> list:
        return sorted(qs, key=lambda q: (q.rank_tier, -q.rank_strength, q.id))

    lead = [q for q in logical if q.id.startswith("why|")]
    rest = order([q for q in logical if not q.id.startswith("why|")])
    panel = [q for q in lead + rest + order(attr) if visible(q)]
    return panel[: max(k, 0)]


def format_panel(questions) -> str:
    """Plain-text panel rendering: one numbered line per question, answers
    indented beneath. Byte-stable for a given panel."""
    lines = []
    for idx, q in enumerate(questions, 1):
        lines.append(f"{idx}. [{q.kind.value}] {q.text}")
        for a in q.answers:
            lines.append(f"     - {a.action_text}")
    return "\n".join(lines) + "\n" if lines else ""
