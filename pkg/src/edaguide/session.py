"""Branching notebook sessions.

State is a pure fold over an append-only event log (CreateRoot,
SelectQuestion, SelectAction, Delete, Restore). Cells form a tree: the linear
notebook is the non-archived cells in id order, deletion archives a node but
keeps it (and its children) in the tree, restore brings it back in its
original position. Replaying an exported log reproduces the session
byte-for-byte.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum

from .charts import answer_insight_order
from .config import DEFAULT_CONFIG, EngineConfig
from .dataset import Table
from .errors import (
    AlreadyArchived,
    ArchivedCell,
    CannotDeleteRoot,
    CorruptLog,
    EngineError,
    IndexOutOfRange,
    NoMatchingInsight,
    NotAnActionList,
    NotArchived,
    NotAVisualizationCell,
    UnknownCell,
    UnknownQuestion,
    VersionMismatch,
)
from .insights import Insight, InsightSpace, InsightType, canonical_json
from .recommend import Answer, recommend_for_insight

EXPORT_VERSION = 1


class CellKind(str, Enum):
    VISUALIZATION = "Visualization"
    ACTION_LIST = "ActionList"


@dataclass(frozen=True)
class VisEntry:
    """One rendered insight inside a visualization cell."""

    insight_id: str
    text: str
    chart: object           # ChartSpec

    def to_dict(self) -> dict:
        return {"insightId": self.insight_id, "text": self.text,
                "chart": self.chart.to_dict()}


@dataclass
class Cell:
    id: int
    kind: CellKind
    parent_id: int | None
    spawned_by_question_id: str | None
    created_at_event: int
    archived: bool = False
    entries: tuple = ()             # visualization cells: VisEntry list
    question_id: str | None = None  # action-list cells
    question_text: str | None = None
    answers: tuple = ()             # action-list cells: Answer list

    def to_dict(self) -> dict:
        if self.kind == CellKind.VISUALIZATION:
            content = {"insights": [e.to_dict() for e in self.entries]}
        else:
            content = {
                "questionId": self.question_id,
                "questionText": self.question_text,
                "actions": [a.to_dict() for a in self.answers],
            }
        return {
            "id": self.id,
            "kind": self.kind.value,
            "parentId": self.parent_id,
            "spawnedByQuestionId": self.spawned_by_question_id,
            "createdAtEvent": self.created_at_event,
            "archived": self.archived,
            "content": content,
        }


def config_fingerprint(config: EngineConfig) -> str:
    digest = hashlib.sha256(canonical_json(config.to_dict()).encode("utf-8"))
    return digest.hexdigest()[:12]


class Session:
    """One analyst's branching exploration over a frozen insight space.

    All mutation goes through apply(); every applied event is appended to
    the log, so replaying the log on a fresh Session reproduces this one.
    """

    def __init__(self, table: Table, space: InsightSpace,
                 config: EngineConfig = DEFAULT_CONFIG, session_id: str | None = None):
        self.table = table
        self.space = space
        self.config = config
        self.id = session_id
        self.cells: dict = {}
        self.event_log: list = []
        self._next_cell_id = 1

    # -- queries ---------------------------------------------------------

    def cell(self, cell_id: int) -> Cell:
        try:
            return self.cells[cell_id]
        except KeyError:
            raise UnknownCell(f"no cell with id {cell_id}", cell_id=cell_id) from None

    def notebook_cells(self) -> list:
        return [c for _, c in sorted(self.cells.items()) if not c.archived]

    def recommendations(self, cell_id: int) -> list:
        """The question panel for a visualization cell; insights already on
        the path to the root (this cell included) are not re-offered."""
        cell = self.cell(cell_id)
        if cell.kind != CellKind.VISUALIZATION:
            raise NotAVisualizationCell(
                f"cell {cell_id} is {cell.kind.value}, not a visualization",
                cell_id=cell_id,
            )
        seen: set = set()
        cursor: Cell | None = cell
        while cursor is not None:
            if cursor.kind == CellKind.VISUALIZATION:
                seen.update(e.insight_id for e in cursor.entries)
            cursor = None if cursor.parent_id is None else self.cell(cursor.parent_id)
        source = self.space.get(cell.entries[0].insight_id)
        return recommend_for_insight(source, self.space, frozenset(seen),
                                     self.config.recommend.panel_size)

    def tree_snapshot(self) -> dict:
        nodes = []
        for _, c in sorted(self.cells.items()):
            if c.kind == CellKind.VISUALIZATION:
                summary = c.entries[0].text
                chart = c.entries[0].chart.to_dict()
            else:
                summary = c.question_text or ""
                chart = None
            nodes.append({
                "id": c.id,
                "parentId": c.parent_id,
                "archived": c.archived,
                "kind": c.kind.value,
                "summary": summary,
                "chart": chart,
            })
        return {"nodes": nodes}

    # -- event application ------------------------------------------------

    def apply(self, event: dict) -> Cell | None:
        """Validate and apply one event, appending it to the log. Returns
        the cell the event created, if any."""
        etype = event.get("type")
        if etype == "CreateRoot":
            created = self._apply_create_root(event)
        elif etype == "SelectQuestion":
            created = self._apply_select_question(event)
        elif etype == "SelectAction":
            created = self._apply_select_action(event)
        elif etype == "Delete":
            created = self._apply_delete(event)
        elif etype == "Restore":
            created = self._apply_restore(event)
        else:
            raise CorruptLog(f"unknown event type {etype!r}")
        self.event_log.append(event)
        self._check_tree()
        return created

    def _new_cell(self, **kwargs) -> Cell:
        cell = Cell(id=self._next_cell_id,
                    created_at_event=len(self.event_log) + 1, **kwargs)
        self.cells[cell.id] = cell
        self._next_cell_id += 1
        return cell

    def _visualization_cell(self, parent_id, question_id, answer: Answer) -> Cell:
        ordered = answer_insight_order(answer, self.space)
        entries = []
        for insight_id in ordered:
            insight = self.space.get(insight_id)
            entries.append(VisEntry(insight_id=insight_id, text=insight.text,
                                    chart=insight.vis_objects[0]))
        return self._new_cell(kind=CellKind.VISUALIZATION, parent_id=parent_id,
                              spawned_by_question_id=question_id,
                              entries=tuple(entries))

    def _apply_create_root(self, event: dict) -> Cell:
        if self.cells:
            raise CorruptLog("CreateRoot on a non-empty session")
        insight = self.space.get(event["insightId"])
        return self._new_cell(
            kind=CellKind.VISUALIZATION, parent_id=None,
            spawned_by_question_id=None,
            entries=(VisEntry(insight_id=insight.id, text=insight.text,
                              chart=insight.vis_objects[0]),),
        )

    def _require_root(self) -> None:
        if not self.cells:
            raise CorruptLog("event before CreateRoot")

    def _apply_select_question(self, event: dict) -> Cell:
        self._require_root()
        cell = self.cell(event["cellId"])
        if cell.archived:
            raise ArchivedCell(f"cell {cell.id} is archived", cell_id=cell.id)
        question_id = event["questionId"]
        panel = self.recommendations(cell.id)
        match = [q for q in panel if q.id == question_id]
        if not match:
            raise UnknownQuestion(
                f"question {question_id!r} is not recommended for cell {cell.id}",
                question_id=question_id,
            )
        question = match[0]
        if len(question.answers) >= 2 and question.id.startswith("why|"):
            return self._new_cell(
                kind=CellKind.ACTION_LIST, parent_id=cell.id,
                spawned_by_question_id=question.id,
                question_id=question.id, question_text=question.text,
                answers=tuple(question.answers),
            )
        return self._visualization_cell(cell.id, question.id, question.answers[0])

    def _apply_select_action(self, event: dict) -> Cell:
        self._require_root()
        cell = self.cell(event["cellId"])
        if cell.archived:
            raise ArchivedCell(f"cell {cell.id} is archived", cell_id=cell.id)
        if cell.kind != CellKind.ACTION_LIST:
            raise NotAnActionList(f"cell {cell.id} is not an action list",
                                  cell_id=cell.id)
        index = event["actionIndex"]
        if not isinstance(index, int) or not 0 <= index < len(cell.answers):
            raise IndexOutOfRange(
                f"action index {index} outside 0..{len(cell.answers) - 1}",
                index=index,
            )
        return self._visualization_cell(cell.id, cell.question_id, cell.answers[index])

    def _apply_delete(self, event: dict) -> None:
        self._require_root()
        cell = self.cell(event["cellId"])
        if cell.parent_id is None:
            raise CannotDeleteRoot("the root cell cannot be deleted")
        if cell.archived:
            raise AlreadyArchived(f"cell {cell.id} is already archived",
                                  cell_id=cell.id)
        cell.archived = True
        return None

    def _apply_restore(self, event: dict) -> None:
        self._require_root()
        cell = self.cell(event["cellId"])
        if not cell.archived:
            raise NotArchived(f"cell {cell.id} is not archived", cell_id=cell.id)
        cell.archived = False
        return None

    def _check_tree(self) -> None:
        roots = [c for c in self.cells.values() if c.parent_id is None]
        if len(roots) != 1 or roots[0].id != 1:
            raise AssertionError("tree must have exactly one root with id 1")
        for c in self.cells.values():
            if c.parent_id is not None and not c.parent_id < c.id:
                raise AssertionError(f"cell {c.id} precedes its parent")

    # -- export / import --------------------------------------------------

    def export_dict(self) -> dict:
        edges = [
            {"from": c.parent_id, "to": c.id}
            for _, c in sorted(self.cells.items()) if c.parent_id is not None
        ]
        return {
            "version": EXPORT_VERSION,
            "meta": {
                "dataset": self.table.name,
                "configFingerprint": config_fingerprint(self.config),
            },
            "eventLog": list(self.event_log),
            "materializedCells": [c.to_dict() for _, c in sorted(self.cells.items())],
            "tree": {"root": 1, "edges": edges},
        }

    def export_json(self) -> str:
        return canonical_json(self.export_dict())


def create_session(
    table: Table,
    space: InsightSpace,
    config: EngineConfig = DEFAULT_CONFIG,
    root_selector=None,
    session_id: str | None = None,
) -> Session:
    """New session rooted at a selected insight. The selector is an insight
    id, a query dict {type, attributes, polarity?}, or None for the default:
    the strongest tier-1 insight (falling back to the whole space when no
    tier-1 insight exists), ties broken by id."""
    insight = _resolve_root(space, root_selector)
    session = Session(table, space, config, session_id=session_id)
    session.apply({"type": "CreateRoot", "insightId": insight.id})
    return session


def _resolve_root(space: InsightSpace, selector) -> Insight:
    if isinstance(selector, str):
        return space.get(selector)
    if not space.insights:
        raise NoMatchingInsight("the insight space is empty")
    if selector is None:
        pool = [i for i in space.insights if i.tier == 1] or list(space.insights)
    else:
        pool = _query_insights(space, selector)
        if not pool:
            raise NoMatchingInsight(f"no insight matches query {selector!r}",
                                    query=selector)
    return min(pool, key=lambda i: (i.tier, -i.strength, i.id))


def _query_insights(space: InsightSpace, query: dict) -> list:
    wanted_type = InsightType(str(query["type"]).lower())
    attrs = frozenset(query["attributes"])
    polarity = query.get("polarity")
    out = []
    for ins in space.of_type(wanted_type):
        if ins.attributes != attrs:
            continue
        if polarity is not None:
            tag = ins.id.rsplit("|", 1)[-1]
            if tag != str(polarity).lower():
                continue
        out.append(ins)
    return out


def replay(
    event_log,
    table: Table,
    space: InsightSpace,
    config: EngineConfig = DEFAULT_CONFIG,
    session_id: str | None = None,
) -> Session:
    """Rebuild a session by folding an event log from scratch. Any event the
    fresh session cannot apply marks the log corrupt."""
    events = list(event_log)
    if not events:
        raise CorruptLog("empty event log (no CreateRoot)")
    if events[0].get("type") != "CreateRoot":
        raise CorruptLog(f"log must start with CreateRoot, got {events[0].get('type')!r}")
    session = Session(table, space, config, session_id=session_id)
    for i, event in enumerate(events):
        try:
            session.apply(event)
        except CorruptLog as exc:
            raise CorruptLog(f"event {i} not applicable: {exc}", index=i) from exc
        except EngineError as exc:
            raise CorruptLog(
                f"event {i} not applicable: {exc.code}: {exc}", index=i
            ) from exc
    return session


def import_session(
    document,
    table: Table,
    space: InsightSpace,
    config: EngineConfig = DEFAULT_CONFIG,
    session_id: str | None = None,
) -> Session:
    """Rebuild a session from an exported document (dict, JSON text, or
    bytes), enforcing the export version."""
    if isinstance(document, (bytes, str)):
        document = json.loads(document)
    version = document.get("version")
    if version != EXPORT_VERSION:
        raise VersionMismatch(
            f"export version {version!r} unsupported (expected {EXPORT_VERSION})",
            version=version,
        )
    meta = document.get("meta", {})
    if meta.get("dataset") not in (None, table.name):
        raise CorruptLog(
            f"export is for dataset {meta.get('dataset')!r}, not {table.name!r}"
        )
    return replay(document["eventLog"], table, space, config, session_id=session_id)


# -- line-delimited event persistence -------------------------------------

def append_event_jsonl(path, event: dict) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(event, sort_keys=True, ensure_ascii=False) + "\n")


def read_events_jsonl(path) -> list:
    events = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            try:
                events.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise CorruptLog(f"bad event record on line {line_no + 1}: {exc}") from exc
    return events


def to_dot(session: Session) -> str:
    """The analysis tree in DOT form; archived nodes are filled gray."""
    lines = [
        "digraph analysis {",
        "  rankdir=TB;",
        '  node [shape=box, style="rounded,filled", fillcolor=white];',
    ]
    for _, c in sorted(session.cells.items()):
        summary = (c.entries[0].text if c.kind == CellKind.VISUALIZATION
                   else (c.question_text or ""))
        if len(summary) > 48:
            summary = summary[:45] + "..."
        label = f"{c.id}: {summary}".replace("\\", "\\\\").replace('"', '\\"')
        attrs = f'label="{label}"'
        if c.archived:
            attrs += ", fillcolor=gray80"
        lines.append(f"  c{c.id} [{attrs}];")
    for _, c in sorted(session.cells.items()):
        if c.parent_id is not None:
            lines.append(f"  c{c.parent_id} -> c{c.id};")
    lines.append("}")
    return "\n".join(lines) + "\n"
