"""Session state machine: cells, tree, delete/restore, replay, persistence."""

import json
import random

import pytest

from edaguide import create_session, import_session, load_table, mine_all, replay
from edaguide.errors import (
    AlreadyArchived,
    ArchivedCell,
    CannotDeleteRoot,
    CorruptLog,
    IndexOutOfRange,
    NoMatchingInsight,
    NotAnActionList,
    NotArchived,
    NotAVisualizationCell,
    UnknownCell,
    UnknownQuestion,
    VersionMismatch,
)
from edaguide.insights import InsightSpace
from edaguide.session import (
    CellKind,
    append_event_jsonl,
    read_events_jsonl,
    to_dot,
)

from conftest import CARS_ROOT_ID, DATA_DIR
from generators import RULE_CONFIG, random_csv, random_session_walk


@pytest.fixture(scope="module")
def fig1_events():
    return json.loads((DATA_DIR / "fig1_trace.json").read_text())["events"]


@pytest.fixture()
def fig1_session(cars_table, cars_space, fig1_events):
    return replay(fig1_events, cars_table, cars_space)


# --- create_session ---

def test_create_root_by_id(cars_table, cars_space):
    s = create_session(cars_table, cars_space, root_selector=CARS_ROOT_ID)
    root = s.cell(1)
    assert root.kind == CellKind.VISUALIZATION
    assert root.parent_id is None
    assert [e.insight_id for e in root.entries] == [CARS_ROOT_ID]
    assert root.entries[0].chart.to_dict()["mark"] == "bar"
    assert s.event_log == [{"type": "CreateRoot", "insightId": CARS_ROOT_ID}]


def test_create_root_by_query(cars_table, cars_space):
    s = create_session(cars_table, cars_space, root_selector={
        "type": "extremum", "attributes": ["Year", "Horsepower"],
        "polarity": "lowest"})
    assert s.cell(1).entries[0].insight_id == CARS_ROOT_ID


def test_create_root_query_no_match(cars_table, cars_space):
    with pytest.raises(NoMatchingInsight):
        create_session(cars_table, cars_space, root_selector={
            "type": "extremum", "attributes": ["NoSuchColumn"]})


def test_create_root_empty_space():
    t = load_table(b"a,b\n", name="void")
    with pytest.raises(NoMatchingInsight):
        create_session(t, mine_all(t))


def test_default_root_is_strongest_tier_one(toy_table, toy_space):
    s = create_session(toy_table, toy_space)
    pool = [i for i in toy_space.insights if i.tier == 1] or list(toy_space.insights)
    expected = min(pool, key=lambda i: (i.tier, -i.strength, i.id))
    assert s.cell(1).entries[0].insight_id == expected.id


# --- select_question / select_action ---

def test_why_question_spawns_action_list(fig1_session):
    cell2 = fig1_session.cell(2)
    assert cell2.kind == CellKind.ACTION_LIST
    assert cell2.parent_id == 1
    assert len(cell2.answers) >= 2
    assert cell2.question_text == (
        "Why do cars from the year 1980 have the lowest average Horsepower?")


def test_action_spawns_combo_visualization(fig1_session, cars_space):
    cell3 = fig1_session.cell(3)
    assert cell3.kind == CellKind.VISUALIZATION
    assert cell3.parent_id == 2
    assert len(cell3.entries) == 2
    first, second = (cars_space.get(e.insight_id) for e in cell3.entries)
    assert first.type.value == "extremum" and second.type.value == "correlation"


def test_two_actions_make_siblings(fig1_session):
    assert fig1_session.cell(3).parent_id == fig1_session.cell(4).parent_id == 2
    ids3 = [e.insight_id for e in fig1_session.cell(3).entries]
    ids4 = [e.insight_id for e in fig1_session.cell(4).entries]
    assert ids3 != ids4


def test_attribute_question_spawns_visualization(fig1_session):
    for cid in (5, 6):
        cell = fig1_session.cell(cid)
        assert cell.kind == CellKind.VISUALIZATION
        assert cell.parent_id == 1
        assert len(cell.entries) == 1
        assert cell.spawned_by_question_id.startswith("attr|")


def test_single_answer_question_goes_straight_to_visualization(cars_table, cars_space):
    s = create_session(cars_table, cars_space, root_selector="anomaly||Horsepower||")
    panel = s.recommendations(1)
    lead = panel[0]
    assert lead.kind.value == "LogicallyRelated" and len(lead.answers) == 1
    cell = s.apply({"type": "SelectQuestion", "cellId": 1, "questionId": lead.id})
    assert cell.kind == CellKind.VISUALIZATION
    assert cell.entries[0].insight_id == "distribution||Horsepower||"


def test_unknown_question(cars_table, cars_space):
    s = create_session(cars_table, cars_space, root_selector=CARS_ROOT_ID)
    with pytest.raises(UnknownQuestion):
        s.apply({"type": "SelectQuestion", "cellId": 1, "questionId": "nope"})


def test_unknown_cell(cars_table, cars_space):
    s = create_session(cars_table, cars_space, root_selector=CARS_ROOT_ID)
    with pytest.raises(UnknownCell):
        s.apply({"type": "SelectQuestion", "cellId": 99, "questionId": "x"})


def test_select_action_guards(fig1_session):
    with pytest.raises(NotAnActionList):
        fig1_session.apply({"type": "SelectAction", "cellId": 1, "actionIndex": 0})
    with pytest.raises(IndexOutOfRange):
        fig1_session.apply({"type": "SelectAction", "cellId": 2, "actionIndex": 999})
    with pytest.raises(IndexOutOfRange):
        fig1_session.apply({"type": "SelectAction", "cellId": 2, "actionIndex": -1})


def test_recommendations_on_action_list_rejected(fig1_session):
    with pytest.raises(NotAVisualizationCell):
        fig1_session.recommendations(2)


def test_select_on_archived_cell(fig1_session):
    fig1_session.apply({"type": "Delete", "cellId": 5})
    with pytest.raises(ArchivedCell):
        fig1_session.apply({"type": "SelectQuestion", "cellId": 5, "questionId": "x"})


def test_suppression_walks_path_to_root(fig1_session):
    # cell 3 shows Displacement extremum + correlation; its panel must not
    # offer a question revealing ONLY those ids or the root insight again
    panel = fig1_session.recommendations(3)
    shown = {e.insight_id for e in fig1_session.cell(3).entries} | {CARS_ROOT_ID}
    for q in panel:
        revealed = {i for a in q.answers for i in a.insight_ids}
        assert not revealed <= shown, q.id


# --- delete / restore ---

def test_delete_mid_tree_keeps_children(fig1_session):
    fig1_session.apply({"type": "Delete", "cellId": 2})
    assert fig1_session.cell(2).archived
    visible = [c.id for c in fig1_session.notebook_cells()]
    assert visible == [1, 3, 4, 5, 6]
    assert fig1_session.cell(3).parent_id == 2
    assert len(fig1_session.cells) == 6


def test_delete_leaf_shrinks_notebook(fig1_session):
    before = [c.id for c in fig1_session.notebook_cells()]
    fig1_session.apply({"type": "Delete", "cellId": 6})
    after = [c.id for c in fig1_session.notebook_cells()]
    assert after == [i for i in before if i != 6]


def test_delete_errors(fig1_session):
    with pytest.raises(CannotDeleteRoot):
        fig1_session.apply({"type": "Delete", "cellId": 1})
    fig1_session.apply({"type": "Delete", "cellId": 4})
    with pytest.raises(AlreadyArchived):
        fig1_session.apply({"type": "Delete", "cellId": 4})


def test_restore_round_trip(fig1_session):
    before = [c.id for c in fig1_session.notebook_cells()]
    snapshot = to_dot(fig1_session)
    fig1_session.apply({"type": "Delete", "cellId": 4})
    fig1_session.apply({"type": "Restore", "cellId": 4})
    assert [c.id for c in fig1_session.notebook_cells()] == before
    assert to_dot(fig1_session) == snapshot


def test_restore_errors(fig1_session):
    with pytest.raises(NotArchived):
        fig1_session.apply({"type": "Restore", "cellId": 1})
    with pytest.raises(NotArchived):
        fig1_session.apply({"type": "Restore", "cellId": 3})


def test_restore_keeps_edges(fig1_session):
    edges_before = {(c.parent_id, c.id) for c in fig1_session.cells.values()
                    if c.parent_id is not None}
    fig1_session.apply({"type": "Delete", "cellId": 2})
    fig1_session.apply({"type": "Restore", "cellId": 2})
    edges_after = {(c.parent_id, c.id) for c in fig1_session.cells.values()
                   if c.parent_id is not None}
    assert edges_before == edges_after
    assert len(fig1_session.cells) == 6


# --- tree snapshot ---

def test_fresh_session_single_node(cars_table, cars_space):
    s = create_session(cars_table, cars_space, root_selector=CARS_ROOT_ID)
    snap = s.tree_snapshot()
    assert len(snap["nodes"]) == 1
    assert snap["nodes"][0]["id"] == 1 and snap["nodes"][0]["parentId"] is None


def test_fig1_tree_shape(fig1_session):
    snap = fig1_session.tree_snapshot()
    assert len(snap["nodes"]) == 6
    edges = {(n["parentId"], n["id"]) for n in snap["nodes"] if n["parentId"]}
    assert edges == {(1, 2), (2, 3), (2, 4), (1, 5), (1, 6)}


def test_node_count_equals_create_events(fig1_session):
    fig1_session.apply({"type": "Delete", "cellId": 6})
    creates = sum(1 for e in fig1_session.event_log
                  if e["type"] in ("CreateRoot", "SelectQuestion", "SelectAction"))
    assert len(fig1_session.cells) == creates == 6


def test_archived_flag_in_snapshot(fig1_session):
    fig1_session.apply({"type": "Delete", "cellId": 4})
    node = [n for n in fig1_session.tree_snapshot()["nodes"] if n["id"] == 4][0]
    assert node["archived"] is True


# --- replay / export / import ---

def test_replay_empty_log(cars_table, cars_space):
    with pytest.raises(CorruptLog):
        replay([], cars_table, cars_space)


def test_replay_must_start_with_create_root(cars_table, cars_space):
    with pytest.raises(CorruptLog):
        replay([{"type": "Delete", "cellId": 1}], cars_table, cars_space)


def test_replay_reports_bad_event_index(cars_table, cars_space, fig1_events):
    events = fig1_events[:2] + [{"type": "SelectAction", "cellId": 2, "actionIndex": 99}]
    with pytest.raises(CorruptLog) as exc:
        replay(events, cars_table, cars_space)
    assert exc.value.details["index"] == 2


def test_replay_byte_exact(cars_table, cars_space, fig1_events):
    a = replay(fig1_events, cars_table, cars_space).export_json()
    b = replay(fig1_events, cars_table, cars_space).export_json()
    assert a == b
    assert a.encode("utf-8") == b.encode("utf-8")


def test_export_shape(fig1_session):
    doc = fig1_session.export_dict()
    assert doc["version"] == 1
    assert doc["meta"]["dataset"] == "cars"
    assert len(doc["eventLog"]) == len(fig1_session.event_log)
    assert doc["tree"]["root"] == 1
    assert {(e["from"], e["to"]) for e in doc["tree"]["edges"]} == {
        (1, 2), (2, 3), (2, 4), (1, 5), (1, 6)}
    assert [c["id"] for c in doc["materializedCells"]] == [1, 2, 3, 4, 5, 6]


def test_import_round_trip(cars_table, cars_space, fig1_session):
    text = fig1_session.export_json()
    again = import_session(text, cars_table, cars_space)
    assert again.export_json() == text


def test_import_version_mismatch(cars_table, cars_space, fig1_session):
    doc = fig1_session.export_dict()
    doc["version"] = 99
    with pytest.raises(VersionMismatch):
        import_session(doc, cars_table, cars_space)


def test_import_dataset_mismatch(cars_table, cars_space, fig1_session):
    doc = fig1_session.export_dict()
    doc["meta"]["dataset"] = "other"
    with pytest.raises(CorruptLog):
        import_session(doc, cars_table, cars_space)


def test_export_omits_session_identity(cars_table, cars_space, fig1_events):
    a = replay(fig1_events, cars_table, cars_space, session_id="s1").export_json()
    b = replay(fig1_events, cars_table, cars_space, session_id="s2").export_json()
    assert a == b


# --- invariants under fuzzing ---

def test_fuzzed_walks_round_trip():
    rng = random.Random(4242)
    walks = 0
    for _ in range(60):
        table = load_table(random_csv(rng).encode(), name="rand")
        space = mine_all(table, RULE_CONFIG)
        session = random_session_walk(rng, table, space, RULE_CONFIG, steps=8)
        if session is None:
            continue
        walks += 1
        # structural invariants after the walk
        ids = sorted(session.cells)
        assert ids[0] == 1 and session.cell(1).parent_id is None
        for c in session.cells.values():
            if c.parent_id is not None:
                assert c.parent_id < c.id
        notebook = [c.id for c in session.notebook_cells()]
        assert notebook == sorted(notebook)
        deletes = sum(1 for e in session.event_log if e["type"] == "Delete")
        restores = sum(1 for e in session.event_log if e["type"] == "Restore")
        archived = sum(1 for c in session.cells.values() if c.archived)
        assert archived == deletes - restores
        # event-sourcing: replay reproduces the exact bytes
        again = replay(session.event_log, table, space, RULE_CONFIG)
        assert again.export_json() == session.export_json()
        # import(export(s)) == s
        back = import_session(session.export_json(), table, space, RULE_CONFIG)
        assert back.export_json() == session.export_json()
    assert walks >= 30


# --- jsonl persistence ---

def test_jsonl_round_trip(tmp_path, fig1_events):
    path = tmp_path / "events.jsonl"
    for e in fig1_events:
        append_event_jsonl(path, e)
    assert read_events_jsonl(path) == fig1_events


def test_jsonl_corrupt_line(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"type": "CreateRoot"}\nnot json\n')
    with pytest.raises(CorruptLog):
        read_events_jsonl(path)


# --- dot export ---

def test_dot_output(fig1_session):
    fig1_session.apply({"type": "Delete", "cellId": 4})
    dot = to_dot(fig1_session)
    assert dot.startswith("digraph analysis {")
    assert "c1 -> c2;" in dot and "c2 -> c3;" in dot
    assert dot.count(" -> ") == 5
    # archived node is the only gray one
    gray = [line for line in dot.splitlines() if "gray80" in line]
    assert len(gray) == 1 and gray[0].lstrip().startswith("c4 ")
    assert '1: Cars from the year 1980 have the lowest avera..."' in dot
