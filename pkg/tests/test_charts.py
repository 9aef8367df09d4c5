"""Chart spec generation, schema validation, and server-side render data."""

import pytest

from edaguide import chart_for_insight, charts_for_answer, load_table, mine_all, validate_spec
from edaguide.charts import ChartSpec, Encoding, Highlight, Mark, render_data
from edaguide.errors import InvalidChartSpec
from edaguide.insights import InsightType
from edaguide.recommend import logically_related
from edaguide.stats import Filter


def test_extremum_chart(cars_space):
    spec = chart_for_insight(cars_space.get("extremum|Year|mean(Horsepower)||lowest"))
    assert spec.mark == Mark.BAR
    assert spec.x == Encoding("Year", "categorical")
    assert spec.y == Encoding("Horsepower", "quantitative", aggregate="mean")
    assert spec.highlight == Highlight("Year", "eq", "1980")
    assert spec.title == "Mean Horsepower by Year"
    assert spec.filter is None


def test_item_extremum_chart(cars_space):
    spec = chart_for_insight(cars_space.get("extremum|Name|Horsepower||lowest"), item_limit=20)
    assert spec.mark == Mark.BAR
    assert spec.limit == 20
    assert spec.sort == "ascending"
    assert spec.x.field == "Name"
    assert spec.y.aggregate is None


def test_correlation_chart(cars_space):
    spec = chart_for_insight(cars_space.get("correlation||Horsepower&Weight_in_lbs||positive"))
    assert spec.mark == Mark.POINT
    assert (spec.x.field, spec.y.field) == ("Horsepower", "Weight_in_lbs")
    assert spec.highlight is None


def test_anomaly_chart(cars_space):
    spec = chart_for_insight(cars_space.get("anomaly||Horsepower||"))
    assert spec.mark == Mark.TICK
    assert spec.y is None
    assert spec.highlight.op == "outside-range"
    lo, hi = spec.highlight.value
    assert lo < hi


def test_distribution_chart(cars_space):
    ins = cars_space.get("distribution||Horsepower||")
    spec = chart_for_insight(ins)
    assert spec.mark == Mark.HISTOGRAM
    assert spec.x.bin_step == ins.payload.bin_width
    assert spec.highlight.op == "inside-range"
    assert spec.highlight.value == (ins.payload.lo, ins.payload.hi)


def test_degenerate_distribution_chart():
    t = load_table(b"v\n4.5\n4.5\n4.5\n", name="flat")
    space = mine_all(t)
    ins = space.get("distribution||v||")
    spec = chart_for_insight(ins)
    assert spec.highlight.value == (4.5, 4.5)
    data = render_data(t, spec)
    assert data == [{"x0": 4.5, "x1": 4.5, "y": 3}]


def test_filter_rendered_in_title_and_clause(cars_space):
    ins = cars_space.get("distribution||Horsepower|Year=1980|")
    spec = chart_for_insight(ins)
    assert spec.filter == Filter("Year", "1980")
    assert spec.title.endswith("(Year = 1980)")


def test_every_mined_spec_validates(cars_space, cars_table):
    for ins in cars_space.insights:
        for spec in ins.vis_objects:
            validate_spec(spec, cars_table)


def test_spec_round_trip(cars_space):
    for ins in cars_space.insights[:50]:
        spec = ins.vis_objects[0]
        assert ChartSpec.from_dict(spec.to_dict()) == spec


def test_validate_rejects_histogram_without_bin():
    spec = ChartSpec(mark=Mark.HISTOGRAM,
                     x=Encoding("v", "quantitative"),
                     y=Encoding("v", "quantitative", aggregate="count"),
                     filter=None, highlight=None, title="bad")
    with pytest.raises(InvalidChartSpec):
        validate_spec(spec)


def test_validate_rejects_unresolvable_highlight():
    spec = ChartSpec(mark=Mark.BAR,
                     x=Encoding("g", "categorical"),
                     y=Encoding("v", "quantitative", aggregate="mean"),
                     filter=None,
                     highlight=Highlight("other", "eq", "x"),
                     title="bad")
    with pytest.raises(InvalidChartSpec):
        validate_spec(spec)


def test_validate_rejects_unknown_column(toy_table):
    spec = ChartSpec(mark=Mark.TICK, x=Encoding("nope", "quantitative"),
                     y=None, filter=None, highlight=None, title="t")
    with pytest.raises(InvalidChartSpec):
        validate_spec(spec, toy_table)


def test_validate_rejects_bad_op():
    spec = ChartSpec(mark=Mark.TICK, x=Encoding("v", "quantitative"),
                     y=None, filter=None,
                     highlight=Highlight("v", "between", (0, 1)), title="t")
    with pytest.raises(InvalidChartSpec):
        validate_spec(spec)


def test_combo_answer_extremum_chart_first(cars_space):
    source = cars_space.get("extremum|Year|mean(Weight_in_lbs)||lowest")
    combo = next(a for a in logically_related(source, cars_space)
                 if len(a.insight_ids) == 2)
    specs = charts_for_answer(combo, cars_space)
    assert [s.mark for s in specs] == [Mark.BAR, Mark.POINT]


def test_single_answer_chart(cars_space):
    source = cars_space.get("anomaly||Horsepower||")
    answers = logically_related(source, cars_space)
    specs = charts_for_answer(answers[0], cars_space)
    assert len(specs) == 1 and specs[0].mark == Mark.HISTOGRAM


# --- render_data ---

def test_render_bar_aggregate(toy_table, toy_space):
    spec = chart_for_insight(toy_space.get("extremum|cat|mean(q1)||lowest"))
    data = render_data(toy_table, spec)
    assert data == [{"x": "X", "y": 2.0}, {"x": "Y", "y": 11.0}, {"x": "Z", "y": 52.5}]


def test_render_bar_items_sorted_and_limited(toy_table, toy_space):
    spec = chart_for_insight(toy_space.get("extremum|id|q1||highest"), item_limit=3)
    data = render_data(toy_table, spec)
    assert [d["x"] for d in data] == ["g", "f", "e"]
    assert data[0]["y"] == 100.0


def test_render_point_skips_incomplete_pairs(cars_table, cars_space):
    spec = chart_for_insight(cars_space.get("correlation||Horsepower&Weight_in_lbs||positive"))
    data = render_data(cars_table, spec)
    assert len(data) == 400
    assert all(d["x"] is not None and d["y"] is not None for d in data)


def test_render_tick_respects_filter(cars_table, cars_space):
    spec = chart_for_insight(cars_space.get("anomaly||Horsepower|Year=1980|"))
    data = render_data(cars_table, spec)
    assert len(data) == 27  # non-missing Horsepower rows in 1980


def test_render_histogram_bins(cars_table, cars_space):
    ins = cars_space.get("distribution||Horsepower||")
    data = render_data(cars_table, ins.vis_objects[0])
    assert sum(d["y"] for d in data) == 400
    for d in data:
        assert d["x1"] - d["x0"] == pytest.approx(ins.payload.bin_width)
    # bins tile the axis without gaps
    for prev, nxt in zip(data, data[1:]):
        assert nxt["x0"] == pytest.approx(prev["x1"])
