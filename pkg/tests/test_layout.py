import json
import random

import pytest

from aggsculpt import (
    FacetKey,
    Selection,
    axis_label_tree,
    compute_layout,
    hover_highlight_model,
    peek,
    pivot_partition,
    prune,
    toggle_view,
)
from aggsculpt.layout import (
    COUNT_LABEL_MIN_CELL,
    LINK_OPACITY,
    MIN_CELL_SIZE,
    cell_size_for,
    surface_size,
)
from aggsculpt.svg import render_svg

from conftest import session_from_table


def grid_session(cars_session, h=("cylinders",), v=("origin",)):
    session = cars_session
    for a in h:
        session = pivot_partition(session, 1, "horizontal", a)
    for a in v:
        session = pivot_partition(session, 1, "vertical", a)
    return session


def test_cell_size_plain_canvas():
    # 800x600 canvas, 4x3 grid: min(200, 200) = 200 > 5, surface untouched
    assert surface_size(800, 600, 4, 3) == (800, 600)
    assert cell_size_for(800, 600, 4, 3) == 200


def test_cell_size_extension_rule():
    # 400 columns on 800px: min(2, 200) < 5 pins cells at 5 and extends
    sw, sh = surface_size(800, 600, 400, 3)
    assert (sw, sh) == (400 * 5, 3 * 5)
    assert cell_size_for(sw, sh, 400, 3) == 5


def test_single_cell_is_centered(cars_session):
    layout = compute_layout(cars_session, 1, 800, 600)
    assert layout.n_x == layout.n_y == 1
    cell = layout.cells[0]
    assert (cell.x, cell.y) == (400.0, 300.0)
    assert cell.count == 32


def test_layout_algebra_property():
    rng = random.Random(5)
    for _ in range(2000):
        w, h = rng.uniform(1, 4000), rng.uniform(1, 4000)
        n_x, n_y = rng.randint(1, 500), rng.randint(1, 500)
        sw, sh = surface_size(w, h, n_x, n_y)
        s = cell_size_for(sw, sh, n_x, n_y)
        assert s == max(min(sw / n_x, sh / n_y), MIN_CELL_SIZE)
        if min(w / n_x, h / n_y) < MIN_CELL_SIZE:
            assert (sw, sh) == (n_x * MIN_CELL_SIZE, n_y * MIN_CELL_SIZE)
        else:
            assert (sw, sh) == (w, h)
        # adjacent marks never overlap: diameter no larger than the cell
        assert 2 * (s * 0.8 / 2) <= s


def test_label_tree_nesting(cars_session):
    from aggsculpt import AttributeSpec, Binning, configure_attribute

    session = configure_attribute(
        cars_session, "mpg",
        AttributeSpec(name="mpg", kind="quantitative", sort_order="numerical",
                      binning=Binning(method="explicit-edges", edges=(0, 10, 20, 30, 40))),
    )
    session = pivot_partition(session, 1, "horizontal", "cylinders")
    session = pivot_partition(session, 1, "horizontal", "mpg")
    levels = axis_label_tree(session, 1, "horizontal", extent=150.0)
    assert [level.attribute for level in levels] == ["cylinders", "mpg"]
    assert len(levels[0].spans) == 3
    assert len(levels[1].spans) == 15
    # every top span covers exactly its five children's total extent
    for i, top in enumerate(levels[0].spans):
        children = levels[1].spans[i * 5:(i + 1) * 5]
        assert top.start == children[0].start
        assert top.end == children[-1].end
    assert axis_label_tree(session, 1, "vertical") == ()


def test_vertical_axis_shows_only_first_attribute_name(cars_session):
    session = grid_session(cars_session, h=(), v=("cylinders", "origin"))
    layout = compute_layout(session, 1, 800, 900)
    assert [l.attribute for l in layout.v_labels] == ["cylinders", "origin"]
    assert layout.v_labels[0].show_name is True
    assert layout.v_labels[1].show_name is False


def test_peek_fractions_present_and_normalized(cars_session):
    session = grid_session(cars_session)
    session = peek(session, 1, "origin")
    layout = compute_layout(session, 1, 800, 600)
    assert layout.peek_attribute == "origin"
    assert layout.peek_categories == ("Asia", "Europe", "US")
    for cell in layout.cells:
        if cell.count:
            assert sum(cell.peek_fractions) == pytest.approx(1.0, abs=1e-9)
        else:
            assert cell.peek_fractions is None


def test_links_hidden_by_default_and_styled(papers_session):
    session = pivot_partition(papers_session, 1, "horizontal", "track")
    layout = compute_layout(session, 1, 800, 600)
    assert layout.links == ()  # hidden until toggled on

    session = toggle_view(session, 1, "links", True)
    layout = compute_layout(session, 1, 800, 600)
    assert len(layout.links) > 0
    assert layout.to_dict()["style"]["linkOpacity"] == LINK_OPACITY == 0.3

    weights = [l.weight for l in layout.links]
    thick = [l.thickness for l in layout.links]
    by_weight = sorted(zip(weights, thick))
    for (w1, t1), (w2, t2) in zip(by_weight, by_weight[1:]):
        assert t1 <= t2 or w1 == w2  # thickness monotone in weight


def test_hover_highlight_classes(papers_session):
    session = pivot_partition(papers_session, 1, "horizontal", "track")
    session = toggle_view(session, 1, "links", True)
    layout = compute_layout(session, 1, 800, 600)

    theory = FacetKey(h=(("track", "theory"),))
    model = hover_highlight_model(layout, theory)
    # outbound links (class origin) from theory; inbound (class incoming) into it
    origin_ids = set(model["origin"])
    incoming_ids = set(model["incoming"])
    for link in layout.links:
        if link.source == theory:
            assert link.id in origin_ids
        if link.target == theory:
            assert link.id in incoming_ids
    assert model["count"] == 3
    assert {(l["axis"], l["label"]) for l in model["labels"]} == {("horizontal", "theory")}


def test_hover_on_linkless_node_keeps_labels(papers_session):
    session = pivot_partition(papers_session, 1, "horizontal", "year")
    session = toggle_view(session, 1, "links", True)
    # pruning every 2020 paper leaves 2018/2019 with edges among themselves only
    session = prune(session, Selection(substrate_id=1, mode="column-facet",
                                       keys=(("year", "2019"),)))
    layout = compute_layout(session, 1, 800, 600)
    key = FacetKey(h=(("year", "2019"),))
    model = hover_highlight_model(layout, key)
    assert model["count"] == 0
    assert model["labels"]


def test_inbound_outbound_on_three_node_toy():
    table = {"g": ["A", "B", "C"]}
    session = session_from_table(table, edges=([0, 0, 1], [1, 2, 1], [1.0, 1.0, 1.0]))
    session = pivot_partition(session, 1, "horizontal", "g")
    session = toggle_view(session, 1, "links", True)
    layout = compute_layout(session, 1, 600, 200)
    b = FacetKey(h=(("g", "B"),))
    model = hover_highlight_model(layout, b)
    inbound_sources = {l.source.h[0][1] for l in layout.links if l.id in set(model["incoming"])}
    assert inbound_sources == {"A", "B"}
    outbound_targets = {l.target.h[0][1] for l in layout.links if l.id in set(model["origin"])}
    assert outbound_targets == {"B"}


def test_layout_pure_and_byte_identical(cars_session):
    session = grid_session(cars_session)
    session = peek(session, 1, "year")
    a = json.dumps(compute_layout(session, 1, 799.5, 601.25).to_dict(), sort_keys=True)
    b = json.dumps(compute_layout(session, 1, 799.5, 601.25).to_dict(), sort_keys=True)
    assert a == b


def test_count_labels_follow_cell_size(cars_session):
    session = grid_session(cars_session)
    big = compute_layout(session, 1, 900, 600)
    assert big.cell_size >= COUNT_LABEL_MIN_CELL and big.show_count_labels
    small = compute_layout(session, 1, 60, 40)
    assert small.cell_size < COUNT_LABEL_MIN_CELL and not small.show_count_labels


def test_zero_live_rows_layout_is_valid(cars_session):
    selection = Selection(substrate_id=1, mode="nodes", keys=(FacetKey(),))
    session = prune(cars_session, selection)
    layout = compute_layout(session, 1, 800, 600)
    assert layout.cells == () and layout.links == ()
    assert layout.n_x == layout.n_y == 0


def test_proportional_allocation_is_reserved(cars_session):
    from aggsculpt import SculptError

    with pytest.raises(SculptError) as err:
        compute_layout(cars_session, 1, 800, 600, proportional=True)
    assert err.value.code == "unsupported_mode"


def test_dangling_hover_key_errors(cars_session):
    layout = compute_layout(cars_session, 1, 800, 600)
    from aggsculpt import SculptError

    with pytest.raises(SculptError) as err:
        hover_highlight_model(layout, FacetKey(h=(("origin", "US"),)))
    assert err.value.code == "dangling_key"


def test_svg_renders_marks_and_links(papers_session):
    session = pivot_partition(papers_session, 1, "horizontal", "track")
    session = pivot_partition(session, 1, "vertical", "year")
    session = toggle_view(session, 1, "links", True)
    session = toggle_view(session, 1, "arrows", True)
    layout = compute_layout(session, 1, 800, 600)
    doc = render_svg(layout)
    non_empty = sum(1 for c in layout.cells if c.count)
    assert doc.count("<circle") >= non_empty
    assert doc.count('<path d="M') >= len(layout.links)
    assert "marker" in doc  # arrows requested
    assert doc.startswith("<svg") and doc.endswith("</svg>")

    # peek over an attribute that is mixed inside cells: real pie slices
    pie_session = pivot_partition(papers_session, 1, "horizontal", "track")
    pie_session = peek(pie_session, 1, "year")
    pie_doc = render_svg(compute_layout(pie_session, 1, 800, 600))
    assert ' Z" fill=' in pie_doc  # at least one pie arc slice
