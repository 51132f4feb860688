import json
import xml.etree.ElementTree as ET
from collections import Counter
from pathlib import Path

import pytest

from adamsext import charts
from adamsext.charts import (
    ExtChart,
    OracleDisagreement,
    build_chart,
    fixture_aliases,
    from_dict,
    render,
    to_dict,
)
from adamsext.modules import dual, load_fixture, normalize, tensor, zero_module
from adamsext.resolution import ext_table, resolve

FIGURE = json.loads((Path(__file__).parent / "data" / "figure_ass.json").read_text())


@pytest.fixture(scope="module")
def sphere():
    s = load_fixture("sphere")
    return build_chart(s, s, 6, 14)


@pytest.fixture(scope="module")
def xx():
    x = load_fixture("X")
    return build_chart(x, x, 17, 23)


@pytest.fixture(scope="module")
def yx():
    return build_chart(load_fixture("Y"), load_fixture("X"), 17, 20)


def bidegree_counts(chart, max_stem):
    return Counter((c.stem, c.s) for c in chart.classes if c.stem <= max_stem)


def figure_counts(panel, max_stem):
    return Counter(tuple(p) for p in FIGURE[panel]["classes"] if p[0] <= max_stem)


def line_multiset(chart, max_stem):
    return Counter((l.source[:2], l.target[:2], l.kind) for l in chart.lines if l.target[0] <= max_stem)


def figure_lines(panel, max_stem):
    return Counter((tuple(a), tuple(b), k) for a, b, k in FIGURE[panel]["lines"] if b[0] <= max_stem)


# ---------------------------------------------------------------- examples


def test_sphere_chart(sphere):
    assert sphere.stem_counts(0) == {s: 1 for s in range(7)}
    assert [l.kind for l in sphere.lines_from((0, 0, 0))] == ["h0", "h1", "h2"]
    assert sphere.stem_counts(1) == {1: 1}
    assert sphere.stem_counts(3) == {1: 1, 2: 1, 3: 1}
    for s in (1, 2):
        assert sphere.lines_from((3, s, 0), "h0")[0].target == (3, s + 1, 0)
    assert sphere.shift == 0


def test_x_x_eight_stem(xx):
    assert xx.shift == -3
    assert xx.stem_counts(8 - xx.shift) == {2: 2, 3: 1}


def test_x_x_minus_one_stem_empty(xx):
    assert xx.stem_counts(-1 - xx.shift) == {}


def test_x_x_aliases_are_justified(xx):
    named = xx.with_aliases(fixture_aliases("X-X"))
    c, es, eps, nuc = (named.named(n) for n in ("c", "ησ", "ε", "νc"))
    assert (c.stem + xx.shift, c.s) == (8, 2)
    assert (nuc.stem + xx.shift, nuc.s) == (11, 3)
    assert (eps.stem + xx.shift, eps.s) == (8, 3)
    # eta sigma is h1 times the s = 1 class of stem 7
    sigma = [cl for cl in xx.classes if cl.stem == 7 - xx.shift and cl.s == 1]
    assert len(sigma) == 1
    assert [l.target for l in xx.lines_from(sigma[0].key, "h1")] == [es.key]
    # c carries the only nonzero h2 out of the 8-stem, and it hits nu c
    h2_out = [l for l in named.lines if l.kind == "h2" and l.source[0] == c.stem]
    assert [(l.source, l.target) for l in h2_out] == [(c.key, nuc.key)]


def test_zero_chart():
    chart = build_chart(zero_module(), load_fixture("X"))
    assert chart.classes == () and chart.lines == ()
    assert build_chart(load_fixture("X"), zero_module()).classes == ()


def test_aliases_must_exist(sphere):
    with pytest.raises(KeyError):
        sphere.with_aliases({(5, 5, 0): "nothing"})


# ------------------------------------------------------------- invariants


@pytest.mark.parametrize("name", ["sphere", "xx", "yx"])
def test_chart_invariants(name, request):
    chart = request.getfixturevalue(name)
    keys = {c.key for c in chart.classes}
    by_bidegree = Counter((c.stem, c.s) for c in chart.classes)
    for c in chart.classes:
        assert c.index < by_bidegree[(c.stem, c.s)]
    for l in chart.lines:
        assert l.source in keys and l.target in keys
        ds, dt = charts.OFFSETS[l.kind]
        assert (l.target[0] - l.source[0], l.target[1] - l.source[1]) == (ds, dt)


def test_counts_equal_ext_table(xx):
    x = load_fixture("X")
    r = resolve(normalize(tensor(x, dual(x))), 17, 40)
    table = ext_table(r)
    for (s, t), d in table.dims.items():
        if t - s <= 23:
            assert xx.count(t - s, s) == d


def test_truncation_flags(sphere, xx):
    assert sphere.truncated == {"stem": True, "s": True}
    small = build_chart(load_fixture("X"), load_fixture("X"), 1, 1)
    assert small.truncated == {"stem": False, "s": False}


# ------------------------------------------------------ figure reproduction


def test_bottom_panel_classes_match_figure(xx):
    # the transcribed figure is complete through stem 20
    assert bidegree_counts(xx, 20) == figure_counts("F-eta2-eta2", 20)
    assert FIGURE["F-eta2-eta2"]["xshift"] == xx.shift


def test_bottom_panel_lines_match_figure(xx):
    assert line_multiset(xx, 20) == figure_lines("F-eta2-eta2", 20)


# Top panel: the drawn page does not equal Ext(Y (x) DX); the difference is
# frozen here so any change in either direction is noticed.
TOP_FIGURE_ONLY = {
    (8, 1): 1, (9, 2): 1, (10, 2): 1, (10, 3): 1, (11, 2): 1, (11, 3): 1, (12, 4): 1,
    (15, 3): 1, (16, 3): 1, (16, 4): 1, (16, 5): 1, (17, 3): 1, (17, 4): 1, (17, 5): 1,
    (17, 6): 1, (18, 4): 1, (18, 5): 1, (18, 6): 1, (18, 7): 1, (19, 6): 1, (19, 7): 1, (20, 8): 1,
}
TOP_COMPUTED_ONLY = {(18, 3): 1}


def test_top_panel_against_figure(yx):
    assert FIGURE["F-eta2-nueta2"]["xshift"] == yx.shift == -7
    mine, fig = bidegree_counts(yx, 20), figure_counts("F-eta2-nueta2", 20)
    assert dict(fig - mine) == TOP_FIGURE_ONLY
    assert dict(mine - fig) == TOP_COMPUTED_ONLY


def test_top_panel_towers(yx):
    # the long h0 towers in stems 3 and 7 (paper stems -4, 0) agree with the figure
    fig = figure_counts("F-eta2-nueta2", 20)
    for stem in (0, 3, 7):
        assert {s: n for (st, s), n in fig.items() if st == stem} == yx.stem_counts(stem)


def test_oracle_disagreement_is_raised(monkeypatch):
    real = charts.hom_complex_ext

    def broken(r, n):
        table = real(r, n)
        table.dims[(1, table.t_min + 5)] = table.dims.get((1, table.t_min + 5), 0) + 1
        return table

    monkeypatch.setattr(charts, "hom_complex_ext", broken)
    x = load_fixture("X")
    with pytest.raises(OracleDisagreement) as info:
        build_chart(x, x, 4, 10)
    assert info.value.bidegree[0] == 1


# ---------------------------------------------------------------- rendering


def test_render_empty_ascii():
    chart = ExtChart("empty", 0, (), (), 3, 3)
    text = render(chart, "ascii").decode()
    assert text.splitlines() == [text.rstrip("\n")]
    assert text.split() == ["s\\n", "0", "1", "2", "3"]


def test_render_ascii_multiplicity():
    cls = tuple(charts.ChartClass(0, 0, k, f"x{k}") for k in range(5)) + (charts.ChartClass(1, 0, 0, "y"),
                                                                         charts.ChartClass(1, 1, 0, "z"),
                                                                         charts.ChartClass(1, 1, 1, "w"))
    text = render(ExtChart("t", 2, cls, (), 1, 1), "ascii").decode().splitlines()
    assert text[0].split() == ["s\\n", "2", "3"]
    assert text[1].split() == ["1", ".", "oo"]
    assert text[2].split() == ["0", "5", "o"]


def test_render_sphere_json(sphere):
    data = json.loads(render(sphere, "json"))
    assert list(data) == ["title", "shift", "max_stem", "max_s", "classes", "lines", "truncated"]
    assert {"stem": 0, "s": 0, "index": 0, "name": "x_{0,0,0}"} in data["classes"]
    assert set(data["classes"][0]) == {"stem", "s", "index", "name"}
    assert list(data["lines"][0]) == ["kind", "from", "to"]
    assert list(data["truncated"]) == ["stem", "s"]


def test_json_is_canonical(xx):
    again = build_chart(load_fixture("X"), load_fixture("X"), 17, 23)
    assert render(again, "json") == render(xx, "json")
    assert from_dict(to_dict(xx)) == xx
    assert render(from_dict(json.loads(render(xx, "json"))), "json") == render(xx, "json")


def test_json_one_h2_line_from_c(xx):
    named = xx.with_aliases(fixture_aliases("X-X"))
    data = json.loads(render(named, "json"))
    c = next(cl for cl in data["classes"] if cl["name"] == "c")
    assert (c["stem"] + data["shift"], c["s"]) == (8, 2)
    out = [l for l in data["lines"] if l["kind"] == "h2" and l["from"] == [c["stem"], c["s"], c["index"]]]
    assert len(out) == 1


def test_render_svg(xx):
    svg = render(xx, "svg").decode()
    root = ET.fromstring(svg)
    ns = "{http://www.w3.org/2000/svg}"
    assert root.get("version") == "1.1"
    groups = [g for g in root.iter(ns + "g") if g.get("class") == "bidegree"]
    assert len(groups) == len(xx.bidegrees())
    assert sum(len(g.findall(ns + "circle")) for g in groups) == len(xx.classes)
    line_groups = [g for g in root.iter(ns + "g") if (g.get("class") or "").startswith("lines")]
    assert sum(len(g.findall(ns + "line")) for g in line_groups) == len(xx.lines)


def test_render_unknown_format(sphere):
    with pytest.raises(ValueError):
        render(sphere, "png")
