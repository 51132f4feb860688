"""Adams E2 charts: classes, h0/h1/h2 structure lines, and renderers.

A chart is computed for Ext_A(M, N) = Ext_A(M (x) DN, F2).  The tensor
product is normalized to bottom degree 0 before resolving, so chart
coordinates (stem, s) always start at stem 0; ``shift`` is the bottom
degree that was removed, and ``stem + shift`` is the stem on the
un-normalized axis.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from xml.sax.saxutils import escape

from .modules import FDModule, dual, normalize, tensor
from .resolution import (
    DEFAULT_MAX_S,
    DEFAULT_MAX_T,
    ExtTable,
    HProducts,
    Resolution,
    cached_resolve,
    ext_table,
    h_action,
    hom_complex_ext,
)

KINDS = ("h0", "h1", "h2")
OFFSETS = {"h0": (0, 1), "h1": (1, 1), "h2": (3, 1)}
DEFAULT_MAX_STEM = DEFAULT_MAX_T - DEFAULT_MAX_S

ClassKey = tuple[int, int, int]


class OracleDisagreement(RuntimeError):
    """The duality route and the Hom-complex route gave different Ext dimensions."""

    def __init__(self, bidegree: tuple[int, int], primary: int, oracle: int):
        s, t = bidegree
        super().__init__(
            f"Ext dimension mismatch at (stem {t - s}, s {s}): resolution gives {primary}, "
            f"Hom complex gives {oracle}"
        )
        self.bidegree = bidegree
        self.primary = primary
        self.oracle = oracle


@dataclass(frozen=True)
class ChartClass:
    stem: int
    s: int
    index: int
    name: str

    @property
    def key(self) -> ClassKey:
        return (self.stem, self.s, self.index)


@dataclass(frozen=True)
class ChartLine:
    kind: str
    source: ClassKey
    target: ClassKey


@dataclass(frozen=True)
class ExtChart:
    title: str
    shift: int
    classes: tuple[ChartClass, ...]
    lines: tuple[ChartLine, ...]
    max_stem: int
    max_s: int
    truncated: dict = field(default_factory=lambda: {"stem": False, "s": False})

    def count(self, stem: int, s: int) -> int:
        return sum(1 for c in self.classes if c.stem == stem and c.s == s)

    def stem_counts(self, stem: int) -> dict[int, int]:
        out: dict[int, int] = {}
        for c in self.classes:
            if c.stem == stem:
                out[c.s] = out.get(c.s, 0) + 1
        return out

    def bidegrees(self) -> list[tuple[int, int]]:
        return sorted({(c.stem, c.s) for c in self.classes})

    def get(self, key: ClassKey) -> ChartClass | None:
        for c in self.classes:
            if c.key == key:
                return c
        return None

    def named(self, name: str) -> ChartClass:
        for c in self.classes:
            if c.name == name:
                return c
        raise KeyError(name)

    def lines_from(self, key: ClassKey, kind: str | None = None) -> list[ChartLine]:
        return [l for l in self.lines if l.source == key and (kind is None or l.kind == kind)]

    def with_aliases(self, aliases: dict[ClassKey, str]) -> "ExtChart":
        """Rename classes by (stem, s, index); keys missing from the chart are an error."""
        present = {c.key for c in self.classes}
        missing = [k for k in aliases if k not in present]
        if missing:
            raise KeyError(f"no class at {missing[0]}")
        classes = tuple(replace(c, name=aliases.get(c.key, c.name)) for c in self.classes)
        return replace(self, classes=classes)


def class_name(stem: int, s: int, k: int) -> str:
    return f"x_{{{s},{stem},{k}}}"


def chart_from_resolution(r: Resolution, max_s: int, max_stem: int, title: str = "",
                          shift: int = 0) -> ExtChart:
    """Chart of Ext_A(r.module, F2) restricted to s <= max_s, stem <= max_stem."""
    if r.max_s < max_s or r.max_t < max_stem + max_s:
        raise ValueError("resolution does not cover the requested chart range")
    table = ext_table(r)
    classes = []
    for (s, t), d in sorted(table.dims.items()):
        stem = t - s
        if s > max_s or stem > max_stem:
            continue
        classes.extend(ChartClass(stem, s, k, class_name(stem, s, k)) for k in range(d))
    classes.sort(key=lambda c: (c.stem, c.s, c.index))

    lines = []
    for i, kind in enumerate(KINDS):
        prods: HProducts = h_action(r, i)
        dstem, _ = OFFSETS[kind]
        for c in classes:
            if c.s + 1 > max_s or c.stem + dstem > max_stem:
                continue
            image = prods.apply(c.s, c.stem + c.s, 1 << c.index)
            j = 0
            while image:
                if image & 1:
                    lines.append(ChartLine(kind, c.key, (c.stem + dstem, c.s + 1, j)))
                image >>= 1
                j += 1
    lines.sort(key=lambda l: (l.source, KINDS.index(l.kind), l.target))

    truncated = {
        "stem": any(c.stem == max_stem for c in classes),
        "s": any(c.s == max_s for c in classes),
    }
    return ExtChart(title, shift, tuple(classes), tuple(lines), max_stem, max_s, truncated)


def check_oracle(primary: ExtTable, oracle: ExtTable, max_s: int, max_stem: int) -> None:
    """Raise OracleDisagreement at the first bidegree where the tables differ."""
    for s in range(max_s + 1):
        for stem in range(max_stem + 1):
            t = stem + s
            a, b = primary.dim(s, t), oracle.dim(s, t)
            if a != b:
                raise OracleDisagreement((s, t), a, b)


def oracle_table(m: FDModule, n: FDModule, max_s: int, max_t: int,
                 cache_dir: str | Path | None = None) -> ExtTable:
    """Ext_A(m, n) by the Hom-complex route, in the normalized coordinates of m (x) Dn."""
    mn, nn = normalize(m), normalize(n)
    r = cached_resolve(mn, max_s + 1, max_t, cache_dir)
    return hom_complex_ext(r, nn).shifted(nn.top)


def build_chart(m: FDModule, n: FDModule, max_s: int = DEFAULT_MAX_S,
                max_stem: int = DEFAULT_MAX_STEM, cache_dir: str | Path | None = None,
                title: str | None = None, oracle: bool = True) -> ExtChart:
    """E2 chart for Ext_A(m, n): the Adams spectral sequence for maps from n's space to m's.

    Raises OracleDisagreement if the Hom-complex computation differs
    anywhere in range.
    """
    if title is None:
        title = f"Ext({m.name}, {n.name})"
    if not m.basis or not n.basis:
        return ExtChart(title, 0, (), (), max_stem, max_s)
    p = tensor(m, dual(n))
    shift = p.bottom
    max_t = max_stem + max_s
    r = cached_resolve(normalize(p), max_s, max_t, cache_dir)
    chart = chart_from_resolution(r, max_s, max_stem, title, shift)
    if oracle:
        check_oracle(ext_table(r), oracle_table(m, n, max_s, max_t, cache_dir), max_s, max_stem)
    return chart


def sphere_chart(m: FDModule, max_s: int = DEFAULT_MAX_S, max_stem: int = DEFAULT_MAX_STEM,
                 cache_dir: str | Path | None = None) -> ExtChart:
    """Ext_A(m, F2), without the oracle pass."""
    if not m.basis:
        return ExtChart(f"Ext({m.name}, F2)", 0, (), (), max_stem, max_s)
    r = cached_resolve(normalize(m), max_s, max_stem + max_s, cache_dir)
    return chart_from_resolution(r, max_s, max_stem, f"Ext({m.name}, F2)", m.bottom)


# ------------------------------------------------------------- rendering


def to_dict(chart: ExtChart) -> dict:
    return {
        "title": chart.title,
        "shift": chart.shift,
        "max_stem": chart.max_stem,
        "max_s": chart.max_s,
        "classes": [{"stem": c.stem, "s": c.s, "index": c.index, "name": c.name} for c in chart.classes],
        "lines": [{"kind": l.kind, "from": list(l.source), "to": list(l.target)} for l in chart.lines],
        "truncated": {"stem": bool(chart.truncated["stem"]), "s": bool(chart.truncated["s"])},
    }


def from_dict(data: dict) -> ExtChart:
    classes = tuple(ChartClass(c["stem"], c["s"], c["index"], c["name"]) for c in data["classes"])
    lines = tuple(ChartLine(l["kind"], tuple(l["from"]), tuple(l["to"])) for l in data["lines"])
    return ExtChart(data["title"], data["shift"], classes, lines, data["max_stem"], data["max_s"],
                    dict(data["truncated"]))


def render_json(chart: ExtChart) -> str:
    return json.dumps(to_dict(chart), indent=2, ensure_ascii=False) + "\n"


def _ascii_cell(n: int) -> str:
    if n == 0:
        return "."
    if n <= 3:
        return "o" * n
    return str(n)


def render_ascii(chart: ExtChart, width: int = 4) -> str:
    """Count grid: one row per filtration (top first), columns labelled by shifted stem."""
    stems = range(chart.max_stem + 1)
    header = "s\\n".rjust(width) + "".join(str(n + chart.shift).rjust(width) for n in stems)
    out = [header]
    counts: dict[tuple[int, int], int] = {}
    for c in chart.classes:
        counts[(c.stem, c.s)] = counts.get((c.stem, c.s), 0) + 1
    top = max((c.s for c in chart.classes), default=-1)
    for s in range(top, -1, -1):
        cells = "".join(_ascii_cell(counts.get((n, s), 0)).rjust(width) for n in stems)
        out.append(str(s).rjust(width) + cells)
    return "\n".join(out) + "\n"


_COLORS = {"h0": "#000000", "h1": "#1f4fb4", "h2": "#c0161d"}


def render_svg(chart: ExtChart, unit: int = 30, radius: float = 3.0) -> str:
    margin = 40
    w = margin * 2 + unit * (chart.max_stem + 1)
    h = margin * 2 + unit * (chart.max_s + 1)

    mult: dict[tuple[int, int], int] = {}
    for c in chart.classes:
        mult[(c.stem, c.s)] = mult.get((c.stem, c.s), 0) + 1

    def pos(key: ClassKey) -> tuple[float, float]:
        stem, s, k = key
        n = mult.get((stem, s), 1)
        spread = unit * 0.2
        dx = (k - (n - 1) / 2) * spread
        return margin + unit * stem + dx, h - margin - unit * s

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        f"<title>{escape(chart.title)}</title>",
        '<g class="axes" stroke="#cccccc" stroke-width="0.5" font-size="9" font-family="sans-serif">',
    ]
    for n in range(chart.max_stem + 1):
        x = margin + unit * n
        parts.append(f'<line x1="{x}" y1="{margin}" x2="{x}" y2="{h - margin}"/>')
        parts.append(f'<text x="{x}" y="{h - margin + 14}" text-anchor="middle" stroke="none" '
                     f'fill="#555555">{n + chart.shift}</text>')
    for s in range(chart.max_s + 1):
        y = h - margin - unit * s
        parts.append(f'<line x1="{margin}" y1="{y}" x2="{w - margin}" y2="{y}"/>')
        parts.append(f'<text x="{margin - 12}" y="{y + 3}" text-anchor="end" stroke="none" '
                     f'fill="#555555">{s}</text>')
    parts.append("</g>")
    for kind in KINDS:
        parts.append(f'<g class="lines {kind}" stroke="{_COLORS[kind]}" stroke-width="1">')
        for l in chart.lines:
            if l.kind != kind:
                continue
            (x1, y1), (x2, y2) = pos(l.source), pos(l.target)
            parts.append(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}"/>')
        parts.append("</g>")
    by_bidegree: dict[tuple[int, int], list[ChartClass]] = {}
    for c in chart.classes:
        by_bidegree.setdefault((c.stem, c.s), []).append(c)
    for (stem, s), group in sorted(by_bidegree.items()):
        parts.append(f'<g class="bidegree" data-stem="{stem}" data-s="{s}">')
        for c in group:
            x, y = pos(c.key)
            parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{radius}"><title>{escape(c.name)}</title></circle>')
        parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


RENDERERS = {"json": render_json, "ascii": render_ascii, "svg": render_svg}


def render(chart: ExtChart, fmt: str) -> bytes:
    try:
        fn = RENDERERS[fmt]
    except KeyError:
        raise ValueError(f"unknown format {fmt!r}; choose from {', '.join(RENDERERS)}") from None
    return fn(chart).encode("utf-8")


def load_aliases(path: str | Path) -> dict[ClassKey, str]:
    """Read a {"stem,s,index": name} JSON alias table."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    return {tuple(int(x) for x in key.split(",")): str(name) for key, name in raw.items()}


def fixture_aliases(name: str) -> dict[ClassKey, str]:
    """Shipped alias tables, e.g. ``fixture_aliases("X-X")`` names c, ησ, ε, νc."""
    return load_aliases(Path(str(resources.files("adamsext") / "fixtures" / f"{name}.aliases.json")))
