"""Minimal resolution of the sphere, Ext dimensions and h_i products."""
from __future__ import annotations

from adamsext.charts import chart_from_resolution, render
from adamsext.modules import load_fixture
from adamsext.resolution import ext_table, first_difference, h_action, hom_complex_ext, resolve

sphere = load_fixture("sphere")
r = resolve(sphere, 8, 24)
print("F1 generator degrees:", r.levels[1].degrees)

# %% E2 page, checked against the Hom-complex computation
table = ext_table(r)
oracle = hom_complex_ext(resolve(sphere, 9, 24), sphere)
print("first disagreement:", first_difference(table, oracle))
print(render(chart_from_resolution(r, 8, 16, "sphere", 0), "ascii").decode())

# %% h0 multiplication on the stem 3 string
h0 = h_action(r, 0)
print("h0 h2 =", h0.apply(1, 4, 1), " h0^2 h2 =", h0.apply(2, 5, h0.apply(1, 4, 1)))
