"""Charts of Ext(X, X) and of maps X -> Y, with named classes in the 8-stem."""
from __future__ import annotations

from pathlib import Path

from adamsext.charts import build_chart, fixture_aliases, render
from adamsext.modules import load_fixture

out = Path("charts")
out.mkdir(exist_ok=True)
x, y = load_fixture("X"), load_fixture("Y")

# %% self-maps of X; stems are relabeled by the shift
xx = build_chart(x, x, 20, 28).with_aliases(fixture_aliases("X-X"))
print(render(xx, "ascii").decode())
for name in ("c", "ησ", "ε", "νc"):
    cl = xx.named(name)
    print(f"{name:3s} at (stem {cl.stem + xx.shift}, s {cl.s})")
(out / "X-X.svg").write_bytes(render(xx, "svg"))

# %% maps X -> Y resolve Y (x) DX
yx = build_chart(y, x, 20, 28)
print(render(yx, "ascii").decode())
(out / "X-Y.svg").write_bytes(render(yx, "svg"))
