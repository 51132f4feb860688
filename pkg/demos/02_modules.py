"""The finite modules of the computation: parse, validate, dualize, tensor."""
from __future__ import annotations

from adamsext.modules import dual, fixture_path, load_fixture, tensor, validate

# %% fixtures as written
print(fixture_path("X").read_text())
for name in ("sphere", "X", "Y", "C", "Xprime", "Yprime", "A"):
    m = load_fixture(name)
    print(f"{name:7s} cells {m.degrees}  violations {len(validate(m))}")

# %% X (x) DX is the input for self-maps of X
x = load_fixture("X")
p = tensor(x, dual(x))
print("X (x) DX: bottom", p.bottom, "top", p.top, "dimension", p.dim)
