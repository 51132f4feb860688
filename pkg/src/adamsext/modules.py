"""Finite-dimensional graded modules over the Steenrod algebra.

Modules are written in a small text format (``.fdmod``)::

    # the cell complex X: cells 13, 15, 16 joined by eta and 2
    module X {
      gen x13:13  gen x15:15  gen x16:16
      sq 2 x13 = x15
      sq 1 x15 = x16
    }

Only nonzero actions are listed.  An unlisted ``Sq^(2^k)`` acts by zero;
an unlisted decomposable square is derived from the lower squares through
the Adem relation ``Sq^r Sq^(2^k) = Sq^n + ...`` (``n = 2^k + r``,
``0 < r < 2^k``), so a module is determined by its ``Sq^1, Sq^2, Sq^4, ...``
just as a cell diagram is determined by its 2, eta, nu edges.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .gf2 import Gf2Vector
from .steenrod import Monomial, SteenrodElement, antipode, binom2

FIXTURE_NAMES = ("sphere", "X", "Y", "C", "Xprime", "Yprime", "A")


class ModuleParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True, eq=False)
class FDModule:
    """A bounded graded F2-vector space with Sq^i actions.

    ``actions`` maps ``(i, basis index)`` to a bitmask over basis indices and
    holds every nonzero ``Sq^i`` value for ``i >= 1``.
    """

    name: str
    basis: tuple[tuple[str, int], ...]
    actions: Mapping[tuple[int, int], int] = field(default_factory=dict)

    @cached_property
    def labels(self) -> dict[str, int]:
        return {label: j for j, (label, _) in enumerate(self.basis)}

    @cached_property
    def degrees(self) -> list[int]:
        return sorted({d for _, d in self.basis})

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def bottom(self) -> int:
        return self.degrees[0] if self.basis else 0

    @property
    def top(self) -> int:
        return self.degrees[-1] if self.basis else 0

    @property
    def span(self) -> int:
        return self.top - self.bottom

    def degree(self, j: int) -> int:
        return self.basis[j][1]

    @cached_property
    def _by_degree(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for j, (_, d) in enumerate(self.basis):
            out.setdefault(d, []).append(j)
        return out

    def indices_in_degree(self, d: int) -> list[int]:
        return self._by_degree.get(d, [])

    def dim_in_degree(self, d: int) -> int:
        return len(self._by_degree.get(d, ()))

    def dimensions(self) -> dict[int, int]:
        return {d: len(ix) for d, ix in sorted(self._by_degree.items())}

    def sq(self, i: int, vec: int) -> int:
        """Sq^i on a bitmask of basis indices."""
        if i == 0:
            return vec
        out = 0
        j = 0
        while vec:
            if vec & 1:
                out ^= self.actions.get((i, j), 0)
            vec >>= 1
            j += 1
        return out

    @cached_property
    def _monomial_cache(self) -> dict:
        return {}

    def act_monomial(self, mono: Monomial, vec: int) -> int:
        """A monomial Sq^i1...Sq^ik on a bitmask, rightmost square first."""
        out = 0
        j = 0
        cache = self._monomial_cache
        while vec:
            if vec & 1:
                key = (mono, j)
                hit = cache.get(key)
                if hit is None:
                    hit = 1 << j
                    for i in reversed(mono):
                        hit = self.sq(i, hit)
                        if not hit:
                            break
                    cache[key] = hit
                out ^= hit
            vec >>= 1
            j += 1
        return out

    def element(self, labels: str | Iterable[str]) -> "ModuleElement":
        if isinstance(labels, str):
            labels = [labels]
        labels = list(labels)
        if not labels:
            raise ValueError("use ModuleElement.zero for the zero element")
        vec = 0
        degs = set()
        for lab in labels:
            j = self.labels[lab]
            vec ^= 1 << j
            degs.add(self.degree(j))
        if len(degs) != 1:
            raise ValueError("element is not homogeneous")
        return ModuleElement(self, degs.pop(), vec)

    def labels_of(self, vec: int) -> list[str]:
        return [self.basis[j][0] for j in _bits(vec)]

    def __repr__(self) -> str:
        return f"FDModule({self.name!r}, dims={self.dimensions()})"


@dataclass(frozen=True)
class ModuleElement:
    module: FDModule
    degree: int
    vector: int

    @classmethod
    def zero(cls, module: FDModule, degree: int) -> "ModuleElement":
        return cls(module, degree, 0)

    @property
    def coords(self) -> Gf2Vector:
        """Coordinates over the basis elements of this element's degree."""
        idx = self.module.indices_in_degree(self.degree)
        return Gf2Vector([(self.vector >> j) & 1 for j in idx], len(idx))

    def is_zero(self) -> bool:
        return self.vector == 0

    def labels(self) -> list[str]:
        return self.module.labels_of(self.vector)

    def __add__(self, other: "ModuleElement") -> "ModuleElement":
        if other.module is not self.module or other.degree != self.degree:
            raise ValueError("elements live in different places")
        return ModuleElement(self.module, self.degree, self.vector ^ other.vector)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModuleElement):
            return NotImplemented
        return self.module is other.module and (self.vector == other.vector and (self.degree == other.degree or self.vector == 0))

    def __hash__(self) -> int:
        return hash((id(self.module), self.degree, self.vector))


def _bits(v: int):
    j = 0
    while v:
        if v & 1:
            yield j
        v >>= 1
        j += 1


def act(m: FDModule, op: SteenrodElement | Monomial, v: ModuleElement) -> ModuleElement:
    """Apply a Steenrod operation; degree overflow gives the zero element."""
    if v.module is not m:
        raise ValueError("element does not belong to this module")
    if isinstance(op, SteenrodElement):
        out = 0
        for mono in op.terms:
            out ^= m.act_monomial(mono, v.vector)
        return ModuleElement(m, v.degree + op.degree, out)
    mono = tuple(op)
    return ModuleElement(m, v.degree + sum(mono), m.act_monomial(mono, v.vector))


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)"
    r"|(?P<int>-?\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_'.*]*)|(?P<sym>[{}:=+])"
)


def _tokenize(text: str):
    line, col_start, pos = 1, 0, 0
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt:
            raise ModuleParseError(f"unexpected character {text[pos]!r}", line, pos - col_start + 1)
        kind = mt.lastgroup
        value = mt.group()
        col = pos - col_start + 1
        pos = mt.end()
        if kind == "nl":
            line += 1
            col_start = pos
        elif kind in ("ws", "comment"):
            continue
        else:
            yield kind, value, line, col
    yield "eof", "", line, pos - col_start + 1


class _Parser:
    def __init__(self, text: str):
        self.tokens = list(_tokenize(text))
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind: str, value: str | None = None):
        tok = self.tokens[self.pos]
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value if value is not None else kind
            got = tok[1] or "end of input"
            raise ModuleParseError(f"expected {want}, found {got!r}", tok[2], tok[3])
        self.pos += 1
        return tok

    def parse(self) -> FDModule:
        self.take("ident", "module")
        name = self.take("ident")[1]
        self.take("sym", "{")
        basis: list[tuple[str, int]] = []
        labels: dict[str, int] = {}
        given: dict[tuple[int, int], int] = {}
        pending = []
        while True:
            tok = self.peek()
            if tok[0] == "sym" and tok[1] == "}":
                self.pos += 1
                break
            if tok[0] == "ident" and tok[1] == "gen":
                self.pos += 1
                _, label, ln, cl = self.take("ident")
                if label in labels:
                    raise ModuleParseError(f"duplicate generator {label!r}", ln, cl)
                self.take("sym", ":")
                deg = int(self.take("int")[1])
                labels[label] = len(basis)
                basis.append((label, deg))
            elif tok[0] == "ident" and tok[1] == "sq":
                self.pos += 1
                itok = self.take("int")
                i = int(itok[1])
                if i < 1:
                    raise ModuleParseError("square index must be positive", itok[2], itok[3])
                src = self.take("ident")
                self.take("sym", "=")
                terms = []
                if self.peek()[0] == "int":
                    z = self.take("int")
                    if z[1] != "0":
                        raise ModuleParseError("only 0 may appear as a number in a sum", z[2], z[3])
                else:
                    terms.append(self.take("ident"))
                    while self.peek()[0] == "sym" and self.peek()[1] == "+":
                        self.pos += 1
                        terms.append(self.take("ident"))
                pending.append((i, itok, src, terms))
            else:
                got = tok[1] or "end of input"
                raise ModuleParseError(f"expected 'gen', 'sq' or '}}', found {got!r}", tok[2], tok[3])
        self.take("eof")
        # actions may name generators declared later in the block
        for i, itok, src, terms in pending:
            if src[1] not in labels:
                raise ModuleParseError(f"unknown generator {src[1]!r}", src[2], src[3])
            j = labels[src[1]]
            if (i, j) in given:
                raise ModuleParseError(f"Sq^{i} {src[1]} given twice", itok[2], itok[3])
            target_deg = basis[j][1] + i
            vec = 0
            for t in terms:
                if t[1] not in labels:
                    raise ModuleParseError(f"unknown generator {t[1]!r}", t[2], t[3])
                k = labels[t[1]]
                if basis[k][1] != target_deg:
                    raise ModuleParseError(
                        f"Sq^{i} {src[1]} lands in degree {target_deg}, but {t[1]} has degree {basis[k][1]}",
                        t[2],
                        t[3],
                    )
                vec ^= 1 << k
            given[(i, j)] = vec
        return build_module(name, basis, given)


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def build_module(
    name: str, basis: Sequence[tuple[str, int]], given: Mapping[tuple[int, int], int]
) -> FDModule:
    """Module from explicit actions; missing decomposable squares are derived."""
    basis = tuple((str(l), int(d)) for l, d in basis)
    if not basis:
        return FDModule(name, basis, {})
    degs = [d for _, d in basis]
    span = max(degs) - min(degs)
    actions: dict[tuple[int, int], int] = {}

    def apply(i: int, vec: int) -> int:
        if i == 0:
            return vec
        out = 0
        for j in _bits(vec):
            out ^= actions.get((i, j), 0)
        return out

    for n in range(1, span + 1):
        for j in range(len(basis)):
            if (n, j) in given:
                value = given[(n, j)]
            elif _is_power_of_two(n):
                value = 0
            else:
                k = 1 << (n.bit_length() - 1)
                r = n - k
                # Sq^r Sq^k = sum_c binom(k-c-1, r-2c) Sq^(n-c) Sq^c, and the c=0 term is Sq^n
                value = apply(r, apply(k, 1 << j))
                for c in range(1, r // 2 + 1):
                    if binom2(k - c - 1, r - 2 * c):
                        value ^= apply(n - c, apply(c, 1 << j))
            if value:
                actions[(n, j)] = value
    return FDModule(name, basis, actions)


def parse_module(text: str) -> FDModule:
    return _Parser(text).parse()


def load_module(path: str | Path) -> FDModule:
    return parse_module(Path(path).read_text(encoding="utf-8"))


def serialize(m: FDModule) -> str:
    """Canonical text form listing every nonzero action; parses back to m."""
    lines = [f"module {m.name} {{"]
    for label, d in m.basis:
        lines.append(f"  gen {label}:{d}")
    for (i, j) in sorted(m.actions, key=lambda key: (key[1], key[0])):
        lines.append(f"  sq {i} {m.basis[j][0]} = " + " + ".join(m.labels_of(m.actions[(i, j)])))
    lines.append("}")
    return "\n".join(lines) + "\n"


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("adamsext") / "fixtures" / f"{name}.fdmod"))


def load_fixture(name: str, normalized: bool = False) -> FDModule:
    if name not in FIXTURE_NAMES:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURE_NAMES)}")
    m = load_module(fixture_path(name))
    return normalize(m) if normalized else m


def zero_module(name: str = "zero") -> FDModule:
    return FDModule(name, (), {})


# ------------------------------------------------------------- validation


@dataclass(frozen=True)
class Violation:
    a: int
    b: int
    generator: str
    composite: tuple[str, ...]
    expansion: tuple[str, ...]

    def __str__(self) -> str:
        lhs = " + ".join(self.composite) or "0"
        rhs = " + ".join(self.expansion) or "0"
        return f"Sq^{self.a} Sq^{self.b} {self.generator}: {lhs} != {rhs} (Adem)"


def validate(m: FDModule) -> list[Violation]:
    """Check every Adem relation Sq^a Sq^b, a < 2b, on every basis element."""
    out = []
    span = m.span
    for total in range(2, span + 1):
        for b in range(1, total):
            a = total - b
            if a >= 2 * b:
                continue
            for j in range(m.dim):
                v = 1 << j
                lhs = m.sq(a, m.sq(b, v))
                rhs = 0
                for c in range(a // 2 + 1):
                    if binom2(b - c - 1, a - 2 * c):
                        rhs ^= m.sq(a + b - c, m.sq(c, v))
                if lhs != rhs:
                    out.append(
                        Violation(a, b, m.basis[j][0], tuple(m.labels_of(lhs)), tuple(m.labels_of(rhs)))
                    )
    return out


# ----------------------------------------------------------- constructors


def _suffix(k: int) -> str:
    return f"s{k}" if k >= 0 else f"sm{-k}"


def suspend(m: FDModule, k: int) -> FDModule:
    if k == 0:
        return m
    basis = tuple((label, d + k) for label, d in m.basis)
    return FDModule(f"{m.name}_{_suffix(k)}", basis, dict(m.actions))


def normalize(m: FDModule) -> FDModule:
    """Shift so the bottom cell sits in degree 0."""
    if not m.basis or m.bottom == 0:
        return m
    shifted = suspend(m, -m.bottom)
    return FDModule(m.name, shifted.basis, shifted.actions)


def tensor(m: FDModule, n: FDModule) -> FDModule:
    """Tensor product with the Cartan-formula action."""
    basis = []
    for la, da in m.basis:
        for lb, db in n.basis:
            basis.append((f"{la}.{lb}", da + db))
    width = n.dim
    span = (m.span + n.span) if basis else 0
    actions: dict[tuple[int, int], int] = {}
    for x in range(m.dim):
        for y in range(n.dim):
            src = x * width + y
            for k in range(1, span + 1):
                value = 0
                for i in range(k + 1):
                    sx = m.sq(i, 1 << x)
                    if not sx:
                        continue
                    sy = n.sq(k - i, 1 << y)
                    if not sy:
                        continue
                    for p in _bits(sx):
                        for q in _bits(sy):
                            value ^= 1 << (p * width + q)
                if value:
                    actions[(k, src)] = value
    return FDModule(f"{m.name}.{n.name}", tuple(basis), actions)


def dual(m: FDModule) -> FDModule:
    """Linear dual in negated degrees; Sq^i acts by the transpose of chi(Sq^i)."""
    basis = tuple((f"{label}*", -d) for label, d in m.basis)
    actions: dict[tuple[int, int], int] = {}
    for i in range(1, m.span + 1):
        chi = antipode(i)
        for x in range(m.dim):
            image = 0
            for mono in chi.terms:
                image ^= m.act_monomial(mono, 1 << x)
            # x* . chi(Sq^i) contributes phi_x to Sq^i phi_b for every b in image
            for b in _bits(image):
                key = (i, b)
                actions[key] = actions.get(key, 0) ^ (1 << x)
    actions = {key: v for key, v in actions.items() if v}
    return FDModule(f"D{m.name}", basis, actions)


def direct_sum(name: str, *parts: FDModule) -> FDModule:
    basis: list[tuple[str, int]] = []
    actions: dict[tuple[int, int], int] = {}
    for part in parts:
        off = len(basis)
        basis.extend(part.basis)
        for (i, j), v in part.actions.items():
            actions[(i, j + off)] = v << off
    return FDModule(name, tuple(basis), actions)


def same_structure(m: FDModule, n: FDModule) -> bool:
    """Equal up to relabelling, basis elements matched by position."""
    return [d for _, d in m.basis] == [d for _, d in n.basis] and dict(m.actions) == dict(n.actions)
