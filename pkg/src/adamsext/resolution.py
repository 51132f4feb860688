"""Minimal free resolutions over the Steenrod algebra and their Ext groups.

The resolution is built one bidegree at a time, increasing internal degree
``t`` within increasing homological degree ``s``.  At ``(s, t)`` the image
of the part of ``F_s`` generated below degree ``t`` is compared with the
kernel of ``d_{s-1}`` in degree ``t``; a complement is lifted to new
generators.  Every differential coefficient therefore has positive degree,
so ``Ext^{s,t}(M, F2)`` is just the number of generators of ``F_s`` in
degree ``t``.
"""

from __future__ import annotations

import bisect
import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import gf2
from .gf2 import Echelon, Gf2Matrix
from .modules import FDModule, parse_module, serialize
from .steenrod import Monomial, admissible_basis, basis_index, dimension, product_bits

FILE_MAGIC = "adamsext-resolution"
FILE_VERSION = 1

DEFAULT_MAX_S = 20
DEFAULT_MAX_T = 48


class ResolutionFileError(ValueError):
    pass


class ChecksumError(ResolutionFileError):
    pass


class VersionError(ResolutionFileError):
    pass


class ModuleMismatchError(ValueError):
    pass


class FreeModule:
    """A free module given by generator degrees (nondecreasing)."""

    def __init__(self, s: int, degrees: Sequence[int] = ()):
        self.s = s
        self.degrees: list[int] = list(degrees)

    def __len__(self) -> int:
        return len(self.degrees)

    def count_below(self, t: int) -> int:
        return bisect.bisect_left(self.degrees, t)

    def count_through(self, t: int) -> int:
        return bisect.bisect_right(self.degrees, t)

    def in_degree(self, t: int) -> range:
        return range(self.count_below(t), self.count_through(t))

    def label(self, g: int) -> str:
        t = self.degrees[g]
        return f"x_{{{self.s},{t},{g - self.count_below(t)}}}"

    def layout(self, t: int, ngens: int | None = None) -> tuple[list[int], int]:
        """Block offsets of each generator in degree t, and the total dimension."""
        if ngens is None:
            ngens = self.count_through(t)
        offsets, total = [], 0
        for g in range(ngens):
            offsets.append(total)
            total += dimension(t - self.degrees[g])
        return offsets, total

    def basis(self, t: int) -> list[tuple[Monomial, int]]:
        """(monomial, generator) pairs spanning degree t, in coordinate order."""
        out = []
        for g in range(self.count_through(t)):
            out.extend((m, g) for m in admissible_basis(t - self.degrees[g]))
        return out

    def decode(self, vec: int, t: int) -> list[tuple[int, Monomial]]:
        """Split a coordinate bitmask in degree t into (generator, monomial) terms."""
        offsets, _ = self.layout(t)
        out = []
        pos = 0
        while vec:
            if vec & 1:
                g = bisect.bisect_right(offsets, pos) - 1
                out.append((g, admissible_basis(t - self.degrees[g])[pos - offsets[g]]))
            vec >>= 1
            pos += 1
        return out

    def encode(self, terms: Sequence[tuple[int, Monomial]], t: int) -> int:
        offsets, _ = self.layout(t)
        vec = 0
        for g, mono in terms:
            vec ^= 1 << (offsets[g] + basis_index(t - self.degrees[g])[mono])
        return vec


@dataclass
class Resolution:
    """A minimal free resolution of ``module``, complete for s <= max_s, t <= max_t.

    ``differentials[0][g]`` is the augmentation value of generator g as a
    bitmask over the module basis; for s >= 1, ``differentials[s][g]`` is a
    tuple of ``(generator of F_{s-1}, admissible monomial)`` terms.
    """

    module: FDModule
    max_s: int = -1
    max_t: int = -1
    levels: list[FreeModule] = field(default_factory=list)
    differentials: list[list] = field(default_factory=list)
    _kernels: dict = field(default_factory=dict, repr=False)

    # ------------------------------------------------------------ building

    def _ensure_level(self, s: int) -> None:
        while len(self.levels) <= s:
            self.levels.append(FreeModule(len(self.levels)))
            self.differentials.append([])

    def _image_rows(self, s: int, t: int, ngens: int) -> tuple[list[int], int]:
        """Images of the degree-t basis of F_s (first ngens generators), and target width."""
        src = self.levels[s]
        rows = []
        if s == 0:
            m = self.module
            local = {j: k for k, j in enumerate(m.indices_in_degree(t))}
            width = len(local)
            for g in range(ngens):
                aug = self.differentials[0][g]
                for mono in admissible_basis(t - src.degrees[g]):
                    image = m.act_monomial(mono, aug)
                    vec = 0
                    while image:
                        low = image & -image
                        vec |= 1 << local[low.bit_length() - 1]
                        image ^= low
                    rows.append(vec)
            return rows, width
        tgt = self.levels[s - 1]
        offsets, width = tgt.layout(t)
        for g in range(ngens):
            d = self.differentials[s][g]
            for a in admissible_basis(t - src.degrees[g]):
                vec = 0
                for h, b in d:
                    vec ^= product_bits(a, b) << offsets[h]
                rows.append(vec)
        return rows, width

    def _step(self, s: int, t: int, add_generators: bool = True) -> None:
        self._ensure_level(s)
        src = self.levels[s]
        ngens = src.count_below(t)
        rows, width = self._image_rows(s, t, ngens)
        nsrc = len(rows)
        data = gf2.ints_to_packed([r | (1 << (width + i)) for i, r in enumerate(rows)], width + nsrc)
        pivots = gf2.eliminate(data, width)
        reduced = gf2.packed_to_ints(data)
        mask = (1 << width) - 1
        rank = len(pivots)
        self._kernels[(s, t)] = [v >> width for v in reduced[rank:]]
        if not add_generators:
            return
        if s == 0:
            ambient = [1 << k for k in range(width)]
        else:
            ambient = self._kernel(s - 1, t)
        if not ambient:
            return
        image = Echelon(width, gf2.ints_to_packed([v & mask for v in reduced[:rank]], width), pivots)
        amb = gf2.ints_to_packed(ambient, width)
        residues = image.reduce_many(amb)
        chosen = []
        for k in np.flatnonzero(residues.any(axis=1)):
            if image.add(residues[k]):
                chosen.append(int(k))
        if not chosen:
            return
        if s == 0:
            idx = self.module.indices_in_degree(t)
            new_diffs = []
            for k in chosen:
                vec = ambient[k]
                new_diffs.append(sum(1 << idx[j] for j in range(width) if (vec >> j) & 1))
        else:
            tgt = self.levels[s - 1]
            new_diffs = [tuple(tgt.decode(ambient[k], t)) for k in chosen]
        src.degrees.extend([t] * len(new_diffs))
        self.differentials[s].extend(new_diffs)

    def _kernel(self, s: int, t: int) -> list[int]:
        if (s, t) not in self._kernels:
            self._step(s, t, add_generators=False)
        return self._kernels[(s, t)]

    def extend(self, max_s: int, max_t: int) -> "Resolution":
        """Grow the resolution in place to the given bounds."""
        if max_s < 0 or max_t < 0:
            raise ValueError("bounds must be nonnegative")
        max_s = max(max_s, self.max_s)
        max_t = max(max_t, self.max_t)
        lo = self.module.bottom if self.module.basis else 0
        for s in range(max_s + 1):
            self._ensure_level(s)
            done = self.max_t if s <= self.max_s else lo - 1
            for t in range(max(lo, done + 1), max_t + 1):
                self._step(s, t)
            # kernels of level s-1 are no longer needed once level s is complete
            for key in [k for k in self._kernels if k[0] < s]:
                del self._kernels[key]
        self.max_s, self.max_t = max_s, max_t
        return self

    # ------------------------------------------------------------- queries

    def generators(self, s: int, t: int) -> range:
        if s >= len(self.levels):
            return range(0)
        return self.levels[s].in_degree(t)

    def count(self, s: int, t: int) -> int:
        return len(self.generators(s, t))

    def differential_terms(self, s: int, g: int) -> list[tuple[int, Monomial]]:
        if s == 0:
            raise ValueError("level 0 maps to the module; use augmentation()")
        return list(self.differentials[s][g])

    def augmentation(self, g: int) -> list[str]:
        return self.module.labels_of(self.differentials[0][g])

    def structurally_equal(self, other: "Resolution") -> bool:
        return (
            serialize(self.module) == serialize(other.module)
            and self.max_s == other.max_s
            and self.max_t == other.max_t
            and [l.degrees for l in self.levels[: self.max_s + 1]]
            == [l.degrees for l in other.levels[: other.max_s + 1]]
            and [list(d) for d in self.differentials[: self.max_s + 1]]
            == [list(d) for d in other.differentials[: other.max_s + 1]]
        )


def resolve(m: FDModule, max_s: int = DEFAULT_MAX_S, max_t: int = DEFAULT_MAX_T,
            resume: Resolution | None = None) -> Resolution:
    """Minimal resolution of m through the given bounds.

    With ``resume``, continue from an existing resolution of the same module.
    """
    if resume is not None:
        if serialize(resume.module) != serialize(m):
            raise ModuleMismatchError("the saved resolution is for a different module")
        return resume.extend(max_s, max_t)
    return Resolution(m).extend(max_s, max_t)


# ------------------------------------------------------------------ Ext


@dataclass
class ExtTable:
    """Ext^{s,t} dimensions, complete for s <= max_s and t_min <= t <= t_max."""

    dims: dict[tuple[int, int], int]
    max_s: int
    t_min: int
    t_max: int
    names: dict[tuple[int, int], list[str]] = field(default_factory=dict)

    def dim(self, s: int, t: int) -> int:
        return self.dims.get((s, t), 0)

    def in_range(self, s: int, t: int) -> bool:
        return 0 <= s <= self.max_s and self.t_min <= t <= self.t_max

    def stem(self, n: int) -> dict[int, int]:
        """Filtration -> dimension along stem n = t - s."""
        return {s: d for (s, t), d in sorted(self.dims.items()) if t - s == n}

    def shifted(self, k: int) -> "ExtTable":
        return ExtTable(
            {(s, t + k): d for (s, t), d in self.dims.items()},
            self.max_s,
            self.t_min + k,
            self.t_max + k,
            {(s, t + k): v for (s, t), v in self.names.items()},
        )

    def is_empty(self) -> bool:
        return not self.dims


def ext_table(r: Resolution) -> ExtTable:
    dims, names = {}, {}
    for s in range(r.max_s + 1):
        level = r.levels[s]
        for t in sorted(set(level.degrees)):
            if t > r.max_t:
                continue
            gens = level.in_degree(t)
            dims[(s, t)] = len(gens)
            names[(s, t)] = [level.label(g) for g in gens]
    lo = r.module.bottom if r.module.basis else 0
    return ExtTable(dims, r.max_s, lo, r.max_t, names)


def first_difference(a: ExtTable, b: ExtTable, max_stem: int | None = None) -> tuple[int, int] | None:
    """First (s, t) in the common complete range where the dimensions differ."""
    max_s = min(a.max_s, b.max_s)
    lo, hi = max(a.t_min, b.t_min), min(a.t_max, b.t_max)
    for s in range(max_s + 1):
        for t in range(lo, hi + 1):
            if max_stem is not None and t - s > max_stem:
                continue
            if a.dim(s, t) != b.dim(s, t):
                return (s, t)
    return None


@dataclass
class HProducts:
    """Multiplication by h_i as matrices Ext^{s,t} -> Ext^{s+1,t+2^i}.

    ``maps[(s, t)]`` has one row per class of the target bidegree and one
    column per class of the source; only bidegrees with both ends nonzero
    are stored.
    """

    i: int
    maps: dict[tuple[int, int], Gf2Matrix]
    max_s: int
    max_t: int

    def apply(self, s: int, t: int, vec: int) -> int:
        """h_i on a class vector (bitmask over generators in (s, t))."""
        mat = self.maps.get((s, t))
        if mat is None or vec == 0:
            return 0
        out = 0
        for row, bits in enumerate(mat.row_ints()):
            if bin(bits & vec).count("1") & 1:
                out |= 1 << row
        return out


def h_action(r: Resolution, i: int) -> HProducts:
    if i not in (0, 1, 2, 3):
        raise ValueError("h_i is provided for i = 0..3")
    shift = 1 << i
    sq = (shift,)
    maps = {}
    for s in range(r.max_s):
        upper = r.levels[s + 1]
        lower = r.levels[s]
        for t2 in sorted(set(upper.degrees)):
            if t2 > r.max_t:
                continue
            t = t2 - shift
            src = lower.in_degree(t)
            if not len(src):
                continue
            tgt = upper.in_degree(t2)
            base = src.start
            rows = []
            for g2 in tgt:
                bits = 0
                for h, mono in r.differentials[s + 1][g2]:
                    if mono == sq and h in src:
                        bits ^= 1 << (h - base)
                rows.append(bits)
            maps[(s, t)] = Gf2Matrix.from_ints(rows, len(src))
    return HProducts(i, maps, r.max_s, r.max_t)


def tower_height(h0: HProducts, s: int, t: int, vec: int) -> tuple[int, bool]:
    """Largest k with h0^k x != 0 inside the computed range, and whether the range cut it off."""
    k = 0
    while True:
        if s + 1 > h0.max_s or t + 1 > h0.max_t:
            return k, True
        nxt = h0.apply(s, t, vec)
        if not nxt:
            return k, False
        vec, s, t, k = nxt, s + 1, t + 1, k + 1


# ------------------------------------------------------ Hom-complex oracle


def hom_complex_ext(r: Resolution, n: FDModule) -> ExtTable:
    """Ext_A^{s,t}(M, N) as cohomology of Hom_A(F_*, N), where r resolves M.

    A degree-t cochain sends each generator g of F_s to N in degree
    deg(g) - t.  Only the differentials of r are used, never its minimality.
    """
    m = r.module
    if not n.basis or not m.basis:
        return ExtTable({}, max(r.max_s - 1, -1), 0, -1)
    t_min = m.bottom - n.top
    t_max = r.max_t - n.top
    max_s = r.max_s - 1
    dims = {}
    for t in range(t_min, t_max + 1):
        spaces = []
        for s in range(max_s + 2):
            coords = {}
            for g, dg in enumerate(r.levels[s].degrees):
                for j in n.indices_in_degree(dg - t):
                    coords[(g, j)] = len(coords)
            spaces.append(coords)
        ranks = []
        for s in range(max_s + 1):
            ranks.append(_coboundary_rank(r, n, s, t, spaces[s], spaces[s + 1]))
        for s in range(max_s + 1):
            d = len(spaces[s]) - ranks[s] - (ranks[s - 1] if s > 0 else 0)
            if d:
                dims[(s, t)] = d
    return ExtTable(dims, max_s, t_min, t_max)


def _coboundary_rank(r: Resolution, n: FDModule, s: int, t: int, src: dict, tgt: dict) -> int:
    if not src or not tgt:
        return 0
    rows = [0] * len(src)
    level = r.levels[s + 1]
    for g2, dg2 in enumerate(level.degrees):
        out_idx = n.indices_in_degree(dg2 - t)
        if not out_idx:
            continue
        for h, mono in r.differentials[s + 1][g2]:
            for j in n.indices_in_degree(r.levels[s].degrees[h] - t):
                image = n.act_monomial(mono, 1 << j)
                while image:
                    low = image & -image
                    rows[src[(h, j)]] ^= 1 << tgt[(g2, low.bit_length() - 1)]
                    image ^= low
    data = gf2.ints_to_packed(rows, len(tgt))
    return len(gf2.eliminate(data, len(tgt)))


# ------------------------------------------------------------- soundness


def exactness_failures(r: Resolution) -> list[str]:
    """Problems with d∘d = 0, ker = im, surjectivity, or minimality (empty if sound)."""
    out = []
    m = r.module
    for s in range(1, r.max_s + 1):
        for g, terms in enumerate(r.differentials[s]):
            if any(not mono for _, mono in terms):
                out.append(f"non-minimal differential on generator {g} of F_{s}")
            t = r.levels[s].degrees[g]
            if s == 1:
                total = 0
                for h, mono in terms:
                    total ^= m.act_monomial(mono, r.differentials[0][h])
            else:
                below = r.levels[s - 2]
                offsets, _ = below.layout(t)
                total = 0
                for h, mono in terms:
                    for h2, b in r.differentials[s - 1][h]:
                        total ^= product_bits(mono, b) << offsets[h2]
            if total:
                out.append(f"d∘d != 0 on generator {g} of F_{s}")
    lo = m.bottom if m.basis else 0
    for t in range(lo, r.max_t + 1):
        ranks = []
        dims = []
        for s in range(r.max_s + 1):
            rows, width = r._image_rows(s, t, r.levels[s].count_through(t))
            dims.append(len(rows))
            data = gf2.ints_to_packed(rows, max(width, 1))
            ranks.append(len(gf2.eliminate(data, width)))
        if ranks and ranks[0] != m.dim_in_degree(t):
            out.append(f"augmentation not onto in degree {t}")
        for s in range(r.max_s):
            if dims[s] - ranks[s] != ranks[s + 1]:
                out.append(f"homology at F_{s} in degree {t}")
    return out


# ----------------------------------------------------------- persistence


def _payload(r: Resolution) -> dict:
    levels = []
    for s in range(r.max_s + 1):
        if s == 0:
            diffs = [r.module.labels_of(v) for v in r.differentials[0]]
        else:
            diffs = [[[h, list(mono)] for h, mono in d] for d in r.differentials[s]]
        levels.append({"degrees": r.levels[s].degrees, "d": diffs})
    return {
        "module": serialize(r.module),
        "max_s": r.max_s,
        "max_t": r.max_t,
        "levels": levels,
    }


def dumps(r: Resolution) -> str:
    body = json.dumps(_payload(r), sort_keys=True, separators=(",", ":"))
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    return f"{FILE_MAGIC} {FILE_VERSION} sha256={digest}\n{body}\n"


def loads(text: str) -> Resolution:
    header, _, rest = text.partition("\n")
    parts = header.split()
    if len(parts) != 3 or parts[0] != FILE_MAGIC or not parts[2].startswith("sha256="):
        raise ResolutionFileError("not a resolution file")
    if parts[1] != str(FILE_VERSION):
        raise VersionError(f"file version {parts[1]}, expected {FILE_VERSION}")
    body = rest.rstrip("\n")
    if hashlib.sha256(body.encode("utf-8")).hexdigest() != parts[2][len("sha256="):]:
        raise ChecksumError("checksum mismatch: file is corrupt or truncated")
    payload = json.loads(body)
    m = parse_module(payload["module"])
    if serialize(m) != payload["module"]:
        raise ResolutionFileError("module text is not in canonical form")
    r = Resolution(m, payload["max_s"], payload["max_t"])
    for s, level in enumerate(payload["levels"]):
        r.levels.append(FreeModule(s, level["degrees"]))
        if s == 0:
            r.differentials.append([sum(1 << m.labels[l] for l in labels) for labels in level["d"]])
        else:
            r.differentials.append([tuple((h, tuple(mono)) for h, mono in d) for d in level["d"]])
    return r


def save(r: Resolution, path: str | Path) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(dumps(r), encoding="utf-8")
    os.replace(tmp, path)


def load(path: str | Path) -> Resolution:
    return loads(Path(path).read_text(encoding="utf-8"))


def cache_key(m: FDModule) -> str:
    return hashlib.sha256(serialize(m).encode("utf-8")).hexdigest()[:20]


def cached_resolve(m: FDModule, max_s: int, max_t: int, cache_dir: str | Path | None) -> Resolution:
    """resolve() backed by a directory of saved resolutions keyed by module text."""
    if cache_dir is None:
        return resolve(m, max_s, max_t)
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    path = cache_dir / f"{cache_key(m)}.res"
    prior = None
    if path.exists():
        try:
            prior = load(path)
        except (ResolutionFileError, ValueError):
            prior = None
    if prior is not None and prior.max_s >= max_s and prior.max_t >= max_t:
        return prior
    r = resolve(m, max_s, max_t, resume=prior)
    save(r, path)
    return r
