"""The mod 2 Steenrod algebra in the admissible basis.

A monomial is a tuple of exponents ``(i1, ..., ik)`` standing for
``Sq^i1 Sq^i2 ... Sq^ik``; it is admissible when ``i_j >= 2 i_{j+1}``.
The empty tuple is the unit.  Products are straightened with the Adem
relations and memoized on ``(square, admissible monomial)`` pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

Monomial = tuple[int, ...]

UNIT: Monomial = ()


def binom2(n: int, k: int) -> int:
    """Binomial coefficient mod 2 (Lucas): 1 iff the bits of k are a subset of n's."""
    if n < 0 or k < 0:
        return 0
    return 1 if (n & k) == k else 0


def is_admissible(word: Iterable[int]) -> bool:
    w = tuple(word)
    return all(x >= 1 for x in w) and all(w[j] >= 2 * w[j + 1] for j in range(len(w) - 1))


def degree_of(mono: Monomial) -> int:
    return sum(mono)


def _admissible_capped(t: int, cap: int) -> list[Monomial]:
    if t == 0:
        return [UNIT]
    out = []
    for first in range(1, min(t, cap) + 1):
        for rest in _admissible_capped(t - first, first // 2):
            out.append((first,) + rest)
    return out


@lru_cache(maxsize=None)
def admissible_basis(t: int) -> tuple[Monomial, ...]:
    """All admissible monomials of degree t, sorted lexicographically."""
    if t < 0:
        raise ValueError("degree must be nonnegative")
    return tuple(sorted(_admissible_capped(t, t)))


@lru_cache(maxsize=None)
def basis_index(t: int) -> dict[Monomial, int]:
    return {m: j for j, m in enumerate(admissible_basis(t))}


def dimension(t: int) -> int:
    return len(admissible_basis(t)) if t >= 0 else 0


def _toggle(acc: set, terms: Iterable[Monomial]) -> None:
    for m in terms:
        if m in acc:
            acc.remove(m)
        else:
            acc.add(m)


_SQ_TIMES: dict[tuple[int, Monomial], frozenset] = {}


def _sq_times(i: int, mono: Monomial) -> frozenset:
    """Sq^i times an admissible monomial, as a set of admissible monomials."""
    if i == 0:
        return frozenset((mono,))
    if not mono or i >= 2 * mono[0]:
        return frozenset(((i,) + mono,))
    key = (i, mono)
    hit = _SQ_TIMES.get(key)
    if hit is not None:
        return hit
    a, b, rest = i, mono[0], mono[1:]
    acc: set = set()
    for c in range(a // 2 + 1):
        if not binom2(b - c - 1, a - 2 * c):
            continue
        top = a + b - c
        if c == 0:
            _toggle(acc, _sq_times(top, rest))
        else:
            for m in _sq_times(c, rest):
                _toggle(acc, _sq_times(top, m))
    result = frozenset(acc)
    _SQ_TIMES[key] = result
    return result


@lru_cache(maxsize=None)
def _mul_monomials(x: Monomial, y: Monomial) -> frozenset:
    acc = {y}
    for i in reversed(x):
        nxt: set = set()
        for m in acc:
            _toggle(nxt, _sq_times(i, m))
        acc = nxt
    return frozenset(acc)


@lru_cache(maxsize=None)
def product_bits(x: Monomial, y: Monomial) -> int:
    """x*y as a bitmask over admissible_basis(deg x + deg y)."""
    index = basis_index(degree_of(x) + degree_of(y))
    bits = 0
    for m in _mul_monomials(x, y):
        bits ^= 1 << index[m]
    return bits


@dataclass(frozen=True)
class SteenrodElement:
    """A homogeneous GF(2)-linear combination of admissible monomials."""

    degree: int
    terms: frozenset = frozenset()

    def __post_init__(self):
        for m in self.terms:
            if degree_of(m) != self.degree:
                raise ValueError(f"monomial {m} is not of degree {self.degree}")
            if not is_admissible(m):
                raise ValueError(f"monomial {m} is not admissible")

    @classmethod
    def unit(cls) -> "SteenrodElement":
        return cls(0, frozenset((UNIT,)))

    @classmethod
    def zero(cls, degree: int) -> "SteenrodElement":
        return cls(degree, frozenset())

    @classmethod
    def monomial(cls, mono: Iterable[int]) -> "SteenrodElement":
        return adem_reduce(list(mono))

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self) -> list[Monomial]:
        return sorted(self.terms)

    def __add__(self, other: "SteenrodElement") -> "SteenrodElement":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.degree != other.degree:
            raise ValueError("cannot add elements of different degrees")
        return SteenrodElement(self.degree, self.terms ^ other.terms)

    def __mul__(self, other: "SteenrodElement") -> "SteenrodElement":
        return multiply(self, other)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join("".join(f"Sq{i}" for i in m) or "1" for m in self.sorted_terms())


def Sq(*word: int) -> SteenrodElement:
    """The product Sq^w1 Sq^w2 ... straightened into the admissible basis."""
    return adem_reduce(word)


def adem_reduce(word: Iterable[int]) -> SteenrodElement:
    """Straighten an arbitrary word of squares into admissible monomials."""
    word = tuple(word)
    if any(i < 0 for i in word):
        raise ValueError("exponents must be nonnegative")
    acc = {UNIT}
    for i in reversed(word):
        nxt: set = set()
        for m in acc:
            _toggle(nxt, _sq_times(i, m))
        acc = nxt
    return SteenrodElement(sum(word), frozenset(acc))


def multiply(a: SteenrodElement, b: SteenrodElement) -> SteenrodElement:
    acc: set = set()
    for x in a.terms:
        for y in b.terms:
            _toggle(acc, _mul_monomials(x, y))
    return SteenrodElement(a.degree + b.degree, frozenset(acc))


@lru_cache(maxsize=None)
def antipode(n: int) -> SteenrodElement:
    """chi(Sq^n), from sum_{i=0}^{n} Sq^i chi(Sq^{n-i}) = 0."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if n == 0:
        return SteenrodElement.unit()
    acc = SteenrodElement.zero(n)
    for i in range(1, n + 1):
        acc = acc + multiply(Sq(i), antipode(n - i))
    return acc
