"""Dense linear algebra over GF(2) with bit-packed rows.

Rows are stored as arrays of ``uint64`` words, column ``j`` living in word
``j // 64`` at bit ``j % 64``.  All row operations are word-wise XOR.
Pivoting is deterministic: leftmost column first, topmost eligible row.

Two conventions appear below.  The public operations (:func:`rref`,
:func:`kernel_basis`, :func:`solve`) treat a matrix as acting on column
vectors.  The lower-level helpers (:func:`eliminate`, :class:`Echelon`)
work on row spaces and are what the resolution engine uses in its inner
loop.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Gf2Vector",
    "Gf2Matrix",
    "rref",
    "rank",
    "kernel_basis",
    "solve",
    "quotient_lift",
    "eliminate",
    "Echelon",
    "ints_to_packed",
    "packed_to_ints",
]

WORD_BITS = 64


def _nwords(ncols: int) -> int:
    return max(1, (ncols + WORD_BITS - 1) // WORD_BITS)


def ints_to_packed(values: Sequence[int], ncols: int) -> np.ndarray:
    """Pack Python-int bitmasks (bit j = column j) into a uint64 array."""
    nw = _nwords(ncols)
    nbytes = nw * 8
    if not values:
        return np.zeros((0, nw), dtype=np.uint64)
    buf = b"".join(v.to_bytes(nbytes, "little") for v in values)
    return np.frombuffer(buf, dtype="<u8").reshape(len(values), nw).astype(np.uint64)


def packed_to_ints(data: np.ndarray) -> list[int]:
    data = np.ascontiguousarray(data, dtype="<u8")
    return [int.from_bytes(row.tobytes(), "little") for row in data]


def _bit_column(data: np.ndarray, col: int) -> np.ndarray:
    return ((data[:, col >> 6] >> np.uint64(col & 63)) & np.uint64(1)).astype(bool)


def eliminate(data: np.ndarray, pivot_limit: int) -> list[int]:
    """Gauss-Jordan elimination in place; returns the pivot columns.

    Only the first ``pivot_limit`` columns are eligible as pivots, but row
    operations act on the full width (so trailing columns can carry an
    identity block for kernel extraction).  On return the first
    ``len(pivots)`` rows are the nonzero rows, in reduced echelon form.
    """
    nrows = data.shape[0]
    pivots: list[int] = []
    r = 0
    for col in range(pivot_limit):
        if r == nrows:
            break
        bits = _bit_column(data[r:], col)
        hits = np.flatnonzero(bits)
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            data[[r, p]] = data[[p, r]]
        mask = _bit_column(data, col)
        mask[r] = False
        if mask.any():
            data[mask] ^= data[r]
        pivots.append(col)
        r += 1
    return pivots


class Echelon:
    """A row space kept in reduced echelon form, grown one vector at a time."""

    def __init__(self, ncols: int, rows: np.ndarray | None = None, pivots: Sequence[int] = ()):
        self.ncols = ncols
        nw = _nwords(ncols)
        if rows is None:
            rows = np.zeros((0, nw), dtype=np.uint64)
        self.rows = np.array(rows, dtype=np.uint64).reshape(-1, nw)
        self.pivots = list(pivots)

    @classmethod
    def from_rows(cls, data: np.ndarray, ncols: int) -> "Echelon":
        work = np.array(data, dtype=np.uint64).reshape(-1, _nwords(ncols))
        pivots = eliminate(work, ncols)
        return cls(ncols, work[: len(pivots)], pivots)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce_many(self, data: np.ndarray) -> np.ndarray:
        out = np.array(data, dtype=np.uint64).reshape(-1, _nwords(self.ncols))
        for row, p in zip(self.rows, self.pivots):
            mask = _bit_column(out, p)
            if mask.any():
                out[mask] ^= row
        return out

    def add(self, vec: np.ndarray) -> bool:
        """Add a vector to the span; returns False if it was already there."""
        red = self.reduce_many(vec[None, :])[0]
        nz = np.flatnonzero(red)
        if nz.size == 0:
            return False
        w = int(nz[0])
        word = int(red[w])
        p = w * WORD_BITS + ((word & -word).bit_length() - 1)
        if self.rows.shape[0]:
            mask = _bit_column(self.rows, p)
            if mask.any():
                self.rows[mask] ^= red
        # keep rows ordered by pivot column
        pos = int(np.searchsorted(self.pivots, p))
        self.rows = np.insert(self.rows, pos, red, axis=0)
        self.pivots.insert(pos, p)
        return True


class Gf2Vector:
    """Fixed-length vector over GF(2); immutable."""

    __slots__ = ("_value", "length")

    def __init__(self, bits: Iterable[int] = (), length: int | None = None):
        bits = list(bits)
        if length is None:
            length = len(bits)
        elif len(bits) > length:
            raise ValueError("more entries than the declared length")
        value = 0
        for j, b in enumerate(bits):
            if b & 1:
                value |= 1 << j
        self._value = value
        self.length = length

    @classmethod
    def from_int(cls, value: int, length: int) -> "Gf2Vector":
        if value >> length:
            raise ValueError("bitmask wider than the vector length")
        v = cls.__new__(cls)
        v._value = value
        v.length = length
        return v

    @classmethod
    def zero(cls, length: int) -> "Gf2Vector":
        return cls.from_int(0, length)

    @classmethod
    def unit(cls, j: int, length: int) -> "Gf2Vector":
        return cls.from_int(1 << j, length)

    def to_int(self) -> int:
        return self._value

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self._value >> j) & 1 for j in range(self.length))

    def support(self) -> list[int]:
        v, out, j = self._value, [], 0
        while v:
            if v & 1:
                out.append(j)
            v >>= 1
            j += 1
        return out

    def is_zero(self) -> bool:
        return self._value == 0

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.length:
            raise IndexError(j)
        return (self._value >> j) & 1

    def __add__(self, other: "Gf2Vector") -> "Gf2Vector":
        if self.length != other.length:
            raise ValueError("length mismatch")
        return Gf2Vector.from_int(self._value ^ other._value, self.length)

    __xor__ = __add__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Gf2Vector):
            return NotImplemented
        return self.length == other.length and self._value == other._value

    def __hash__(self) -> int:
        return hash((self.length, self._value))

    def __repr__(self) -> str:
        return "Gf2Vector([" + ",".join(map(str, self.bits)) + "])"


class Gf2Matrix:
    """Dense GF(2) matrix, bit-packed row-major; immutable."""

    __slots__ = ("_data", "nrows", "ncols")

    def __init__(self, data: np.ndarray, ncols: int):
        data = np.array(data, dtype=np.uint64).reshape(-1, _nwords(ncols))
        data.flags.writeable = False
        self._data = data
        self.nrows = data.shape[0]
        self.ncols = ncols

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> "Gf2Matrix":
        rows = [list(r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged rows")
        ints = [Gf2Vector(r).to_int() for r in rows]
        return cls(ints_to_packed(ints, ncols), ncols)

    @classmethod
    def from_ints(cls, values: Sequence[int], ncols: int) -> "Gf2Matrix":
        return cls(ints_to_packed(list(values), ncols), ncols)

    @classmethod
    def from_vectors(cls, vectors: Sequence[Gf2Vector], ncols: int | None = None) -> "Gf2Matrix":
        if ncols is None:
            if not vectors:
                raise ValueError("cannot infer width from no vectors")
            ncols = vectors[0].length
        if any(v.length != ncols for v in vectors):
            raise ValueError("vector length mismatch")
        return cls.from_ints([v.to_int() for v in vectors], ncols)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Gf2Matrix":
        return cls(np.zeros((nrows, _nwords(ncols)), dtype=np.uint64), ncols)

    @classmethod
    def identity(cls, n: int) -> "Gf2Matrix":
        return cls.from_ints([1 << j for j in range(n)], n)

    @classmethod
    def from_dense(cls, arr) -> "Gf2Matrix":
        arr = np.asarray(arr, dtype=np.uint8) & 1
        if arr.ndim != 2:
            raise ValueError("expected a 2-d array")
        nrows, ncols = arr.shape
        nw = _nwords(ncols)
        padded = np.zeros((nrows, nw * 64), dtype=np.uint8)
        padded[:, :ncols] = arr
        packed = np.packbits(padded, axis=1, bitorder="little")
        return cls(packed.view("<u8").reshape(nrows, nw), ncols)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def data(self) -> np.ndarray:
        return self._data

    def to_dense(self) -> np.ndarray:
        if self.nrows == 0:
            return np.zeros((0, self.ncols), dtype=np.uint8)
        raw = np.ascontiguousarray(self._data, dtype="<u8").view(np.uint8)
        bits = np.unpackbits(raw.reshape(self.nrows, -1), axis=1, bitorder="little")
        return bits[:, : self.ncols]

    def row_ints(self) -> list[int]:
        return packed_to_ints(self._data)

    def row(self, i: int) -> Gf2Vector:
        return Gf2Vector.from_int(packed_to_ints(self._data[i : i + 1])[0], self.ncols)

    def rows(self) -> list[Gf2Vector]:
        return [Gf2Vector.from_int(v, self.ncols) for v in self.row_ints()]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(ij)
        return int((self._data[i, j >> 6] >> np.uint64(j & 63)) & np.uint64(1))

    @property
    def T(self) -> "Gf2Matrix":
        return Gf2Matrix.from_dense(self.to_dense().T)

    def is_zero(self) -> bool:
        return not self._data.any()

    def __matmul__(self, other):
        if isinstance(other, Gf2Vector):
            if other.length != self.ncols:
                raise ValueError("dimension mismatch")
            v = ints_to_packed([other.to_int()], self.ncols)[0]
            parity = np.bitwise_count(self._data & v).sum(axis=1) & 1
            return Gf2Vector([int(b) for b in parity], self.nrows)
        if isinstance(other, Gf2Matrix):
            if other.nrows != self.ncols:
                raise ValueError("dimension mismatch")
            prod = self.to_dense().astype(np.float32) @ other.to_dense().astype(np.float32)
            return Gf2Matrix.from_dense(prod.astype(np.int64) & 1)
        return NotImplemented

    def __add__(self, other: "Gf2Matrix") -> "Gf2Matrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Gf2Matrix(self._data ^ other._data, self.ncols)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Gf2Matrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._data, other._data))

    def __hash__(self) -> int:
        return hash((self.shape, self._data.tobytes()))

    def __repr__(self) -> str:
        return f"Gf2Matrix({self.to_dense().tolist()})"


def rref(m: Gf2Matrix) -> tuple[Gf2Matrix, list[int]]:
    """Reduced row-echelon form and pivot columns (strictly increasing)."""
    work = np.array(m.data, dtype=np.uint64)
    pivots = eliminate(work, m.ncols)
    return Gf2Matrix(work, m.ncols), pivots


def rank(m: Gf2Matrix) -> int:
    return len(rref(m)[1])


def kernel_basis(m: Gf2Matrix) -> list[Gf2Vector]:
    """Basis of {v : m v = 0}, one vector per free column, in column order."""
    reduced, pivots = rref(m)
    dense = reduced.to_dense()
    pivot_set = set(pivots)
    basis = []
    for f in range(m.ncols):
        if f in pivot_set:
            continue
        bits = [0] * m.ncols
        bits[f] = 1
        for i, p in enumerate(pivots):
            bits[p] = int(dense[i, f])
        basis.append(Gf2Vector(bits))
    return basis


def solve(m: Gf2Matrix, b: Gf2Vector) -> Gf2Vector | None:
    """Some v with m v = b (free variables zero), or None if inconsistent."""
    if b.length != m.nrows:
        raise ValueError(f"right-hand side has length {b.length}, matrix has {m.nrows} rows")
    aug = np.concatenate([m.to_dense(), np.array(b.bits, dtype=np.uint8).reshape(-1, 1)], axis=1)
    reduced, pivots = rref(Gf2Matrix.from_dense(aug))
    if pivots and pivots[-1] == m.ncols:
        return None
    dense = reduced.to_dense()
    bits = [0] * m.ncols
    for i, p in enumerate(pivots):
        bits[p] = int(dense[i, m.ncols])
    return Gf2Vector(bits)


def quotient_lift(ambient: Sequence[Gf2Vector], sub: Sequence[Gf2Vector]) -> list[Gf2Vector]:
    """Members of ``ambient`` whose classes form a basis of span(ambient)/span(sub).

    Vectors are taken greedily in the given order, so the result is
    deterministic.  Raises ValueError if ``sub`` is not inside span(ambient).
    """
    vectors = list(ambient) + list(sub)
    if not vectors:
        return []
    n = vectors[0].length
    if any(v.length != n for v in vectors):
        raise ValueError("vector length mismatch")
    amb = Echelon.from_rows(ints_to_packed([v.to_int() for v in ambient], n), n)
    for v in sub:
        if amb.add(ints_to_packed([v.to_int()], n)[0]):
            raise ValueError("sub is not contained in span(ambient)")
    ech = Echelon.from_rows(ints_to_packed([v.to_int() for v in sub], n), n)
    chosen = []
    for v in ambient:
        if ech.add(ints_to_packed([v.to_int()], n)[0]):
            chosen.append(v)
    return chosen
