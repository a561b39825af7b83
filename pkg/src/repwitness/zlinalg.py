"""Exact integer linear algebra and integral exterior algebra.

Everything here uses Python ints; no floating point is involved.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import gcd, prod
from typing import Iterable, Mapping, Sequence

__all__ = [
    "IntMatrix",
    "SnfResult",
    "smith_normal_form",
    "kernel_basis",
    "ExteriorElement",
    "wedge",
    "top_det",
    "push_forward",
]


class IntMatrix:
    """Immutable integer matrix stored as a tuple of row tuples."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Iterable[Iterable[int]], cols: int | None = None):
        rows_ = tuple(tuple(int(x) for x in row) for row in entries)
        if cols is None:
            cols = len(rows_[0]) if rows_ else 0
        if any(len(r) != cols for r in rows_):
            raise ValueError("ragged matrix")
        object.__setattr__(self, "entries", rows_)
        object.__setattr__(self, "rows", len(rows_))
        object.__setattr__(self, "cols", cols)

    def __setattr__(self, name, value):
        raise AttributeError("IntMatrix is immutable")

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(([int(i == j) for j in range(n)] for i in range(n)), n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(([0] * cols for _ in range(rows)), cols)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int | None = None) -> "IntMatrix":
        if rows is None:
            rows = len(columns[0]) if columns else 0
        return cls(([c[i] for c in columns] for i in range(rows)), len(columns))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.columns(), self.rows)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.shape, self.entries))

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = other.columns()
            return IntMatrix(
                ([sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.entries), other.cols
            )
        vec = tuple(other)
        if len(vec) != self.cols:
            raise ValueError(f"shape mismatch {self.shape} @ vector of length {len(vec)}")
        return tuple(sum(a * b for a, b in zip(r, vec)) for r in self.entries)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "IntMatrix":
        return IntMatrix(([self.entries[i][j] for j in cols] for i in rows), len(cols))

    def det(self) -> int:
        """Bareiss fraction-free determinant."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = self.tolist()
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k]:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def __repr__(self) -> str:
        return f"IntMatrix({self.tolist()})"


@dataclass(frozen=True)
class SnfResult:
    """U @ M @ V == D with U, V unimodular and D diagonal with d_1 | d_2 | ..."""

    U: IntMatrix
    V: IntMatrix
    D: IntMatrix
    rank: int
    divisors: tuple[int, ...]

    @property
    def torsion_order(self) -> int:
        return prod(self.divisors)


def smith_normal_form(M: IntMatrix | Sequence[Sequence[int]]) -> SnfResult:
    if not isinstance(M, IntMatrix):
        M = IntMatrix(M)
    m, n = M.shape
    a = M.tolist()
    U = IntMatrix.identity(m).tolist()
    V = IntMatrix.identity(n).tolist()

    def row_add(dst: int, src: int, c: int):
        # row_dst += c * row_src
        if c:
            a[dst] = [x + c * y for x, y in zip(a[dst], a[src])]
            U[dst] = [x + c * y for x, y in zip(U[dst], U[src])]

    def col_add(dst: int, src: int, c: int):
        if c:
            for r in a:
                r[dst] += c * r[src]
            for r in V:
                r[dst] += c * r[src]

    def row_swap(i: int, j: int):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def col_swap(i: int, j: int):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    t = 0
    while t < min(m, n):
        # smallest nonzero |entry| in the trailing block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = a[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, i, j = best
        row_swap(t, i)
        col_swap(t, j)
        done = False
        while not done:
            done = True
            p = a[t][t]
            for i in range(t + 1, m):
                if a[i][t]:
                    row_add(i, t, -(a[i][t] // p))
                    if a[i][t]:
                        done = False
            for j in range(t + 1, n):
                if a[t][j]:
                    col_add(j, t, -(a[t][j] // p))
                    if a[t][j]:
                        done = False
            if not done:
                # move the smallest remainder in row/column t to the pivot
                cand = [(abs(a[i][t]), i, t) for i in range(t, m) if a[i][t]]
                cand += [(abs(a[t][j]), t, j) for j in range(t + 1, n) if a[t][j]]
                _, i, j = min(cand)
                row_swap(t, i)
                col_swap(t, j)
                continue
            # pivot must divide the whole trailing block
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % p),
                None,
            )
            if bad is not None:
                row_add(t, bad, 1)
                done = False
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
        t += 1

    divisors = tuple(a[i][i] for i in range(t))
    return SnfResult(IntMatrix(U, m), IntMatrix(V, n), IntMatrix(a, n), t, divisors)


def kernel_basis(M: IntMatrix | Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Z-basis of {v : M v = 0}: the columns of V past the rank."""
    snf = smith_normal_form(M)
    return [snf.V.column(j) for j in range(snf.rank, snf.V.cols)]


class ExteriorElement:
    """Element of Lambda^k Z^rank with sparse integer coefficients.

    Keys are strictly increasing k-tuples of 0-based indices.
    """

    __slots__ = ("degree", "rank", "_coeffs")

    def __init__(self, degree: int, rank: int, coeffs: Mapping[tuple[int, ...], int] | None = None):
        if degree < 0 or rank < 0:
            raise ValueError("degree and rank must be non-negative")
        clean: dict[tuple[int, ...], int] = {}
        for key, c in (coeffs or {}).items():
            key = tuple(key)
            if len(key) != degree:
                raise ValueError(f"index {key} has wrong degree for Lambda^{degree}")
            if any(b <= a for a, b in zip(key, key[1:])):
                raise ValueError(f"index {key} is not strictly increasing")
            if key and not (0 <= key[0] and key[-1] < rank):
                raise ValueError(f"index {key} out of range for rank {rank}")
            if c:
                clean[key] = clean.get(key, 0) + int(c)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "_coeffs", {k: c for k, c in clean.items() if c})

    def __setattr__(self, name, value):
        raise AttributeError("ExteriorElement is immutable")

    @classmethod
    def scalar(cls, c: int, rank: int) -> "ExteriorElement":
        return cls(0, rank, {(): c})

    @classmethod
    def vector(cls, v: Sequence[int]) -> "ExteriorElement":
        return cls(1, len(v), {(i,): c for i, c in enumerate(v) if c})

    @classmethod
    def basis(cls, indices: Sequence[int], rank: int) -> "ExteriorElement":
        """e_{i1} ^ ... ^ e_{ik} for arbitrary (possibly unsorted) 0-based indices."""
        out = cls.scalar(1, rank)
        for i in indices:
            out = wedge(out, cls(1, rank, {(i,): 1}))
        return out

    def items(self):
        return self._coeffs.items()

    def coefficient(self, key: Sequence[int]) -> int:
        return self._coeffs.get(tuple(key), 0)

    def is_zero(self) -> bool:
        return not self._coeffs

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExteriorElement):
            return NotImplemented
        return (self.degree, self.rank, self._coeffs) == (other.degree, other.rank, other._coeffs)

    __hash__ = None

    def _check(self, other: "ExteriorElement"):
        if self.rank != other.rank:
            raise ValueError(f"rank mismatch: {self.rank} vs {other.rank}")

    def __add__(self, other: "ExteriorElement") -> "ExteriorElement":
        self._check(other)
        if self.degree != other.degree:
            raise ValueError("cannot add forms of different degree")
        out = dict(self._coeffs)
        for k, c in other.items():
            out[k] = out.get(k, 0) + c
        return ExteriorElement(self.degree, self.rank, out)

    def __neg__(self) -> "ExteriorElement":
        return ExteriorElement(self.degree, self.rank, {k: -c for k, c in self.items()})

    def __sub__(self, other: "ExteriorElement") -> "ExteriorElement":
        return self + (-other)

    def __rmul__(self, c: int) -> "ExteriorElement":
        return ExteriorElement(self.degree, self.rank, {k: c * v for k, v in self.items()})

    def __xor__(self, other: "ExteriorElement") -> "ExteriorElement":
        return wedge(self, other)

    def format(self, labels: Sequence[str] | None = None, wedge_symbol: str = "∧") -> str:
        if not self._coeffs:
            return "0"
        parts = []
        for key in sorted(self._coeffs):
            c = self._coeffs[key]
            name = wedge_symbol.join(labels[i] if labels else f"e{i + 1}" for i in key) or "1"
            if abs(c) == 1 and key:
                term = name
            else:
                term = f"{abs(c)}·{name}" if key else str(abs(c))
            parts.append(("- " if c < 0 else "+ ") + term)
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def __repr__(self) -> str:
        return f"ExteriorElement(degree={self.degree}, rank={self.rank}, {self.format()})"


def _merge_sign(a: tuple[int, ...], b: tuple[int, ...]) -> int:
    # parity of the shuffle sorting a + b
    inversions = 0
    j = 0
    for x in a:
        while j < len(b) and b[j] < x:
            j += 1
        inversions += j
    return -1 if inversions % 2 else 1


def wedge(a: ExteriorElement, b: ExteriorElement) -> ExteriorElement:
    a._check(b)
    out: dict[tuple[int, ...], int] = {}
    for ka, ca in a.items():
        sa = set(ka)
        for kb, cb in b.items():
            if sa.intersection(kb):
                continue
            key = tuple(sorted(ka + kb))
            out[key] = out.get(key, 0) + _merge_sign(ka, kb) * ca * cb
    return ExteriorElement(a.degree + b.degree, a.rank, out)


def top_det(a: ExteriorElement) -> int:
    """The isomorphism Lambda^n Z^n -> Z."""
    if a.degree != a.rank:
        raise ValueError(f"top_det needs degree == rank, got degree {a.degree} in rank {a.rank}")
    return a.coefficient(tuple(range(a.rank)))


def push_forward(a: ExteriorElement, T: IntMatrix | Sequence[Sequence[int]]) -> ExteriorElement:
    """Induced map Lambda^k Z^n -> Lambda^k Z^m of an m x n integer matrix."""
    if not isinstance(T, IntMatrix):
        T = IntMatrix(T)
    if T.cols != a.rank:
        raise ValueError(f"matrix with {T.cols} columns cannot act on rank {a.rank}")
    k = a.degree
    out: dict[tuple[int, ...], int] = {}
    for key, c in a.items():
        cols = [T.column(i) for i in key]
        support = sorted({r for col in cols for r, x in enumerate(col) if x})
        for rows in combinations(support, k):
            d = T.submatrix(rows, key).det()
            if d:
                out[rows] = out.get(rows, 0) + c * d
    return ExteriorElement(k, T.rows, out)


def gcd_all(values: Iterable[int]) -> int:
    g = 0
    for v in values:
        g = gcd(g, v)
    return g
