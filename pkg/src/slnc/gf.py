"""Exact linear algebra over prime fields.

Matrices are small (a few dozen rows at most), so plain Python integer lists
beat numpy here and keep everything exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DimensionError, FieldError, SingularMatrixError


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    d = 3
    while d * d <= q:
        if q % d == 0:
            return False
        d += 2
    return True


def next_prime(q: int) -> int:
    q = max(q, 2)
    while not is_prime(q):
        q += 1
    return q


@dataclass(frozen=True)
class PrimeField:
    q: int

    def __post_init__(self) -> None:
        if not isinstance(self.q, int) or not 2 <= self.q < 2**31:
            raise FieldError(f"field size must be an integer in [2, 2^31), got {self.q!r}")
        if not is_prime(self.q):
            raise FieldError(f"{self.q} is not prime (next prime: {next_prime(self.q)})")

    def inv(self, a: int) -> int:
        a %= self.q
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return pow(a, -1, self.q)


@dataclass(frozen=True)
class FieldMatrix:
    field: PrimeField
    rows: tuple[tuple[int, ...], ...]
    ncols: int

    def __post_init__(self) -> None:
        q = self.field.q
        rows = tuple(tuple(int(x) % q for x in row) for row in self.rows)
        for row in rows:
            if len(row) != self.ncols:
                raise DimensionError(f"row of length {len(row)} in a matrix with {self.ncols} columns")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_rows(cls, field: PrimeField, rows: Iterable[Sequence[int]], ncols: int | None = None) -> "FieldMatrix":
        rows = [tuple(r) for r in rows]
        if ncols is None:
            if not rows:
                raise DimensionError("cannot infer the column count of an empty matrix")
            ncols = len(rows[0])
        return cls(field, tuple(rows), ncols)

    @classmethod
    def from_columns(cls, field: PrimeField, cols: Sequence[Sequence[int]], nrows: int) -> "FieldMatrix":
        for c in cols:
            if len(c) != nrows:
                raise DimensionError(f"column of length {len(c)}, expected {nrows}")
        return cls(field, tuple(tuple(c[i] for c in cols) for i in range(nrows)), len(cols))

    @classmethod
    def identity(cls, field: PrimeField, n: int) -> "FieldMatrix":
        return cls(field, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), n)

    @classmethod
    def zeros(cls, field: PrimeField, nrows: int, ncols: int) -> "FieldMatrix":
        return cls(field, ((0,) * ncols,) * nrows, ncols)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), self.ncols

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.rows)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.ncols)]

    def transpose(self) -> "FieldMatrix":
        return FieldMatrix(self.field, tuple(self.columns()), len(self.rows))

    def hstack(self, other: "FieldMatrix") -> "FieldMatrix":
        if len(self.rows) != len(other.rows):
            raise DimensionError(f"cannot stack {self.shape} beside {other.shape}")
        return FieldMatrix(self.field, tuple(a + b for a, b in zip(self.rows, other.rows)),
                           self.ncols + other.ncols)

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        if self.ncols != len(other.rows):
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        q = self.field.q
        cols = other.columns()
        return FieldMatrix(self.field, tuple(
            tuple(sum(a * b for a, b in zip(row, col)) % q for col in cols) for row in self.rows
        ), other.ncols)

    def dumps(self) -> str:
        return "".join(" ".join(map(str, row)) + "\n" for row in self.rows)

    @classmethod
    def loads(cls, field: PrimeField, text: str, ncols: int | None = None) -> "FieldMatrix":
        rows = []
        for line in text.splitlines():
            if line.strip():
                vals = [int(tok) for tok in line.split()]
                if any(not 0 <= v < field.q for v in vals):
                    raise FieldError(f"entry outside [0, {field.q}) in {line!r}")
                rows.append(vals)
        return cls.from_rows(field, rows, ncols)


# ---------------------------------------------------------------- kernels on raw lists


def row_reduce(rows: list[list[int]], q: int, ncols: int) -> list[int]:
    """Reduce ``rows`` in place to reduced row-echelon form; return pivot columns."""
    pivots: list[int] = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r]
        inv = pow(piv[c], -1, q)
        if inv != 1:
            piv[:] = [x * inv % q for x in piv]
        for i in range(nrows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(x - f * y) % q for x, y in zip(rows[i], piv)]
        pivots.append(c)
        r += 1
    return pivots


def rank_of(rows: Iterable[Sequence[int]], q: int) -> int:
    """Rank by forward elimination only; cheaper than full reduction."""
    work = [list(r) for r in rows]
    if not work:
        return 0
    ncols = len(work[0])
    rank = 0
    for c in range(ncols):
        p = next((i for i in range(rank, len(work)) if work[i][c]), None)
        if p is None:
            continue
        work[rank], work[p] = work[p], work[rank]
        piv = work[rank]
        inv = pow(piv[c], -1, q)
        for i in range(rank + 1, len(work)):
            f = work[i][c]
            if f:
                f = f * inv % q
                work[i] = [(x - f * y) % q for x, y in zip(work[i], piv)]
        rank += 1
        if rank == len(work):
            break
    return rank


def null_space_rows(rows: Sequence[Sequence[int]], q: int, ncols: int) -> list[list[int]]:
    """Basis of {x : M x = 0} for the matrix with the given rows."""
    work = [list(r) for r in rows]
    pivots = row_reduce(work, q, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for i, p in enumerate(pivots):
            v[p] = -work[i][f] % q
        basis.append(v)
    return basis


# ---------------------------------------------------------------- public operations


def rank(M: FieldMatrix) -> int:
    return rank_of(M.rows, M.field.q)


def invert(M: FieldMatrix) -> FieldMatrix:
    n, m = M.shape
    if n != m:
        raise DimensionError(f"cannot invert a {n}x{m} matrix")
    q = M.field.q
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(M.rows)]
    pivots = row_reduce(aug, q, n)
    if len(pivots) < n:
        raise SingularMatrixError(f"matrix has rank {len(pivots)} < {n}")
    return FieldMatrix(M.field, tuple(tuple(row[n:]) for row in aug), n)


def null_space(M: FieldMatrix) -> FieldMatrix:
    """Columns spanning the right null space of M."""
    basis = null_space_rows(M.rows, M.field.q, M.ncols)
    return FieldMatrix.from_columns(M.field, basis, M.ncols)


def spans_intersect_trivially(B: FieldMatrix, F: FieldMatrix) -> bool:
    """Whether the column spans of B and F meet only in the zero vector."""
    if len(B.rows) != len(F.rows):
        raise DimensionError(f"row dimensions differ: {B.shape} vs {F.shape}")
    return rank(B.hstack(F)) == rank(B) + rank(F)
