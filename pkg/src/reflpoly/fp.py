"""Arithmetic over the prime field GF(p), p odd.

Field elements are plain Python ints in ``[0, p)``.  Python integers are
unbounded, so products of residues never overflow regardless of ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Sequence

import numpy as np

# products of two residues stay below 2**63 when summed n <= 8 times
INT64_SAFE_MODULUS = 1 << 29


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FieldCtx:
    p: int
    inv2: int = field(init=False, repr=False)

    def __post_init__(self):
        if self.p < 3 or not is_prime(self.p):
            raise ValueError(f"modulus must be an odd prime, got {self.p}")
        object.__setattr__(self, "inv2", (self.p + 1) // 2)

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse mod p")
        return pow(a, -1, self.p)


class QuadClass(IntEnum):
    """Square class of a field element: +1 square, -1 non-square, 0 zero."""

    ZERO = 0
    SQUARE = 1
    NONSQUARE = -1

    def __mul__(self, other):
        if isinstance(other, QuadClass):
            return QuadClass(int(self) * int(other))
        return NotImplemented

    def __str__(self):
        return {0: "zero", 1: "square", -1: "nonsquare"}[int(self)]


def quadratic_character(a: int, ctx: FieldCtx) -> QuadClass:
    a %= ctx.p
    if a == 0:
        return QuadClass.ZERO
    return QuadClass.SQUARE if pow(a, (ctx.p - 1) // 2, ctx.p) == 1 else QuadClass.NONSQUARE


def rref(rows: Sequence[Sequence[int]], p: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form mod p.  Returns (nonzero rows, pivot columns)."""
    m = [[x % p for x in r] for r in rows]
    pivots: list[int] = []
    if not m:
        return m, pivots
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [x * inv % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(rows: Sequence[Sequence[int]], p: int, ncols: int | None = None) -> list[tuple[int, ...]]:
    """Echelonized basis of {x : A x = 0}; each vector has a 1 at its free column."""
    if ncols is None:
        ncols = len(rows[0])
    red, pivots = rref(rows, p) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [0] * ncols
        x[f] = 1
        for row, pc in zip(red, pivots):
            x[pc] = -row[f] % p
        basis.append(tuple(x))
    # echelonize so the basis is canonical: leading entries ascending
    if basis:
        red_b, _ = rref(basis, p)
        basis = [tuple(r) for r in red_b]
    return basis


class FpMatrix:
    """Immutable square matrix over GF(p)."""

    __slots__ = ("p", "rows", "_hash")

    def __init__(self, rows: Iterable[Iterable[int]], p: int):
        self.p = p
        self.rows = tuple(tuple(int(x) % p for x in r) for r in rows)
        n = len(self.rows)
        if any(len(r) != n for r in self.rows):
            raise ValueError("FpMatrix must be square")
        self._hash = None

    @classmethod
    def identity(cls, n: int, p: int) -> "FpMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], p)

    @classmethod
    def from_array(cls, a, p: int) -> "FpMatrix":
        return cls(np.asarray(a).tolist(), p)

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, FpMatrix) and self.p == other.p and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.p, self.rows))
        return self._hash

    def __repr__(self):
        return f"FpMatrix({[list(r) for r in self.rows]}, p={self.p})"

    def __matmul__(self, other: "FpMatrix") -> "FpMatrix":
        if self.p != other.p or self.n != other.n:
            raise ValueError("incompatible matrices")
        cols = list(zip(*other.rows))
        p = self.p
        return FpMatrix([[sum(a * b for a, b in zip(r, c)) % p for c in cols] for r in self.rows], p)

    def __pow__(self, k: int) -> "FpMatrix":
        if k < 0:
            return self.inverse() ** (-k)
        result, base = FpMatrix.identity(self.n, self.p), self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        """Image of the column vector v."""
        return tuple(sum(a * b for a, b in zip(r, v)) % self.p for r in self.rows)

    def transpose(self) -> "FpMatrix":
        return FpMatrix(zip(*self.rows), self.p)

    def scale(self, k: int) -> "FpMatrix":
        return FpMatrix([[k * x for x in r] for r in self.rows], self.p)

    def is_symmetric(self) -> bool:
        return self.rows == tuple(zip(*self.rows))

    def is_identity(self) -> bool:
        return all(x == (i == j) for i, r in enumerate(self.rows) for j, x in enumerate(r))

    def det(self) -> int:
        p = self.p
        m = [list(r) for r in self.rows]
        n = len(m)
        d = 1
        for c in range(n):
            piv = next((i for i in range(c, n) if m[i][c]), None)
            if piv is None:
                return 0
            if piv != c:
                m[c], m[piv] = m[piv], m[c]
                d = -d
            d = d * m[c][c] % p
            inv = pow(m[c][c], -1, p)
            for i in range(c + 1, n):
                if m[i][c]:
                    f = m[i][c] * inv % p
                    m[i] = [(x - f * y) % p for x, y in zip(m[i], m[c])]
        return d % p

    def rank(self) -> int:
        return len(rref(self.rows, self.p)[1])

    def inverse(self) -> "FpMatrix":
        n, p = self.n, self.p
        aug = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(self.rows)]
        red, pivots = rref(aug, p)
        if pivots[:n] != list(range(n)) or len(red) < n:
            raise ZeroDivisionError("singular matrix")
        return FpMatrix([r[n:] for r in red], p)

    def submatrix(self, idx: Sequence[int]) -> "FpMatrix":
        return FpMatrix([[self.rows[i][j] for j in idx] for i in idx], self.p)

    def to_array(self) -> np.ndarray:
        dtype = np.int64 if self.p < INT64_SAFE_MODULUS else object
        return np.array(self.rows, dtype=dtype).reshape(self.n, self.n)

    def tobytes(self) -> bytes:
        return ",".join(str(x) for r in self.rows for x in r).encode()


@dataclass(frozen=True)
class FormInvariants:
    dim: int
    rad_dim: int
    disc: QuadClass
    epsilon: int

    def __post_init__(self):
        if not 0 <= self.rad_dim <= self.dim:
            raise ValueError("radical dimension out of range")


def radical_basis(B: FpMatrix, ctx: FieldCtx) -> list[tuple[int, ...]]:
    """Echelonized basis of the kernel of the Gram matrix."""
    return nullspace(B.rows, ctx.p, B.n)


def form_invariants(B: FpMatrix, ctx: FieldCtx) -> FormInvariants:
    if not B.is_symmetric():
        raise ValueError("Gram matrix must be symmetric")
    rad = radical_basis(B, ctx)
    # coordinates that are not pivots of the echelonized radical span a complement
    lead = {next(i for i, x in enumerate(v) if x) for v in rad}
    comp = [i for i in range(B.n) if i not in lead]
    nonsing = len(comp)
    disc = quadratic_character(B.submatrix(comp).det(), ctx) if comp else QuadClass.SQUARE
    if nonsing % 2:
        eps = 0
    else:
        m = nonsing // 2
        eps = 1 if disc * quadratic_character((-1) ** m, ctx) == QuadClass.SQUARE else -1
    return FormInvariants(B.n, len(rad), disc, eps)
