"""Exact lattice arithmetic for the dual lattices M and N.

Vectors carry the lattice they live in (``Side.N`` or ``Side.M``) so that
the pairing can refuse to pair two vectors of the same side.  All scalars
are :class:`fractions.Fraction` or ``int``; nothing here ever rounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import DimensionError, DomainError

Scalar = Union[int, Fraction]


class Side(str, Enum):
    N = "N"
    M = "M"

    @property
    def dual(self) -> "Side":
        return Side.M if self is Side.N else Side.N


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise DomainError("booleans are not scalars")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise DomainError("floating point input is not accepted")
    return Fraction(x)


def as_int(x) -> int:
    f = as_fraction(x)
    if f.denominator != 1:
        raise DomainError(f"{f} is not an integer")
    return f.numerator


@dataclass(frozen=True)
class VectorQ:
    """A vector of M_Q or N_Q."""

    side: Side
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "side", Side(self.side))
        object.__setattr__(self, "coords", tuple(as_fraction(c) for c in self.coords))
        if len(self.coords) < 1:
            raise DomainError("rank must be at least 1")

    @property
    def rank(self) -> int:
        return len(self.coords)

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def to_lattice(self) -> "LatticeVector":
        if not self.is_integral:
            raise DomainError(f"{self} has non-integral coordinates")
        return LatticeVector(self.side, tuple(c.numerator for c in self.coords))

    def _check(self, other: "VectorQ"):
        if other.side is not self.side or other.rank != self.rank:
            raise DimensionError("vectors live in different lattices")

    def __add__(self, other):
        self._check(other)
        return VectorQ(self.side, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        self._check(other)
        return VectorQ(self.side, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return VectorQ(self.side, tuple(-a for a in self.coords))

    def scale(self, k) -> "VectorQ":
        k = as_fraction(k)
        return VectorQ(self.side, tuple(k * a for a in self.coords))


@dataclass(frozen=True)
class LatticeVector:
    """An element of M or N."""

    side: Side
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "side", Side(self.side))
        object.__setattr__(self, "coords", tuple(as_int(c) for c in self.coords))
        if len(self.coords) < 1:
            raise DomainError("rank must be at least 1")

    @property
    def rank(self) -> int:
        return len(self.coords)

    @property
    def is_integral(self) -> bool:
        return True

    def to_q(self) -> VectorQ:
        return VectorQ(self.side, self.coords)

    def to_lattice(self) -> "LatticeVector":
        return self

    def __add__(self, other):
        if other.side is not self.side or other.rank != self.rank:
            raise DimensionError("vectors live in different lattices")
        return LatticeVector(self.side, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return LatticeVector(self.side, tuple(-a for a in self.coords))

    def scale(self, k: int) -> "LatticeVector":
        return LatticeVector(self.side, tuple(as_int(k) * a for a in self.coords))


def coords_of(v) -> tuple:
    """Coordinates of a vector object or a plain sequence."""
    if isinstance(v, (VectorQ, LatticeVector)):
        return v.coords
    return tuple(v)


def pairing(m, p) -> Fraction:
    """The duality pairing <m, p> of an M-vector with an N-vector."""
    if isinstance(m, (VectorQ, LatticeVector)) and isinstance(p, (VectorQ, LatticeVector)):
        if m.side is p.side:
            raise DimensionError("pairing needs one M-side and one N-side vector")
        if m.side is Side.N:
            m, p = p, m
    a, b = coords_of(m), coords_of(p)
    if len(a) != len(b):
        raise DimensionError(f"rank mismatch: {len(a)} vs {len(b)}")
    return sum((as_fraction(x) * as_fraction(y) for x, y in zip(a, b)), Fraction(0))


def dot(a: Sequence, b: Sequence):
    """Unchecked pairing on raw coordinate tuples (int or Fraction)."""
    return sum(x * y for x, y in zip(a, b))


def content(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = math.gcd(g, int(x))
    return g


def is_primitive(v) -> bool:
    c = coords_of(v)
    if any(Fraction(x).denominator != 1 for x in c):
        raise DomainError("primitivity is only defined for lattice vectors")
    if all(x == 0 for x in c):
        raise DomainError("the zero vector is not primitive")
    return content([int(x) for x in c]) == 1


def primitive(v: Sequence) -> tuple:
    """Smallest positive integral multiple of a nonzero rational vector."""
    fr = [as_fraction(x) for x in v]
    if all(x == 0 for x in fr):
        raise DomainError("zero vector has no primitive multiple")
    den = 1
    for x in fr:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = content(ints)
    return tuple(x // g for x in ints)


def integralize(v: Sequence) -> tuple:
    """Clear denominators (returns ints) without dividing by the content."""
    fr = [as_fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // math.gcd(den, x.denominator)
    return tuple(int(x * den) for x in fr)


# --------------------------------------------------------------------------
# rational linear algebra


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (rows, pivot columns)."""
    A = [[as_fraction(x) for x in r] for r in rows]
    if not A:
        return [], []
    ncols = len(A[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if pr is None:
            continue
        A[r], A[pr] = A[pr], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], pivots


def rank_of(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1]) if rows else 0


def nullspace_q(rows: Sequence[Sequence], n: int) -> list[list[Fraction]]:
    """Basis of {x in Q^n : row . x = 0 for all rows}."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    R, piv = rref(rows)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for i, pc in enumerate(piv):
            x[pc] = -R[i][f]
        basis.append(x)
    return basis


def solve_q(rows: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """One rational solution of rows . x = rhs, or None when inconsistent."""
    n = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    R, piv = rref(aug)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for i, pc in enumerate(piv):
        x[pc] = R[i][n]
    return x


# --------------------------------------------------------------------------
# integral linear algebra


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def column_hnf(rows: Sequence[Sequence[int]], n: int):
    """Column-style Hermite reduction.

    Returns ``(H, U, pivots)`` with ``H = A U``, ``U`` unimodular and
    ``pivots`` a list of (row, column) positions.  Row ``i`` of ``H`` is
    zero to the right of its pivot, and columns past the last pivot span
    the integer kernel of ``A``.
    """
    A = [[int(x) for x in r] for r in rows]
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def colop(i, j, a, b, c, d):
        # (col_i, col_j) <- (a col_i + b col_j, c col_i + d col_j)
        for M in (A, U):
            for row in M:
                x, y = row[i], row[j]
                row[i], row[j] = a * x + b * y, c * x + d * y

    piv = 0
    pivots = []
    for i in range(len(A)):
        if piv == n:
            break
        for j in range(piv + 1, n):
            b = A[i][j]
            if b == 0:
                continue
            a = A[i][piv]
            g, x, y = _xgcd(a, b)
            colop(piv, j, x, y, -b // g, a // g)
        if A[i][piv] == 0:
            continue
        if A[i][piv] < 0:
            for M in (A, U):
                for row in M:
                    row[piv] = -row[piv]
        # reduce earlier columns against the pivot to keep entries small
        p = A[i][piv]
        for j in range(piv):
            q = A[i][j] // p
            if q:
                for M in (A, U):
                    for row in M:
                        row[j] -= q * row[piv]
        pivots.append((i, piv))
        piv += 1
    return A, U, pivots


def integer_kernel(rows: Sequence[Sequence], n: int) -> list[tuple[int, ...]]:
    """Lattice basis (row Hermite form) of {x in Z^n : row . x = 0}."""
    rows = [integralize(r) for r in rows if any(as_fraction(x) != 0 for x in r)]
    if not rows:
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    _, U, pivots = column_hnf(rows, n)
    k = len(pivots)
    basis = [tuple(U[r][c] for r in range(n)) for c in range(k, n)]
    return hermite_rows(basis)


def hermite_rows(vectors: Iterable[Sequence[int]]) -> list[tuple[int, ...]]:
    """Reduced row Hermite normal form of the lattice spanned by ``vectors``."""
    rows = [list(int(x) for x in v) for v in vectors]
    rows = [r for r in rows if any(r)]
    if not rows:
        return []
    n = len(rows[0])
    out = []
    col = 0
    while rows and col < n:
        nz = [r for r in rows if r[col] != 0]
        if not nz:
            col += 1
            continue
        # Euclid on the column
        while len([r for r in rows if r[col] != 0]) > 1:
            nz = sorted((r for r in rows if r[col] != 0), key=lambda r: abs(r[col]))
            p = nz[0]
            for r in nz[1:]:
                q = r[col] // p[col]
                for j in range(n):
                    r[j] -= q * p[j]
        p = next(r for r in rows if r[col] != 0)
        rows.remove(p)
        if p[col] < 0:
            p = [-x for x in p]
        out.append(p)
        rows = [r for r in rows if any(r)]
        col += 1
    # reduce entries above pivots
    for i, r in enumerate(out):
        pc = next(j for j in range(n) if r[j] != 0)
        for k in range(i):
            q = out[k][pc] // r[pc]
            if q:
                out[k] = [a - q * b for a, b in zip(out[k], r)]
    return [tuple(r) for r in out]


def reduce_mod_lattice(v: Sequence, basis: Sequence[Sequence[int]]) -> tuple:
    """Canonical representative of ``v`` modulo a lattice in Hermite form."""
    v = list(v)
    for r in basis:
        pc = next(j for j in range(len(r)) if r[j] != 0)
        q = math.floor(Fraction(v[pc]) / r[pc])
        if q:
            v = [a - q * b for a, b in zip(v, r)]
    return tuple(v)


# --------------------------------------------------------------------------
# integral solving of pairing equations


@dataclass(frozen=True)
class Unique:
    solution: LatticeVector


@dataclass(frozen=True)
class Family:
    particular: LatticeVector
    kernel_basis: tuple


@dataclass(frozen=True)
class NoIntegralSolution:
    pass


@dataclass(frozen=True)
class Inconsistent:
    pass


def solve_pairings(rows, targets, side: Side | None = None):
    """All e in the dual lattice with <e, row_i> = target_i.

    ``rows`` may be lattice vectors or rational coordinate sequences; an
    equation with rational coefficients is scaled to integers first.
    """
    rows = list(rows)
    if not rows:
        raise DomainError("at least one equation is required")
    if side is None:
        first = rows[0]
        side = first.side.dual if isinstance(first, (VectorQ, LatticeVector)) else Side.M
    raw = [tuple(as_fraction(x) for x in coords_of(r)) for r in rows]
    n = len(raw[0])
    if any(len(r) != n for r in raw):
        raise DimensionError("equations of different ranks")
    tg = [as_fraction(t) for t in targets]
    if len(tg) != len(raw):
        raise DimensionError("one target per equation is required")
    eqs = []
    for r, t in zip(raw, tg):
        den = 1
        for x in (*r, t):
            den = den * x.denominator // math.gcd(den, x.denominator)
        eqs.append(([int(x * den) for x in r], t * den))
    H, U, pivots = column_hnf([e[0] for e in eqs], n)
    y = [Fraction(0)] * n
    piv_of_row = dict(pivots)
    used = 0
    for i, (_, t) in enumerate(eqs):
        acc = sum((H[i][c] * y[c] for c in range(used)), Fraction(0))
        if i in piv_of_row:
            c = piv_of_row[i]
            y[c] = (t - acc) / H[i][c]
            used = c + 1
        elif acc != t:
            return Inconsistent()
    k = len(pivots)
    if any(y[c].denominator != 1 for c in range(k)):
        return NoIntegralSolution()
    part = [sum(U[r][c] * int(y[c]) for c in range(k)) for r in range(n)]
    kernel = hermite_rows([tuple(U[r][c] for r in range(n)) for c in range(k, n)])
    if not kernel:
        return Unique(LatticeVector(side, part))
    part = reduce_mod_lattice(part, kernel)
    return Family(LatticeVector(side, part), tuple(LatticeVector(side, v) for v in kernel))


def saturation_basis(vectors: Sequence[Sequence], n: int) -> list[tuple[int, ...]]:
    """Lattice basis of Z^n intersected with the rational span of ``vectors``."""
    vecs = [integralize(v) for v in vectors if any(as_fraction(x) != 0 for x in v)]
    if not vecs:
        return []
    perp = integer_kernel(vecs, n)
    if not perp:
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    return integer_kernel(perp, n)
