"""Rational polyhedral cones with exact dual descriptions.

A :class:`Cone` is stored in a canonical form: primitive extreme rays
(sorted) plus a Hermite basis of its lineality space.  Tail cones of
polyhedral divisors are pointed; the lineality part only shows up for
duals of cones that are not full dimensional.

Dual descriptions are computed exactly.  A ray of ``{x : <x, g> >= 0}``
is a point of the row space of the generators that makes ``k - 1``
independent inequalities tight, where ``k`` is the dimension of that row
space; at desk scale the subsets can simply be enumerated.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainError
from .lattice import (
    LatticeVector,
    Side,
    as_fraction,
    coords_of,
    dot,
    hermite_rows,
    integer_kernel,
    integralize,
    is_primitive,
    nullspace_q,
    primitive,
    rank_of,
    rref,
    saturation_basis,
    solve_pairings,
    solve_q,
    Family,
    Unique,
)


class Position(str, Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


def _independent_rows(rows: Sequence[Sequence]) -> list:
    basis = []
    for r in rows:
        if rank_of(basis + [r]) > len(basis):
            basis.append(r)
    return basis


def dual_description(gens: Iterable[Sequence], n: int):
    """Extreme rays and lineality basis of ``{x : <x, g> >= 0 for all g}``.

    Rays are returned primitive, lying in the row space of ``gens`` (the
    orthogonal complement of the lineality space), sorted.
    """
    G = set()
    for g in gens:
        if any(as_fraction(x) != 0 for x in g):
            G.add(primitive(g))
    rays, lin = _dual_description(tuple(sorted(G)), n)
    return list(rays), list(lin)


@functools.lru_cache(maxsize=8192)
def _dual_description(G: tuple, n: int):
    G = list(G)
    lineality = integer_kernel(G, n) if G else integer_kernel([], n)
    if not G:
        return (), tuple(tuple(v) for v in lineality)
    B = _independent_rows(G)
    k = len(B)
    cons = [[Fraction(dot(b, g)) for b in B] for g in G]
    rays = set()
    for S in itertools.combinations(range(len(G)), k - 1):
        rows = [cons[i] for i in S]
        if k > 1 and rank_of(rows) != k - 1:
            continue
        ns = nullspace_q(rows, k) if rows else [[Fraction(int(j == 0)) for j in range(k)]]
        if k == 1:
            ns = [[Fraction(1)]]
        if len(ns) != 1:
            continue
        y = ns[0]
        x = [sum((y[j] * B[j][i] for j in range(k)), Fraction(0)) for i in range(n)]
        vals = [dot(x, g) for g in G]
        if all(v >= 0 for v in vals):
            rays.add(primitive(x))
        elif all(v <= 0 for v in vals):
            rays.add(primitive([-c for c in x]))
    return tuple(sorted(rays)), tuple(tuple(v) for v in lineality)


class Cone:
    """A rational polyhedral cone in N_Q or M_Q.

    ``Cone(side, generators, rank=n)`` accepts any finite generating set
    (rational entries are scaled); ``lineality`` lists extra generators of
    a linear subspace.  Equality is equality of the canonical forms.
    """

    def __init__(self, side, generators: Iterable = (), lineality: Iterable = (), rank: int | None = None):
        side = Side(side)
        gens = [tuple(as_fraction(x) for x in coords_of(g)) for g in generators]
        lin = [tuple(as_fraction(x) for x in coords_of(g)) for g in lineality]
        if rank is None:
            if not gens and not lin:
                raise DomainError("rank is required for a cone without generators")
            rank = len((gens or lin)[0])
        if any(len(g) != rank for g in gens + lin):
            raise DomainError("generators of different ranks")
        allg = gens + lin + [tuple(-x for x in g) for g in lin]
        drays, dlin = dual_description(allg, rank)
        rays, rlin = dual_description(list(drays) + list(dlin) + [tuple(-x for x in v) for v in dlin], rank)
        self.side = side
        self.rank = rank
        self.rays = tuple(rays)
        self.lineality = tuple(rlin)
        self._dual_rays = tuple(drays)
        self._dual_lineality = tuple(dlin)

    @classmethod
    def _canonical(cls, side, rank, rays, lineality, dual_rays, dual_lineality) -> "Cone":
        c = object.__new__(cls)
        c.side = Side(side)
        c.rank = rank
        c.rays = tuple(rays)
        c.lineality = tuple(lineality)
        c._dual_rays = tuple(dual_rays)
        c._dual_lineality = tuple(dual_lineality)
        return c

    @classmethod
    def zero(cls, side, rank: int) -> "Cone":
        return cls(side, (), rank=rank)

    @classmethod
    def whole(cls, side, rank: int) -> "Cone":
        return cls(side, (), lineality=[tuple(int(i == j) for j in range(rank)) for i in range(rank)])

    # -- structure ---------------------------------------------------------

    def _key(self):
        return (self.side, self.rank, self.rays, self.lineality)

    def __eq__(self, other):
        return isinstance(other, Cone) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        extra = f", lineality={list(self.lineality)}" if self.lineality else ""
        return f"Cone({self.side.value}, rays={list(self.rays)}{extra})"

    @property
    def is_pointed(self) -> bool:
        return not self.lineality

    @property
    def dim(self) -> int:
        return rank_of(list(self.rays) + list(self.lineality))

    @property
    def is_full_dimensional(self) -> bool:
        return self.dim == self.rank

    @property
    def is_zero(self) -> bool:
        return not self.rays and not self.lineality

    @property
    def facet_normals(self) -> tuple:
        """Inequalities <n, x> >= 0 cutting out the cone inside its span."""
        return self._dual_rays

    @property
    def equations(self) -> tuple:
        """Lattice basis of the linear forms vanishing on the cone."""
        return self._dual_lineality

    def dual(self) -> "Cone":
        return Cone._canonical(self.side.dual, self.rank, self._dual_rays, self._dual_lineality,
                               self.rays, self.lineality)

    def generators(self) -> list:
        """Rays together with both signs of the lineality basis."""
        return list(self.rays) + list(self.lineality) + [tuple(-x for x in v) for v in self.lineality]

    # -- membership --------------------------------------------------------

    def position(self, v) -> Position:
        x = coords_of(v)
        if len(x) != self.rank:
            raise DomainError("rank mismatch")
        if any(dot(l, x) != 0 for l in self._dual_lineality):
            return Position.OUTSIDE
        vals = [dot(n, x) for n in self._dual_rays]
        if any(val < 0 for val in vals):
            return Position.OUTSIDE
        if all(val > 0 for val in vals):
            return Position.INTERIOR
        return Position.BOUNDARY

    def __contains__(self, v) -> bool:
        return self.position(v) is not Position.OUTSIDE

    def in_relative_interior(self, v) -> bool:
        return self.position(v) is Position.INTERIOR

    # -- lattice points ----------------------------------------------------

    def hilbert_basis(self) -> list[tuple[int, ...]]:
        """Minimal generators of the semigroup of lattice points (pointed cones)."""
        if not self.is_pointed:
            raise DomainError("Hilbert bases are only unique for pointed cones")
        return _pointed_hilbert_basis(self.rays, self.rank)

    def semigroup_generators(self) -> list[tuple[int, ...]]:
        """A finite generating set of the lattice points; Hilbert basis when pointed."""
        if self.is_pointed:
            return self.hilbert_basis()
        L = list(self.lineality)
        W = integer_kernel(L, self.rank)
        if not W:
            gens = []
        else:
            proj = [tuple(dot(w, r) for w in W) for r in self.rays]
            gens = []
            for h in _pointed_hilbert_basis([primitive(p) for p in proj], len(W)):
                sol = solve_pairings(W, h)
                vec = sol.solution if isinstance(sol, Unique) else sol.particular
                gens.append(vec.coords)
        out = gens + [tuple(v) for v in L] + [tuple(-x for x in v) for v in L]
        return sorted(set(out))

    def lattice_points(self, bound: int) -> list[tuple[int, ...]]:
        """All lattice points with every coordinate in [-bound, bound]."""
        rng = range(-bound, bound + 1)
        return [p for p in itertools.product(rng, repeat=self.rank) if p in self]

    # -- roots ---------------------------------------------------------------

    def is_root(self, e) -> "Root | None":
        e = coords_of(e)
        if len(e) != self.rank:
            raise DomainError("rank mismatch")
        if not self.rays or not self.is_pointed:
            return None
        vals = [dot(e, r) for r in self.rays]
        neg = [i for i, v in enumerate(vals) if v < 0]
        if len(neg) != 1 or vals[neg[0]] != -1:
            return None
        return Root(LatticeVector(self.side.dual, e), LatticeVector(self.side, self.rays[neg[0]]))

    def rays_span(self) -> bool:
        return rank_of(list(self.rays)) == self.rank

    def enumerate_sl2_roots(self):
        if not self.is_pointed:
            raise DomainError("SL2-roots are defined for pointed cones")
        spans = self.rays_span()
        side = self.side.dual
        found = []
        fams = []
        for i, j in itertools.permutations(range(len(self.rays)), 2):
            targets = [0] * len(self.rays)
            targets[i], targets[j] = -1, 1
            sol = solve_pairings(self.rays, targets, side=side)
            if isinstance(sol, Unique):
                e = sol.solution
                found.append(SL2Root(e, LatticeVector(self.side, self.rays[i]),
                                     LatticeVector(self.side, self.rays[j])))
            elif isinstance(sol, Family):
                e = sol.particular
                fams.append((SL2Root(e, LatticeVector(self.side, self.rays[i]),
                                     LatticeVector(self.side, self.rays[j])), sol.kernel_basis))
        if spans:
            return Finite(tuple(sorted(found, key=lambda r: r.e.coords)))
        return Affine(tuple(sorted(fams, key=lambda f: f[0].e.coords)))

    def is_sl2_root(self, e) -> "SL2Root | None":
        r1 = self.is_root(e)
        r2 = self.is_root([-x for x in coords_of(e)])
        if r1 is None or r2 is None:
            return None
        return SL2Root(r1.e, r1.distinguished_ray, r2.distinguished_ray)

    def facet_dual_to_ray(self, ray) -> "Cone":
        rho = tuple(int(x) for x in coords_of(ray))
        if not any(rho) or primitive(rho) not in self.rays:
            raise DomainError(f"{rho} is not a ray of {self}")
        rho = primitive(rho)
        gens = [n for n in self._dual_rays if dot(n, rho) == 0]
        return Cone(self.side.dual, gens, lineality=self._dual_lineality, rank=self.rank)


def _pointed_hilbert_basis(rays: Sequence[Sequence[int]], n: int) -> list[tuple[int, ...]]:
    rays = [tuple(r) for r in rays]
    if not rays:
        return []
    lat = saturation_basis(rays, n)
    k = len(lat)
    # coordinates of ambient points in the lattice basis
    def to_lat(x):
        y = solve_q([[lat[j][i] for j in range(k)] for i in range(n)], list(x))
        return tuple(int(c) for c in y)

    def from_lat(y):
        return tuple(sum(y[j] * lat[j][i] for j in range(k)) for i in range(n))

    R = [to_lat(r) for r in rays]
    cand = set(R)
    for S in itertools.combinations(R, k):
        if rank_of(list(S)) < k:
            continue
        H = hermite_rows(S)
        diag = [H[i][i] for i in range(k)]
        inv_rows = [list(r) for r in S]
        for z in itertools.product(*(range(h) for h in diag)):
            lam = solve_q([[inv_rows[j][i] for j in range(k)] for i in range(k)], list(z))
            frac = [l - (l.numerator // l.denominator) for l in lam]
            p = tuple(int(sum(frac[j] * inv_rows[j][i] for j in range(k))) for i in range(k))
            if any(p):
                cand.add(p)
    local = Cone(Side.N, R, rank=k)
    # sort by a strictly positive grading so reducers come first
    grade = [sum(col) for col in zip(*local.facet_normals)] if local.facet_normals else [0] * k
    cl = sorted(cand, key=lambda y: (dot(grade, y), y))
    basis = []
    for x in cl:
        reducible = False
        for y in cl:
            if y == x or dot(grade, y) > dot(grade, x):
                continue
            diff = tuple(a - b for a, b in zip(x, y))
            if any(diff) and diff in local:
                reducible = True
                break
        if not reducible:
            basis.append(x)
    return sorted(from_lat(y) for y in basis)


@dataclass(frozen=True)
class Root:
    e: LatticeVector
    distinguished_ray: LatticeVector


@dataclass(frozen=True)
class SL2Root:
    e: LatticeVector
    rho_plus: LatticeVector
    rho_minus: LatticeVector

    @property
    def p(self) -> LatticeVector:
        return self.rho_minus - self.rho_plus

    def negate(self) -> "SL2Root":
        return SL2Root(-self.e, self.rho_minus, self.rho_plus)


@dataclass(frozen=True)
class Finite:
    roots: tuple


@dataclass(frozen=True)
class Affine:
    families: tuple


def dual_cone(c: Cone) -> Cone:
    return c.dual()


def hilbert_basis(c: Cone) -> list:
    return c.hilbert_basis()


def is_root(c: Cone, e) -> Root | None:
    return c.is_root(e)


def enumerate_sl2_roots(c: Cone):
    return c.enumerate_sl2_roots()


def facet_dual_to_ray(c: Cone, ray) -> Cone:
    return c.facet_dual_to_ray(ray)


def contains(c: Cone, v) -> Position:
    return c.position(v)


def intersect(c1: Cone, c2: Cone) -> Cone:
    if c1.side is not c2.side or c1.rank != c2.rank:
        raise DomainError("cones live in different spaces")
    d1, d2 = c1.dual(), c2.dual()
    both = Cone(d1.side, d1.generators() + d2.generators(), rank=c1.rank)
    return both.dual()


def cone_contains_q(generators: Sequence[Sequence], point: Sequence) -> bool:
    """Membership of a rational point in the cone spanned by rational generators."""
    n = len(point)
    gens = [g for g in generators if any(as_fraction(x) != 0 for x in g)]
    if not gens:
        return all(as_fraction(x) == 0 for x in point)
    return Cone(Side.N, gens, rank=n).position(point) is not Position.OUTSIDE
