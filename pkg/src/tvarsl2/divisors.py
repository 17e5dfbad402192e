"""sigma-polyhedra and polyhedral divisors on A^1 and P^1."""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .cones import Cone, cone_contains_q
from .curves import INF, Curve, Point, QDivisor, as_point, check_point, point_key, point_str
from .errors import DomainError
from .lattice import Side, as_fraction, coords_of, dot


def _vec(v) -> tuple:
    return tuple(as_fraction(x) for x in coords_of(v))


def _extreme_points(points: Iterable[tuple], tail: Cone) -> tuple:
    """Drop every candidate lying in conv(other candidates) + tail."""
    return _extreme_cached(tuple(sorted(set(points))), tuple(tuple(Fraction(x) for x in r) for r in tail.generators()))


@functools.lru_cache(maxsize=8192)
def _extreme_cached(pts: tuple, rays: tuple) -> tuple:
    pts = list(pts)
    i = 0
    while i < len(pts):
        v = pts[i]
        others = pts[:i] + pts[i + 1:]
        gens = [w + (Fraction(1),) for w in others] + [r + (Fraction(0),) for r in rays]
        if others and cone_contains_q(gens, v + (Fraction(1),)):
            pts.pop(i)
        else:
            i += 1
    return tuple(pts)


@dataclass(frozen=True)
class SigmaPolyhedron:
    """conv(vertices) + tail, stored with its minimal vertex set."""

    tail: Cone
    vertices: tuple

    def __init__(self, tail: Cone, vertices: Iterable):
        if tail.side is not Side.N:
            raise DomainError("the tail cone must live in N")
        if not tail.is_pointed:
            raise DomainError("the tail cone must be pointed")
        pts = [_vec(v) for v in vertices]
        if not pts:
            raise DomainError("a polyhedron needs at least one vertex")
        if any(len(p) != tail.rank for p in pts):
            raise DomainError("vertex rank differs from the tail rank")
        object.__setattr__(self, "tail", tail)
        object.__setattr__(self, "vertices", _extreme_points(pts, tail))

    @classmethod
    def of_tail(cls, tail: Cone) -> "SigmaPolyhedron":
        return cls(tail, [(0,) * tail.rank])

    @property
    def rank(self) -> int:
        return self.tail.rank

    @property
    def is_tail(self) -> bool:
        return self.vertices == ((Fraction(0),) * self.rank,)

    @property
    def is_lattice_translate(self) -> bool:
        """A single lattice vertex: v + tail with v in N."""
        return len(self.vertices) == 1 and all(x.denominator == 1 for x in self.vertices[0])

    def translate(self, v) -> "SigmaPolyhedron":
        v = _vec(v)
        return SigmaPolyhedron(self.tail, [tuple(a + b for a, b in zip(w, v)) for w in self.vertices])

    def __contains__(self, x) -> bool:
        x = _vec(x)
        gens = [w + (Fraction(1),) for w in self.vertices] + [tuple(Fraction(c) for c in r) + (Fraction(0),)
                                                            for r in self.tail.generators()]
        return cone_contains_q(gens, x + (Fraction(1),))

    def in_tail_dual(self, m) -> bool:
        return _vec(m) in self.tail.dual()

    def __repr__(self):
        vs = ", ".join("(" + ",".join(map(str, v)) + ")" for v in self.vertices)
        return f"SigmaPolyhedron(conv[{vs}] + {self.tail!r})"


def support_value(delta: SigmaPolyhedron, m) -> Fraction:
    """min over vertices of <m, v>.

    This is the support function on tail-dual; outside it the same vertex
    minimum is what the generalized evaluation uses, and
    :meth:`SigmaPolyhedron.in_tail_dual` says which case applies.
    """
    m = _vec(m)
    if len(m) != delta.rank:
        raise DomainError("rank mismatch")
    return min(dot(m, v) for v in delta.vertices)


def minkowski_sum(*deltas: SigmaPolyhedron) -> SigmaPolyhedron:
    if not deltas:
        raise DomainError("empty Minkowski sum")
    tail = deltas[0].tail
    if any(d.tail != tail for d in deltas):
        raise DomainError("Minkowski sum of polyhedra with different tails")
    acc = deltas[0]
    for d in deltas[1:]:
        sums = [tuple(a + b for a, b in zip(v, w)) for v in acc.vertices for w in d.vertices]
        acc = SigmaPolyhedron(tail, sums)
    return acc


@dataclass(frozen=True)
class PolyhedralDivisor:
    """sum over points z of Delta_z * [z]; slices equal to the tail are not stored."""

    curve: Curve
    tail: Cone
    slices: tuple  # sorted tuple of (point, SigmaPolyhedron)

    def __init__(self, curve, tail: Cone, slices: Mapping | Iterable = ()):
        curve = Curve(curve)
        items = slices.items() if isinstance(slices, Mapping) else slices
        acc = {}
        for z, delta in items:
            z = as_point(z)
            check_point(curve, z)
            if not isinstance(delta, SigmaPolyhedron):
                delta = SigmaPolyhedron(tail, delta)
            if delta.tail != tail:
                raise DomainError(f"slice at {point_str(z)} has a different tail")
            if z in acc:
                raise DomainError(f"two slices at {point_str(z)}")
            if not delta.is_tail:
                acc[z] = delta
        object.__setattr__(self, "curve", curve)
        object.__setattr__(self, "tail", tail)
        object.__setattr__(self, "slices", tuple(sorted(acc.items(), key=lambda kv: point_key(kv[0]))))

    @property
    def rank(self) -> int:
        return self.tail.rank

    @property
    def support(self) -> list:
        return [z for z, _ in self.slices]

    def slice(self, z) -> SigmaPolyhedron:
        z = as_point(z)
        for w, d in self.slices:
            if point_key(w) == point_key(z):
                return d
        return SigmaPolyhedron.of_tail(self.tail)

    def slice_map(self) -> dict:
        return dict(self.slices)

    def map_points(self, mobius) -> "PolyhedralDivisor":
        """Push the divisor forward along a Moebius map."""
        out = {}
        for z, d in self.slices:
            w = mobius(z)
            if w is INF and self.curve is Curve.A1:
                raise DomainError("the map sends a support point to infinity")
            out[w] = d
        return PolyhedralDivisor(self.curve, self.tail, out)

    def __repr__(self):
        body = "; ".join(f"{point_str(z)}: {d.vertices}" for z, d in self.slices)
        return f"PolyhedralDivisor({self.curve.value}, tail={self.tail.rays}, {{{body}}})"


def evaluate(D: PolyhedralDivisor, m) -> QDivisor:
    m = _vec(m)
    return QDivisor(D.curve, tuple((z, support_value(d, m)) for z, d in D.slices))


def degree(D: PolyhedralDivisor, points: Sequence | None = None, finite_only: bool = False) -> SigmaPolyhedron:
    """Minkowski sum of the slices over ``points`` (all support points by default)."""
    if points is None:
        chosen = [d for z, d in D.slices if not (finite_only and z is INF)]
    else:
        chosen = [D.slice(z) for z in points]
    return minkowski_sum(SigmaPolyhedron.of_tail(D.tail), *chosen)


@dataclass(frozen=True)
class Properness:
    proper: bool
    witness: tuple | None = None  # a vertex of deg D outside the tail, if any
    reason: str = ""


def is_proper(D: PolyhedralDivisor) -> Properness:
    if D.curve is Curve.A1:
        return Properness(True, None, "every polyhedral divisor on A1 is proper")
    deg = degree(D)
    for v in deg.vertices:
        if v not in D.tail:
            return Properness(False, v, "vertex of deg D outside the tail cone")
    if deg.is_tail:
        return Properness(False, deg.vertices[0], "deg D equals the tail cone")
    return Properness(True, None, "deg D is strictly inside the tail cone")


def shift(D: PolyhedralDivisor, moves: Mapping) -> PolyhedralDivisor:
    """Translate each slice by an integral move; on P1 the moves must sum to 0."""
    mv = {}
    for z, v in moves.items():
        z = as_point(z)
        check_point(D.curve, z)
        v = _vec(v)
        if len(v) != D.rank:
            raise DomainError("move has the wrong rank")
        if any(x.denominator != 1 for x in v):
            raise DomainError("moves must be lattice vectors")
        mv[z] = v
    if D.curve is Curve.P1:
        total = [sum(col, Fraction(0)) for col in zip(*mv.values())] if mv else []
        if any(total):
            raise DomainError("moves on P1 must sum to zero (the shift divisor must be principal)")
    out = D.slice_map()
    for z, v in mv.items():
        out[z] = D.slice(z).translate(v)
    return PolyhedralDivisor(D.curve, D.tail, out)


def translation_between(a: SigmaPolyhedron, b: SigmaPolyhedron):
    """The vector v with b = a + v, if one exists."""
    if a.tail != b.tail or len(a.vertices) != len(b.vertices):
        return None
    v = tuple(y - x for x, y in zip(a.vertices[0], b.vertices[0]))
    if all(tuple(x + s for x, s in zip(w, v)) == u for w, u in zip(a.vertices, b.vertices)):
        return v
    return None


def equivalence_moves(D1: PolyhedralDivisor, D2: PolyhedralDivisor):
    """Integral moves taking D1 to D2 slice by slice, or None."""
    if D1.curve is not D2.curve or D1.tail != D2.tail:
        return None
    pts = {point_key(z): z for z in D1.support + D2.support}
    moves = {}
    for z in pts.values():
        v = translation_between(D1.slice(z), D2.slice(z))
        if v is None or any(x.denominator != 1 for x in v):
            return None
        if any(v):
            moves[z] = v
    if D1.curve is Curve.P1 and moves and any(sum(col) for col in zip(*moves.values())):
        return None
    return moves


@dataclass(frozen=True)
class ToricForm:
    moves: dict
    points: tuple  # the one or two points carrying non-tail slices after the shift
    cone: Cone     # in (N + Z)_Q, last coordinate is the t-weight
    shifted: PolyhedralDivisor


def _fresh_point(D: PolyhedralDivisor, taken) -> Point:
    keys = {point_key(z) for z in taken}
    cands = ([INF] if D.curve is Curve.P1 else []) + [Fraction(k) for k in itertools.count()]
    for c in cands:
        if point_key(c) not in keys:
            return c
    raise AssertionError("unreachable")


def toric_form(D: PolyhedralDivisor) -> ToricForm | None:
    """Shift D to be supported in one point (A1) or two points (P1) if possible."""
    nontrans = [z for z, d in D.slices if not d.is_lattice_translate]
    budget = 1 if D.curve is Curve.A1 else 2
    if len(nontrans) > budget:
        return None
    moves = {z: tuple(-x for x in d.vertices[0]) for z, d in D.slices if d.is_lattice_translate}
    pts = list(nontrans)
    # pad with translate points (preferring infinity on P1), then fresh points
    trans = sorted((z for z in moves), key=lambda z: (z is not INF, point_key(z)))
    while len(pts) < budget:
        cand = trans.pop(0) if trans else _fresh_point(D, pts + list(moves))
        pts.append(cand)
    if D.curve is Curve.P1:
        z2 = pts[1]
        total = [sum(col) for col in zip(*moves.values())] if moves else [Fraction(0)] * D.rank
        base = moves.get(z2, (Fraction(0),) * D.rank)
        moves[z2] = tuple(b - t for b, t in zip(base, total))
    moves = {z: v for z, v in moves.items() if any(v)}
    S = shift(D, moves)
    gens = [tuple(Fraction(x) for x in r) + (Fraction(0),) for r in D.tail.generators()]
    gens += [v + (Fraction(1),) for v in S.slice(pts[0]).vertices]
    if D.curve is Curve.P1:
        gens += [v + (Fraction(-1),) for v in S.slice(pts[1]).vertices]
    cone = Cone(Side.N, gens, rank=D.rank + 1)
    return ToricForm(moves, tuple(pts), cone, S)


def transform(D: PolyhedralDivisor, g) -> PolyhedralDivisor:
    """Image of D under an invertible integer matrix g acting on N (columns)."""
    g = [[as_fraction(x) for x in row] for row in g]
    n = D.rank
    if len(g) != n or any(len(row) != n for row in g):
        raise DomainError("matrix size does not match the rank")

    def app(v):
        return tuple(sum(g[i][j] * v[j] for j in range(n)) for i in range(n))

    tail = Cone(Side.N, [app(r) for r in D.tail.generators()], rank=n)
    return PolyhedralDivisor(D.curve, tail, {z: [app(v) for v in d.vertices] for z, d in D.slices})


@dataclass(frozen=True)
class Match:
    mobius: object
    moves: dict


def match_divisors(D1: PolyhedralDivisor, D2: PolyhedralDivisor) -> Match | None:
    """A Moebius renaming and admissible shift taking D1 to D2, if one exists.

    Only slices that are not lattice translates constrain the renaming; the
    translate slices are absorbed by the shift.
    """
    from .functions import mobius_normalize

    if D1.curve is not D2.curve or D1.tail != D2.tail:
        return None
    s1 = [z for z, d in D1.slices if not d.is_lattice_translate]
    s2 = [z for z, d in D2.slices if not d.is_lattice_translate]
    if len(s1) != len(s2):
        return None
    if D1.curve is Curve.P1 and degree(D1) != degree(D2):
        return None
    limit = 3 if D1.curve is Curve.P1 else 2
    for perm in itertools.permutations(s2):
        try:
            mob = mobius_normalize(s1[:limit], D1.curve, list(perm[:limit]))
        except DomainError:
            continue
        if any(point_key(mob(z)) != point_key(w) for z, w in zip(s1, perm)):
            continue
        try:
            img = D1.map_points(mob)
        except DomainError:
            continue
        moves = equivalence_moves(img, D2)
        if moves is not None:
            return Match(mob, moves)
    return None
