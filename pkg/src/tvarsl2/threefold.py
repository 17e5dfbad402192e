"""Quasi-homogeneous SL2-threefolds given by two-dimensional tori of complexity one.

Three families of divisors (on A1 with trivial or one-ray tail, and on P1)
with parameters r >= 1 and, on P1, a > 0.  Invariants: the order r_X of the
generic stabilizer, the slope, the height and toricity.
"""
from __future__ import annotations

import enum
import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .classify import (SL2ActionDescriptor, classify_horizontal, conjugacy_classes, verify_sl2_triple)
from .cones import Cone
from .curves import INF, Curve, point_key
from .divisors import PolyhedralDivisor, is_proper, match_divisors, toric_form, transform
from .errors import DomainError, InvariantBreach, SearchBoundError
from .lattice import as_fraction, dot, primitive
from .lnd import kernels_intersect_trivially

WEIGHT_CAP = 64
TABLE_ORBITS = {"A1Homogeneous": 1, "A1Cone": 2, "P1Family": 3}


class Family(str, enum.Enum):
    A1_HOMOGENEOUS = "A1Homogeneous"
    A1_CONE = "A1Cone"
    P1 = "P1Family"

    @classmethod
    def parse(cls, s) -> "Family":
        if isinstance(s, Family):
            return s
        key = str(s).strip().lower()
        aliases = {"a1homogeneous": cls.A1_HOMOGENEOUS, "homogeneous": cls.A1_HOMOGENEOUS, "hom": cls.A1_HOMOGENEOUS,
                   "a1cone": cls.A1_CONE, "cone": cls.A1_CONE,
                   "p1family": cls.P1, "p1": cls.P1}
        if key not in aliases:
            raise DomainError(f"unknown family {s!r}")
        return aliases[key]


def table_tail(family: Family, r: int, a: Fraction | None) -> Cone:
    if family is Family.A1_HOMOGENEOUS:
        return Cone("N", [], rank=2)
    if family is Family.A1_CONE:
        return Cone("N", [(1, 1)])
    return Cone("N", [(a + 1, a), (r + a - 1, r + a)])


def _check_params(family: Family, r, a):
    if isinstance(r, bool) or int(r) != r or r < 1:
        raise DomainError("r must be a positive integer")
    r = int(r)
    if family is Family.P1:
        if a is None:
            raise DomainError("the P1 family needs a > 0")
        a = as_fraction(a)
        if a <= 0:
            raise DomainError("a must be positive")
    elif a is not None:
        raise DomainError("a is only a parameter of the P1 family")
    return r, a


def table_divisor(family, r, a=None) -> PolyhedralDivisor:
    family = Family.parse(family)
    r, a = _check_params(family, r, a)
    sigma = table_tail(family, r, a)
    slices = {0: [(0, 0), (1, 0)], 1: [(0, 0), (r - 1, r)]}
    if family is Family.P1:
        slices[INF] = [(a, a)]
        return PolyhedralDivisor(Curve.P1, sigma, slices)
    return PolyhedralDivisor(Curve.A1, sigma, slices)


@dataclass(frozen=True)
class ThreefoldDescriptor:
    family: Family
    r: int
    a: Fraction | None
    divisor: PolyhedralDivisor
    action: SL2ActionDescriptor
    recognition: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def homogeneous(self) -> bool:
        return self.family is Family.A1_HOMOGENEOUS

    @property
    def orbit_count(self) -> int:
        """Number of SL2-orbits as listed in the classification table (unproved metadata)."""
        return TABLE_ORBITS[self.family.value]


def _table_action(D: PolyhedralDivisor) -> tuple:
    acts = classify_horizontal(D)
    classes = conjugacy_classes(acts, D)
    if len(classes) != 1:
        raise InvariantBreach(f"expected one action up to conjugacy, found {len(classes)}")
    for a in acts:
        if a.e == (1, -1):
            return a, acts
    raise InvariantBreach("the table action of degree (1,-1) was not found")


def build_threefold(family, r, a=None) -> ThreefoldDescriptor:
    family = Family.parse(family)
    r, a = _check_params(family, r, a)
    return _build(family, r, a)


@functools.lru_cache(maxsize=256)
def _build(family: Family, r: int, a) -> ThreefoldDescriptor:
    D = table_divisor(family, r, a)
    pr = is_proper(D)
    if not pr.proper:
        raise InvariantBreach(f"table divisor is not proper: {pr.reason}")
    act, _ = _table_action(D)
    if not kernels_intersect_trivially(act.plus, act.minus):
        raise InvariantBreach("the table action has non-constant invariants")
    return ThreefoldDescriptor(family, r, a, D, act)


# --------------------------------------------------------------------------
# recognition


def _two_lattice_vertex_slices(D):
    out = []
    for z, d in D.slices:
        if len(d.vertices) == 2 and all(x.denominator == 1 for v in d.vertices for x in v):
            out.append(z)
    return out


def _family_of_tail(tail: Cone, r: int, curve: Curve):
    rays = [tuple(Fraction(x) for x in ray) for ray in tail.rays]
    if curve is Curve.A1:
        if not rays:
            return Family.A1_HOMOGENEOUS, None
        if len(rays) == 1 and rays[0][0] == rays[0][1] and rays[0][0] > 0:
            return Family.A1_CONE, None
        return None
    if len(rays) != 2:
        return None
    for x, y in itertools.permutations(rays):
        if x[0] == x[1]:
            continue
        a = x[1] / (x[0] - x[1])
        if a > 0 and Cone("N", [(a + 1, a), (r + a - 1, r + a)]) == tail:
            return Family.P1, a
    return None


def recognize(D: PolyhedralDivisor) -> ThreefoldDescriptor | None:
    """Parameters of a table row equivalent to D by a lattice automorphism, renaming and shift."""
    if D.rank != 2:
        raise DomainError("threefold recognition needs rank 2")
    if not is_proper(D).proper:
        return None
    cands = _two_lattice_vertex_slices(D)
    for za, zb in itertools.permutations(cands, 2):
        for ua, ub in itertools.product(D.slice(za).vertices, D.slice(zb).vertices):
            x = next(tuple(c - d for c, d in zip(w, ua)) for w in D.slice(za).vertices if w != ua)
            y = next(tuple(c - d for c, d in zip(w, ub)) for w in D.slice(zb).vertices if w != ub)
            det = x[0] * y[1] - x[1] * y[0]
            if det == 0:
                continue
            r = abs(det)
            if r.denominator != 1:
                continue
            r = int(r)
            # g x = (1,0), g y = (r-1, r)
            X = ((x[0], y[0]), (x[1], y[1]))
            inv = ((X[1][1] / det, -X[0][1] / det), (-X[1][0] / det, X[0][0] / det))
            T = ((1, r - 1), (0, r))
            g = tuple(tuple(sum(T[i][k] * inv[k][j] for k in range(2)) for j in range(2)) for i in range(2))
            if any(c.denominator != 1 for row in g for c in row):
                continue
            if abs(g[0][0] * g[1][1] - g[0][1] * g[1][0]) != 1:
                continue
            g = tuple(tuple(int(c) for c in row) for row in g)
            gD = transform(D, g)
            fam = _family_of_tail(gD.tail, r, D.curve)
            if fam is None:
                continue
            family, a = fam
            target = table_divisor(family, r, a)
            m = match_divisors(gD, target)
            if m is None:
                continue
            X3 = build_threefold(family, r, a)
            return ThreefoldDescriptor(family, r, a, X3.divisor, X3.action,
                                       {"lattice_map": g, "mobius": m.mobius, "moves": m.moves,
                                        "marked": (za, zb)})
    return None


# --------------------------------------------------------------------------
# invariants


def _p_R(e) -> tuple:
    """Primitive generator of the annihilator of e in N, oriented to (1,1) for e = (1,-1)."""
    v = tuple(int(c) for c in primitive((-e[1], e[0])))
    return v if v[0] + v[1] >= 0 else tuple(-c for c in v)


def stabilizer_order(X: ThreefoldDescriptor, cap: int = WEIGHT_CAP) -> int:
    """min |<m,p>| over nonzero kernel degrees m of d+ with <m,p_R> != 0."""
    act = X.action
    cone, basis = act.plus.kernel_cone()
    p = act.p
    pr = _p_R(act.e)
    def search(bound):
        best = None
        for c in itertools.product(range(-bound, bound + 1), repeat=len(basis)):
            m = tuple(sum(ci * b[j] for ci, b in zip(c, basis)) for j in range(2))
            if not any(m) or dot(m, pr) == 0 or m not in cone:
                continue
            w = abs(dot(m, p))
            if best is None or w < best:
                best = w
        return best

    bound, best = 4, search(4)
    while True:
        if 2 * bound > cap:
            raise SearchBoundError(f"kernel weight search did not stabilize within |m| <= {cap}")
        nxt = search(2 * bound)
        if best is not None and nxt == best:
            break
        bound, best = 2 * bound, nxt
    best = int(best)
    if best != X.r:
        raise InvariantBreach(f"stabilizer order {best} differs from the parameter r = {X.r}")
    return best


def _slope_from_a(a: Fraction) -> Fraction:
    return a / (a + 1)


def _kernel_rays(X: ThreefoldDescriptor) -> tuple:
    cone, _ = X.action.plus.kernel_cone()
    return tuple(tuple(Fraction(c) for c in ray) for ray in cone.rays)


def reference_slope(X: ThreefoldDescriptor) -> Fraction:
    """Slope read from the U+-invariant cones of X and of SL2, normalized jointly (r = 1 only).

    The common ray is sent to (1,0) and the other ray of the SL2 cone to (0,1);
    the slope is y/x for the remaining ray (x, y) of the cone of X.
    """
    if X.r != 1 or X.homogeneous:
        raise DomainError("the reference-cone normalization is only used for r = 1")
    ref = _kernel_rays(build_threefold(Family.A1_HOMOGENEOUS, 1))
    own = _kernel_rays(X)
    common = [v for v in own if v in ref]
    if len(common) != 1:
        raise InvariantBreach("the invariant cones do not share exactly one ray")
    rho = common[0]
    u = next(v for v in ref if v != rho)
    w = next(v for v in own if v != rho)
    det = rho[0] * u[1] - rho[1] * u[0]
    if abs(det) != 1:
        raise InvariantBreach("reference cone is not unimodular")
    # coordinates of w in the basis (rho, u)
    x = (w[0] * u[1] - w[1] * u[0]) / det
    y = (rho[0] * w[1] - rho[1] * w[0]) / det
    return y / x


def slope(X: ThreefoldDescriptor) -> Fraction:
    if X.homogeneous:
        raise DomainError("slope undefined for homogeneous spaces")
    if X.family is Family.A1_CONE:
        val = Fraction(1)
    else:
        val = _slope_from_a(X.a)
    if X.r == 1:
        ref = reference_slope(X)
        if ref != val:
            raise InvariantBreach(f"slope {val} disagrees with the reference-cone value {ref}")
    return val


def cover(X: ThreefoldDescriptor) -> ThreefoldDescriptor:
    """The r = 1 threefold X' with X = X'/mu_r, built through the quotient lattice map.

    The map (1,0) -> (1,0), (0,1) -> (r-1,r) sends the data of X' into the data
    of X; its inverse pulls the tail and the slice at infinity back.
    """
    if X.homogeneous:
        raise DomainError("height undefined for homogeneous spaces")
    r = X.r
    inv = ((Fraction(1), Fraction(1 - r, r)), (Fraction(0), Fraction(1, r)))

    def pull(v):
        return tuple(inv[i][0] * v[0] + inv[i][1] * v[1] for i in range(2))

    tail = Cone("N", [pull(ray) for ray in X.divisor.tail.generators()], rank=2)
    slices = {0: [(0, 0), (1, 0)], 1: [(0, 0), (0, 1)]}
    if X.family is Family.P1:
        slices[INF] = [pull(v) for v in X.divisor.slice(INF).vertices]
    Dp = PolyhedralDivisor(X.divisor.curve, tail, slices)
    Y = recognize(Dp)
    if Y is None or Y.r != 1:
        raise InvariantBreach("the pulled-back data is not a table row with r = 1")
    return Y


def height(X: ThreefoldDescriptor) -> Fraction:
    if X.homogeneous:
        raise DomainError("height undefined for homogeneous spaces")
    direct = Fraction(1) if X.family is Family.A1_CONE else X.a / (X.a + X.r)
    via_cover = slope(cover(X)) if X.r > 1 else slope(X)
    if direct != via_cover:
        raise InvariantBreach(f"height {direct} disagrees with the slope of the cover {via_cover}")
    return direct


def height_from_slope(r: int, hbar) -> Fraction:
    hbar = as_fraction(hbar)
    return hbar / (r - (r - 1) * hbar)


@dataclass(frozen=True)
class ToricityCertificate:
    toric: bool
    a_integral: bool
    slope_criterion: bool
    height_criterion: bool
    divisor_toric_form: bool


def is_toric_threefold(X: ThreefoldDescriptor) -> ToricityCertificate:
    if X.homogeneous:
        crit = (False, False, False)
    else:
        a_int = X.family is Family.P1 and X.a.denominator == 1
        hb = slope(X)
        p = hb / (1 - hb) if hb != 1 else None
        slope_c = p is not None and p.denominator == 1 and p > 0
        h = height(X)
        height_c = h.denominator != h.numerator and X.r % (h.denominator - h.numerator) == 0
        crit = (a_int, slope_c, height_c)
    tf = toric_form(X.divisor) is not None
    if len(set(crit)) != 1 or crit[0] != tf:
        raise InvariantBreach(f"toricity criteria disagree: {crit}, toric_form {tf}")
    return ToricityCertificate(crit[0], *crit, tf)


@dataclass(frozen=True)
class Invariants:
    r_X: int
    slope: Fraction | None
    height: Fraction | None
    toric: bool
    homogeneous: bool
    N_X: int


def invariants(X: ThreefoldDescriptor) -> Invariants:
    hb = None if X.homogeneous else slope(X)
    h = None if X.homogeneous else height(X)
    return Invariants(stabilizer_order(X), hb, h, is_toric_threefold(X).toric, X.homogeneous, X.orbit_count)


def verify_threefold(X: ThreefoldDescriptor) -> dict:
    rep = verify_sl2_triple(X.action)
    return {"sl2_triple": rep.ok, "kernels_intersect_trivially":
            kernels_intersect_trivially(X.action.plus, X.action.minus)}
