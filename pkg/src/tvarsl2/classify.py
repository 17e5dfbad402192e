"""Compatible SL2-actions: toric, fiber type and horizontal type."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cones import Affine, Cone, Finite
from .curves import INF, Curve, Point, QDivisor, as_point, point_key, point_str
from .divisors import (PolyhedralDivisor, SigmaPolyhedron, evaluate, is_proper, shift,
                       toric_form)
from .errors import DomainError, InvariantBreach
from .functions import MobiusMap, RationalFunction, function_with_divisor, mobius_normalize
from .lattice import (Family, Unique, as_fraction, content, coords_of, dot, is_primitive, primitive,
                      solve_pairings)
from .lnd import (Check, CoherentPair, Coloring, Downgrading, FiberLND, HorizontalLND, Report,
                  commutator, iterate_to_zero, validate_coherent)
from .terms import GradedTerm


class AffineRootFamily(DomainError):
    """The tail rays do not span, so SL2-roots come in infinite families."""

    def __init__(self, families):
        super().__init__("the SL2-roots form affine families; pass explicit representatives")
        self.families = families


@dataclass(frozen=True)
class SL2ActionDescriptor:
    kind: str                       # "toric" | "fiber" | "horizontal"
    e: tuple
    p: tuple
    plus: object
    minus: object
    divisor: PolyhedralDivisor | None = None
    cone: Cone | None = None
    normalization: dict = field(default_factory=dict, compare=False, hash=False)
    family: int | None = None

    @property
    def effective(self) -> str:
        return effectiveness(self.p)

    @property
    def conjugate_e(self) -> tuple:
        return tuple(-x for x in self.e)

    @property
    def special(self) -> bool:
        return is_special(self)[0]


def effectiveness(p) -> str:
    """"SL2" when p is primitive, "PSL2" when p/2 is."""
    g = content(p)
    if g == 1:
        return "SL2"
    if g == 2:
        return "PSL2"
    raise InvariantBreach(f"p = {p} is neither primitive nor twice a primitive vector")


def _roots(tail: Cone, representatives):
    if representatives is not None:
        out = []
        for e in representatives:
            r = tail.is_sl2_root(e)
            if r is None:
                raise DomainError(f"{tuple(e)} is not an SL2-root")
            out.append(r)
        return out
    res = tail.enumerate_sl2_roots()
    if isinstance(res, Affine):
        raise AffineRootFamily(res.families)
    return list(res.roots)


def _check_p(plus, minus, expected, probes=None) -> tuple:
    res = commutator(plus, minus, probes)
    if not isinstance(res, Downgrading):
        raise InvariantBreach(f"commutator is not a downgrading: {res.reason}")
    if tuple(res.p) != tuple(expected):
        raise InvariantBreach(f"commutator gives p = {res.p}, closed form gives {tuple(expected)}")
    return tuple(res.p)


# --------------------------------------------------------------------------
# toric


def classify_toric(sigma: Cone, representatives=None) -> list:
    """One action per SL2-root e of sigma, with p = rho_(-e) - rho_e."""
    if not sigma.is_pointed:
        raise DomainError("the cone must be pointed")
    out = []
    for root in _roots(sigma, representatives):
        e = tuple(root.e.coords)
        plus = FiberLND(sigma, e)
        minus = FiberLND(sigma, tuple(-x for x in e))
        p = _check_p(plus, minus, root.p.coords)
        out.append(SL2ActionDescriptor("toric", e, p, plus, minus, cone=sigma))
    return sorted(out, key=lambda a: a.e)


# --------------------------------------------------------------------------
# fiber type


def fiber_obstruction(D: PolyhedralDivisor, e) -> str | None:
    """Why e does not give a fiber-type action on D, or None."""
    for z, delta in D.slices:
        vals = {dot(v, e) for v in delta.vertices}
        if len(vals) > 1:
            return f"the vertices at {point_str(z)} do not lie on one level of e"
    De = evaluate(D, e)
    if not De.is_principal():
        return "D(e) is not principal"
    return None


def classify_fiber(D: PolyhedralDivisor, representatives=None) -> list:
    pr = is_proper(D)
    if not pr.proper:
        raise DomainError(f"improper divisor: {pr.reason}")
    out = []
    for root in _roots(D.tail, representatives):
        e = tuple(root.e.coords)
        if fiber_obstruction(D, e) is not None:
            continue
        phi = function_with_divisor(-evaluate(D, e))
        plus = FiberLND(D.tail, e, phi, D)
        minus = FiberLND(D.tail, tuple(-x for x in e), phi.inverse(), D)
        p = _check_p(plus, minus, root.p.coords)
        out.append(SL2ActionDescriptor("fiber", e, p, plus, minus, divisor=D))
    return sorted(out, key=lambda a: a.e)


# --------------------------------------------------------------------------
# horizontal type


def horizontal_descriptor(plus_coloring: Coloring, minus_coloring: Coloring, e,
                          normalization: dict | None = None, family: int | None = None,
                          expected_p=None, probes=None) -> SL2ActionDescriptor:
    """The action of the coherent pairs (plus_coloring, e) and (minus_coloring, -e)."""
    e = tuple(int(x) for x in e)
    plus = HorizontalLND(CoherentPair(plus_coloring, e))
    minus = HorizontalLND(CoherentPair(minus_coloring, tuple(-x for x in e)))
    if plus.mobius != minus.mobius and not plus.mobius.same_map(minus.mobius):
        raise DomainError("the two colorings must share the marked point and the point at infinity")
    res = commutator(plus, minus, probes)
    if not isinstance(res, Downgrading):
        raise DomainError(f"no SL2-action: {res.reason}")
    if expected_p is not None and tuple(res.p) != tuple(expected_p):
        raise InvariantBreach(f"commutator gives p = {res.p}, closed form gives {tuple(expected_p)}")
    if dot(res.p, e) != 2:
        raise InvariantBreach(f"<e, p> = {dot(res.p, e)}")
    return SL2ActionDescriptor("horizontal", e, tuple(res.p), plus, minus, divisor=plus_coloring.divisor,
                               normalization=normalization or {}, family=family)


def _two_lattice_vertices(delta: SigmaPolyhedron):
    if len(delta.vertices) != 2:
        return None
    if any(x.denominator != 1 for v in delta.vertices for x in v):
        return None
    return delta.vertices


def _half_lattice_vertex(delta: SigmaPolyhedron):
    if len(delta.vertices) != 1:
        return None
    v = delta.vertices[0]
    if all(x.denominator == 1 for x in v) or any(2 % x.denominator for x in v):
        return None
    return v


def _vadd(*vs):
    return tuple(sum(c) for c in zip(*vs))


def _vneg(v):
    return tuple(-x for x in v)


def _candidates(sol, box: int):
    if isinstance(sol, Unique):
        yield tuple(sol.solution.coords)
    elif isinstance(sol, Family):
        base = sol.particular.coords
        K = [k.coords if hasattr(k, "coords") else tuple(k) for k in sol.kernel_basis]
        for ks in itertools.product(range(-box, box + 1), repeat=len(K)):
            yield tuple(b + sum(k * kv[i] for k, kv in zip(ks, K)) for i, b in enumerate(base))


def classify_horizontal(D: PolyhedralDivisor, box: int = 4) -> list:
    """Actions of horizontal type not compatible with a bigger torus (the two canonical families).

    Each candidate is checked by validating both coherent pairs and by the
    exact commutator; ``box`` bounds the search when the linear constraints
    on e leave free directions.
    """
    pr = is_proper(D)
    if not pr.proper:
        raise DomainError(f"improper divisor: {pr.reason}")
    n = D.rank
    zero = (Fraction(0),) * n
    nontrans = [z for z, d in D.slices if not d.is_lattice_translate]
    trans = {z: d.vertices[0] for z, d in D.slices if d.is_lattice_translate}
    is_p1 = D.curve is Curve.P1
    if len(nontrans) < 2 or len(nontrans) > (3 if is_p1 else 2):
        return []
    found = {}
    for za, zb in itertools.permutations(nontrans, 2):
        rest = [z for z in nontrans if z not in (za, zb)]
        if is_p1:
            if rest:
                zc = rest[0]
            elif INF not in (za, zb):
                zc = INF
            elif trans:
                zc = sorted(trans, key=point_key)[0]
            else:
                zc = next(Fraction(k) for k in itertools.count() if Fraction(k) not in (za, zb))
            pis = D.slice(zc).vertices if zc in rest else [zero]
            wsum = _vadd(zero, *trans.values())
        else:
            zc, pis, wsum = None, [], zero
        da, db = D.slice(za), D.slice(zb)
        bverts = _two_lattice_vertices(db)
        if bverts is None:
            continue
        for ub in bverts:
            v1 = _vadd(*(w for w in bverts if w != ub), _vneg(ub))
            # first family: two lattice vertices at za
            averts = _two_lattice_vertices(da)
            if averts is not None:
                for ua in averts:
                    v0 = _vadd(*(w for w in averts if w != ua), _vneg(ua))
                    rows = [v0, v1] + [_vadd(pi, ua, ub, wsum) for pi in pis]
                    tg = [1, -1] + [0] * len(pis)
                    for e in _candidates(solve_pairings(rows, tg), box):
                        _try_family(D, found, 1, e, za, zb, zc, ua, ub, v0, v1, trans)
            # second family: one half-lattice vertex at za
            x = _half_lattice_vertex(da)
            if x is not None:
                rows = [v1] + [tuple(2 * c for c in _vadd(pi, x, ub, wsum)) for pi in pis]
                tg = [-1] + [1] * len(pis)
                for e in _candidates(solve_pairings(rows, tg), box):
                    k = dot(e, x) - Fraction(1, 2)
                    if k.denominator != 1:
                        continue
                    ua = tuple(int(k) * -c for c in v1)
                    v0 = tuple(a - b for a, b in zip(x, ua))
                    _try_family(D, found, 2, e, za, zb, zc, ua, ub, v0, v1, trans)
    return sorted(found.values(), key=lambda a: a.e)


def _try_family(D, found, fam, e, za, zb, zc, ua, ub, v0, v1, trans):
    e = tuple(int(x) for x in e)
    if e in found:
        return
    n = D.rank
    zero = (Fraction(0),) * n
    moves = {z: _vneg(w) for z, w in trans.items() if zc is None or point_key(z) != point_key(zc)}
    moves[za] = _vneg(ua)
    moves[zb] = _vneg(ub)
    if D.curve is Curve.P1:
        total = _vadd(zero, *moves.values())
        moves[zc] = _vadd(moves.get(zc, zero), _vneg(total))
    moves = {z: v for z, v in moves.items() if any(v)}
    try:
        S = shift(D, moves)
        if D.curve is Curve.P1:
            mob = mobius_normalize([za, zb, zc], Curve.P1)
        else:
            mob = mobius_normalize([za, zb], Curve.A1)
        N = S.map_points(mob)
        zinf = INF if D.curve is Curve.P1 else None
        if fam == 1:
            cp = Coloring(N, {0: zero, 1: v1}, zinf, z0=0)
            cm = Coloring(N, {0: v0, 1: zero}, zinf, z0=0)
            expected = _vadd(v0, _vneg(v1))
        else:
            cp = Coloring(N, {0: v0, 1: v1}, zinf, z0=0)
            cm = Coloring(N, {0: v0, 1: zero}, zinf, z0=0)
            expected = tuple(-2 * x for x in v1)
        if not (validate_coherent(CoherentPair(cp, e)).ok
                and validate_coherent(CoherentPair(cm, _vneg(e))).ok):
            return
        desc = horizontal_descriptor(cp, cm, e, {"moves": moves, "mobius": mob}, fam, expected)
    except DomainError:
        return
    found[e] = desc


# --------------------------------------------------------------------------
# verification and specialness


def nilpotency_probes(lnd, count: int = 2) -> list:
    """(term, predicted index) pairs on Hilbert-basis degrees of the tail dual."""
    out = []
    if isinstance(lnd, FiberLND):
        for m in lnd.tail.dual().semigroup_generators():
            out.append((GradedTerm.chi(m), lnd.predicted_index(m)))
        return out
    tail = lnd.coloring.divisor.tail
    for m in tail.dual().semigroup_generators():
        base = math.ceil(-dot(lnd.v0, m))
        for j in range(count):
            out.append((lnd.twisted(m, base + j), lnd.predicted_index(m, base + j)))
    return out


def verify_sl2_triple(a: SL2ActionDescriptor, probes=None, bound: int = 64) -> Report:
    checks = [
        Check("degrees", tuple(a.plus.e) == tuple(a.e) and tuple(a.minus.e) == tuple(-x for x in a.e),
              f"deg d+ = {a.plus.e}, deg d- = {a.minus.e}"),
        Check("<e,p> = 2", dot(a.e, a.p) == 2, f"<e,p> = {dot(a.e, a.p)}"),
    ]
    res = commutator(a.plus, a.minus, probes)
    if isinstance(res, Downgrading):
        checks.append(Check("[d+,d-] = delta", tuple(res.p) == tuple(a.p), f"p = {res.p}"))
    else:
        checks.append(Check("[d+,d-] = delta", False, f"witness {res.witness}: {res.reason}"))
    for name, lnd in (("nilpotent d+", a.plus), ("nilpotent d-", a.minus)):
        ok, det = True, ""
        for x, pred in nilpotency_probes(lnd):
            try:
                got = iterate_to_zero(lnd, x, bound)
            except DomainError as exc:
                ok, det = False, str(exc)
                break
            if pred is not None and got != pred:
                ok, det = False, f"index {got} on {x}, predicted {pred}"
                break
        checks.append(Check(name, ok, det))
    return Report(tuple(checks))


def is_special(a: SL2ActionDescriptor) -> tuple:
    """(special?, reason)."""
    if a.kind in ("toric", "fiber"):
        return True, f"{a.kind} type actions are special"
    c = a.plus.coloring
    mob = c.normalizing_map()
    N = c.divisor.map_points(mob)
    extra = [z for z, d in N.slices if z not in (Fraction(0), INF) and not d.is_lattice_translate]
    if extra:
        return False, "non-trivial slices away from the marked point and infinity: " + ", ".join(map(point_str, extra))
    return True, "toric, compatible with the big torus"


# --------------------------------------------------------------------------
# special actions


@dataclass(frozen=True)
class SpecialAction:
    r: int
    H: QDivisor
    divisor: PolyhedralDivisor
    action: SL2ActionDescriptor
    invariant_grading: str
    generic_isotropy: str


def special_tail(r: int) -> Cone:
    return Cone("N", [(1, 0), (r - 1, r)])


def build_special(r: int, H: QDivisor) -> SpecialAction:
    """D = ((1,1) + sigma) * H with sigma = cone((1,0), (r-1,r)) and the action of degree (1,-1)."""
    r = int(r)
    if r < 1:
        raise DomainError("r must be positive")
    if H.curve is Curve.P1 and H.degree <= 0:
        raise DomainError("H must have positive degree on P1 (ample)")
    if H.curve is Curve.A1 and H.is_zero:
        raise DomainError("H must be nonzero")
    sigma = special_tail(r)
    slices = {z: SigmaPolyhedron(sigma, [(c, c)]) for z, c in H.coefficients}
    D = PolyhedralDivisor(H.curve, sigma, slices)
    acts = classify_fiber(D, representatives=[(1, -1)])
    if len(acts) != 1:
        raise InvariantBreach("the special divisor does not carry the fiber-type action")
    return SpecialAction(r, H, D, acts[0], f"B_i t^({r}i)", f"U_({r})")


# --------------------------------------------------------------------------
# conjugacy


def _difference_vectors(D: PolyhedralDivisor) -> list:
    out = set()
    for _, d in D.slices:
        for v, w in itertools.permutations(d.vertices, 2):
            out.add(tuple(a - b for a, b in zip(v, w)))
    for r in D.tail.generators():
        out.add(tuple(Fraction(x) for x in r))
        out.add(tuple(-Fraction(x) for x in r))
    return sorted(out)


def _det2(x, y):
    return x[0] * y[1] - x[1] * y[0]


def lattice_symmetries(D: PolyhedralDivisor) -> list:
    """Unimodular g with g(D) equal to D up to renaming and shift (rank 2; identity otherwise)."""
    from .divisors import match_divisors, transform

    n = D.rank
    ident = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    if n != 2:
        return [ident]
    V = _difference_vectors(D)
    tail_rays = sorted(primitive(r) for r in D.tail.rays)
    found = {ident}
    for x1, x2 in itertools.combinations(V, 2):
        dx = _det2(x1, x2)
        if dx == 0:
            continue
        for y1, y2 in itertools.permutations(V, 2):
            if abs(_det2(y1, y2)) != abs(dx):
                continue
            # g = [y1 y2] [x1 x2]^-1
            inv = ((x2[1] / dx, -x2[0] / dx), (-x1[1] / dx, x1[0] / dx))
            g = tuple(tuple(y1[i] * inv[0][j] + y2[i] * inv[1][j] for j in range(2)) for i in range(2))
            if any(c.denominator != 1 for row in g for c in row):
                continue
            g = tuple(tuple(int(c) for c in row) for row in g)
            if g in found:
                continue
            if tail_rays != sorted(primitive(tuple(sum(g[i][j] * r[j] for j in range(2)) for i in range(2)))
                                   for r in tail_rays):
                continue
            gD = transform(D, g)
            if gD.tail == D.tail and match_divisors(gD, D) is not None:
                found.add(g)
    return sorted(found)


def _transport(e, g) -> tuple:
    """e o g^-1 for a unimodular 2x2 (or identity) matrix g."""
    n = len(e)
    if n == 2:
        det = g[0][0] * g[1][1] - g[0][1] * g[1][0]
        ginv = ((g[1][1] * det, -g[0][1] * det), (-g[1][0] * det, g[0][0] * det))
    else:
        ginv = g
    return tuple(sum(e[i] * ginv[i][j] for i in range(n)) for j in range(n))


def conjugacy_classes(actions: Sequence[SL2ActionDescriptor], D: PolyhedralDivisor | None = None) -> list:
    """Group actions whose roots agree up to sign and up to lattice symmetries of D."""
    syms = lattice_symmetries(D) if D is not None else [None]
    classes: list = []
    for a in sorted(actions, key=lambda x: x.e):
        orbit = set()
        for g in syms:
            f = a.e if g is None else _transport(a.e, g)
            orbit.add(f)
            orbit.add(tuple(-x for x in f))
        for cls in classes:
            if cls[0].e in orbit:
                cls.append(a)
                break
        else:
            classes.append([a])
    return classes
