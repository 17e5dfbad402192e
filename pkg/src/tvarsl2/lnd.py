"""Homogeneous locally nilpotent derivations of fiber and horizontal type."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .cones import Cone, intersect
from .curves import INF, Curve, Point, as_point, point_key, point_str
from .divisors import PolyhedralDivisor, SigmaPolyhedron, degree, evaluate, is_proper
from .errors import DomainError
from .functions import ONE, T, MobiusMap, RationalFunction, divisor_of, linear, mobius_normalize
from .lattice import Side, as_fraction, coords_of, dot, integer_kernel, rank_of, solve_q
from .terms import Derivation, GradedSum, GradedTerm


def _vec(v) -> tuple:
    return tuple(as_fraction(x) for x in coords_of(v))


def _ivec(v) -> tuple:
    out = []
    for x in coords_of(v):
        x = as_fraction(x)
        if x.denominator != 1:
            raise DomainError(f"{v} is not a lattice vector")
        out.append(x.numerator)
    return tuple(out)


def _basis(n: int, i: int) -> tuple:
    return tuple(int(i == j) for j in range(n))


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class Report:
    checks: tuple

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failed(self) -> list:
        return [c for c in self.checks if not c.ok]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


# --------------------------------------------------------------------------
# fiber type (and the toric case, which has no divisor)


@dataclass(frozen=True)
class FiberLND:
    """d(f chi^m) = <m, rho_e> phi f chi^(m+e)."""

    tail: Cone
    e: tuple
    phi: RationalFunction = ONE
    divisor: PolyhedralDivisor | None = None

    def __post_init__(self):
        object.__setattr__(self, "e", _ivec(self.e))
        if self.tail.is_root(self.e) is None:
            raise DomainError(f"{self.e} is not a root of the tail cone")
        if self.phi.is_zero:
            raise DomainError("phi must be nonzero")
        if self.divisor is not None:
            if self.divisor.tail != self.tail:
                raise DomainError("divisor tail differs from the LND tail")
            if not (divisor_of(self.phi, self.divisor.curve) + evaluate(self.divisor, self.e)).is_effective():
                raise DomainError("phi is not a section of D(e)")
        elif not self.phi.is_constant:
            raise DomainError("a toric LND needs a constant phi")

    kind = "fiber"

    @property
    def is_toric(self) -> bool:
        return self.divisor is None

    @property
    def rank(self) -> int:
        return self.tail.rank

    @property
    def rho(self) -> tuple:
        return self.tail.is_root(self.e).distinguished_ray.coords

    def derivation(self) -> Derivation:
        n = self.rank
        chi_e = GradedTerm(self.phi, self.e)
        dchi = tuple(GradedSum([chi_e.scale(r)], rank=n) for r in self.rho)
        return Derivation(n, GradedSum(rank=n), dchi)

    def kernel_cone(self):
        """(tau_e, None): the facet of tail-dual orthogonal to rho_e, full lattice M."""
        return self.tail.facet_dual_to_ray(self.rho), None

    def kernel_generators(self) -> list:
        tau, _ = self.kernel_cone()
        return [GradedTerm.chi(m) for m in tau.semigroup_generators()]

    def predicted_index(self, m) -> int:
        return max(0, int(dot(_ivec(m), self.rho))) + 1

    def __call__(self, x):
        return self.derivation()(x)


# --------------------------------------------------------------------------
# colorings


@dataclass(frozen=True)
class Coloring:
    """A choice of one vertex per point of C' (P1: C' = P1 minus z_inf)."""

    divisor: PolyhedralDivisor
    chosen: tuple
    z_inf: Point | None
    marked: Point | None

    def __init__(self, divisor: PolyhedralDivisor, chosen: Mapping, z_inf=None, z0=None):
        z_inf = as_point(z_inf) if z_inf is not None else None
        if divisor.curve is Curve.P1 and z_inf is None:
            raise DomainError("a coloring on P1 needs a point at infinity")
        if divisor.curve is Curve.A1 and z_inf is not None:
            raise DomainError("a coloring on A1 has no point at infinity")
        ch = {}
        for z, v in chosen.items():
            z = as_point(z)
            if z_inf is not None and point_key(z) == point_key(z_inf):
                raise DomainError("the point at infinity carries no colored vertex")
            if z is INF and divisor.curve is Curve.A1:
                raise DomainError("infinity is not on A1")
            v = _vec(v)
            if len(v) != divisor.rank:
                raise DomainError("colored vertex of wrong rank")
            ch[z] = v
        marked = as_point(z0) if z0 is not None else None
        if marked is not None and z_inf is not None and point_key(marked) == point_key(z_inf):
            raise DomainError("the marked point must differ from the point at infinity")
        object.__setattr__(self, "divisor", divisor)
        object.__setattr__(self, "chosen", tuple(sorted(ch.items(), key=lambda kv: point_key(kv[0]))))
        object.__setattr__(self, "z_inf", z_inf)
        object.__setattr__(self, "marked", marked)

    @property
    def rank(self) -> int:
        return self.divisor.rank

    @property
    def curve(self) -> Curve:
        return self.divisor.curve

    def _is_inf(self, z) -> bool:
        return self.z_inf is not None and point_key(z) == point_key(self.z_inf)

    @property
    def points(self) -> list:
        """Points of C' that carry a non-tail slice or an explicit choice."""
        keys = {point_key(z): z for z in self.divisor.support if not self._is_inf(z)}
        keys.update({point_key(z): z for z, _ in self.chosen})
        return [keys[k] for k in sorted(keys)]

    def vertex(self, z) -> tuple:
        z = as_point(z)
        for w, v in self.chosen:
            if point_key(w) == point_key(z):
                return v
        if self.divisor.slice(z).is_tail:
            return (Fraction(0),) * self.rank
        raise DomainError(f"no colored vertex at {point_str(z)}")

    def nonlattice_points(self) -> list:
        return [z for z in self.points if any(x.denominator != 1 for x in self.vertex(z))]

    @property
    def z0(self) -> Point:
        bad = self.nonlattice_points()
        if len(bad) > 1:
            raise DomainError("more than one non-lattice colored vertex")
        if self.marked is not None:
            if bad and point_key(bad[0]) != point_key(self.marked):
                raise DomainError("the non-lattice colored vertex is not at the marked point")
            return self.marked
        if bad:
            return bad[0]
        for cand in (Fraction(0), Fraction(1)):
            if not self._is_inf(cand):
                return cand
        raise AssertionError("unreachable")

    @property
    def v0(self) -> tuple:
        return self.vertex(self.z0)

    @property
    def d(self) -> int:
        return math.lcm(1, *(x.denominator for x in self.v0))

    @property
    def v_deg(self) -> tuple:
        acc = [Fraction(0)] * self.rank
        for z in self.points:
            acc = [a + b for a, b in zip(acc, self.vertex(z))]
        return tuple(acc)

    def degree_polyhedron(self) -> SigmaPolyhedron:
        """deg D restricted to C'."""
        return degree(self.divisor, [z for z in self.divisor.support if not self._is_inf(z)])

    def omega(self) -> Cone:
        deg = self.degree_polyhedron()
        vd = self.v_deg
        gens = [tuple(a - b for a, b in zip(w, vd)) for w in deg.vertices]
        gens += [tuple(Fraction(x) for x in r) for r in self.divisor.tail.generators()]
        return Cone(Side.N, [g for g in gens if any(g)], rank=self.rank)

    def rho_tilde(self) -> tuple:
        return tuple(int(self.d * x) for x in self.v0) + (self.d,)

    def omega_tilde(self) -> Cone:
        om = self.omega()
        gens = [tuple(Fraction(x) for x in r) + (Fraction(0),) for r in om.generators()]
        gens.append(tuple(Fraction(x) for x in self.rho_tilde()))
        if self.curve is Curve.P1:
            shift = [a - b for a, b in zip(self.v_deg, self.v0)]
            for pi in self.divisor.slice(self.z_inf).vertices:
                gens.append(tuple(a + b for a, b in zip(pi, shift)) + (Fraction(-1),))
        return Cone(Side.N, gens, rank=self.rank + 1)

    def normalizing_map(self) -> MobiusMap:
        """z0 -> 0 and, on P1, z_inf -> oo."""
        if self.curve is Curve.A1:
            return mobius_normalize([self.z0], Curve.A1, [0])
        return mobius_normalize([self.z0, self.z_inf], Curve.P1, [0, INF])


def validate_coloring(c: Coloring) -> Report:
    checks = []
    pr = is_proper(c.divisor)
    checks.append(Check("proper", pr.proper, pr.reason))
    okv, det = True, ""
    for z in c.points:
        try:
            v = c.vertex(z)
        except DomainError as exc:
            okv, det = False, str(exc)
            break
        if v not in c.divisor.slice(z).vertices:
            okv, det = False, f"{v} is not a vertex of the slice at {point_str(z)}"
            break
    checks.append(Check("(1) colored vertices", okv, det))
    if okv:
        deg = c.degree_polyhedron()
        checks.append(Check("(2) v_deg is a vertex", c.v_deg in deg.vertices, f"v_deg = {c.v_deg}"))
        bad = c.nonlattice_points()
        ok3 = len(bad) <= 1 and (c.marked is None or not bad or point_key(bad[0]) == point_key(c.marked))
        checks.append(Check("(3) at most one non-lattice vertex", ok3,
                            "non-lattice at " + ", ".join(map(point_str, bad)) if bad else ""))
    return Report(tuple(checks))


@dataclass(frozen=True)
class CoherentPair:
    coloring: Coloring
    e: tuple

    def __init__(self, coloring: Coloring, e):
        object.__setattr__(self, "coloring", coloring)
        object.__setattr__(self, "e", _ivec(e))

    @property
    def s(self) -> Fraction:
        c = self.coloring
        return Fraction(-1, c.d) - dot(c.v0, self.e)

    @property
    def e_tilde(self) -> tuple:
        return tuple(Fraction(x) for x in self.e) + (self.s,)


def validate_coherent(cp: CoherentPair) -> Report:
    c = cp.coloring
    base = validate_coloring(c)
    checks = list(base.checks)
    if not base.ok:
        checks.append(Check("coherence", False, "the coloring is invalid"))
        return Report(tuple(checks))
    e, d, v0, z0 = cp.e, c.d, c.v0, c.z0
    s = cp.s
    if s.denominator != 1:
        checks.append(Check("(1) e~ is a root of omega~", False, f"s = {s} is not an integer"))
    else:
        wt = c.omega_tilde()
        rt = c.rho_tilde()
        et = tuple(int(x) for x in cp.e_tilde)
        root = wt.is_root(et)
        ok = root is not None and tuple(root.distinguished_ray.coords) == rt
        det = f"e~ = {et}, rho~ = {rt}"
        if not wt.is_pointed:
            det += "; omega~ is not pointed"
        elif rt not in wt.rays:
            det += "; rho~ is not a ray of omega~"
        checks.append(Check("(1) e~ is a root of omega~", ok, det))
    ok2, det2 = True, ""
    for z in c.points:
        if point_key(z) == point_key(z0):
            continue
        vz = c.vertex(z)
        for v in c.divisor.slice(z).vertices:
            if v != vz and dot(v, e) < 1 + dot(vz, e):
                ok2, det2 = False, f"vertex {v} at {point_str(z)}"
    checks.append(Check("(2) gap at unmarked points", ok2, det2))
    ok3, det3 = True, ""
    for v in c.divisor.slice(z0).vertices:
        if v != v0 and d * dot(v, e) < 1 + d * dot(v0, e):
            ok3, det3 = False, f"vertex {v} at the marked point"
    checks.append(Check("(3) gap at the marked point", ok3, det3))
    if c.curve is Curve.P1:
        ok4, det4 = True, ""
        vd = dot(c.v_deg, e)
        for v in c.divisor.slice(c.z_inf).vertices:
            if d * dot(v, e) < -1 - d * vd:
                ok4, det4 = False, f"vertex {v} at infinity"
        checks.append(Check("(4) bound at infinity", ok4, det4))
    return Report(tuple(checks))


# --------------------------------------------------------------------------
# horizontal type


@dataclass(frozen=True)
class HorizontalLND:
    """The LND of a coherent pair, written in the coordinate t of the divisor.

    With q the normalizing coordinate (z0 -> 0, z_inf -> oo) and
    phi^m = prod over z != z0 of (q - q(z))^(-v_z(m)):
        D(q)     = d phi^e chi^e q^(1+s)
        D(chi^m) = d (v0(m) - alpha_m) phi^e chi^(m+e) q^s,
    alpha_m = q d/dq log(phi^m).  Equivalently
    D(phi^m chi^m q^r) = d (v0(m) + r) phi^(m+e) chi^(m+e) q^(r+s).
    """

    pair: CoherentPair
    check: bool = True

    def __post_init__(self):
        if self.check:
            rep = validate_coherent(self.pair)
            if not rep.ok:
                raise DomainError("not a coherent pair: " + "; ".join(f"{c.name} {c.detail}" for c in rep.failed()))

    kind = "horizontal"

    @property
    def coloring(self) -> Coloring:
        return self.pair.coloring

    @property
    def e(self) -> tuple:
        return self.pair.e

    @property
    def d(self) -> int:
        return self.coloring.d

    @property
    def s(self) -> Fraction:
        return self.pair.s

    @property
    def rank(self) -> int:
        return self.coloring.rank

    @property
    def v0(self) -> tuple:
        return self.coloring.v0

    @property
    def mobius(self) -> MobiusMap:
        return self.coloring.normalizing_map()

    @property
    def q(self) -> RationalFunction:
        return self.mobius.as_function()

    def cocycle_data(self) -> list:
        """[(q(z), v_z)] for the unmarked points with nonzero colored vertex."""
        c, mu = self.coloring, self.mobius
        out = []
        for z in c.points:
            if point_key(z) == point_key(c.z0):
                continue
            v = c.vertex(z)
            if any(v):
                out.append((mu(z), v))
        return out

    def phi(self, m) -> RationalFunction:
        m = _vec(m)
        q = self.q
        out = ONE
        for w, v in self.cocycle_data():
            k = dot(m, v)
            if k.denominator != 1:
                raise DomainError("phi^m needs integral v_z(m)")
            out = out * (q - RationalFunction.const(w)) ** int(-k)
        return out

    def alpha(self, m) -> RationalFunction:
        """q d/dq log(phi^m), as a function of t."""
        q = self.q
        out = RationalFunction()
        for w, v in self.cocycle_data():
            out = out - RationalFunction.const(dot(_vec(m), v)) * q / (q - RationalFunction.const(w))
        return out

    def _term(self, coeff, m, q_exp) -> GradedTerm:
        return GradedTerm(coeff, m, 0, q_exp, self.d, self.q)

    def derivation(self) -> Derivation:
        n, d, e, s = self.rank, self.d, self.e, self.s
        q = self.q
        phe = self.phi(e)
        dt = GradedSum([self._term(phe * d / q.derivative(), e, 1 + s)], rank=n)
        dchi = []
        for i in range(n):
            ei = _basis(n, i)
            coeff = (RationalFunction.const(dot(self.v0, ei)) - self.alpha(ei)) * phe * d
            dchi.append(GradedSum([self._term(coeff, e, s)], rank=n))
        return Derivation(n, dt, tuple(dchi))

    def twisted(self, m, r) -> GradedTerm:
        """phi^m chi^m q^r."""
        return self._term(self.phi(m), _ivec(m), r)

    def predicted_index(self, m, r) -> int | None:
        k = self.d * (as_fraction(r) + dot(self.v0, _vec(m)))
        if k.denominator != 1 or k < 0:
            return None
        return int(k) + 1

    def kernel_lattice(self) -> list:
        """A basis of L = {m : v0(m) in Z}."""
        n, d = self.rank, self.d
        row = [int(d * x) for x in self.v0] + [-d]
        return [b[:n] for b in integer_kernel([row], n + 1)]

    def kernel_cone(self):
        """(omega-dual, basis of L)."""
        return self.coloring.omega().dual(), self.kernel_lattice()

    def kernel_generators(self) -> list:
        cone, L = self.kernel_cone()
        return [self.twisted(m, -dot(self.v0, m)) for m in sublattice_generators(cone, L)]

    def __call__(self, x):
        return self.derivation()(x)


def sublattice_generators(cone: Cone, basis: Sequence[Sequence[int]]) -> list:
    """Semigroup generators of cone intersected with the lattice spanned by ``basis``."""
    n = cone.rank
    B = [list(b) for b in basis]
    if len(B) != n:
        raise DomainError("the sublattice must have full rank")
    # coordinates of a vector x in the basis: solve sum c_i B_i = x
    cols = [[B[j][i] for j in range(n)] for i in range(n)]

    def coords(x):
        return solve_q(cols, list(x))

    gens = [coords(r) for r in cone.rays]
    lin = [coords(r) for r in cone.lineality]
    sub = Cone(cone.side, gens, lineality=lin, rank=n)
    out = []
    for c in sub.semigroup_generators():
        out.append(tuple(int(sum(c[j] * B[j][i] for j in range(n))) for i in range(n)))
    return sorted(set(out))


# --------------------------------------------------------------------------
# kernels and commutators


def kernels_intersect_trivially(a: HorizontalLND, b: HorizontalLND) -> bool:
    """True iff the kernels meet only in the constants (omega-duals meet in 0)."""
    ca, cb = a.coloring, b.coloring
    if ca.divisor != cb.divisor:
        raise DomainError("LNDs on different divisors")
    if (ca.z_inf is None) != (cb.z_inf is None) or (
            ca.z_inf is not None and point_key(ca.z_inf) != point_key(cb.z_inf)):
        raise DomainError("the two LNDs have different points at infinity")
    verdict = intersect(ca.omega().dual(), cb.omega().dual()).is_zero
    if a.rank == 2:
        adj = vertices_adjacent(ca.degree_polyhedron(), ca.v_deg, cb.v_deg)
        if verdict == adj:
            raise AssertionError("rank-2 adjacency criterion disagrees with the cone intersection")
    return verdict


def vertices_adjacent(P: SigmaPolyhedron, v1: tuple, v2: tuple) -> bool:
    """Rank 2: are two vertices joined by an edge (or equal)?"""
    if P.rank != 2:
        raise DomainError("adjacency test is implemented in rank 2")
    if v1 == v2:
        return True
    dx, dy = v2[0] - v1[0], v2[1] - v1[1]
    tail_dual = P.tail.dual()
    for m in ((-dy, dx), (dy, -dx)):
        if m not in tail_dual:
            continue
        if all(dot(m, w) > dot(m, v1) for w in P.vertices if w not in (v1, v2)):
            return True
    return False


@dataclass(frozen=True)
class Downgrading:
    p: tuple


@dataclass(frozen=True)
class NotDiagonal:
    witness: object
    reason: str


def default_probes(rank: int, tail: Cone | None = None, with_t: bool = True) -> list:
    ms = {_basis(rank, i) for i in range(rank)}
    if tail is not None:
        ms.update(tail.dual().semigroup_generators())
    probes = [GradedTerm.chi(m) for m in sorted(ms)]
    if with_t:
        probes += [GradedTerm.chi(m, 1) for m in sorted(ms)]
        probes.append(GradedTerm(T, (0,) * rank))
    return probes


def eigenvalue(delta: GradedSum, x: GradedTerm):
    """lambda with delta = lambda * x for a constant lambda, else None."""
    if delta.is_zero:
        return Fraction(0)
    t = delta.single()
    if t is None or t.m != x.m or t.q_exp != x.q_exp or t.q != x.q:
        return None
    shift = t.t_exp - x.t_exp
    if shift.denominator != 1:
        return None
    ratio = t.coeff * T ** int(shift) / x.coeff
    return ratio.constant_value() if ratio.is_constant else None


def commutator(plus, minus, probes=None):
    """[plus, minus] on probes: Downgrading(p) or NotDiagonal(witness)."""
    if tuple(plus.e) != tuple(-x for x in minus.e):
        raise DomainError("the two LNDs must have opposite degrees")
    n = plus.rank
    toric = getattr(plus, "is_toric", False) and getattr(minus, "is_toric", False)
    if probes is None:
        tail = plus.tail if hasattr(plus, "tail") else plus.coloring.divisor.tail
        probes = default_probes(n, tail, with_t=not toric)
    dp, dm = plus.derivation(), minus.derivation()
    rows, vals = [], []
    for x in probes:
        delta = dp(dm(x)) - dm(dp(x))
        lam = eigenvalue(delta, x)
        if lam is None:
            return NotDiagonal(x, f"[d+, d-]({x}) = {delta} is not a multiple of the probe")
        rows.append([Fraction(c) for c in x.m] + [x.t_exp])
        vals.append(lam)
    sol = solve_q(rows, vals)
    if sol is None:
        return NotDiagonal(None, "the eigenvalues are not linear in the probe weights")
    p, pt = sol[:n], sol[n]
    if rank_of(rows) < min(n + 1, len(rows[0])) and not toric:
        return NotDiagonal(None, "probes do not span enough degrees")
    if pt != 0:
        return NotDiagonal(None, f"the commutator has t-weight {pt}")
    if any(x.denominator != 1 for x in p):
        return NotDiagonal(None, f"p = {p} is not a lattice vector")
    return Downgrading(tuple(int(x) for x in p))


def iterate_to_zero(lnd, x, bound: int) -> int:
    """Least n <= bound with lnd^n(x) = 0."""
    if bound < 1:
        raise DomainError("bound must be positive")
    D = lnd.derivation() if hasattr(lnd, "derivation") else lnd
    y = GradedSum([x]) if isinstance(x, GradedTerm) else x
    for n in range(bound + 1):
        if y.is_zero:
            return n
        y = D(y)
    raise NilpotencyViolation(f"not nilpotent within {bound} steps on {x}")


class NilpotencyViolation(DomainError):
    pass
