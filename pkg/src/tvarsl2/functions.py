"""The rational function field Q(t).

Functions are stored as a reduced quotient of polynomials with exact
coefficients (monic denominator).  Functions that split over Q also have a
factored view ``lead * prod (t - z)^k``; the divisor map and the section
spaces need it, and they fail loudly on functions with irrational zeros.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .curves import INF, Curve, Point, QDivisor, as_point, point_key
from .errors import DomainError
from .lattice import as_fraction

# --------------------------------------------------------------------------
# dense polynomials, coefficient tuples from low to high degree


def _trim(c) -> tuple:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def padd(a, b):
    n = max(len(a), len(b))
    return _trim((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def pneg(a):
    return tuple(-x for x in a)


def pmul(a, b):
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def pdivmod(a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    while len(a) >= len(b) and a:
        k = len(a) - len(b)
        f = a[-1] / lead
        q[k] = f
        for i, y in enumerate(b):
            a[i + k] -= f * y
        a = list(_trim(a))
    return _trim(q), _trim(a)


def pgcd(a, b):
    while b:
        a, b = b, pdivmod(a, b)[1]
    if not a:
        return ()
    return tuple(x / a[-1] for x in a)


def pderiv(a):
    return _trim(i * a[i] for i in range(1, len(a)))


def peval(a, x):
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * x + c
    return acc


def rational_roots(a) -> dict:
    """Rational roots of a nonzero polynomial with their multiplicities."""
    a = _trim(a)
    roots: dict = {}
    while len(a) > 1 and a[0] == 0:
        roots[Fraction(0)] = roots.get(Fraction(0), 0) + 1
        a = a[1:]
    if len(a) <= 1:
        return roots
    den = 1
    for c in a:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in a]
    cands = set()
    for p in _divisors(abs(ints[0])):
        for q in _divisors(abs(ints[-1])):
            cands.add(Fraction(p, q))
            cands.add(Fraction(-p, q))
    for z in sorted(cands):
        while len(a) > 1 and peval(a, z) == 0:
            roots[z] = roots.get(z, 0) + 1
            a = pdivmod(a, (-z, Fraction(1)))[0]
    return roots


def _divisors(n: int) -> list:
    out = []
    i = 1
    while i * i <= n:
        if n % i == 0:
            out.extend({i, n // i})
        i += 1
    return out


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RationalFunction:
    """An element num/den of Q(t); the zero function has num = ()."""

    num: tuple
    den: tuple

    def __init__(self, num: Sequence = (), den: Sequence = (1,)):
        n = _trim(as_fraction(x) for x in num)
        d = _trim(as_fraction(x) for x in den)
        if not d:
            raise DomainError("zero denominator")
        if not n:
            object.__setattr__(self, "num", ())
            object.__setattr__(self, "den", (Fraction(1),))
            return
        g = pgcd(n, d)
        if len(g) > 1:
            n, d = pdivmod(n, g)[0], pdivmod(d, g)[0]
        lc = d[-1]
        object.__setattr__(self, "num", tuple(x / lc for x in n))
        object.__setattr__(self, "den", tuple(x / lc for x in d))

    # -- constructors ------------------------------------------------------

    @classmethod
    def const(cls, c) -> "RationalFunction":
        return cls((as_fraction(c),))

    @classmethod
    def t(cls) -> "RationalFunction":
        return cls((0, 1))

    @classmethod
    def factored(cls, lead, factors: Mapping) -> "RationalFunction":
        """lead * prod over roots z of (t - z)^k; the root INF is ignored."""
        num, den = (as_fraction(lead),), (Fraction(1),)
        for z, k in factors.items():
            z = as_point(z)
            if z is INF:
                continue
            lin = (-z, Fraction(1))
            for _ in range(abs(int(k))):
                if k > 0:
                    num = pmul(num, lin)
                else:
                    den = pmul(den, lin)
        return cls(num, den)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        return RationalFunction(padd(pmul(self.num, other.den), pmul(other.num, self.den)),
                                pmul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(pneg(self.num), self.den)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        return RationalFunction(pmul(self.num, other.num), pmul(self.den, other.den))

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.is_zero:
            raise DomainError("the zero function has no inverse")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        return self * _coerce(other).inverse()

    def __rtruediv__(self, other):
        return _coerce(other) * self.inverse()

    def __pow__(self, k: int):
        k = int(k)
        base = self if k >= 0 else self.inverse()
        out = RationalFunction.const(1)
        for _ in range(abs(k)):
            out = out * base
        return out

    # -- queries -----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.num

    @property
    def is_constant(self) -> bool:
        return len(self.num) <= 1 and len(self.den) == 1

    def constant_value(self) -> Fraction:
        if not self.is_constant:
            raise DomainError(f"{self} is not constant")
        return self.num[0] if self.num else Fraction(0)

    @property
    def degree(self) -> int:
        """deg num - deg den (the negative of the order at infinity)."""
        if self.is_zero:
            raise DomainError("the zero function has no degree")
        return len(self.num) - len(self.den)

    def __call__(self, x):
        x = as_fraction(x)
        d = peval(self.den, x)
        if d == 0:
            raise DomainError(f"pole at {x}")
        return peval(self.num, x) / d

    def order_at(self, z: Point) -> int:
        if self.is_zero:
            raise DomainError("the zero function has no order")
        z = as_point(z)
        if z is INF:
            return -self.degree
        lin = (-z, Fraction(1))
        k = 0
        n, d = self.num, self.den
        while peval(n, z) == 0:
            n = pdivmod(n, lin)[0]
            k += 1
        while peval(d, z) == 0:
            d = pdivmod(d, lin)[0]
            k -= 1
        return k

    def splits(self) -> bool:
        if self.is_zero:
            return True
        return (sum(rational_roots(self.num).values()) == len(self.num) - 1
                and sum(rational_roots(self.den).values()) == len(self.den) - 1)

    def factorization(self) -> tuple[Fraction, dict]:
        """(lead, {root: multiplicity}); raises on irrational zeros or poles."""
        if self.is_zero:
            raise DomainError("the zero function has no factorization")
        if not self.splits():
            raise DomainError(f"{self} does not split over the rationals")
        fac = dict(rational_roots(self.num))
        for z, k in rational_roots(self.den).items():
            fac[z] = fac.get(z, 0) - k
        fac = {z: k for z, k in fac.items() if k}
        return self.num[-1], dict(sorted(fac.items()))

    @property
    def lead(self) -> Fraction:
        return self.num[-1] if self.num else Fraction(0)

    def derivative(self) -> "RationalFunction":
        return RationalFunction(padd(pmul(pderiv(self.num), self.den), pneg(pmul(self.num, pderiv(self.den)))),
                                pmul(self.den, self.den))

    def compose(self, inner: "RationalFunction") -> "RationalFunction":
        """self(inner(t))."""
        def horner(p):
            acc = RationalFunction()
            for c in reversed(p):
                acc = acc * inner + RationalFunction.const(c)
            return acc
        return horner(self.num) / horner(self.den)

    def __repr__(self):
        return f"RationalFunction({_pstr(self.num)} / {_pstr(self.den)})"

    def __str__(self):
        if len(self.den) == 1:
            return _pstr(self.num)
        return f"({_pstr(self.num)})/({_pstr(self.den)})"


def _pstr(p) -> str:
    if not p:
        return "0"
    terms = []
    for i, c in enumerate(p):
        if c == 0:
            continue
        mon = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
        if mon and c == 1:
            terms.append(mon)
        elif mon and c == -1:
            terms.append("-" + mon)
        else:
            terms.append(f"{c}{'*' + mon if mon else ''}")
    return " + ".join(reversed(terms)).replace("+ -", "- ")


def _coerce(x) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    return RationalFunction.const(x)


T = RationalFunction.t()
ONE = RationalFunction.const(1)


def linear(z) -> RationalFunction:
    """The function t - z."""
    return RationalFunction((-as_fraction(z), 1))


# --------------------------------------------------------------------------
# divisors and sections


def divisor_of(f: RationalFunction, curve=Curve.P1) -> QDivisor:
    curve = Curve(curve)
    if f.is_zero:
        raise DomainError("the zero function has no divisor")
    _, fac = f.factorization()
    coeffs = dict(fac)
    if curve is Curve.P1 and f.degree:
        coeffs[INF] = -f.degree
    return QDivisor(curve, coeffs)


def function_with_divisor(D: QDivisor) -> RationalFunction:
    """The monic f with div(f) = D on the finite part (D must be integral there)."""
    fac = {}
    for z, c in D.coefficients:
        if z is INF:
            continue
        if c.denominator != 1:
            raise DomainError("only integral divisors are divisors of functions")
        fac[z] = int(c)
    return RationalFunction.factored(1, fac)


@dataclass(frozen=True)
class SectionModule:
    """generator * (polynomials of degree <= degree_cap); cap None means unbounded."""

    generator: RationalFunction | None
    curve: Curve
    degree_cap: int | None

    @property
    def is_empty(self) -> bool:
        return self.generator is None

    @property
    def dimension(self):
        if self.is_empty:
            return 0
        return None if self.degree_cap is None else self.degree_cap + 1

    def basis(self, limit: int | None = None) -> list:
        if self.is_empty:
            return []
        top = self.degree_cap if self.degree_cap is not None else limit
        if top is None:
            raise DomainError("infinite-dimensional module needs a limit")
        return [self.generator * (T ** k) for k in range(top + 1)]


def h0_basis(D: QDivisor) -> SectionModule:
    """Sections f with div(f) + floor(D) >= 0."""
    fl = D.floor()
    gen = RationalFunction.factored(1, {z: -int(c) for z, c in fl.coefficients if z is not INF})
    if D.curve is Curve.A1:
        return SectionModule(gen, Curve.A1, None)
    cap = int(fl.degree)
    if cap < 0:
        return SectionModule(None, Curve.P1, None)
    return SectionModule(gen, Curve.P1, cap)


# --------------------------------------------------------------------------
# Moebius maps


@dataclass(frozen=True)
class MobiusMap:
    """t -> (a t + b)/(c t + d).

    Maps that send three prescribed rational points to 0, 1, oo rarely have
    a determinant that is a rational square, so the determinant is only
    required to be nonzero; :meth:`det_one` rescales the numerator.
    """

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __init__(self, a, b, c, d):
        a, b, c, d = (as_fraction(x) for x in (a, b, c, d))
        if a * d - b * c == 0:
            raise DomainError("degenerate Moebius map")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(1, 0, 0, 1)

    @property
    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    def det_one(self) -> "MobiusMap":
        k = 1 / self.det
        return MobiusMap(self.a * k, self.b * k, self.c, self.d)

    @property
    def is_affine(self) -> bool:
        return self.c == 0

    def __call__(self, z):
        z = as_point(z)
        if z is INF:
            return INF if self.c == 0 else self.a / self.c
        den = self.c * z + self.d
        if den == 0:
            return INF
        return (self.a * z + self.b) / den

    def as_function(self) -> RationalFunction:
        return RationalFunction((self.b, self.a), (self.d, self.c))

    def compose(self, other: "MobiusMap") -> "MobiusMap":
        """self after other."""
        a, b, c, d = self.a, self.b, self.c, self.d
        e, f, g, h = other.a, other.b, other.c, other.d
        return MobiusMap(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def same_map(self, other: "MobiusMap") -> bool:
        return (self.a * other.b == self.b * other.a and self.a * other.c == self.c * other.a
                and self.a * other.d == self.d * other.a and self.b * other.c == self.c * other.b
                and self.b * other.d == self.d * other.b and self.c * other.d == self.d * other.c)


def mobius_normalize(points, curve=Curve.P1, targets=None) -> MobiusMap:
    """A Moebius map sending ``points`` to ``targets`` (default 0, 1, oo in order).

    On A1 only affine maps are allowed, so at most two finite points can be
    prescribed and infinity stays fixed.
    """
    curve = Curve(curve)
    pts = [as_point(z) for z in points]
    if targets is None:
        targets = [Fraction(0), Fraction(1), INF][: len(pts)]
    tgs = [as_point(w) for w in targets]
    if len(pts) != len(tgs) or len(pts) > 3:
        raise DomainError("at most three point constraints")
    if len(set(map(point_key, pts))) != len(pts) or len(set(map(point_key, tgs))) != len(tgs):
        raise DomainError("points must be distinct")
    if curve is Curve.A1:
        if any(z is INF for z in pts + tgs) or len(pts) > 2:
            raise DomainError("on A1 only two finite points can be moved")
        if not pts:
            return MobiusMap.identity()
        if len(pts) == 1:
            return MobiusMap(1, tgs[0] - pts[0], 0, 1)
        a = (tgs[1] - tgs[0]) / (pts[1] - pts[0])
        return MobiusMap(a, tgs[0] - a * pts[0], 0, 1)
    fixed_inf = [i for i, z in enumerate(pts) if z is INF]
    if len(pts) <= 2 and all(tgs[i] is INF for i in fixed_inf) and sum(w is INF for w in tgs) == len(fixed_inf):
        # underdetermined and infinity is not moved: use the simplest affine map
        fin = [(z, w) for z, w in zip(pts, tgs) if z is not INF]
        return mobius_normalize([z for z, _ in fin], Curve.A1, [w for _, w in fin])
    # P1: compose (source -> 0,1,oo) with the inverse of (targets -> 0,1,oo)
    src = _to_standard(pts)
    dst = _to_standard(tgs)
    m = dst.inverse().compose(src)
    for z, w in zip(pts, tgs):
        if point_key(m(z)) != point_key(w):
            raise DomainError("no Moebius map with these constraints")
    return m


def _to_standard(pts) -> MobiusMap:
    """A map sending the given (up to three) points to 0, 1, oo; extra freedom fixed canonically."""
    std = [Fraction(0), Fraction(1), INF]
    pts = list(pts)
    if not pts:
        return MobiusMap.identity()
    # complete to three points by adding unused standard points
    fill = [w for w in std + [Fraction(2), Fraction(-1)] if all(point_key(w) != point_key(z) for z in pts)]
    while len(pts) < 3:
        pts.append(fill.pop(0))
    z1, z2, z3 = pts
    # cross-ratio map (t - z1)(z2 - z3) / ((t - z3)(z2 - z1)) with infinities handled
    if z3 is INF:
        return MobiusMap(1, -z1, 0, z2 - z1)
    if z1 is INF:
        return MobiusMap(0, z2 - z3, 1, -z3)
    if z2 is INF:
        return MobiusMap(1, -z1, 1, -z3)
    return MobiusMap(z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1))


def derivative(f: RationalFunction) -> RationalFunction:
    return f.derivative()


def log_derivative_t(f: RationalFunction) -> RationalFunction:
    """alpha = t f'/f."""
    if f.is_zero:
        raise DomainError("log derivative of the zero function")
    return T * f.derivative() / f
