"""Graded terms f(t) * chi^m * t^x * q^y and derivations acting on them.

Exponents x, y may be fractional with denominator dividing a declared d.
``q`` is an optional auxiliary base (a Moebius function of t), needed when
a derivation is written in a second chart.  Canonical form: the order of f
at t = 0 is moved into x, the integer part of y is multiplied into f, and
q = t is merged into the t-power.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainError
from .functions import ONE, T, RationalFunction
from .lattice import as_fraction

_INV_T = T.inverse()


def _check_d(x: Fraction, d: int):
    if d % x.denominator:
        raise DomainError(f"exponent {x} does not have denominator dividing d={d}")


@dataclass(frozen=True)
class GradedTerm:
    coeff: RationalFunction
    m: tuple
    t_exp: Fraction
    q_exp: Fraction
    d: int
    q: RationalFunction | None

    def __init__(self, coeff, m: Sequence[int], t_exp=0, q_exp=0, d: int = 1, q: RationalFunction | None = None):
        if not isinstance(coeff, RationalFunction):
            coeff = RationalFunction.const(coeff)
        m = tuple(int(x) for x in m)
        t_exp, q_exp = as_fraction(t_exp), as_fraction(q_exp)
        d = int(d)
        if d < 1:
            raise DomainError("d must be positive")
        if q is not None and q == T:
            t_exp, q_exp, q = t_exp + q_exp, Fraction(0), None
        elif q is not None and q == _INV_T:
            t_exp, q_exp, q = t_exp - q_exp, Fraction(0), None
        if q_exp and q is None:
            raise DomainError("a q-exponent needs a base q")
        if q is not None and (q.is_constant or q.is_zero):
            raise DomainError("the auxiliary base must be a non-constant function")
        if coeff.is_zero:
            t_exp, q_exp, q = Fraction(0), Fraction(0), None
        else:
            k = math.floor(q_exp)
            if k:
                coeff = coeff * q ** k
                q_exp -= k
            k = coeff.order_at(0)
            if k:
                coeff = coeff * T ** (-k)
                t_exp += k
        if not q_exp:
            q = None
        _check_d(t_exp, d)
        _check_d(q_exp, d)
        object.__setattr__(self, "coeff", coeff)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "t_exp", t_exp)
        object.__setattr__(self, "q_exp", q_exp)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "q", q)

    @classmethod
    def chi(cls, m, t_exp=0, d: int = 1) -> "GradedTerm":
        return cls(ONE, m, t_exp, 0, d)

    @property
    def is_zero(self) -> bool:
        return self.coeff.is_zero

    @property
    def rank(self) -> int:
        return len(self.m)

    @property
    def is_integral(self) -> bool:
        return self.t_exp.denominator == 1 and self.q_exp == 0

    @property
    def key(self):
        return (self.m, self.t_exp - math.floor(self.t_exp), self.q_exp, self.q)

    def weight(self) -> tuple:
        """(m, t-exponent); the t-exponent counts the t-order of the coefficient."""
        return self.m, self.t_exp

    def _join_d(self, other: "GradedTerm") -> int:
        if self.d == other.d:
            return self.d
        if self.is_integral or other.is_integral:
            return self.d * other.d // math.gcd(self.d, other.d)
        raise DomainError(f"fractional exponents with different d ({self.d} and {other.d})")

    def __mul__(self, other):
        if isinstance(other, GradedSum):
            return GradedSum([self]) * other
        if not isinstance(other, GradedTerm):
            return self.scale(other)
        if len(self.m) != len(other.m):
            raise DomainError("terms of different rank")
        d = self._join_d(other)
        if self.q is not None and other.q is not None and self.q != other.q:
            raise DomainError("terms use different auxiliary bases")
        q = self.q if self.q is not None else other.q
        return GradedTerm(self.coeff * other.coeff, tuple(a + b for a, b in zip(self.m, other.m)),
                          self.t_exp + other.t_exp, self.q_exp + other.q_exp, d, q)

    def scale(self, f) -> "GradedTerm":
        if not isinstance(f, RationalFunction):
            f = RationalFunction.const(f)
        return GradedTerm(self.coeff * f, self.m, self.t_exp, self.q_exp, self.d, self.q)

    def __neg__(self):
        return self.scale(-1)

    def with_d(self, d: int) -> "GradedTerm":
        return GradedTerm(self.coeff, self.m, self.t_exp, self.q_exp, d, self.q)

    def __repr__(self):
        parts = [f"({self.coeff})"]
        if any(self.m):
            parts.append(f"chi^{self.m}")
        if self.t_exp:
            parts.append(f"t^{self.t_exp}")
        if self.q_exp:
            parts.append(f"q^{self.q_exp}")
        return "*".join(parts)


class GradedSum:
    """A finite sum of graded terms, combined by weight class."""

    __slots__ = ("terms", "rank")

    def __init__(self, terms: Iterable[GradedTerm] = (), rank: int | None = None):
        acc: dict = {}
        for t in terms:
            if rank is None:
                rank = t.rank
            elif t.rank != rank:
                raise DomainError("terms of different rank")
            if t.is_zero:
                continue
            prev = acc.get(t.key)
            acc[t.key] = t if prev is None else _combine(prev, t)
        self.terms = tuple(sorted((t for t in acc.values() if not t.is_zero), key=_sort_key))
        self.rank = rank

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "GradedSum | GradedTerm") -> "GradedSum":
        other = _as_sum(other)
        return GradedSum(self.terms + other.terms, self.rank if self.rank is not None else other.rank)

    def __neg__(self) -> "GradedSum":
        return GradedSum([-t for t in self.terms], self.rank)

    def __sub__(self, other) -> "GradedSum":
        return self + (-_as_sum(other))

    def __mul__(self, other) -> "GradedSum":
        if isinstance(other, (RationalFunction, int, Fraction)):
            return self.scale(other)
        other = _as_sum(other)
        return GradedSum([a * b for a in self.terms for b in other.terms],
                         self.rank if self.rank is not None else other.rank)

    __rmul__ = __mul__

    def scale(self, f) -> "GradedSum":
        return GradedSum([t.scale(f) for t in self.terms], self.rank)

    def __eq__(self, other):
        if isinstance(other, GradedTerm):
            other = GradedSum([other])
        if not isinstance(other, GradedSum):
            return NotImplemented
        return (self - other).is_zero

    def __hash__(self):
        return hash(self.terms)

    def single(self) -> GradedTerm | None:
        """The unique term, if the sum is a single term."""
        return self.terms[0] if len(self.terms) == 1 else None

    def __repr__(self):
        return " + ".join(map(repr, self.terms)) if self.terms else "0"


def _sort_key(t: GradedTerm):
    return (t.m, t.t_exp, t.q_exp, repr(t.coeff))


def _combine(a: GradedTerm, b: GradedTerm) -> GradedTerm:
    d = a._join_d(b)
    lo = min(a.t_exp, b.t_exp)
    f = a.coeff * T ** int(a.t_exp - lo) + b.coeff * T ** int(b.t_exp - lo)
    return GradedTerm(f, a.m, lo, a.q_exp, d, a.q)


def _as_sum(x) -> GradedSum:
    if isinstance(x, GradedSum):
        return x
    if isinstance(x, GradedTerm):
        return GradedSum([x])
    raise TypeError(f"cannot treat {type(x).__name__} as a graded sum")


@dataclass(frozen=True)
class Derivation:
    """A derivation given by dt = D(t) and dchi[i] = D(chi^{e_i}) / chi^{e_i}.

    It acts on f chi^m t^x q^y by the Leibniz rule:
    D = ((f'/f + x/t + y q'/q) dt + sum_i m_i dchi[i]) * term.
    """

    rank: int
    dt: GradedSum
    dchi: tuple

    def log_factor(self, term: GradedTerm) -> GradedSum:
        f = term.coeff
        g = f.derivative() / f
        if term.t_exp:
            g = g + RationalFunction.const(term.t_exp) / T
        if term.q_exp:
            g = g + RationalFunction.const(term.q_exp) * term.q.derivative() / term.q
        out = self.dt.scale(g) if not g.is_zero else GradedSum(rank=self.rank)
        for mi, lc in zip(term.m, self.dchi):
            if mi:
                out = out + lc.scale(mi)
        return out

    def __call__(self, x) -> GradedSum:
        if isinstance(x, GradedTerm):
            if x.is_zero:
                return GradedSum(rank=self.rank)
            return self.log_factor(x) * x
        x = _as_sum(x)
        out = GradedSum(rank=self.rank)
        for t in x.terms:
            out = out + self.log_factor(t) * t
        return out

    def power(self, x, n: int) -> GradedSum:
        y = _as_sum(x) if not isinstance(x, GradedSum) else x
        for _ in range(n):
            y = self(y)
        return y


def commutator_apply(a: Derivation, b: Derivation, x) -> GradedSum:
    """[a, b](x) = a(b(x)) - b(a(x))."""
    return a(b(x)) - b(a(x))
