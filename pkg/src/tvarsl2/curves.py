"""Points of A^1 and P^1 and Q-divisors supported on them."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping, Union

from .errors import DomainError
from .lattice import as_fraction


class Curve(str, Enum):
    A1 = "A1"
    P1 = "P1"


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
Point = Union[Fraction, _Infinity]


def as_point(z) -> Point:
    if z is INF or (isinstance(z, str) and z.strip().lower() in ("inf", "infinity", "oo")):
        return INF
    return as_fraction(z)


def point_key(z: Point):
    return (1, Fraction(0)) if z is INF else (0, z)


def point_str(z: Point) -> str:
    return "inf" if z is INF else str(z)


def check_point(curve: Curve, z: Point):
    if z is INF and curve is Curve.A1:
        raise DomainError("the point at infinity does not lie on A1")


@dataclass(frozen=True)
class QDivisor:
    """A Q-divisor on A^1 or P^1; zero coefficients are never stored."""

    curve: Curve
    coefficients: tuple  # sorted tuple of (point, Fraction)

    def __init__(self, curve, coefficients: Mapping | tuple = ()):
        curve = Curve(curve)
        items = coefficients.items() if isinstance(coefficients, Mapping) else coefficients
        acc: dict = {}
        for z, c in items:
            z = as_point(z)
            check_point(curve, z)
            acc[z] = acc.get(z, Fraction(0)) + as_fraction(c)
        coeffs = tuple(sorted(((z, c) for z, c in acc.items() if c != 0), key=lambda t: point_key(t[0])))
        object.__setattr__(self, "curve", curve)
        object.__setattr__(self, "coefficients", coeffs)

    def as_dict(self) -> dict:
        return dict(self.coefficients)

    def __getitem__(self, z) -> Fraction:
        return self.as_dict().get(as_point(z), Fraction(0))

    @property
    def support(self) -> list:
        return [z for z, _ in self.coefficients]

    def _same(self, other: "QDivisor"):
        if other.curve is not self.curve:
            raise DomainError("divisors on different curves")

    def __add__(self, other: "QDivisor") -> "QDivisor":
        self._same(other)
        return QDivisor(self.curve, self.coefficients + other.coefficients)

    def __neg__(self) -> "QDivisor":
        return QDivisor(self.curve, tuple((z, -c) for z, c in self.coefficients))

    def __sub__(self, other: "QDivisor") -> "QDivisor":
        return self + (-other)

    def scale(self, k) -> "QDivisor":
        k = as_fraction(k)
        return QDivisor(self.curve, tuple((z, k * c) for z, c in self.coefficients))

    def floor(self) -> "QDivisor":
        return QDivisor(self.curve, tuple((z, Fraction(math.floor(c))) for z, c in self.coefficients))

    @property
    def degree(self) -> Fraction:
        return sum((c for _, c in self.coefficients), Fraction(0))

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for _, c in self.coefficients)

    def is_effective(self) -> bool:
        return all(c >= 0 for _, c in self.coefficients)

    def is_principal(self) -> bool:
        """Every integral divisor on A1 is principal; on P1 the degree must vanish."""
        if not self.is_integral:
            return False
        return self.curve is Curve.A1 or self.degree == 0

    def restrict_finite(self) -> "QDivisor":
        return QDivisor(self.curve, tuple((z, c) for z, c in self.coefficients if z is not INF))

    def __repr__(self):
        if not self.coefficients:
            return f"QDivisor({self.curve.value}, 0)"
        body = " + ".join(f"{c}[{point_str(z)}]" for z, c in self.coefficients)
        return f"QDivisor({self.curve.value}, {body})"
