"""Named example inputs with known SL2-actions, used by the test suites and the docs."""
from __future__ import annotations

from fractions import Fraction

from .cones import Cone
from .curves import QDivisor
from .divisors import PolyhedralDivisor
from .lnd import Coloring

HALF = Fraction(1, 2)


def cones() -> dict:
    out = {
        "quadrant": Cone("N", [(1, 0), (0, 1)]),
        "b2": Cone("N", [(1, 0), (1, 2)]),
        "octant": Cone("N", [(1, 0, 0), (0, 1, 0), (0, 0, 1)]),
        "rank3_mixed": Cone("N", [(1, 0, 0), (0, 1, 0), (1, 1, 2)]),
    }
    for a in range(1, 5):
        out[f"veronese_{a}"] = Cone("N", [(1, 0), (a, a + 1)])
    return out


def fiber_divisors() -> dict:
    octant = Cone("N", [(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    quad = Cone("N", [(1, 0), (0, 1)])
    return {
        # a two-vertex slice whose vertices lie on one level of e = (-1,1,0)
        "z3_segment": PolyhedralDivisor("A1", octant, {0: [(1, 1, -1), (-1, -1, 1)]}),
        # D(e) principal but not trivial: phi is a non-constant section
        "quadrant_shifted": PolyhedralDivisor("P1", quad, {0: [(1, 2)], 1: [(0, -1)], "inf": [(1, 1)]}),
    }


def special_divisors() -> dict:
    from .classify import build_special

    out = {}
    for r in (1, 2, 3):
        out[f"special_{r}_point"] = build_special(r, QDivisor("P1", {0: 1})).divisor
        out[f"special_{r}_half"] = build_special(r, QDivisor("P1", {0: HALF, 1: HALF})).divisor
    return out


def horizontal_divisors() -> dict:
    from .threefold import table_divisor

    return {
        "homogeneous_1": table_divisor("A1Homogeneous", 1),
        "homogeneous_3": table_divisor("A1Homogeneous", 3),
        "cone_2": table_divisor("A1Cone", 2),
        "p1_1_1": table_divisor("P1Family", 1, 1),
        "p1_2_3/2": table_divisor("P1Family", 2, Fraction(3, 2)),
        # second family: a half-lattice vertex at the marked point
        "half_vertex": PolyhedralDivisor("P1", Cone("N", [(1, 0), (1, 2)]),
                                         {0: [(0, HALF)], 1: [(0, 0), (0, 1)], "inf": [(HALF, -HALF)]}),
    }


def linear_plane():
    """A2 with the linear action: rank 1, one slice conv(0,1) at 0, colorings read off by hand."""
    D = PolyhedralDivisor("A1", Cone("N", [], rank=1), {0: [(0,), (1,)]})
    return D, Coloring(D, {0: (0,)}, None, 0), Coloring(D, {0: (1,)}, None, 0), (2,)


def all_actions() -> dict:
    """Every classifier output on the corpus, keyed by example name."""
    from .classify import classify_fiber, classify_horizontal, classify_toric, horizontal_descriptor

    out = {}
    for name, c in cones().items():
        out[f"toric/{name}"] = classify_toric(c)
    for name, D in {**fiber_divisors(), **special_divisors()}.items():
        out[f"fiber/{name}"] = classify_fiber(D)
    for name, D in horizontal_divisors().items():
        out[f"horizontal/{name}"] = classify_horizontal(D)
    D, cp, cm, e = linear_plane()
    out["horizontal/linear_plane"] = [horizontal_descriptor(cp, cm, e), horizontal_descriptor(cm, cp, (-2,))]
    return out
