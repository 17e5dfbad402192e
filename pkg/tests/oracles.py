"""Brute-force reference implementations used to derive expected values.

Nothing here imports the package: every helper works from raw integer
or Fraction tuples by exhaustive search or elementary elimination.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd


def box(n: int, b: int):
    return itertools.product(range(-b, b + 1), repeat=n)


def dot(a, b):
    return sum(Fraction(x) * Fraction(y) for x, y in zip(a, b))


def gcd_all(v) -> int:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g


def is_multiple_brute(v) -> bool:
    """True if v = k*w for some integer k >= 2 and lattice w."""
    top = max(abs(x) for x in v)
    for k in range(2, top + 1):
        if all(x % k == 0 for x in v):
            return True
    return False


def _solve(cols, x):
    """Solve sum c_i cols[i] = x for square independent cols, by elimination."""
    n = len(x)
    k = len(cols)
    rows = [[Fraction(cols[j][i]) for j in range(k)] + [Fraction(x[i])] for i in range(n)]
    piv = []
    r = 0
    for c in range(k):
        p = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if p is None:
            return None
        rows[r], rows[p] = rows[p], rows[r]
        for i in range(n):
            if i != r and rows[i][c] != 0:
                f = rows[i][c] / rows[r][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        piv.append(c)
        r += 1
    if any(rows[i][k] != 0 for i in range(r, n)):
        return None
    return [rows[i][k] / rows[i][i] for i in range(k)]


def in_cone(gens, x) -> bool:
    """Caratheodory: x is a nonnegative combination of some independent subset of gens."""
    if all(Fraction(c) == 0 for c in x):
        return True
    gens = [g for g in gens if any(g)]
    n = len(x)
    for k in range(1, min(n, len(gens)) + 1):
        for sub in itertools.combinations(gens, k):
            sol = _solve(sub, x)
            if sol is not None and all(c >= 0 for c in sol):
                return True
    return False


def in_polyhedron(vertices, rays, x) -> bool:
    """x in conv(vertices) + cone(rays), via homogenization."""
    lifted = [tuple(v) + (1,) for v in vertices] + [tuple(r) + (0,) for r in rays]
    return in_cone(lifted, tuple(x) + (1,))


def extreme_points(points, rays):
    pts = sorted(set(tuple(Fraction(c) for c in p) for p in points))
    return sorted(p for p in pts if not in_polyhedron([q for q in pts if q != p], rays, p))


def dual_points(rays, n: int, b: int):
    """Lattice points of the dual cone within the box."""
    return {m for m in box(n, b) if all(dot(m, r) >= 0 for r in rays)}


def cone_points(rays, n: int, b: int):
    return {x for x in box(n, b) if in_cone(rays, x)}


def hilbert_basis(rays, n: int, b: int):
    """Irreducible nonzero lattice points of cone(rays) found in the box."""
    pts = cone_points(rays, n, b) - {(0,) * n}
    out = set()
    for x in pts:
        if not any(tuple(a - c for a, c in zip(x, y)) in pts for y in pts if y != x):
            out.add(x)
    return out


def is_root(rays, e):
    neg = [r for r in rays if dot(e, r) == -1]
    if len(neg) != 1:
        return None
    if any(dot(e, r) < 0 for r in rays if r != neg[0]):
        return None
    return neg[0]


def sl2_roots(rays, n: int, b: int):
    out = set()
    for e in box(n, b):
        if any(e) and is_root(rays, e) is not None and is_root(rays, tuple(-x for x in e)) is not None:
            out.add(e)
    return out


def support_value(vertices, m):
    return min(dot(m, v) for v in vertices)


def minkowski(*vertex_sets):
    return [tuple(sum(c) for c in zip(*combo)) for combo in itertools.product(*vertex_sets)]


def poly_eval(coeffs_low_first, x):
    acc = Fraction(0)
    for c in reversed(coeffs_low_first):
        acc = acc * x + c
    return acc
