"""Canonical JSON for the domain types: sorted keys, rationals as "p/q" strings."""
from __future__ import annotations

import ast
import json
from fractions import Fraction
from typing import Any

from .cones import Cone
from .curves import INF, Curve, QDivisor, as_point, point_key, point_str
from .divisors import PolyhedralDivisor, SigmaPolyhedron
from .errors import ParseError
from .functions import MobiusMap, RationalFunction, T
from .lattice import Side

SCHEMA_VERSION = "1"


def q(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_q(s) -> Fraction:
    if isinstance(s, bool):
        raise ParseError(f"not a rational number: {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        try:
            return Fraction(s.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"not a rational number: {s!r}") from exc
    raise ParseError(f"not a rational number: {s!r}")


def vec(v) -> list:
    return [q(x) for x in v]


def parse_vec(v) -> tuple:
    if not isinstance(v, (list, tuple)):
        raise ParseError(f"expected a vector, got {v!r}")
    return tuple(parse_q(x) for x in v)


def parse_int_vec(v) -> tuple:
    out = parse_vec(v)
    if any(x.denominator != 1 for x in out):
        raise ParseError(f"expected an integer vector, got {v!r}")
    return tuple(int(x) for x in out)


def point(z) -> str:
    return point_str(z)


def parse_point(s):
    try:
        return as_point(s)
    except Exception as exc:  # as_point raises on malformed strings
        raise ParseError(f"not a curve point: {s!r}") from exc


def canonical(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _need(d: dict, key: str):
    if not isinstance(d, dict) or key not in d:
        raise ParseError(f"missing field {key!r}")
    return d[key]


# -- cones -----------------------------------------------------------------


def cone_json(c: Cone) -> dict:
    return {"type": "cone", "side": c.side.value, "rank": c.rank,
            "rays": [vec(r) for r in c.rays], "lineality": [vec(v) for v in c.lineality]}


def parse_cone(d: dict) -> Cone:
    try:
        side = Side(d.get("side", "N"))
    except ValueError as exc:
        raise ParseError(f"bad side {d.get('side')!r}") from exc
    rays = [parse_vec(r) for r in d.get("rays", [])]
    lin = [parse_vec(v) for v in d.get("lineality", [])]
    rank = d.get("rank")
    if rank is None and not rays and not lin:
        raise ParseError("a cone without rays needs a rank")
    if rank is not None and (not isinstance(rank, int) or isinstance(rank, bool) or rank < 1):
        raise ParseError(f"bad rank {rank!r}")
    return Cone(side, rays, lin, rank=rank)


# -- divisors --------------------------------------------------------------


def polyhedron_json(p: SigmaPolyhedron) -> dict:
    return {"vertices": [vec(v) for v in p.vertices]}


def divisor_json(D: PolyhedralDivisor) -> dict:
    return {"type": "divisor", "curve": D.curve.value, "tail": cone_json(D.tail),
            "slices": [{"point": point(z), "vertices": [vec(v) for v in d.vertices]} for z, d in D.slices]}


def parse_divisor(d: dict) -> PolyhedralDivisor:
    try:
        curve = Curve(_need(d, "curve"))
    except ValueError as exc:
        raise ParseError(f"bad curve {d.get('curve')!r}") from exc
    tail = parse_cone(_need(d, "tail"))
    slices = []
    for s in d.get("slices", []):
        slices.append((parse_point(_need(s, "point")), [parse_vec(v) for v in _need(s, "vertices")]))
    return PolyhedralDivisor(curve, tail, slices)


def qdivisor_json(D: QDivisor) -> dict:
    return {"type": "qdivisor", "curve": D.curve.value,
            "coefficients": [{"point": point(z), "value": q(c)} for z, c in D.coefficients]}


def parse_qdivisor(d: dict) -> QDivisor:
    try:
        curve = Curve(_need(d, "curve"))
    except ValueError as exc:
        raise ParseError(f"bad curve {d.get('curve')!r}") from exc
    return QDivisor(curve, [(parse_point(_need(c, "point")), parse_q(_need(c, "value")))
                            for c in d.get("coefficients", [])])


# -- functions -------------------------------------------------------------


def function_json(f: RationalFunction) -> dict:
    out = {"type": "function", "num": vec(f.num), "den": vec(f.den), "text": str(f)}
    if not f.is_zero and f.splits():
        lead, fac = f.factorization()
        out["lead"] = q(lead)
        out["factors"] = [{"root": q(z), "mult": k} for z, k in fac.items()]
    return out


def parse_function(d) -> RationalFunction:
    if isinstance(d, str):
        return parse_expression(d)
    if isinstance(d, (int, Fraction)) and not isinstance(d, bool):
        return RationalFunction.const(d)
    if isinstance(d, dict) and "num" not in d and "lead" in d:
        factors = {}
        for f in d.get("factors", []):
            k = _need(f, "mult")
            if not isinstance(k, int) or isinstance(k, bool):
                raise ParseError(f"bad multiplicity {k!r}")
            factors[parse_q(_need(f, "root"))] = k
        lead = parse_q(d["lead"])
        if lead == 0:
            raise ParseError("zero leading coefficient")
        return RationalFunction.factored(lead, factors)
    num = parse_vec(_need(d, "num"))
    den = parse_vec(d.get("den", ["1"]))
    if not any(den):
        raise ParseError("zero denominator")
    return RationalFunction(num, den)


_BIN = {ast.Add: lambda a, b: a + b, ast.Sub: lambda a, b: a - b,
        ast.Mult: lambda a, b: a * b, ast.Div: lambda a, b: a / b}


def parse_expression(s: str) -> RationalFunction:
    """A rational function of t written with + - * / ** and rational constants; '2t' means 2*t."""
    import re

    text = re.sub(r"(\d)\s*t", r"\1*t", s.replace("^", "**"))
    text = re.sub(r"\)\s*\(", ")*(", text)
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse expression {s!r}") from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return RationalFunction.const(node.value)
        if isinstance(node, ast.Name) and node.id == "t":
            return T
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BIN:
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Div) and b.is_zero:
                raise ParseError("division by zero")
            return _BIN[type(node.op)](a, b)
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Pow):
            base = ev(node.left)
            if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)) \
                    and not (isinstance(node.right, ast.UnaryOp) and isinstance(node.right.operand, ast.Constant)):
                raise ParseError("exponents must be integer literals")
            k = ev(node.right).constant_value()
            if k.denominator != 1:
                raise ParseError("exponents must be integers")
            if k < 0 and base.is_zero:
                raise ParseError("division by zero")
            return base ** int(k)
        raise ParseError(f"unsupported syntax in {s!r}")

    return ev(tree)


def mobius_json(m: MobiusMap) -> dict:
    return {"type": "mobius", "a": q(m.a), "b": q(m.b), "c": q(m.c), "d": q(m.d)}


def parse_mobius(d: dict) -> MobiusMap:
    return MobiusMap(*(parse_q(_need(d, k)) for k in "abcd"))


def parse_any(d: dict):
    kind = d.get("type") if isinstance(d, dict) else None
    table = {"cone": parse_cone, "divisor": parse_divisor, "qdivisor": parse_qdivisor,
             "function": parse_function, "mobius": parse_mobius}
    if kind not in table:
        raise ParseError(f"unknown or missing type {kind!r}")
    return table[kind](d)


def to_json(x) -> dict:
    if isinstance(x, Cone):
        return cone_json(x)
    if isinstance(x, PolyhedralDivisor):
        return divisor_json(x)
    if isinstance(x, QDivisor):
        return qdivisor_json(x)
    if isinstance(x, RationalFunction):
        return function_json(x)
    if isinstance(x, MobiusMap):
        return mobius_json(x)
    raise TypeError(f"no JSON form for {type(x).__name__}")


# -- LNDs and actions ------------------------------------------------------


def lnd_json(lnd) -> dict:
    from .lnd import FiberLND

    if isinstance(lnd, FiberLND):
        return {"kind": "toric" if lnd.is_toric else "fiber", "e": vec(lnd.e), "phi": function_json(lnd.phi),
                "rho": vec(lnd.rho)}
    c = lnd.coloring
    return {"kind": "horizontal", "e": vec(lnd.e), "d": lnd.d, "s": q(lnd.s),
            "marked_point": point(c.z0), "z_inf": None if c.z_inf is None else point(c.z_inf),
            "coloring": [{"point": point(z), "vertex": vec(v)} for z, v in c.chosen]}


def action_json(a, special: tuple | None = None) -> dict:
    from .classify import is_special

    sp = special if special is not None else is_special(a)
    norm = {}
    if a.normalization:
        norm = {"mobius": mobius_json(a.normalization["mobius"]),
                "shifts": [{"point": point(z), "move": vec(v)}
                           for z, v in sorted(a.normalization["moves"].items(), key=lambda kv: point_key(kv[0]))]}
    out = {"kind": a.kind, "e": vec(a.e), "p": vec(a.p), "effective": a.effective,
           "special": sp[0], "special_reason": sp[1], "lnds": [lnd_json(a.plus), lnd_json(a.minus)],
           "normalization": norm, "conjugate_e": vec(a.conjugate_e),
           "label": "Lie-algebra verified"}
    if a.family is not None:
        out["family"] = a.family
    if a.divisor is not None:
        out["divisor"] = divisor_json(a.divisor)
    return out


def report_json(rep) -> list:
    return [{"check": c.name, "ok": c.ok, "detail": c.detail} for c in rep.checks]
