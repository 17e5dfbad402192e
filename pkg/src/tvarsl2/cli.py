"""Command-line front end.

    tvarsl2 cone dual|hilbert|roots|sl2-roots --input cone.json
    tvarsl2 divisor eval|proper|toric|shift --input divisor.json [--m 1,0] [--moves JSON]
    tvarsl2 lnd apply|kernel|verify --input lnd.json [--m 1,0 --r 0]
    tvarsl2 sl2 classify|verify|special --input cone-or-divisor.json
    tvarsl2 sl2 build-special --r 2 --H '{"0": "1/2", "1": "1/2"}'
    tvarsl2 threefold build|invariants --family P1 --r 2 --a 3/2
    tvarsl2 threefold recognize|invariants --input divisor.json
    tvarsl2 appendix verify --q "t" --dplus 1 --dminus 1

Exit codes: 0 success, 2 parse error, 3 domain error, 4 internal invariant breach.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction

from . import serialize as S
from .errors import DomainError, InvariantBreach, ParseError, TvarError

EXIT = {"parse": 2, "domain": 3, "invariant": 4}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tvarsl2", description="Exact SL2-actions on T-varieties of complexity at most one.")
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.add_argument("--verify", action="store_true", help="also run the invariant suites on the results")
    p.add_argument("--probe-bound", type=int, default=8)
    sub = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def add(group, actions, **extra):
        g = sub.add_parser(group)
        g.add_argument("action", choices=actions)
        g.add_argument("--input")
        for flag, kw in extra.items():
            g.add_argument("--" + flag.replace("_", "-"), **kw)
        # global flags are also accepted after the subcommand
        g.add_argument("--format", choices=["json", "text"], default=argparse.SUPPRESS)
        g.add_argument("--verify", action="store_true", default=argparse.SUPPRESS)
        g.add_argument("--probe-bound", type=int, default=argparse.SUPPRESS)
        return g

    add("cone", ["dual", "hilbert", "roots", "sl2-roots"])
    add("divisor", ["eval", "proper", "toric", "shift"], m={}, moves={})
    add("lnd", ["apply", "kernel", "verify"], m={}, r={"default": "0"})
    add("sl2", ["classify", "verify", "special", "build-special"], roots={}, r={}, H={}, curve={"default": "P1"})
    add("threefold", ["build", "recognize", "invariants"], family={}, r={}, a={})
    add("appendix", ["verify"], q={"default": "t"}, dplus={"type": int, "default": 1},
        dminus={"type": int, "default": 1})
    return p


# -- input helpers ---------------------------------------------------------


def _load(args) -> dict:
    if not args.input:
        raise ParseError("--input is required")
    try:
        with open(args.input, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {args.input}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {args.input}: {exc.msg}") from exc


def _csv_vec(s: str, name: str) -> tuple:
    if s is None:
        raise ParseError(f"--{name} is required")
    try:
        return tuple(Fraction(x.strip()) for x in s.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad vector for --{name}: {s!r}") from exc


def _json_arg(s: str, name: str):
    try:
        return json.loads(s)
    except (TypeError, json.JSONDecodeError) as exc:
        raise ParseError(f"--{name} must be JSON") from exc


def _int_arg(s, name) -> int:
    if s is None:
        raise ParseError(f"--{name} is required")
    try:
        return int(s)
    except ValueError as exc:
        raise ParseError(f"--{name} must be an integer") from exc


def _seed() -> int:
    try:
        return int(os.environ.get("TVARSL2_SEED", "0"))
    except ValueError as exc:
        raise ParseError("TVARSL2_SEED must be an integer") from exc


def _random_probes(rank: int, bound: int, with_t: bool):
    from .functions import ONE
    from .terms import GradedTerm

    rng = random.Random(_seed())
    out = []
    for _ in range(4):
        m = tuple(rng.randint(-bound, bound) for _ in range(rank))
        out.append(GradedTerm(ONE, m, rng.randint(0, 2) if with_t else 0))
    return out


# -- commands --------------------------------------------------------------


def cmd_cone(args):
    from .cones import Affine

    c = S.parse_cone(_load(args))
    if args.action == "dual":
        return S.cone_json(c.dual()), None
    if args.action == "hilbert":
        return {"hilbert_basis": [S.vec(v) for v in c.hilbert_basis()]}, None
    if args.action == "roots":
        # Demazure roots are infinite in number; list those with |coordinates| <= probe bound
        import itertools

        if not c.is_pointed:
            raise DomainError("roots need a pointed cone")
        b = args.probe_bound
        out = []
        for e in itertools.product(range(-b, b + 1), repeat=c.rank):
            r = c.is_root(e)
            if r is not None:
                out.append({"e": S.vec(e), "ray": S.vec(r.distinguished_ray.coords)})
        return {"bound": b, "roots": out}, None
    res = c.enumerate_sl2_roots()
    if isinstance(res, Affine):
        return {"affine_families": [{"particular": S.vec(f[0].e.coords if hasattr(f[0], "e") else f[0]),
                                     "kernel_basis": [S.vec(k) for k in f[1]]} for f in res.families]}, None
    return {"sl2_roots": [{"e": S.vec(r.e.coords), "rho_plus": S.vec(r.rho_plus.coords),
                           "rho_minus": S.vec(r.rho_minus.coords), "p": S.vec(r.p.coords)} for r in res.roots]}, None


def cmd_divisor(args):
    from .divisors import evaluate, is_proper, shift, toric_form

    D = S.parse_divisor(_load(args))
    if args.action == "eval":
        return S.qdivisor_json(evaluate(D, _csv_vec(args.m, "m"))), None
    if args.action == "proper":
        pr = is_proper(D)
        return {"proper": pr.proper, "reason": pr.reason,
                "witness": None if pr.witness is None else S.vec(pr.witness)}, None
    if args.action == "toric":
        tf = toric_form(D)
        if tf is None:
            return {"toric_form": None}, None
        return {"toric_form": {"cone": S.cone_json(tf.cone), "points": [S.point(z) for z in tf.points],
                               "moves": [{"point": S.point(z), "move": S.vec(v)} for z, v in tf.moves.items()],
                               "shifted": S.divisor_json(tf.shifted)}}, None
    moves = _json_arg(args.moves, "moves") if args.moves else {}
    if not isinstance(moves, dict):
        raise ParseError("--moves must map points to vectors")
    mv = {S.parse_point(z): S.parse_int_vec(v) for z, v in moves.items()}
    return S.divisor_json(shift(D, mv)), None


def parse_lnd(d: dict):
    from .functions import ONE
    from .lnd import CoherentPair, Coloring, FiberLND, HorizontalLND

    kind = S._need(d, "kind")
    e = S.parse_int_vec(S._need(d, "e"))
    if kind in ("fiber", "toric"):
        divisor = S.parse_divisor(d["divisor"]) if d.get("divisor") else None
        tail = divisor.tail if divisor is not None else S.parse_cone(S._need(d, "tail"))
        phi = S.parse_function(d["phi"]) if "phi" in d else ONE
        return FiberLND(tail, e, phi, divisor)
    if kind == "horizontal":
        D = S.parse_divisor(S._need(d, "divisor"))
        chosen = {S.parse_point(c["point"]): S.parse_vec(c["vertex"]) for c in S._need(d, "coloring")}
        zinf = d.get("z_inf")
        z0 = d.get("marked_point")
        col = Coloring(D, chosen, S.parse_point(zinf) if zinf is not None else None,
                       S.parse_point(z0) if z0 is not None else None)
        return HorizontalLND(CoherentPair(col, e))
    raise ParseError(f"unknown LND kind {kind!r}")


def _sum_json(x) -> list:
    return [{"coeff": S.function_json(t.coeff), "m": S.vec(t.m), "t_exp": S.q(t.t_exp), "q_exp": S.q(t.q_exp),
             "q": None if t.q is None else S.function_json(t.q)} for t in x.terms]


def cmd_lnd(args):
    from .classify import nilpotency_probes
    from .functions import ONE
    from .lnd import iterate_to_zero, validate_coherent
    from .terms import GradedTerm

    lnd = parse_lnd(_load(args))
    if args.action == "apply":
        m = tuple(int(x) for x in _csv_vec(args.m, "m"))
        r = S.parse_q(args.r)
        x = GradedTerm(ONE, m, r, 0, getattr(lnd, "d", 1))
        return {"input": _sum_json(_as_sum(x)), "output": _sum_json(lnd.derivation()(x))}, None
    if args.action == "kernel":
        cone, basis = lnd.kernel_cone()
        return {"cone": S.cone_json(cone), "lattice": None if basis is None else [S.vec(b) for b in basis],
                "generators": [S.vec(g) if isinstance(g, tuple) else repr(g) for g in lnd.kernel_generators()]}, None
    rows = []
    for x, pred in nilpotency_probes(lnd):
        got = iterate_to_zero(lnd, x, max(args.probe_bound, (pred or 0) + 1))
        rows.append({"probe": repr(x), "index": got, "predicted": pred, "ok": pred is None or got == pred})
    out = {"nilpotency": rows, "ok": all(r["ok"] for r in rows)}
    if lnd.kind == "horizontal":
        rep = validate_coherent(lnd.pair)
        out["coherence"] = S.report_json(rep)
        out["ok"] = out["ok"] and rep.ok
    return out, None


def _as_sum(x):
    from .terms import GradedSum

    return GradedSum([x])


def _classify_input(args):
    from .classify import classify_fiber, classify_horizontal, classify_toric

    d = _load(args)
    reps = _json_arg(args.roots, "roots") if getattr(args, "roots", None) else None
    if reps is not None:
        reps = [S.parse_int_vec(v) for v in reps]
    if isinstance(d, dict) and d.get("type") == "cone":
        return classify_toric(S.parse_cone(d), reps)
    D = S.parse_divisor(d)
    return classify_fiber(D, reps) + classify_horizontal(D)


def _verification(actions, args) -> dict:
    from .classify import verify_sl2_triple
    from .lnd import default_probes, validate_coherent

    suites = []
    for a in actions:
        with_t = a.kind != "toric"
        tail = a.plus.tail if a.kind != "horizontal" else a.divisor.tail
        probes = default_probes(len(a.e), tail, with_t) + _random_probes(len(a.e), args.probe_bound, with_t)
        rep = verify_sl2_triple(a, probes)
        entry = {"e": S.vec(a.e), "sl2_triple": S.report_json(rep), "ok": rep.ok}
        if a.kind == "horizontal":
            for name, lnd in (("coherent_plus", a.plus), ("coherent_minus", a.minus)):
                r = validate_coherent(lnd.pair)
                entry[name] = r.ok
                entry["ok"] = entry["ok"] and r.ok
        suites.append(entry)
    return {"suites": suites, "seed": _seed(), "ok": all(s["ok"] for s in suites)}


def cmd_sl2(args):
    from .classify import build_special, is_special
    from .curves import QDivisor

    if args.action == "build-special":
        r = _int_arg(args.r, "r")
        if args.H is not None:
            h = _json_arg(args.H, "H")
            if not isinstance(h, dict):
                raise ParseError("--H must map points to coefficients")
            H = QDivisor(args.curve, {S.parse_point(z): S.parse_q(c) for z, c in h.items()})
        else:
            H = S.parse_qdivisor(_load(args))
        sp = build_special(r, H)
        res = {"r": sp.r, "H": S.qdivisor_json(sp.H), "divisor": S.divisor_json(sp.divisor),
               "action": S.action_json(sp.action), "invariant_grading": sp.invariant_grading,
               "generic_isotropy": sp.generic_isotropy}
        return res, [sp.action]
    acts = _classify_input(args)
    if args.action == "special":
        out = []
        for a in acts:
            ok, why = is_special(a)
            out.append({"e": S.vec(a.e), "kind": a.kind, "special": ok, "reason": why})
        return {"actions": out}, acts
    res = {"count": len(acts), "actions": [S.action_json(a) for a in acts]}
    if args.action == "verify":
        args.verify = True
    return res, acts


def _threefold_from_args(args):
    from .threefold import build_threefold, recognize

    if args.input:
        D = S.parse_divisor(_load(args))
        X = recognize(D)
        if X is None:
            raise DomainError("the divisor is not equivalent to a table row")
        return X
    if args.family is None:
        raise ParseError("--family (or --input) is required")
    a = S.parse_q(args.a) if args.a is not None else None
    return build_threefold(args.family, _int_arg(args.r, "r"), a)


def _threefold_json(X) -> dict:
    out = {"family": X.family.value, "r": X.r, "a": None if X.a is None else S.q(X.a),
           "divisor": S.divisor_json(X.divisor), "homogeneous": X.homogeneous,
           "action": S.action_json(X.action), "N_X": X.orbit_count, "N_X_note": "unproved metadata"}
    if X.recognition:
        rc = X.recognition
        out["recognition"] = {"lattice_map": [list(row) for row in rc["lattice_map"]],
                              "mobius": S.mobius_json(rc["mobius"]),
                              "shifts": [{"point": S.point(z), "move": S.vec(v)} for z, v in rc["moves"].items()]}
    return out


def cmd_threefold(args):
    from .threefold import invariants, recognize

    if args.action == "recognize":
        D = S.parse_divisor(_load(args))
        X = recognize(D)
        return {"recognized": None if X is None else _threefold_json(X)}, None if X is None else [X.action]
    X = _threefold_from_args(args)
    if args.action == "build":
        return _threefold_json(X), [X.action]
    iv = invariants(X)
    return {"family": X.family.value, "r": X.r, "a": None if X.a is None else S.q(X.a), "r_X": iv.r_X,
            "slope": None if iv.slope is None else S.q(iv.slope),
            "height": None if iv.height is None else S.q(iv.height),
            "toric": iv.toric, "homogeneous": iv.homogeneous, "N_X": iv.N_X}, [X.action]


def cmd_appendix(args):
    from .appendix import rational_identity, verify_commutator_one
    from .functions import MobiusMap

    f = S.parse_expression(args.q)
    if len(f.num) > 2 or len(f.den) > 2 or f.is_constant:
        raise DomainError("q must be a Moebius function of t")
    a, b = (f.num + (Fraction(0), Fraction(0)))[1], (f.num + (Fraction(0),))[0]
    c, d = (f.den + (Fraction(0), Fraction(0)))[1], f.den[0]
    mob = MobiusMap(a, b, c, d)
    res = verify_commutator_one(mob, args.dplus, args.dminus)
    return {"q": S.function_json(f), "dplus": args.dplus, "dminus": args.dminus,
            "gamma": S.function_json(res["gamma"]), "gamma_is_zero": res["gamma_is_zero"],
            "delta_t_is_zero": res["delta_t"].is_zero, "closed_form_matches": res["closed_form_matches"],
            "expanded_matches": res["expanded_matches"],
            "printed_expansion_matches": res["printed_expansion_matches"],
            "rational_identity_is_zero": rational_identity().is_zero}, None


COMMANDS = {"cone": cmd_cone, "divisor": cmd_divisor, "lnd": cmd_lnd, "sl2": cmd_sl2,
            "threefold": cmd_threefold, "appendix": cmd_appendix}


# -- output ----------------------------------------------------------------


def _tup(v) -> str:
    return "(" + ",".join(v) + ")"


def _text(cert: dict) -> str:
    res = cert["result"]
    cmd = cert["command"]
    lines = []
    if cmd[:2] == ["threefold", "invariants"]:
        cols = ["C", "sigma", "r_X", "h_X", "hbar_X", "N_X", "toric"]
        curve = {"A1Homogeneous": "A1", "A1Cone": "A1", "P1Family": "P1"}[res["family"]]
        sigma = {"A1Homogeneous": "{0}", "A1Cone": "cone((1,1))",
                 "P1Family": "cone((a+1,a),(r+a-1,r+a))"}[res["family"]]
        vals = [curve, sigma, str(res["r_X"]), res["height"] or "--", res["slope"] or "--",
                str(res["N_X"]), str(res["toric"]).lower()]
        w = [max(len(a), len(b)) for a, b in zip(cols, vals)]
        lines.append("  ".join(c.ljust(n) for c, n in zip(cols, w)))
        lines.append("  ".join(v.ljust(n) for v, n in zip(vals, w)))
    elif isinstance(res, dict) and "actions" in res:
        lines.append(f"{len(res['actions'])} action(s)")
        for a in res["actions"]:
            extra = f" p={_tup(a['p'])} {a['effective']} special={str(a['special']).lower()}" if "p" in a else \
                f" special={str(a['special']).lower()}"
            lines.append(f"  {a['kind']:<10} e={_tup(a['e'])}" + extra)
    else:
        for k in sorted(res) if isinstance(res, dict) else []:
            v = res[k]
            lines.append(f"{k}: {S.canonical(v) if isinstance(v, (dict, list)) else v}")
    if cert.get("verification", {}).get("suites"):
        lines.append("verification: " + ("ok" if cert["verification"]["ok"] else "FAILED"))
    return "\n".join(lines) + "\n"


def run(argv) -> tuple:
    """(exit code, output text)."""
    argv = list(argv)
    fmt = "json"
    try:
        args = build_parser().parse_args(argv)
        fmt = args.format
        if args.probe_bound < 1:
            raise ParseError("--probe-bound must be positive")
        result, actions = COMMANDS[args.group](args)
        verification = {"suites": []}
        if args.verify and actions:
            verification = _verification(actions, args)
        cert = {"schema_version": S.SCHEMA_VERSION, "command": argv, "result": result,
                "verification": verification}
        if verification.get("ok") is False:
            return EXIT["invariant"], _emit(cert, fmt)
        return 0, _emit(cert, fmt)
    except ParseError as exc:
        return EXIT["parse"], _error("parse", exc, argv, fmt)
    except InvariantBreach as exc:
        return EXIT["invariant"], _error("invariant", exc, argv, fmt)
    except DomainError as exc:
        return EXIT["domain"], _error("domain", exc, argv, fmt)
    except TvarError as exc:
        return EXIT["invariant"], _error("invariant", exc, argv, fmt)
    except (ValueError, TypeError, KeyError, ZeroDivisionError) as exc:
        # malformed values deep inside an input document
        return EXIT["parse"], _error("parse", exc, argv, fmt)
    except Exception as exc:  # never crash: report as an internal error
        return EXIT["invariant"], _error("internal", exc, argv, fmt)


def _emit(cert: dict, fmt: str) -> str:
    return _text(cert) if fmt == "text" else S.canonical(cert) + "\n"


def _error(kind: str, exc: Exception, argv, fmt: str) -> str:
    obj = {"schema_version": S.SCHEMA_VERSION, "command": argv,
           "error": {"kind": kind, "type": type(exc).__name__, "message": str(exc)}}
    if fmt == "text":
        return f"error ({kind}): {exc}\n"
    return S.canonical(obj) + "\n"


def main(argv=None) -> int:
    code, out = run(sys.argv[1:] if argv is None else argv)
    (sys.stderr if code else sys.stdout).write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
