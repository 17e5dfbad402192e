"""End-to-end acceptance checks; each prints one PASS/FAIL line."""

import itertools
import random
from fractions import Fraction

import pytest

import oracles
from tvarsl2.appendix import downgrading_eigenvalues, rational_identity, verify_commutator_one
from tvarsl2.appendix import verify_commutator_two
from tvarsl2.classify import (build_special, classify_fiber, classify_horizontal, classify_toric, is_special,
                              special_tail, verify_sl2_triple)
from tvarsl2.cones import Cone, Finite
from tvarsl2.corpus import all_actions, fiber_divisors, horizontal_divisors
from tvarsl2.curves import QDivisor
from tvarsl2.divisors import evaluate, toric_form
from tvarsl2.functions import MobiusMap
from tvarsl2.lnd import kernels_intersect_trivially
from tvarsl2.threefold import (build_threefold, height, height_from_slope, is_toric_threefold, recognize, slope,
                               stabilizer_order)

F = Fraction
HALF = F(1, 2)


@pytest.fixture
def report(capsys):
    def _report(n, ok, detail=""):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else ""))
        assert ok, detail
    return _report


def neg(v):
    return tuple(-x for x in v)


# 1 ------------------------------------------------------------------------


def test_criterion_1_root_counts(report):
    counts = {}
    for r in (2, 3, 4):
        basis = [tuple(int(i == j) for j in range(r)) for i in range(r)]
        counts[r] = len(Cone("N", basis).enumerate_sl2_roots().roots)
    report(1, all(counts[r] == r * (r - 1) for r in counts), f"counts {counts}")


# 2 ------------------------------------------------------------------------


def test_criterion_2_veronese(report):
    bad = []
    for a in range(1, 7):
        acts = classify_toric(Cone("N", [(1, 0), (a, a + 1)]))
        es = sorted(x.e for x in acts)
        eff = {x.effective == "SL2" for x in acts}
        if es != [(-1, 1), (1, -1)] or eff != {(a + 1) % 2 == 1}:
            bad.append(a)
    report(2, not bad, f"bad a: {bad}" if bad else "a = 1..6")


# 3 ------------------------------------------------------------------------


def random_cones(seed=2024, count=10):
    """Pointed cones of rank 2 or 3, not necessarily full-dimensional."""
    rnd = random.Random(seed)
    out = []
    while len(out) < count:
        n = rnd.choice([2, 3])
        k = rnd.randint(n - 1, n + 1)
        rays = [tuple(rnd.randint(-4, 4) for _ in range(n)) for _ in range(k)]
        if not all(any(r) for r in rays):
            continue
        c = Cone("N", rays)
        if c.is_pointed:
            out.append(c)
    return out


def solved_roots(c, b):
    """SL2-roots from linear solving; affine families are expanded inside the box."""
    res = c.enumerate_sl2_roots()
    if isinstance(res, Finite):
        return {r.e.coords for r in res.roots}
    out = set()
    for root, kernel in res.families:
        ks = [k.coords for k in kernel]
        for coeffs in itertools.product(range(-5 * b, 5 * b + 1), repeat=len(ks)):
            e = tuple(x + sum(cf * k[i] for cf, k in zip(coeffs, ks)) for i, x in enumerate(root.e.coords))
            if all(abs(x) <= b for x in e):
                out.add(e)
    return out


def test_criterion_3_oracle_agreement(report):
    mismatches, kinds = [], []
    for c in random_cones():
        n = c.rank
        kinds.append(f"{n}/{c.dim}")
        if solved_roots(c, 12) != oracles.sl2_roots(c.rays, n, 12):
            mismatches.append(("roots", c.rays))
        dual = c.dual()
        for m in oracles.box(n, 6):
            if (m in dual) != all(oracles.dot(m, r) >= 0 for r in c.rays):
                mismatches.append(("dual", c.rays, m))
                break
    report(3, not mismatches, f"{mismatches}" if mismatches else "rank/dim " + " ".join(kinds))


# 4 ------------------------------------------------------------------------


def test_criterion_4_fiber_segment(report):
    D = fiber_divisors()["z3_segment"]
    e = (-1, 1, 0)
    accepted = any(a.e == e for a in classify_fiber(D))
    cancel = (evaluate(D, e) + evaluate(D, neg(e))).is_zero
    tf = toric_form(D)
    expected = {(1, 1, -1, 1), (-1, -1, 1, 1), (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)}
    rays_ok = tf is not None and set(tf.cone.rays) == expected
    lifted = tf is not None and tf.cone.is_sl2_root(e + (0,)) is not None
    report(4, accepted and cancel and rays_ok and lifted,
           f"accepted={accepted} cancel={cancel} rays={rays_ok} lifted={lifted}")


# 5 ------------------------------------------------------------------------


CHARTS = {"t": MobiusMap(1, 0, 0, 1), "t-5": MobiusMap(1, -5, 0, 1), "(t+1)/(2t+1)": MobiusMap(1, 1, 2, 1)}


def _probes(rs):
    return [(m, r) for m in Cone("N", [(1, 0), (1, 2)]).dual().hilbert_basis() for r in rs]


def test_criterion_5_appendix(report):
    # checked exactly as stated: "Gamma vanishes identically iff c = 0 and d+ = d-"
    problems = []
    if not rational_identity().is_zero:
        problems.append("rational identity is not zero")
    for name, mob in CHARTS.items():
        n = mob.det_one()
        for dp in (1, 2):
            for dm in (1, 2):
                res = verify_commutator_one(mob, dp, dm)
                if res["gamma_is_zero"] != (n.c == 0 and dp == dm):
                    problems.append(f"q={name} d+={dp} d-={dm}: Gamma={res['gamma']}")
    e = (-1, 1)
    pr = _probes([0, 1, 2])
    lam = downgrading_eigenvalues(1, e, (0, 0), (-1, 0), {1: (0, -1)}, pr)
    p2 = (-1, 1)
    if not verify_commutator_two(1, e, (0, 0), (-1, 0), {1: (0, -1)}, pr)["all_match"] or \
            lam != [oracles.dot(m, p2) for m, _ in pr]:
        problems.append("first family eigenvalues")
    pr = _probes([0, HALF, 1])
    lam = downgrading_eigenvalues(2, e, (0, HALF), (0, HALF), {1: (0, -1)}, pr)
    p3 = (0, 2)
    if not verify_commutator_two(2, e, (0, HALF), (0, HALF), {1: (0, -1)}, pr)["all_match"] or \
            lam != [oracles.dot(m, p3) for m, _ in pr]:
        problems.append("second family eigenvalues")
    report(5, not problems, "; ".join(problems) if problems else "grid of 12 charts and degrees")


# 6 ------------------------------------------------------------------------


def test_criterion_6_triple_suite(report):
    failed, total = [], 0
    for name, acts in all_actions().items():
        for a in acts:
            total += 1
            rep = verify_sl2_triple(a)
            if not rep.ok or oracles.dot(a.e, a.p) != 2:
                failed.append((name, a.e, [c.name for c in rep.failed()]))
    report(6, not failed, f"{failed}" if failed else f"{total} descriptors")


# 7 ------------------------------------------------------------------------


GRID = [(r, a) for r in (1, 2, 3, 4) for a in (HALF, F(1), F(3, 2), F(2), F(7, 3))]


def test_criterion_7_threefold_table(report):
    bad = []
    for r, a in GRID:
        X = build_threefold("P1Family", r, a)
        Y = recognize(X.divisor)
        hb, h = slope(X), height(X)
        cert = is_toric_threefold(X)
        checks = [
            stabilizer_order(X) == r,
            hb == a / (a + 1),
            h == a / (a + r),
            h == height_from_slope(r, hb),
            cert.a_integral == cert.slope_criterion == cert.height_criterion == cert.divisor_toric_form,
            cert.divisor_toric_form == (toric_form(X.divisor) is not None),
            Y is not None and (Y.family, Y.r, Y.a) == (X.family, r, a),
        ]
        if not all(checks):
            bad.append((r, str(a), checks))
    report(7, not bad, f"{bad}" if bad else f"{len(GRID)} grid points")


# 8 ------------------------------------------------------------------------


def test_criterion_8_special(report):
    bad = []
    for r in (1, 2, 3):
        for H in (QDivisor("P1", {0: 1}), QDivisor("P1", {0: HALF, 1: HALF})):
            S = build_special(r, H)
            hilbert = special_tail(r).dual().hilbert_basis()
            evals_ok = all(evaluate(S.divisor, m) == H.scale(m[0] + m[1]) for m in hilbert)
            acts = classify_fiber(S.divisor)
            accepted = any(a.e == S.action.e for a in acts)
            special = is_special(S.action)[0] and all(is_special(a)[0] for a in acts)
            if not (evals_ok and accepted and special):
                bad.append((r, str(H), evals_ok, accepted, special))
    report(8, not bad, f"{bad}" if bad else "r = 1,2,3 for both H")


# 9 ------------------------------------------------------------------------


def test_criterion_9_kernels(report):
    table = [build_threefold("P1Family", r, a) for r, a in GRID]
    table += [build_threefold(f, r) for f in ("A1Homogeneous", "A1Cone") for r in (1, 2, 3, 4)]
    trivial = all(kernels_intersect_trivially(X.action.plus, X.action.minus) for X in table)
    second = classify_horizontal(horizontal_divisors()["half_vertex"])
    meets = bool(second) and all(a.family == 2 and not kernels_intersect_trivially(a.plus, a.minus)
                                 for a in second)
    report(9, trivial and meets, f"{len(table)} table instances trivial={trivial}, second family meets={meets}")
