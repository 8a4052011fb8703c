"""Acceptance gate: one PASS/FAIL line per criterion 1-11.

Run with ``pytest tests/test_acceptance.py -v`` (lines appear in the
terminal summary and in acceptance_log.txt) or directly with
``python3 tests/test_acceptance.py``.
"""

import itertools
import sys

import pytest

from conftest import record
from corpus import corpus, zero_set
from ulm import model as M
from ulm import oracle
from ulm import verify as V
from ulm.ideal import Ideal, saturate

DEFAULTS = V.default_config()


def _failed(reports):
    return [f"{r.check_id}@{r.chart}: {r.witness}" for r in reports if r.status != V.PASS]


def criterion_1():
    reports = []
    for n, k in [(4, 1), (5, 1), (5, 2), (6, 1), (6, 2)]:
        for _cls, (a, b) in M.representatives(M.instance(n, k)):
            reports.append(V.check_kramer_implies_spin(n, k, a, b, DEFAULTS))
    bad = _failed(reports)
    return not bad, f"Kramer => spin on {len(reports)} charts" + (f"; {bad[0]}" if bad else "")


def criterion_2():
    targets = [(5, 1, a, b) for _c, (a, b) in M.representatives(M.instance(5, 1)) if _c != "iv"] + [(4, 1, 2, 1)]
    reports = [V.check_presentation(*t, DEFAULTS) for t in targets]
    bad = _failed(reports)
    return not bad, f"presentations {[r.chart for r in reports]}" + (f"; {bad[0]}" if bad else "")


def criterion_3():
    notes, ok = [], True
    for family, size in (("class", 4), ("spl", 3)):
        r = V.check_fiber_decomposition(5, 1, 3, 1, family, DEFAULTS)
        spec = M.build_components(M.build_chart(family, 5, 1, (3, 1)))
        if r.status != V.PASS or len(spec.components) != size:
            ok = False
            notes.append(f"{family}: {r.status} with {len(spec.components)} components")
        for c in spec.components:
            cert = M.affine_certificate(c.ideal)
            counts = [oracle.count_affine(c.ideal, q).count for q in (3, 5)]
            if not cert.affine or counts != [81, 625]:
                ok = False
                notes.append(f"{family} {c.name}: {cert.shape}, counts {counts[0]}/{counts[1]}")
    detail = "(5,1,3,1) equalities hold; " + ("all components A^4 with 81/625 points" if ok else "; ".join(notes))
    return ok, detail


def criterion_4():
    reports = [V.check_flatness_witness(5, 1, 3, 1, DEFAULTS), V.check_flatness_witness(5, 1, 1, 1, DEFAULTS)]
    bad = _failed(reports)
    return not bad, "pi in I(U)+<mu> (i:3,1), pi in I(U)+<lam> (ii:1,1), pi not in I(U')" + (f"; {bad[0]}" if bad else "")


def criterion_5():
    r = V.check_semistable_form(6, 1, 2, 1, DEFAULTS, qs=(3,))
    return r.status == V.PASS, "(6,1) i:2,1 elimination equal; " + ", ".join(r.notes) if r.status == V.PASS else str(r.witness)


def criterion_6():
    inst = M.instance(5, 1)
    reports = []
    for cls in ("i", "ii", "iii", "iv"):
        g, e = V.chart_representatives(inst, (cls,), blowup=True)[0]
        reports.append(V.check_blowup_iso(5, 1, g, e, DEFAULTS))
    bad = _failed(reports)
    return not bad, f"blow-up charts {[r.chart for r in reports]}" + (f"; {bad[0]}" if bad else "")


def criterion_7():
    rows, ok = [], True
    for n, k in [(4, 1), (5, 1)]:
        _, bl = M.build_exc_incidence(n, k)
        for q in (3, 5):
            a = oracle.count_projective_incidence(bl, q).count
            b = oracle.count_exc1_gluing(n, k, q).count
            ok &= a == b
            rows.append(f"({n},{k}) q={q}: {a}/{b}")
            if (n, k, q) == (4, 1, 3):
                ok &= a == 52
    return ok, "incidence/gluing " + ", ".join(rows)


def _fits(count, q, d, closed):
    return count == closed and q ** d <= count < q ** (d + 1)


def criterion_8():
    quiver, _ = M.build_exc_incidence(5, 1)
    ok, rows = True, []
    for q in (3, 5):
        closed = M.exc_closed_forms(5, 1, q)
        for name, I in quiver.components.items():
            d = 3 if "&" in name else 4
            c = oracle.count_projective_incidence(quiver, q, I).count
            ok &= _fits(c, q, d, closed[name])
            rows.append(f"{name} q={q}: {c}")
    return ok, "NExc at (5,1) " + ", ".join(rows)


def criterion_9():
    reports = [V.check_pairing(n, k) for n in range(2, 9) for k in range(0, n // 2 + 1)]
    bad = _failed(reports)
    return not bad, f"{len(reports)} (n,k) pairs, {len(bad)} failures"


def criterion_10():
    ideals = corpus()
    bad = 0
    for I in ideals:
        gb = I.groebner()
        sols = zero_set(I.gens, I.ring, 3)
        if any(g.eval_point(p, 3) for g in gb for p in sols) or zero_set(gb, I.ring, 3) != sols:
            bad += 1
        if [str(g) for g in Ideal(I.ring, gb).groebner()] != [str(g) for g in gb]:
            bad += 1
        S = saturate(I, I.ring.var(I.ring.names[0]))
        if not all(S.contains(g) for g in I.gens):
            bad += 1
    return bad == 0, f"{len(ideals)} random ideals over F3, {bad} disagreements"


def criterion_11():
    div_trace = V.run_suite(5, 1, "kramer-spin", V.default_config(trace="pi"))
    div_sign = V.run_suite(5, 1, "kramer-spin", V.default_config(sign="prop31"))
    suites = ["kramer-spin", "presentation", "fiber", "flatness", "semistable", "blowup"]
    default = V.run_suite(5, 1, suites, DEFAULTS)
    n_trace = sum(r.status == V.FAIL for r in div_trace)
    n_sign = sum(r.status == V.FAIL for r in div_sign)
    bad = _failed(default)
    ok = n_trace > 0 and n_sign > 0 and not bad
    detail = (f"trace=pi: {n_trace} divergent reports; sign=prop31: {n_sign} divergent reports; "
              f"defaults (two-pi, sec33): suites 1-6 at (5,1) {len(default) - len(bad)}/{len(default)} pass")
    return ok, detail


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11]

Z1_REASON = ("at alpha = dual(alpha) the Ztilde1 component is A^4 minus a hyperplane (54/500 points); "
             "see notes/decisions.md")


def _run(number):
    ok, detail = CRITERIA[number - 1]()
    record(number, ok, detail)
    assert ok, detail


@pytest.mark.parametrize("number", [1, 2, 4, 5, 6, 7, 8, 9, 10, 11])
def test_criterion(number):
    _run(number)


@pytest.mark.xfail(strict=True, reason=Z1_REASON)
def test_criterion_3():
    _run(3)


def test_criterion_3_true_counts():
    spec = M.build_components(M.build_spl_chart(5, 1, 3, 1))
    z1 = [c for c in spec.components if c.name == "Ztilde1"][0]
    assert [oracle.count_affine(z1.ideal, q).count for q in (3, 5)] == [54, 500]
    assert M.affine_certificate(z1.ideal).shape == "A^4 minus V(s_2)"


if __name__ == "__main__":
    failed = 0
    for i, fn in enumerate(CRITERIA, 1):
        ok, detail = fn()
        record(i, ok, detail)
        failed += not ok
    sys.exit(1 if failed else 0)
