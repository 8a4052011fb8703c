"""Verification checks producing structured pass/fail reports with witnesses."""

from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import model as M
from . import oracle
from .ideal import GuardTripped, Ideal, Verdict, contains_all, eliminate, ideal_equal, intersect, saturate
from .poly import PI

PASS, FAIL, GUARD = "pass", "fail", "guard"
SUITES = ("kramer-spin", "presentation", "fiber", "flatness", "semistable", "blowup", "pairing")
REPORT_VERSION = 1


@dataclass
class CheckReport:
    check_id: str
    instance: tuple
    chart: str | None
    status: str
    witness: dict | None = None
    duration_ms: int = 0
    config: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def as_json(self) -> dict:
        return {"id": self.check_id, "chart": self.chart, "status": self.status, "witness": self.witness, "ms": self.duration_ms}


def default_config(sign: str = "sec33", trace: str = "two-pi") -> dict:
    if sign not in M.SIGN_VARIANTS:
        raise ValueError(f"unknown sign variant {sign!r}")
    if trace not in M.TRACE_VARIANTS:
        raise ValueError(f"unknown trace variant {trace!r}")
    return {"sign_variant": sign, "trace_variant": trace}


def _witness(generator, normal_form) -> dict:
    return {"generator": str(generator), "normal_form": str(normal_form)}


def _run(check_id, n, k, chart, config, body) -> CheckReport:
    """Time body() and turn its (witness, notes) result or a guard into a report."""
    inst = M.Instance(n, k)
    t0 = time.perf_counter()
    status, witness, notes = PASS, None, []
    try:
        witness, notes = body()
        if witness is not None:
            status = FAIL
    except GuardTripped as e:
        status, notes = GUARD, [str(e)]
    except oracle.OracleError as e:
        if "guard" not in str(e):
            raise
        status, notes = GUARD, [str(e)]
    ms = int((time.perf_counter() - t0) * 1000)
    return CheckReport(check_id, (n, k, inst.case), chart, status, witness, ms, dict(config), notes)


def _first_failure(*verdicts: Verdict):
    for v in verdicts:
        if not v.ok:
            return v.witness()
    return None


def _image(I: Ideal, mapping: dict, ring) -> list:
    return [g.substitute(mapping, ring) for g in I.gens]


def _labels(I: Ideal) -> list:
    return [f"{s}: {g}" for s, g in zip(I.provenance, I.gens)]


# ---------------------------------------------------------- kramer => spin


def spin_generators(chart: M.Chart, trace: str = "two-pi"):
    """(labels, polys): wedge, determinant, linear and trace-sum relations in the chart."""
    inst = chart.inst
    X = chart.matrix_X()
    rels = M.spin_relations(inst, X)
    v = chart.vectors
    rels += [r for r in M.simplified_relations(inst, chart.ring, v["s"], v["t"], v["lam"], v["mu"], trace)
             if r[0].startswith("SIMP(iv)")]
    rels = [(lab, f) for lab, f in rels if f]
    return [lab for lab, _ in rels], [f for _, f in rels]


def check_kramer_implies_spin(n, k, alpha, beta, config=None) -> CheckReport:
    config = config or default_config()

    def body():
        ch = M.build_kramer_chart(n, k, alpha, beta, config["sign_variant"])
        labels, polys = spin_generators(ch, config["trace_variant"])
        v = contains_all(ch.ideal, polys, labels)
        return v.witness(), [f"{len(polys)} generators"]

    return _run("kramer-spin", n, k, _sel(n, k, alpha, beta), config, body)


def check_kramer_nondegenerate(n, k, alpha, beta, config=None) -> CheckReport:
    """pi^2 is not in the Kramer chart ideal (the chart meets the generic fiber)."""
    config = config or default_config()

    def body():
        ch = M.build_kramer_chart(n, k, alpha, beta, config["sign_variant"])
        pi = ch.ring.var(PI)
        if ch.ideal.contains(pi * pi):
            nf = ch.ideal.presolved().normal_form(pi)
            return _witness("pi^2 in ideal", f"pi reduces to {nf}"), []
        return None, []

    return _run("kramer-nondegenerate", n, k, _sel(n, k, alpha, beta), config, body)


def check_simplified_equal(n, k, alpha, beta, config=None) -> CheckReport:
    """The Kramer chart ideal equals the simplified presentation."""
    config = config or default_config()

    def body():
        K = M.build_kramer_chart(n, k, alpha, beta, config["sign_variant"])
        S = M.build_simplified_chart(n, k, alpha, beta, config["trace_variant"])
        return ideal_equal(K.ideal, S.ideal).witness(), []

    return _run("simplified-equal", n, k, _sel(n, k, alpha, beta), config, body)


# ------------------------------------------------------------ presentation


def presentation_verdicts(n, k, alpha, beta, sign="sec33"):
    """phi(I_Kra) = I_pres, psi(I_pres) in I_Kra, and both composites fix variables."""
    K = M.build_kramer_chart(n, k, alpha, beta, sign)
    P = M.build_class_presentation(n, k, alpha, beta)
    phi = M.kramer_to_presentation(P)
    psi = M.presentation_to_kramer(P, K.ring)
    img = Ideal(P.ring, _image(K.ideal, phi, P.ring), K.ideal.provenance)
    v1 = ideal_equal(img, P.ideal)
    v2 = contains_all(K.ideal, _image(P.ideal, psi, K.ring), _labels(P.ideal))
    kx = [K.ring.var(x).substitute(phi, P.ring).substitute(psi, K.ring) - K.ring.var(x) for x in K.ring.names]
    v3 = contains_all(K.ideal, kx, [f"psi(phi({x})) - {x}" for x in K.ring.names])
    py = [P.ring.var(y).substitute(psi, K.ring).substitute(phi, P.ring) - P.ring.var(y) for y in P.ring.names]
    v4 = contains_all(P.ideal, py, [f"phi(psi({y})) - {y}" for y in P.ring.names])
    return v1, v2, v3, v4


def check_presentation(n, k, alpha, beta, config=None) -> CheckReport:
    config = config or default_config()
    inst = M.instance(n, k)
    if M.chart_class(inst, alpha, beta) == "iv":
        raise M.ModelError("presentations exist for classes (i)-(iii)")

    def body():
        return _first_failure(*presentation_verdicts(n, k, alpha, beta, config["sign_variant"])), []

    return _run("presentation", n, k, _sel(n, k, alpha, beta), config, body)


# ------------------------------------------------------------------ fibers


def family_chart(family, n, k, alpha, beta):
    if family == "class":
        return M.build_class_presentation(n, k, alpha, beta)
    if family == "spl":
        return M.build_spl_chart(n, k, alpha, beta)
    raise M.ModelError(f"fiber decomposition needs family class or spl, not {family!r}")


def intersection_ideal(spec: M.ComponentSpec) -> Ideal:
    out = spec.components[0].ideal
    for c in spec.components[1:]:
        out = intersect(out, c.ideal)
    return out


def check_fiber_decomposition(n, k, alpha, beta, family="class", config=None) -> CheckReport:
    config = config or default_config()

    def body():
        ch = family_chart(family, n, k, alpha, beta)
        spec = M.build_components(ch)
        if not spec.components:
            return _witness("special fiber", "no components"), []
        w = ideal_equal(spec.special_fiber, intersection_ideal(spec)).witness()
        if w:
            return w, []
        notes = []
        for c in spec.components:
            cert = M.affine_certificate(c.ideal)
            notes.append(f"{c.name}: {cert.shape}")
            if not cert.ok:
                return _witness(f"certificate {c.name}", "; ".join(cert.residual)), notes
        return None, notes

    return _run(f"fiber-{family}", n, k, _sel(n, k, alpha, beta), config, body)


# ---------------------------------------------------------------- flatness


def check_flatness_witness(n, k, alpha, beta, config=None) -> CheckReport:
    config = config or default_config()
    inst = M.instance(n, k)
    cls = M.chart_class(inst, alpha, beta)
    if cls not in ("i", "ii"):
        raise M.ModelError("flatness witnesses are defined for classes (i) and (ii)")

    def body():
        U = M.build_class_presentation(n, k, alpha, beta)
        var = U.extra["mu"] if cls == "i" else U.extra["lam"]
        pi = U.ring.var(PI)
        v = contains_all(U.ideal.with_gens([U.ring.var(var)], [var]), [pi], [f"pi mod <{var}>"])
        if not v.ok:
            return v.witness(), []
        Up = M.build_spl_chart(n, k, alpha, beta)
        ppi = Up.ring.var(PI)
        if Up.ideal.contains(ppi):
            return _witness("pi in U'", "0"), []
        sat = saturate(Up.ideal, ppi)
        return ideal_equal(Up.ideal, sat).witness(), [f"pi in I(U) + <{var}>"]

    return _run("flatness", n, k, _sel(n, k, alpha, beta), config, body)


# -------------------------------------------------------------- semistable


def semistable_expectation(spec: M.ComponentSpec, q: int) -> dict:
    """Expected counts q^(n-i) for every i-fold intersection of surviving components."""
    n = spec.chart.inst.n
    out = {}
    comps = [c.name for c in spec.components]
    for r in range(1, len(comps) + 1):
        for sub in itertools.combinations(comps, r):
            out["&".join(sub)] = q ** (n - r)
    return out


def check_semistable_form(n, k, alpha, beta, config=None, qs=(3, 5)) -> CheckReport:
    config = config or default_config()
    inst = M.instance(n, k)
    if M.chart_class(inst, alpha, beta) != "i":
        raise M.ModelError("the semi-stable form is stated for class (i) charts")
    if inst.case not in (M.STRONGLY_NON_SPECIAL, M.ALMOST_PI_MODULAR):
        raise M.ModelError("the semi-stable form needs a strongly non-special or almost pi-modular instance")

    def body():
        Up = M.build_spl_chart(n, k, alpha, beta)
        E = M.build_spl_chart(n, k, alpha, beta, eliminated=True)
        elim = eliminate(Up.ideal, [Up.extra["s_beta"]])
        w = ideal_equal(elim, E.ideal.to_ring(elim.ring)).witness()
        if w:
            return w, []
        spec = M.build_components(Up)
        notes = []
        for q in qs:
            uc = oracle.count_union_check(spec, q)
            if not uc.consistent:
                return _witness(f"union q={q}", f"{uc.total} != {uc.direct}"), notes
            want = semistable_expectation(spec, q)
            for name, c in want.items():
                got = uc.counts[name]
                notes.append(f"q={q} {name}: {got}")
                if got != c:
                    return _witness(f"count {name} q={q}", f"{got} != {c}"), notes
        return None, notes

    return _run("semistable", n, k, _sel(n, k, alpha, beta), config, body)


# ----------------------------------------------------------------- blow-up


def blowup_verdicts(n, k, gamma, eta, sign="sec33"):
    Vc, Uc, phi, psi = M.chart_iso_map(n, k, gamma, eta, sign)
    VR, UR = Vc.ring, Uc.ring
    v1 = contains_all(Vc.ideal, _image(Uc.ideal, phi, VR), _labels(Uc.ideal))
    v2 = contains_all(Uc.ideal, _image(Vc.ideal, psi, UR), _labels(Vc.ideal))
    ux = [UR.var(x).substitute(phi, VR).substitute(psi, UR) - UR.var(x) for x in UR.names]
    v3 = contains_all(Uc.ideal, ux, [f"psi(phi({x})) - {x}" for x in UR.names])
    vy = [VR.var(y).substitute(psi, UR).substitute(phi, VR) - VR.var(y) for y in VR.names]
    v4 = contains_all(Vc.ideal, vy, [f"phi(psi({y})) - {y}" for y in VR.names])
    return v1, v2, v3, v4


def check_blowup_iso(n, k, gamma, eta, config=None) -> CheckReport:
    config = config or default_config()
    inst = M.instance(n, k)
    cls = M.blowup_class(inst, gamma, eta)

    def body():
        if cls == "iv":
            Vc = M.build_blowup_chart(n, k, gamma, eta, config["sign_variant"])
            w = Vc.extra["unit_witness"]
            nf = Vc.ideal.presolved().normal_form(w)
            return (_witness(f"pi-unit witness: {w}", nf) if nf else None), ["pi is a unit"]
        return _first_failure(*blowup_verdicts(n, k, gamma, eta, config["sign_variant"])), []

    return _run("blowup", n, k, f"bl:{gamma},{eta}", config, body)


# ----------------------------------------------------------------- pairing


def _laurent_mul(a: dict, b: dict) -> dict:
    out = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def _laurent_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0) + c
    return {e: c for e, c in out.items() if c}


def _lmatmul(A, B):
    n, m, p = len(A), len(B), len(B[0])
    out = [[{} for _ in range(p)] for _ in range(n)]
    for i in range(n):
        for j in range(p):
            acc = {}
            for t in range(m):
                if A[i][t] and B[t][j]:
                    acc = _laurent_add(acc, _laurent_mul(A[i][t], B[t][j]))
            out[i][j] = acc
    return out


def _transpose(A):
    return [list(r) for r in zip(*A)]


def _det_monomial(G):
    """Determinant of a monomial matrix as {exponent: coef}, or None if G is not monomial."""
    n = len(G)
    perm = []
    for row in G:
        nz = [j for j, e in enumerate(row) if e]
        if len(nz) != 1 or len(row[nz[0]]) != 1:
            return None
        perm.append(nz[0])
    if sorted(perm) != list(range(n)):
        return {}
    sign = 1
    seen = [False] * n
    for i in range(n):
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length and length % 2 == 0:
            sign = -sign
    out = {0: Fraction(sign)}
    for i, j in enumerate(perm):
        out = _laurent_mul(out, G[i][j])
    return out


def _det_at(G, x: Fraction) -> Fraction:
    """Determinant after evaluating pi0 = x, by exact Gaussian elimination."""
    A = [[sum((c * x ** e for e, c in cell.items()), Fraction(0)) for cell in row] for row in G]
    n = len(A)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = -det
        det *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            if f:
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return det


def pairing_failures(n: int) -> list:
    """All violated pairing identities for lattice indices -n..n, as (what, detail)."""
    data = M.pairing_check_data(n)
    bad = []
    for i in range(-n, n + 1):
        G = data["gram_alt"][i]
        P, Q = data["pi"][i], data["pi"][-i]
        lhs = _lmatmul(_transpose(P), G)
        rhs = _lmatmul(G, Q)
        for r, row in enumerate(lhs):
            for c, cell in enumerate(row):
                if _laurent_add(cell, rhs[r][c]):
                    bad.append((f"<Pi v,w> + <v,Pi w> on Lambda_{i}", f"entry ({r + 1},{c + 1})"))
        for name, M_ in (("<,>", G), ("(,)", data["gram_sym"][i])):
            d = _det_monomial(M_)
            if d not in ({0: 1}, {0: -1}):
                bad.append((f"det {name} on Lambda_{i}", str(d)))
            for x in (Fraction(7), Fraction(11)):
                v = _det_at(M_, x)
                if v not in (1, -1):
                    bad.append((f"det {name} on Lambda_{i} at pi0={x}", str(v)))
        if -n <= i - n:
            shifted = sorted((j, e + 1) for j, e in data["bases"][i])
            if shifted != sorted(data["bases"][i - n]):
                bad.append((f"pi Lambda_{i} = Lambda_{i - n}", str(shifted)))
    return bad


def check_pairing(n, k, config=None) -> CheckReport:
    config = config or default_config()
    if n < 2:
        raise M.ModelError("pairing checks need n >= 2")

    def body():
        bad = pairing_failures(n)
        if bad:
            return _witness(*bad[0]), [f"{len(bad)} failures"]
        return None, []

    return _run("pairing", n, k, None, config, body)


# ------------------------------------------------------------------- suite


def _sel(n, k, alpha, beta) -> str:
    return f"{M.chart_class(M.Instance(n, k), alpha, beta)}:{alpha},{beta}"


def _pick(pairs):
    """Smallest pair plus the middle (non-extremal) pair of a sorted candidate list."""
    pairs = sorted(pairs)
    if not pairs:
        return []
    out = [pairs[0]]
    mid = pairs[len(pairs) // 2]
    if mid != pairs[0]:
        out.append(mid)
    return out


def chart_representatives(inst: M.Instance, classes, blowup=False, where=None) -> list:
    """Representative (a, b) pairs for each listed class, in class order."""
    cls_of = M.blowup_class if blowup else M.chart_class
    out = []
    for cls in classes:
        cands = [(a, b) for a in range(1, inst.n + 1) for b in range(1, inst.n + 1)
                 if cls_of(inst, a, b) == cls and (where is None or where(a, b))]
        out += _pick(cands)
    return out


def suite_charts(suite: str, n: int, k: int) -> list:
    """Default chart list for a suite: [(a, b)] or [None] for instance-level checks."""
    if suite == "pairing":
        return [None]
    inst = M.instance(n, k)
    if suite == "kramer-spin":
        return chart_representatives(inst, ("i", "ii", "iii", "iv"))
    if suite in ("presentation", "fiber"):
        return chart_representatives(inst, ("i", "ii", "iii"))
    if suite == "flatness":
        return chart_representatives(inst, ("i", "ii"))
    if suite == "semistable":
        if inst.case not in (M.STRONGLY_NON_SPECIAL, M.ALMOST_PI_MODULAR):
            return []
        # a self-dual alpha among several middle indices makes Z~1 a punctured affine space
        single = len(inst.mid) == 1
        return chart_representatives(inst, ("i",), where=lambda a, b: single or a != inst.dual(a))
    if suite == "blowup":
        return chart_representatives(inst, ("i", "ii", "iii", "iv"), blowup=True)
    raise ValueError(f"unknown suite {suite!r}")


def run_check(suite: str, n: int, k: int, chart, config) -> list:
    if suite == "pairing":
        return [check_pairing(n, k, config)]
    a, b = chart
    if suite == "kramer-spin":
        return [
            check_kramer_implies_spin(n, k, a, b, config),
            check_kramer_nondegenerate(n, k, a, b, config),
            check_simplified_equal(n, k, a, b, config),
        ]
    if suite == "presentation":
        return [check_presentation(n, k, a, b, config)]
    if suite == "fiber":
        return [check_fiber_decomposition(n, k, a, b, fam, config) for fam in ("class", "spl")]
    if suite == "flatness":
        return [check_flatness_witness(n, k, a, b, config)]
    if suite == "semistable":
        return [check_semistable_form(n, k, a, b, config)]
    if suite == "blowup":
        return [check_blowup_iso(n, k, a, b, config)]
    raise ValueError(f"unknown suite {suite!r}")


def expand_selection(selection) -> list:
    if selection is None or selection == "" or selection == []:
        return []
    if isinstance(selection, str):
        selection = [selection]
    out = []
    for s in selection:
        names = SUITES if s == "all" else (s,)
        for name in names:
            if name not in SUITES:
                raise ValueError(f"unknown check {name!r}")
            if name not in out:
                out.append(name)
    return out


def run_suite(n: int, k: int, selection, config=None, charts=None) -> list:
    """Reports for the selected suites, ordered by check id then chart.

    ``charts`` overrides the representative pairs for chart-level suites.
    """
    config = config or default_config()
    reports = []
    for suite in expand_selection(selection):
        targets = suite_charts(suite, n, k) if charts is None or suite == "pairing" else charts
        for ch in targets:
            reports += run_check(suite, n, k, ch, config)
    return sorted(reports, key=lambda r: (r.check_id, _chart_key(r.chart)))


def _chart_key(chart):
    if chart is None:
        return ("", 0, 0)
    head, ab = chart.split(":")
    a, b = ab.split(",")
    return (head, int(a), int(b))


def aggregate(reports) -> str:
    statuses = {r.status for r in reports}
    if GUARD in statuses:
        return GUARD
    return FAIL if FAIL in statuses else PASS


def report_json(n: int, k: int, config: dict, reports, timing: bool = True) -> str:
    """Canonical JSON report; timing=False zeroes the ms sidecar for byte comparisons."""
    body = {
        "version": REPORT_VERSION,
        "instance": {"n": n, "k": k, "case": M.classify_case(n, k)},
        "config": {"sign_variant": config["sign_variant"], "trace_variant": config["trace_variant"]},
        "checks": [],
    }
    for r in reports:
        d = r.as_json()
        if not timing:
            d["ms"] = 0
        body["checks"].append(d)
    return json.dumps(body, indent=2) + "\n"


__all__ = [
    "CheckReport", "FAIL", "GUARD", "PASS", "SUITES", "aggregate", "blowup_verdicts",
    "chart_representatives", "check_blowup_iso", "check_fiber_decomposition", "check_flatness_witness",
    "check_kramer_implies_spin", "check_kramer_nondegenerate", "check_pairing", "check_presentation",
    "check_semistable_form", "check_simplified_equal", "default_config", "expand_selection",
    "intersection_ideal", "pairing_failures", "presentation_verdicts", "report_json", "run_suite",
    "semistable_expectation", "spin_generators", "suite_charts",
]
