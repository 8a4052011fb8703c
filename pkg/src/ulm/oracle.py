"""Brute-force point counts over small prime fields."""

from __future__ import annotations

import itertools
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import kernels
from .ideal import Ideal
from .kernels import ALL, FIXED, INVERSE, NONZERO
from .model import ComponentSpec, IncidenceSpec, exc1_gluing_charts
from .poly import PolyError


class OracleError(RuntimeError):
    """Enumeration refused: guard exceeded, bad field size or non-integral quotient."""


def point_guard() -> int:
    return int(float(os.environ.get("ULM_GUARD_POINTS", "1e8")))


def check_field(q: int) -> None:
    if q < 3 or q % 2 == 0 or any(q % d == 0 for d in range(2, int(q ** 0.5) + 1)):
        raise OracleError(f"q={q} must be an odd prime")


@dataclass
class PointCount:
    target: str
    q: int
    m: int
    count: int
    per_component: dict = field(default_factory=dict)
    ms: int = 0
    points: list | None = None


def _coef_mod(c, q: int) -> int:
    c = Fraction(int(c.numerator), int(c.denominator)) if not isinstance(c, int) else Fraction(c)
    if c.denominator % q == 0:
        raise OracleError(f"coefficient {c} is undefined in characteristic {q}")
    return c.numerator * pow(c.denominator, -1, q) % q


def compile_ideal(I: Ideal, q: int, fixed: dict | None = None):
    """Kernel input: (polys, kinds, args) with fixed and inverse variables detected."""
    ring = I.ring
    nv = ring.nvars
    polys = []
    for g in I.gens:
        if not g:
            continue
        terms = [(_coef_mod(c, q), m) for m, c in g.terms.items()]
        terms = [(c, m) for c, m in terms if c]
        polys.append(terms)
    kinds = [ALL] * nv
    args = [0] * nv
    for v, x in (fixed or {}).items():
        kinds[ring.index[v]] = FIXED
        args[ring.index[v]] = x % q
    for poly in polys:
        lin = [m for _, m in poly if sum(m) == 1]
        if len(poly) in (1, 2) and len(lin) == 1 and all(sum(m) <= 1 for _, m in poly):
            m = lin[0]
            i = m.index(1)
            if kinds[i] != ALL:
                continue
            c = dict((mm, cc) for cc, mm in poly)
            d = c.get(ring.zero_mon, 0)
            kinds[i] = FIXED
            args[i] = (-d) * pow(c[m], -1, q) % q
    for poly in polys:
        if len(poly) != 2:
            continue
        (c1, m1), (c2, m2) = sorted(poly, key=lambda t: sum(t[1]))
        if sum(m1) != 0 or sum(m2) != 2 or max(m2) != 1:
            continue
        if (-c1) * pow(c2, -1, q) % q != 1:
            continue
        i, j = [t for t, e in enumerate(m2) if e]
        names = ring.names
        z, v = (i, j) if names[i].startswith("z_") or not names[j].startswith("z_") else (j, i)
        if kinds[z] == ALL and kinds[v] in (ALL, NONZERO):
            kinds[v] = NONZERO
            kinds[z] = INVERSE
            args[z] = v
    return polys, kinds, args


def _search_size(kinds, q):
    size = 1
    for k in kinds:
        if k == ALL:
            size *= q
        elif k == NONZERO:
            size *= q - 1
    return size


def count_affine(I: Ideal, q: int, target: str = "ideal", collect: bool = False, fixed=None) -> PointCount:
    check_field(q)
    t0 = time.perf_counter()
    polys, kinds, args = compile_ideal(I, q, fixed)
    size = _search_size(kinds, q)
    if size > point_guard():
        raise OracleError(f"guard tripped: {size} points exceed ULM_GUARD_POINTS={point_guard()}")
    count, pts = kernels.enumerate_points(polys, I.ring.nvars, q, kinds, args, collect)
    ms = int((time.perf_counter() - t0) * 1000)
    return PointCount(target, q, I.ring.nvars, count, ms=ms, points=pts)


@dataclass
class UnionCheck:
    q: int
    counts: dict
    total: int
    direct: int

    @property
    def consistent(self) -> bool:
        return self.total == self.direct


def count_union_check(spec: ComponentSpec, q: int) -> UnionCheck:
    """Inclusion-exclusion over all component intersections versus the direct count."""
    comps = spec.components
    counts = {}
    total = 0
    for r in range(1, len(comps) + 1):
        for sub in itertools.combinations(comps, r):
            I = sub[0].ideal
            for c in sub[1:]:
                I = I.with_gens(c.ideal.gens)
            n = count_affine(I, q).count
            counts["&".join(c.name for c in sub)] = n
            total += (-1) ** (r + 1) * n
    direct = count_affine(spec.special_fiber, q).count
    return UnionCheck(q, counts, total, direct)


def count_projective_incidence(spec: IncidenceSpec, q: int, ideal: Ideal | None = None) -> PointCount:
    """Projective count: points with every cone nonzero, divided by (q-1) per cone."""
    check_field(q)
    t0 = time.perf_counter()
    I = ideal or spec.ideal
    cones = spec.cones
    punctured = 0
    for r in range(len(cones) + 1):
        for sub in itertools.combinations(range(len(cones)), r):
            fixed = {v: 0 for c in sub for v in cones[c]}
            punctured += (-1) ** r * count_affine(I, q, fixed=fixed).count
    div = (q - 1) ** len(cones)
    if punctured % div:
        raise OracleError(f"cone count {punctured} is not divisible by {div}")
    ms = int((time.perf_counter() - t0) * 1000)
    return PointCount(spec.name, q, I.ring.nvars, punctured // div, ms=ms)


def _normalize(vec, q):
    for x in vec:
        if x % q:
            inv = pow(x, -1, q)
            return tuple(y * inv % q for y in vec)
    return None


def count_exc1_gluing(n: int, k: int, q: int) -> PointCount:
    """Distinct pairs (L1, L2) swept out by Exc1 over all splitting charts meeting it."""
    check_field(q)
    t0 = time.perf_counter()
    seen = set()
    per = {}
    for chart, I in exc1_gluing_charts(n, k):
        pc = count_affine(I, q, collect=True)
        t = chart.vectors["t"]
        s2 = [chart.vectors["s"][i - 1] for i in chart.inst.mid]
        for p in pc.points:
            L1 = _normalize([f.eval_point(p, q) for f in t], q)
            L2 = _normalize([f.eval_point(p, q) for f in s2], q)
            if L1 is None or L2 is None:
                raise OracleError(f"degenerate Exc1 point in chart {chart.name}")
            seen.add((L1, L2))
        per[chart.selector] = pc.count
    ms = int((time.perf_counter() - t0) * 1000)
    return PointCount("exc-gluing", q, 0, len(seen), per, ms)


def dimension_probe(I: Ideal, qs) -> tuple[int | None, dict]:
    """Exponent d with count(q) = q^d for every q, else None, plus the counts."""
    counts = {q: count_affine(I, q).count for q in qs}
    ds = set()
    for q, c in counts.items():
        d = 0
        while q ** d < c:
            d += 1
        ds.add(d if q ** d == c else None)
    d = ds.pop() if len(ds) == 1 else None
    return d, counts


def csv_rows(rows) -> str:
    out = ["target,q,m,count,component,ms"]
    for r in rows:
        out.append(f"{r['target']},{r['q']},{r['m']},{r['count']},{r['component']},{r['ms']}")
    return "\n".join(out) + "\n"


__all__ = [
    "OracleError", "PointCount", "UnionCheck", "check_field", "compile_ideal", "count_affine",
    "count_exc1_gluing", "count_projective_incidence", "count_union_check", "csv_rows",
    "dimension_probe", "point_guard", "PolyError",
]
