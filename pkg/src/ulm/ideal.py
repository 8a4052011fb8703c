"""Ideals, Groebner bases and membership.

Groebner bases come from Buchberger's algorithm with the Gebauer-Moeller
criteria and the sugar selection strategy, followed by full inter-reduction,
so the result is the reduced monic basis.

Large chart ideals contain many generators of the shape ``c*x + r`` with ``c``
a nonzero constant and ``x`` absent from ``r``.  Substituting ``x := -r/c``
gives an isomorphic presentation in fewer variables (the presolve step);
membership, equality and unit tests go through it.  ``reduce`` always returns
the true normal form in the original ring and order.
"""

from __future__ import annotations

import heapq
import itertools
import os
import time
from dataclasses import dataclass, field

from .poly import PI, Poly, PolyError, PolyRing, make_ring


class GuardTripped(RuntimeError):
    """A resource guard stopped a computation."""

    def __init__(self, what: str):
        super().__init__(f"guard tripped: {what}")
        self.what = what


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    return int(float(raw))


@dataclass
class Guard:
    """Resource limits; defaults come from ULM_GUARD_PAIRS and ULM_GUARD_MS."""

    max_pairs: int = field(default_factory=lambda: _env_int("ULM_GUARD_PAIRS", 10**6))
    max_ms: int | None = field(default_factory=lambda: _env_int("ULM_GUARD_MS", None))
    start: float = field(default_factory=time.monotonic)

    def check(self, pairs: int):
        if pairs > self.max_pairs:
            raise GuardTripped(f"more than {self.max_pairs} critical pairs")
        if self.max_ms is not None and (time.monotonic() - self.start) * 1000 > self.max_ms:
            raise GuardTripped(f"more than {self.max_ms} ms")


# ------------------------------------------------------------ monomial kit


def _negkey_fn(order: str):
    """Key with the reverse sense of the order, for use with a min-heap."""
    if order == "grevlex":
        return lambda m: (-sum(m), m[::-1])
    if order == "lex":
        return lambda m: tuple(-e for e in m)
    k = int(order.split(":", 1)[1])

    def key(m):
        a, b = m[:k], m[k:]
        return (-sum(a), a[::-1], -sum(b), b[::-1])

    return key


def _mask(m):
    bits = 0
    for i, e in enumerate(m):
        if e:
            bits |= 1 << i
    return bits


def _divides(a, b):
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _lcm(a, b):
    return tuple(x if x > y else y for x, y in zip(a, b))


def _coprime(a, b):
    for x, y in zip(a, b):
        if x and y:
            return False
    return True


class _Elt:
    """Monic basis element: leading monomial, its mask, the tail terms, sugar."""

    __slots__ = ("lm", "mask", "tail", "terms", "sugar")

    def __init__(self, terms: dict, lm, sugar: int):
        self.terms = terms
        self.lm = lm
        self.mask = _mask(lm)
        self.tail = [(m, c) for m, c in terms.items() if m != lm]
        self.sugar = sugar


class _Engine:
    """Groebner machinery for one ring (domain and order fixed)."""

    def __init__(self, ring: PolyRing, guard: Guard | None = None):
        self.ring = ring
        self.p = ring.domain.p
        self.key = ring.key
        self.negkey = _negkey_fn(ring.order)
        self.one = ring.domain.convert(1)
        self.guard = guard or Guard()

    def lm(self, terms):
        return max(terms, key=self.key)

    def monic(self, terms):
        lm = self.lm(terms)
        c = terms[lm]
        if c == self.one:
            return dict(terms), lm
        inv = self.ring.domain.inv(c)
        p = self.p
        if p:
            return {m: v * inv % p for m, v in terms.items()}, lm
        return {m: v * inv for m, v in terms.items()}, lm

    def normal_form(self, terms: dict, basis, full: bool = True) -> dict:
        """Remainder of terms modulo a list of monic _Elt."""
        if not terms or not basis:
            return dict(terms)
        p = self.p
        negkey = self.negkey
        work = dict(terms)
        heap = [(negkey(m), m) for m in work]
        heapq.heapify(heap)
        rem = {}
        while heap:
            _, m = heapq.heappop(heap)
            c = work.pop(m, None)
            if c is None:
                continue
            mm = _mask(m)
            div = None
            for g in basis:
                if g.mask & ~mm == 0 and _divides(g.lm, m):
                    div = g
                    break
            if div is None:
                rem[m] = c
                if not full:
                    for m2, c2 in work.items():
                        rem[m2] = c2
                    return rem
                continue
            q = tuple(x - y for x, y in zip(m, div.lm))
            for gm, gc in div.tail:
                nm = tuple(x + y for x, y in zip(gm, q))
                old = work.get(nm)
                if old is None:
                    v = -c * gc
                    if p:
                        v %= p
                    work[nm] = v
                    heapq.heappush(heap, (negkey(nm), nm))
                else:
                    v = old - c * gc
                    if p:
                        v %= p
                    if v:
                        work[nm] = v
                    else:
                        del work[nm]
        return rem

    def spoly(self, f: _Elt, g: _Elt):
        lcm = _lcm(f.lm, g.lm)
        qf = tuple(x - y for x, y in zip(lcm, f.lm))
        qg = tuple(x - y for x, y in zip(lcm, g.lm))
        out = {}
        p = self.p
        for m, c in f.tail:
            out[tuple(x + y for x, y in zip(m, qf))] = c
        for m, c in g.tail:
            nm = tuple(x + y for x, y in zip(m, qg))
            v = out.get(nm, 0) - c
            if p:
                v %= p
            if v:
                out[nm] = v
            else:
                out.pop(nm, None)
        sugar = max(f.sugar + sum(qf), g.sugar + sum(qg))
        return out, sugar

    def buchberger(self, polys) -> list[dict]:
        """Reduced monic Groebner basis of a list of term dictionaries."""
        key = self.key
        elts: list[_Elt] = []
        live_g: set[int] = set()
        live_pairs: set[tuple[int, int]] = set()
        heap = []
        counter = itertools.count()
        processed = 0

        def add(terms, sugar):
            nonlocal live_g
            terms, lm = self.monic(terms)
            e = _Elt(terms, lm, sugar)
            elts.append(e)
            ih = len(elts) - 1
            h = lm
            C = set(live_g)
            D = set()
            while C:
                ig = C.pop()
                g = elts[ig].lm
                mhg = _lcm(h, g)
                if _coprime(h, g):
                    D.add(ig)
                    continue
                if any(_divides(_lcm(h, elts[j].lm), mhg) for j in C):
                    continue
                if any(_divides(_lcm(h, elts[j].lm), mhg) for j in D):
                    continue
                D.add(ig)
            new_pairs = [(ig, ih) for ig in D if not _coprime(h, elts[ig].lm)]
            for pr in list(live_pairs):
                a, b = elts[pr[0]].lm, elts[pr[1]].lm
                mg = _lcm(a, b)
                if _divides(h, mg) and _lcm(a, h) != mg and _lcm(b, h) != mg:
                    live_pairs.discard(pr)
            for pr in new_pairs:
                a, b = elts[pr[0]], elts[pr[1]]
                lcm = _lcm(a.lm, b.lm)
                sg = max(a.sugar + sum(lcm) - sum(a.lm), b.sugar + sum(lcm) - sum(b.lm))
                live_pairs.add(pr)
                heapq.heappush(heap, (sg, key(lcm), next(counter), pr))
            live_g = {ig for ig in live_g if not _divides(h, elts[ig].lm)}
            live_g.add(ih)

        start = []
        for t in polys:
            if t:
                start.append(t)
        # degree-sorted start reduces early growth
        start.sort(key=lambda t: key(self.lm(t)))
        for t in start:
            basis = [elts[i] for i in live_g]
            r = self.normal_form(t, basis)
            if r:
                if self.ring.zero_mon in r and len(r) == 1:
                    return [{self.ring.zero_mon: self.one}]
                add(r, max(sum(m) for m in t))
        while heap:
            _, _, _, pr = heapq.heappop(heap)
            if pr not in live_pairs:
                continue
            live_pairs.discard(pr)
            processed += 1
            if processed & 63 == 0:
                self.guard.check(processed)
            s, sugar = self.spoly(elts[pr[0]], elts[pr[1]])
            if not s:
                continue
            basis = [elts[i] for i in live_g]
            r = self.normal_form(s, basis)
            if r:
                if self.ring.zero_mon in r and len(r) == 1:
                    return [{self.ring.zero_mon: self.one}]
                add(r, sugar)
        self.guard.check(processed)
        return self.interreduce([elts[i].terms for i in live_g])

    def interreduce(self, polys) -> list[dict]:
        key = self.key
        items = []
        for t in polys:
            t, lm = self.monic(t)
            items.append((lm, t))
        # drop elements whose leading monomial is divisible by another one
        items.sort(key=lambda it: key(it[0]))
        minimal = []
        for lm, t in items:
            if not any(_divides(l2, lm) for l2, _ in minimal):
                minimal.append((lm, t))
        out = []
        elts = [_Elt(t, lm, 0) for lm, t in minimal]
        for i, e in enumerate(elts):
            others = elts[:i] + elts[i + 1:]
            r = self.normal_form(e.terms, others)
            r, _ = self.monic(r)
            out.append(r)
        out.sort(key=lambda t: key(self.lm(t)), reverse=True)
        return out


# ------------------------------------------------------------------- ideal


class Ideal:
    """Ideal of a polynomial ring with optional per-generator provenance labels."""

    def __init__(self, ring: PolyRing, gens, provenance=None):
        self.ring = ring
        self.gens = [ring.convert(g) for g in gens]
        if provenance is None:
            provenance = [f"g{i}" for i in range(len(self.gens))]
        if len(provenance) != len(self.gens):
            raise PolyError("provenance list does not match generators")
        self.provenance = list(provenance)
        self._gb = None
        self._pre = None

    def __repr__(self):
        return f"Ideal({len(self.gens)} generators in {list(self.ring.names)})"

    def nonzero_gens(self):
        return [g for g in self.gens if g]

    def groebner(self, guard: Guard | None = None) -> list[Poly]:
        if self._gb is None:
            eng = _Engine(self.ring, guard)
            gb = eng.buchberger([g.terms for g in self.gens])
            self._gb = [Poly(self.ring, t) for t in gb]
        return self._gb

    def reduce(self, f: Poly, guard: Guard | None = None) -> Poly:
        f = self.ring.convert(f)
        gb = self.groebner(guard)
        eng = _Engine(self.ring, guard)
        basis = [_Elt(g.terms, g.leading_monomial(), 0) for g in gb]
        return Poly(self.ring, eng.normal_form(f.terms, basis))

    def presolved(self, guard: Guard | None = None) -> "Presolved":
        if self._pre is None:
            self._pre = presolve(self, guard)
        return self._pre

    def contains(self, f, guard: Guard | None = None) -> bool:
        return not self.presolved(guard).normal_form(self.ring.convert(f), guard)

    def with_gens(self, more, labels=None) -> "Ideal":
        more = list(more)
        labels = labels or [f"g{len(self.gens) + i}" for i in range(len(more))]
        return Ideal(self.ring, self.gens + more, self.provenance + list(labels))

    def to_ring(self, ring: PolyRing) -> "Ideal":
        return Ideal(ring, [g.to_ring(ring) for g in self.gens], self.provenance)


# ---------------------------------------------------------------- presolve


def _linear_pivot(f: Poly, forbidden: set):
    """Return (index, coeff) of a variable occurring only in a constant-coefficient linear term."""
    occ = {}
    for m, c in f.terms.items():
        for i, e in enumerate(m):
            if e:
                occ.setdefault(i, []).append((m, e, c))
    best = None
    for i, lst in occ.items():
        if i in forbidden or len(lst) != 1:
            continue
        m, e, c = lst[0]
        if e == 1 and sum(m) == 1:
            if best is None or i > best[0]:
                best = (i, c)
    return best


def _subst_var(f: Poly, i: int, img: Poly) -> Poly:
    """Substitute variable i by img (same ring)."""
    if not any(m[i] for m in f.terms):
        return f
    ring = f.ring
    rest = {}
    by_pow = {}
    for m, c in f.terms.items():
        e = m[i]
        if e:
            mm = m[:i] + (0,) + m[i + 1:]
            by_pow.setdefault(e, {})[mm] = c
        else:
            rest[m] = c
    out = Poly(ring, rest)
    pw = {1: img}
    for e in sorted(by_pow):
        if e not in pw:
            pw[e] = img ** e
        out = out + Poly(ring, by_pow[e]) * pw[e]
    return out


class Presolved:
    """Result of eliminating linearly solvable variables.

    ``sigma`` maps each removed variable to its value in the remaining
    variables; ``ideal`` is the residual ideal in the smaller ring.  For every
    f in the original ring, f lies in the original ideal iff sigma(f) lies in
    ``ideal``.
    """

    def __init__(self, source: Ideal, sigma: dict, ideal: Ideal, unit: bool):
        self.source = source
        self.sigma = sigma
        self.ideal = ideal
        self.unit = unit

    def image(self, f: Poly) -> Poly:
        ring = self.ideal.ring
        src = self.source.ring
        out = f
        names = [v for v in f.variables() if v in self.sigma]
        for v in names:
            out = _subst_var(out, src.index[v], self.sigma[v])
        return out.to_ring(ring)

    def normal_form(self, f: Poly, guard: Guard | None = None) -> Poly:
        img = self.image(f)
        if self.unit:
            return self.ideal.ring.zero()
        return self.ideal.reduce(img, guard)


def presolve(ideal: Ideal, guard: Guard | None = None, allow_pi: bool = False) -> Presolved:
    """Eliminate variables that occur in some generator only as c*x with c constant."""
    ring = ideal.ring
    pi_idx = ring.index.get(PI)
    forbidden = {pi_idx} if pi_idx is not None and not allow_pi else set()
    gens = [g for g in ideal.gens if g]
    sigma = {}
    unit = False
    while True:
        choice = None
        for gi, g in sorted(enumerate(gens), key=lambda t: len(t[1].terms)):
            piv = _linear_pivot(g, forbidden)
            if piv is not None:
                choice = (gi, piv)
                break
        if choice is None:
            break
        gi, (i, c) = choice
        g = gens.pop(gi)
        x = ring.names[i]
        xm = tuple(1 if j == i else 0 for j in range(ring.nvars))
        rest = Poly(ring, {m: v for m, v in g.terms.items() if m != xm})
        img = rest.scale(-ring.domain.inv(c))
        for v in list(sigma):
            sigma[v] = _subst_var(sigma[v], i, img)
        sigma[x] = img
        new = []
        for h in gens:
            h = _subst_var(h, i, img)
            if h:
                if h.is_const():
                    unit = True
                new.append(h)
        gens = new
        if unit:
            break
    keep = [v for v in ring.names if v not in sigma]
    small = PolyRing(keep, ring.domain, "grevlex" if ring.order.startswith("block") else ring.order)
    sigma_small = {v: p.to_ring(small) for v, p in sigma.items()}
    sigma_full = {v: p for v, p in sigma.items()}
    J = Ideal(small, [h.to_ring(small) for h in gens] if not unit else [small.one()])
    pre = Presolved(ideal, sigma_full, J, unit)
    pre.sigma_small = sigma_small
    return pre


# --------------------------------------------------------------- functions


@dataclass
class Verdict:
    ok: bool
    generator: str | None = None
    normal_form: str | None = None

    def witness(self):
        if self.ok:
            return None
        return {"generator": self.generator, "normal_form": self.normal_form}


def groebner(I: Ideal, guard: Guard | None = None) -> list[Poly]:
    return I.groebner(guard)


def reduce(f: Poly, I: Ideal, guard: Guard | None = None) -> Poly:
    return I.reduce(f, guard)


def contains_all(I: Ideal, polys, labels=None, guard: Guard | None = None) -> Verdict:
    """Membership of each polynomial in I; first failure becomes the witness."""
    pre = I.presolved(guard)
    for k, f in enumerate(polys):
        f = I.ring.convert(f)
        nf = pre.normal_form(f, guard)
        if nf:
            label = labels[k] if labels else str(f)
            return Verdict(False, label, str(nf))
    return Verdict(True)


def ideal_equal(I: Ideal, J: Ideal, guard: Guard | None = None) -> Verdict:
    """Mutual membership of generators; witness names the first failing generator."""
    if I.ring.names != J.ring.names or I.ring.domain != J.ring.domain:
        raise PolyError("ideals live in different rings")
    J2 = J if J.ring == I.ring else J.to_ring(I.ring)
    v = contains_all(I, J2.gens, [f"{s}: {g}" for s, g in zip(J2.provenance, J2.gens)], guard)
    if not v.ok:
        return v
    return contains_all(J2, I.gens, [f"{s}: {g}" for s, g in zip(I.provenance, I.gens)], guard)


def is_unit_ideal(I: Ideal, guard: Guard | None = None) -> bool:
    pre = I.presolved(guard)
    if pre.unit:
        return True
    gb = pre.ideal.groebner(guard)
    return len(gb) == 1 and gb[0].is_const() and bool(gb[0])


def _fresh(ring: PolyRing, stem: str) -> str:
    name = stem
    k = 0
    while name in ring.index:
        k += 1
        name = f"{stem}{k}"
    return name


def eliminate(I: Ideal, drop, guard: Guard | None = None) -> Ideal:
    """Intersection of I with the subring in the variables not in drop."""
    drop = [v for v in drop]
    if PI in drop:
        raise PolyError("pi is never eliminated")
    for v in drop:
        if v not in I.ring.index:
            raise PolyError(f"unknown variable {v!r}")
    keep = [v for v in I.ring.names if v not in drop]
    big = PolyRing(drop + keep, I.ring.domain, f"block:{len(drop)}")
    gb = Ideal(big, [g.to_ring(big) for g in I.gens]).groebner(guard)
    k = len(drop)
    small = PolyRing(keep, I.ring.domain, "grevlex")
    out = [g.to_ring(small) for g in gb if not any(any(m[:k]) for m in g.terms)]
    return Ideal(small, out)


def saturate(I: Ideal, f: Poly, guard: Guard | None = None) -> Ideal:
    """I : f^infinity via a fresh variable z with 1 - z f."""
    z = _fresh(I.ring, "zsat")
    ring = PolyRing([z] + list(I.ring.names), I.ring.domain, "grevlex")
    gens = [g.to_ring(ring) for g in I.gens]
    gens.append(ring.one() - ring.var(z) * I.ring.convert(f).to_ring(ring))
    out = eliminate(Ideal(ring, gens), [z], guard)
    return out.to_ring(I.ring)


def intersect(I: Ideal, J: Ideal, guard: Guard | None = None) -> Ideal:
    t = _fresh(I.ring, "tint")
    ring = PolyRing([t] + list(I.ring.names), I.ring.domain, "grevlex")
    tv = ring.var(t)
    gens = [tv * g.to_ring(ring) for g in I.gens]
    gens += [(ring.one() - tv) * g.to_ring(ring) for g in J.gens]
    out = eliminate(Ideal(ring, gens), [t], guard)
    return out.to_ring(I.ring)


def dim_leading(I: Ideal, guard: Guard | None = None) -> int:
    """Krull dimension from the leading-monomial ideal (maximal independent set)."""
    gb = I.groebner(guard)
    n = I.ring.nvars
    if any(g.is_const() and g for g in gb):
        return -1
    supports = [frozenset(i for i, e in enumerate(g.leading_monomial()) if e) for g in gb]
    for size in range(n, -1, -1):
        for S in itertools.combinations(range(n), size):
            s = frozenset(S)
            if not any(sup <= s for sup in supports):
                return size
    return 0


def localize(I: Ideal, var: str, name: str | None = None) -> Ideal:
    """Invert a variable by adjoining z with z*var - 1."""
    z = name or _fresh(I.ring, f"z_{var}")
    ring = make_ring([z] + [v for v in I.ring.names], I.ring.domain, I.ring.order)
    gens = [g.to_ring(ring) for g in I.gens]
    gens.append(ring.var(z) * ring.var(var) - 1)
    return Ideal(ring, gens, I.provenance + [f"inverse of {var}"])


def sum_ideal(I: Ideal, polys, labels=None) -> Ideal:
    return I.with_gens([I.ring.convert(p) for p in polys], labels)


# ----------------------------------------------------------- file format


def format_ideal(I: Ideal, comments=None) -> str:
    lines = []
    for c in comments or []:
        lines.append(f"# {c}")
    lines.append(f"ring: {','.join(I.ring.names)} ; order: {I.ring.order}")
    for g in I.gens:
        lines.append(str(g))
    return "\n".join(lines) + "\n"


def parse_ideal(text: str, domain=None) -> Ideal:
    from .poly import QQ

    header = None
    gens = []
    ring = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            header = line
            if not line.startswith("ring:"):
                raise PolyError("ideal file must start with a 'ring:' header")
            body = line[5:]
            order = "grevlex"
            if ";" in body:
                body, rest = body.split(";", 1)
                rest = rest.strip()
                if not rest.startswith("order:"):
                    raise PolyError("expected 'order:' after ';'")
                order = rest[6:].strip()
            names = [v.strip() for v in body.split(",") if v.strip()]
            ring = PolyRing(names, domain or QQ, order)
            continue
        gens.append(ring.parse(line))
    if ring is None:
        raise PolyError("missing ring header")
    return Ideal(ring, gens)
