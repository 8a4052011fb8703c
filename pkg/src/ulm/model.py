"""Chart presentations for local models of signature (n-1,1) and their refinements.

Indices are 1-based in names and 0-based in matrices.  The three index
blocks are [1,k], [k+1,n-k] and [n-k+1,n]; ``dual(i) = n+1-i``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .ideal import Ideal, PolyError, format_ideal, presolve
from .poly import PI, Poly, PolyMatrix, PolyRing, make_ring

SELF_DUAL = "self-dual"
PI_MODULAR = "pi-modular"
ALMOST_PI_MODULAR = "almost-pi-modular"
YU = "yu"
STRONGLY_NON_SPECIAL = "strongly-non-special"

SIGN_VARIANTS = ("sec33", "prop31")
TRACE_VARIANTS = ("two-pi", "pi")
FAMILIES = ("local", "kramer", "simplified", "class", "spl", "blowup")
HALF = Fraction(1, 2)


class ModelError(ValueError):
    """Invalid instance, chart index or family request."""


# ---------------------------------------------------------------- instances


def classify_case(n: int, k: int) -> str:
    if n < 2 or not 0 <= k <= n // 2:
        raise ModelError(f"need n >= 2 and 0 <= k <= n/2, got n={n}, k={k}")
    if k == 0:
        return SELF_DUAL
    if n % 2 == 0 and k == n // 2:
        return PI_MODULAR
    if n % 2 == 1 and k == n // 2:
        return ALMOST_PI_MODULAR
    if n % 2 == 0 and k == n // 2 - 1:
        return YU
    return STRONGLY_NON_SPECIAL


@dataclass(frozen=True)
class Instance:
    n: int
    k: int

    @property
    def case(self) -> str:
        return classify_case(self.n, self.k)

    def dual(self, i: int) -> int:
        return self.n + 1 - i

    def block(self, i: int) -> int:
        if not 1 <= i <= self.n:
            raise ModelError(f"index {i} out of range 1..{self.n}")
        if i <= self.k:
            return 1
        if i <= self.n - self.k:
            return 2
        return 3

    def is_mid(self, i: int) -> bool:
        return self.block(i) == 2

    def eps(self, i: int) -> int:
        return -1 if self.block(i) == 3 else 1

    @property
    def outer(self):
        return [i for i in range(1, self.n + 1) if not self.is_mid(i)]

    @property
    def mid(self):
        return list(range(self.k + 1, self.n - self.k + 1))

    def reorder(self):
        """0-based index order of the reordered basis: block 3, block 1, block 2."""
        n, k = self.n, self.k
        return list(range(n - k, n)) + list(range(k)) + list(range(k, n - k))


def instance(n: int, k: int, charts: bool = True) -> Instance:
    inst = Instance(n, k)
    case = inst.case
    if charts and case == PI_MODULAR:
        raise ModelError(f"(n,k)=({n},{k}) is pi-modular; charts are not defined")
    return inst


def chart_class(inst: Instance, alpha: int, beta: int) -> str:
    a_mid, b_mid = inst.is_mid(alpha), inst.is_mid(beta)
    if a_mid and not b_mid:
        return "i"
    if not a_mid and not b_mid:
        return "ii"
    if a_mid and b_mid:
        return "iii"
    return "iv"


def blowup_class(inst: Instance, gamma: int, eta: int) -> str:
    return chart_class(inst, gamma, inst.dual(eta))


def representatives(inst: Instance):
    """Smallest (alpha, beta) per nonempty chart class, in class order."""
    out = {}
    for a in range(1, inst.n + 1):
        for b in range(1, inst.n + 1):
            out.setdefault(chart_class(inst, a, b), (a, b))
    return [(c, out[c]) for c in ("i", "ii", "iii", "iv") if c in out]


# ---------------------------------------------------------------- structure


@dataclass(frozen=True)
class Structure:
    H: list
    J: list
    Upsilon: list
    lambda_k: list
    lambda_nk: list


def _antidiag(m):
    return [[1 if i + j == m - 1 else 0 for j in range(m)] for i in range(m)]


def build_structure(n: int, k: int) -> Structure:
    inst = instance(n, k, charts=False)
    H = _antidiag(n)
    Hk = _antidiag(k)
    J = [[0] * (2 * k) for _ in range(2 * k)]
    for i in range(k):
        for j in range(k):
            J[i][k + j] = Hk[i][j]
            J[k + i][j] = -Hk[i][j]
    U = [[0] * n for _ in range(n)]
    for i in range(1, n + 1):
        U[i - 1][inst.dual(i) - 1] = inst.eps(i)
    lk = [[1 if i == j and not inst.is_mid(i + 1) else 0 for j in range(n)] for i in range(n)]
    lnk = [[1 if i == j and inst.is_mid(i + 1) else 0 for j in range(n)] for i in range(n)]
    return Structure(H, J, U, lk, lnk)


def int_matmul(a, b):
    return [[sum(a[i][t] * b[t][j] for t in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


# ---------------------------------------------------------------- relations


def _h(ring, m):
    return PolyMatrix(ring, _antidiag(m))


def _j(ring, k):
    H = _antidiag(k)
    return PolyMatrix(ring, [[H[i][j - k] if j >= k else 0 for j in range(2 * k)] for i in range(k)]
                      + [[-H[i][j] if j < k else 0 for j in range(2 * k)] for i in range(k)])


def _entries(label, M):
    out = []
    for i in range(M.nrows):
        for j in range(M.ncols):
            out.append((f"{label}[{i + 1},{j + 1}]", M[i, j]))
    return out


def upsilon_conj(inst: Instance, X: PolyMatrix) -> PolyMatrix:
    """Y = Upsilon X^t Upsilon^{-1}, entrywise eps_i eps_j X[j^v, i^v]."""
    n = inst.n
    return PolyMatrix(
        X.ring,
        [
            [X[inst.dual(j + 1) - 1, inst.dual(i + 1) - 1].scale(inst.eps(i + 1) * inst.eps(j + 1)) for j in range(n)]
            for i in range(n)
        ],
    )


def std_blocks(inst: Instance, X: PolyMatrix) -> dict:
    n, k = inst.n, inst.k
    a, b = k, n - k
    return {
        "D": X.block(0, a, 0, a),
        "M": X.block(0, a, a, b),
        "C": X.block(0, a, b, n),
        "F": X.block(a, b, 0, a),
        "X4": X.block(a, b, a, b),
        "E": X.block(a, b, b, n),
        "B": X.block(b, n, 0, a),
        "L": X.block(b, n, a, b),
        "A": X.block(b, n, b, n),
    }


def reordered_blocks(inst: Instance, X: PolyMatrix):
    p = inst.reorder()
    Xr = PolyMatrix(X.ring, [[X[i, j] for j in p] for i in p])
    m = 2 * inst.k
    n = inst.n
    return Xr, Xr.block(0, m, 0, m), Xr.block(0, m, m, n), Xr.block(m, n, 0, m), Xr.block(m, n, m, n)


def lm_relations(inst: Instance, X: PolyMatrix, sign: str = "sec33", w=None):
    """Relations (i)-(iii) of the local-model chart for the matrix X (standard order).

    ``w`` replaces pi (used for the second blow-up matrix).
    """
    ring = X.ring
    p = ring.var(PI) if w is None else w
    p2 = p * p
    n, k = inst.n, inst.k
    m = n - 2 * k
    sigma = 1 if sign == "prop31" else -1
    _, X1, X2, X3, X4 = reordered_blocks(inst, X)
    H = _h(ring, m)
    J = _j(ring, k)
    out = []
    out += _entries("LM(i)", X @ X - PolyMatrix.identity(ring, n).scale(p2))
    if k:
        out += _entries("LM(ii).1", (J @ X1).scale(sigma) + X3.T() @ H @ X3 + X1.T() @ J)
        out += _entries("LM(ii).2", -(J @ X2) + X3.T() @ H @ X4)
        out += _entries("LM(ii).3", X2.T() @ J + X4.T() @ H @ X3)
    out += _entries("LM(ii).4", X4.T() @ H @ X4 - H.scale(p2))
    if k:
        out += _entries("LM(iii).1", X1 @ J @ X1.T() - J.scale(p2))
        out += _entries("LM(iii).2", X1 @ J @ X3.T() - X2 @ H)
        out += _entries("LM(iii).3", X3 @ J @ X1.T() + H @ X2.T())
        out += _entries("LM(iii).4", X3 @ J @ X3.T() - X4 @ H + H @ X4.T())
    else:
        out += _entries("LM(iii).4", H @ X4.T() - X4 @ H)
    return out


def linear_relations(inst: Instance, X: PolyMatrix, w=None, coupling=None):
    """Relations (v): adjoint symmetries and the trace condition."""
    ring = X.ring
    pi = ring.var(PI)
    p = pi if w is None else w
    n, k = inst.n, inst.k
    bl = std_blocks(inst, X)
    Ik = PolyMatrix.identity(ring, k)
    out = []
    if k:
        out += _entries("LIN.B", bl["B"] - bl["B"].ad())
        out += _entries("LIN.C", bl["C"] - bl["C"].ad())
        out += _entries("LIN.D", bl["D"] + Ik.scale(p * 2) + bl["A"].ad())
        out += _entries("LIN.M", bl["M"] - bl["E"].ad().scale(pi))
        out += _entries("LIN.L", bl["L"] + bl["F"].ad().scale(pi))
    out += _entries("LIN.X4", bl["X4"] - bl["X4"].ad())
    out.append(("LIN.tr", bl["X4"].trace() + p * (n - 2 * k - 2)))
    return out


def spin_relations(inst: Instance, X: PolyMatrix, w=None):
    """Wedge and determinant conditions plus the linear relations."""
    ring = X.ring
    p = ring.var(PI) if w is None else w
    n = inst.n
    I = PolyMatrix.identity(ring, n)
    out = []
    Xp = X + I.scale(p)
    rows = list(itertools.combinations(range(n), 2))
    mins = Xp.minors(2)
    for t, f in enumerate(mins):
        rs = rows[t // len(rows)]
        cs = rows[t % len(rows)]
        out.append((f"WEDGE[{rs[0] + 1}{rs[1] + 1};{cs[0] + 1}{cs[1] + 1}]", f))
    out.append(("DET", (X - I.scale(p)).det()))
    out += linear_relations(inst, X, w)
    return out


def _dedupe(pairs):
    seen = set()
    labels, gens = [], []
    for lab, f in pairs:
        if not f:
            continue
        key = frozenset(f.terms.items())
        if key in seen:
            continue
        seen.add(key)
        labels.append(lab)
        gens.append(f)
    return gens, labels


# ------------------------------------------------------------------ charts


@dataclass
class Chart:
    """A chart ideal with its variable blocks and substitution table."""

    family: str
    cls: str | None
    indices: tuple
    inst: Instance
    ideal: Ideal
    blocks: dict = field(default_factory=dict)
    subs: dict = field(default_factory=dict)
    vectors: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    @property
    def ring(self) -> PolyRing:
        return self.ideal.ring

    @property
    def name(self) -> str:
        cls = self.cls or "none"
        a, b = self.indices if self.indices else (0, 0)
        return f"{self.family}_n{self.inst.n}_k{self.inst.k}_{cls}_{a}_{b}"

    @property
    def selector(self) -> str:
        if not self.indices:
            return None
        a, b = self.indices
        if self.family == "blowup":
            return f"bl:{a},{b}"
        return f"{self.cls}:{a},{b}"

    def matrix_X(self) -> PolyMatrix:
        """The matrix X = s lam^t - pi I in this chart's ring."""
        s, lam = self.vectors["s"], self.vectors["lam"]
        n = self.inst.n
        pi = self.ring.var(PI)
        return PolyMatrix(self.ring, [[s[i] * lam[j] - (pi if i == j else 0) for j in range(n)] for i in range(n)])


def _check_indices(inst, a, b):
    for v in (a, b):
        if not 1 <= v <= inst.n:
            raise ModelError(f"chart index {v} out of range 1..{inst.n}")


def _vec_names(stem, n):
    return [f"{stem}_{i}" for i in range(1, n + 1)]


def build_local_chart(n: int, k: int, sign: str = "sec33") -> Chart:
    inst = instance(n, k)
    names = [f"x_{i}_{j}" for i in range(1, n + 1) for j in range(1, n + 1)]
    ring = make_ring(names)
    X = PolyMatrix(ring, [[ring.var(f"x_{i}_{j}") for j in range(1, n + 1)] for i in range(1, n + 1)])
    rels = lm_relations(inst, X, sign) + spin_relations(inst, X)
    gens, labels = _dedupe(rels)
    ch = Chart("local", None, (), inst, Ideal(ring, gens, labels), config={"sign_variant": sign})
    ch.blocks = {"X": names}
    ch.extra["tally"] = len(rels)
    ch.extra["X"] = X
    return ch


def _kramer_ring(n):
    return make_ring(_vec_names("s", n) + _vec_names("t", n) + _vec_names("lam", n) + _vec_names("mu", n))


def _span_relations(inst, ring, s, t, alpha, beta):
    pi = ring.var(PI)
    left = [s[i - 1] if not inst.is_mid(i) else pi * s[i - 1] for i in range(1, inst.n + 1)]
    right = [pi * t[i - 1] if not inst.is_mid(i) else t[i - 1] for i in range(1, inst.n + 1)]
    out = []
    for i in range(1, inst.n + 1):
        if i != beta:
            out.append((f"SPAN.s[{i}]", left[i - 1] - left[beta - 1] * t[i - 1]))
    for i in range(1, inst.n + 1):
        if i != alpha:
            out.append((f"SPAN.t[{i}]", right[i - 1] - right[alpha - 1] * s[i - 1]))
    return out


def _block_names(inst, stem):
    n, k = inst.n, inst.k
    return {
        f"{stem}1": [f"{stem}_{i}" for i in range(1, k + 1)],
        f"{stem}2": [f"{stem}_{i}" for i in range(k + 1, n - k + 1)],
        f"{stem}3": [f"{stem}_{i}" for i in range(n - k + 1, n + 1)],
    }


def _subs_table(inst, X: PolyMatrix, Y: PolyMatrix | None = None):
    out = {}
    for name, M in std_blocks(inst, X).items():
        for i in range(M.nrows):
            for j in range(M.ncols):
                out[f"{name}_{i + 1}_{j + 1}"] = M[i, j]
    if Y is not None:
        for i in range(Y.nrows):
            for j in range(Y.ncols):
                out[f"Y_{i + 1}_{j + 1}"] = Y[i, j]
    return out


def build_kramer_chart(n: int, k: int, alpha: int, beta: int, sign: str = "sec33") -> Chart:
    inst = instance(n, k)
    _check_indices(inst, alpha, beta)
    ring = _kramer_ring(n)
    s = [ring.var(v) for v in _vec_names("s", n)]
    t = [ring.var(v) for v in _vec_names("t", n)]
    lam = [ring.var(v) for v in _vec_names("lam", n)]
    mu = [ring.var(v) for v in _vec_names("mu", n)]
    pi = ring.var(PI)
    X = PolyMatrix(ring, [[s[i] * lam[j] - (pi if i == j else 0) for j in range(n)] for i in range(n)])
    Y = upsilon_conj(inst, X)
    rels = [("NORM.s", s[alpha - 1] - 1), ("NORM.t", t[beta - 1] - 1)]
    for i in range(n):
        for j in range(n):
            rels.append((f"Y=t.mu[{i + 1},{j + 1}]", Y[i, j] + (pi if i == j else 0) - t[i] * mu[j]))
    rels.append(("TRACE.lam", sum((lam[i] * s[i] for i in range(n)), ring.zero()) - pi * 2))
    rels.append(("TRACE.mu", sum((mu[i] * t[i] for i in range(n)), ring.zero()) - pi * 2))
    rels += _span_relations(inst, ring, s, t, alpha, beta)
    rels += lm_relations(inst, X, sign)
    gens, labels = _dedupe(rels)
    ch = Chart("kramer", chart_class(inst, alpha, beta), (alpha, beta), inst, Ideal(ring, gens, labels))
    ch.config = {"sign_variant": sign}
    ch.vectors = {"s": s, "t": t, "lam": lam, "mu": mu}
    for stem in ("s", "t", "lam", "mu"):
        ch.blocks.update(_block_names(inst, stem))
    ch.subs = _subs_table(inst, X, Y)
    return ch


def simplified_relations(inst: Instance, ring, s, t, lam, mu, trace: str = "two-pi"):
    """Relations (i)-(iv) of the simplified presentation, for given vectors."""
    n, k = inst.n, inst.k
    pi = ring.var(PI)
    X = PolyMatrix(ring, [[s[i] * lam[j] - (pi if i == j else 0) for j in range(n)] for i in range(n)])
    bl = std_blocks(inst, X)
    Ik = PolyMatrix.identity(ring, k)
    out = []
    if k:
        FE = bl["F"].ad() @ bl["E"]
        FF = bl["F"].ad() @ bl["F"]
        EE = bl["E"].ad() @ bl["E"]
        EF = bl["E"].ad() @ bl["F"]
        out += _entries("SIMP(i).A", bl["A"] + FE.scale(HALF) + Ik.scale(pi))
        out += _entries("SIMP(i).B", bl["B"] + FF.scale(HALF))
        out += _entries("SIMP(i).C", bl["C"] - EE.scale(HALF))
        out += _entries("SIMP(i).D", bl["D"] - EF.scale(HALF) + Ik.scale(pi))
        out += _entries("SIMP(ii).M", bl["M"] - bl["E"].ad().scale(pi))
        out += _entries("SIMP(ii).L", bl["L"] + bl["F"].ad().scale(pi))
    out += _entries("SIMP(iii)", bl["X4"] - bl["X4"].ad())
    c = 2 if trace == "two-pi" else 1
    mid = inst.mid
    out.append(("SIMP(iv).lam", sum((lam[i - 1] * s[i - 1] for i in mid), ring.zero()) - pi * c))
    out.append(("SIMP(iv).mu", sum((mu[i - 1] * t[i - 1] for i in mid), ring.zero()) - pi * c))
    return out


def build_simplified_chart(n: int, k: int, alpha: int, beta: int, trace: str = "two-pi") -> Chart:
    inst = instance(n, k)
    _check_indices(inst, alpha, beta)
    ring = _kramer_ring(n)
    s = [ring.var(v) for v in _vec_names("s", n)]
    t = [ring.var(v) for v in _vec_names("t", n)]
    lam = [ring.var(v) for v in _vec_names("lam", n)]
    mu = [ring.var(v) for v in _vec_names("mu", n)]
    pi = ring.var(PI)
    X = PolyMatrix(ring, [[s[i] * lam[j] - (pi if i == j else 0) for j in range(n)] for i in range(n)])
    Y = upsilon_conj(inst, X)
    rels = [("NORM.s", s[alpha - 1] - 1), ("NORM.t", t[beta - 1] - 1)]
    rels += simplified_relations(inst, ring, s, t, lam, mu, trace)
    for i in range(n):
        for j in range(n):
            rels.append((f"SIMP(v)[{i + 1},{j + 1}]", Y[i, j] + (pi if i == j else 0) - t[i] * mu[j]))
    rels += [(lab.replace("SPAN", "SIMP(vi)"), f) for lab, f in _span_relations(inst, ring, s, t, alpha, beta)]
    gens, labels = _dedupe(rels)
    ch = Chart("simplified", chart_class(inst, alpha, beta), (alpha, beta), inst, Ideal(ring, gens, labels))
    ch.config = {"trace_variant": trace}
    ch.vectors = {"s": s, "t": t, "lam": lam, "mu": mu}
    for stem in ("s", "t", "lam", "mu"):
        ch.blocks.update(_block_names(inst, stem))
    ch.subs = _subs_table(inst, X, Y)
    return ch


# ------------------------------------------------- class presentations


@dataclass
class _Pres:
    ring: PolyRing
    gens: list
    labels: list
    vectors: dict
    psi: dict
    extra: dict


def _sigma(inst, vec):
    """Sum over the middle block of v_i v_{i^v}."""
    ring = vec[0].ring
    acc = ring.zero()
    for i in inst.mid:
        acc = acc + vec[i - 1] * vec[inst.dual(i) - 1]
    return acc


def _lam_mu(inst, c, t, s):
    n = inst.n
    lam = [(c * t[inst.dual(i) - 1]).scale(inst.eps(inst.dual(i))) for i in range(1, n + 1)]
    mu = [(c * s[inst.dual(i) - 1]).scale(inst.eps(i)) for i in range(1, n + 1)]
    return lam, mu


def _pres_class_i(inst, alpha, beta):
    n = inst.n
    av = inst.dual(alpha)
    names = [f"t_{i}" for i in inst.outer if i <= inst.k] + [f"s_{i}" for i in inst.mid]
    names += [f"t_{i}" for i in inst.outer if i > inst.k]
    names += [f"t_{alpha}", f"s_{beta}", f"mu_{av}"]
    ring = make_ring(names)
    V = ring.var
    pi = V(PI)
    ta, sb, m = V(f"t_{alpha}"), V(f"s_{beta}"), V(f"mu_{av}")
    s, t = [], []
    for i in range(1, n + 1):
        if inst.is_mid(i):
            s.append(V(f"s_{i}"))
            t.append(ta if i == alpha else ta * V(f"s_{i}"))
        else:
            t.append(V(f"t_{i}"))
            s.append(sb if i == beta else sb * V(f"t_{i}"))
    c = m.scale(inst.eps(av))
    lam, mu = _lam_mu(inst, c, t, s)
    sig = _sigma(inst, s)
    gens = [t[beta - 1] - 1, s[alpha - 1] - 1, ta * sb - pi, m * ta * sig - pi * 2, m * sb * 2 - m * m * sig]
    labels = ["t_beta - 1", "s_alpha - 1", "t_alpha s_beta - pi", "mu t_alpha Sigma - 2 pi", "2 mu s_beta - mu^2 Sigma"]
    psi = {v: v for v in ring.names}
    extra = {"Sigma": sig, "mu": f"mu_{av}", "t_alpha": f"t_{alpha}", "s_beta": f"s_{beta}"}
    return _Pres(ring, gens, labels, {"s": s, "t": t, "lam": lam, "mu": mu}, psi, extra)


def _pres_class_ii(inst, alpha, beta):
    n = inst.n
    av = inst.dual(alpha)
    z = f"z_s_{beta}"
    ring = make_ring(_vec_names("s", n) + [f"lam_{av}", z])
    V = ring.var
    pi = V(PI)
    s = [V(f"s_{i}") for i in range(1, n + 1)]
    lv, zv = V(f"lam_{av}"), V(z)
    hat = [s[i - 1] * pi if inst.is_mid(i) else s[i - 1] for i in range(1, n + 1)]
    t = [zv * h for h in hat]
    e_a = inst.eps(alpha)
    lam = [(lv * hat[inst.dual(i) - 1]).scale(e_a * inst.eps(inst.dual(i))) for i in range(1, n + 1)]
    c = (lv * s[beta - 1]).scale(e_a)
    mu = [(c * s[inst.dual(i) - 1]).scale(inst.eps(i)) for i in range(1, n + 1)]
    sig = _sigma(inst, s)
    # the sign e_a is +1 for alpha <= k; block-3 indices flip it
    gens = [s[alpha - 1] - 1, lv * lv * sig - lv * (2 * e_a), pi * lv * sig - pi * (2 * e_a), zv * s[beta - 1] - 1]
    labels = ["s_alpha - 1", "lam^2 Sigma - 2 e lam", "pi lam Sigma - 2 e pi", "z s_beta - 1"]
    psi = {v: v for v in ring.names}
    psi[z] = f"t_{alpha}"
    extra = {"Sigma": sig, "lam": f"lam_{av}", "inverse": z, "inverts": f"s_{beta}"}
    return _Pres(ring, gens, labels, {"s": s, "t": t, "lam": lam, "mu": mu}, psi, extra)


def _pres_class_iii(inst, alpha, beta):
    n = inst.n
    bv = inst.dual(beta)
    z = f"z_t_{alpha}"
    ring = make_ring(_vec_names("t", n) + [f"mu_{bv}", z])
    V = ring.var
    pi = V(PI)
    t = [V(f"t_{i}") for i in range(1, n + 1)]
    mv, zv = V(f"mu_{bv}"), V(z)
    check = [t[i - 1] if inst.is_mid(i) else t[i - 1] * pi for i in range(1, n + 1)]
    s = [zv * c for c in check]
    ta = t[alpha - 1]
    lam = [(mv * ta * t[inst.dual(i) - 1]).scale(inst.eps(inst.dual(i))) for i in range(1, n + 1)]
    mu = [(mv * check[inst.dual(i) - 1]).scale(inst.eps(i)) for i in range(1, n + 1)]
    sig = _sigma(inst, t)
    gens = [t[beta - 1] - 1, mv * sig - pi * 2, zv * ta - 1]
    labels = ["t_beta - 1", "mu Sigma_t - 2 pi", "z t_alpha - 1"]
    psi = {v: v for v in ring.names}
    psi[z] = f"s_{beta}"
    extra = {"Sigma": sig, "mu": f"mu_{bv}", "inverse": z, "inverts": f"t_{alpha}"}
    return _Pres(ring, gens, labels, {"s": s, "t": t, "lam": lam, "mu": mu}, psi, extra)


_PRES = {"i": _pres_class_i, "ii": _pres_class_ii, "iii": _pres_class_iii}


def _pres_chart(family, inst, cls, alpha, beta, pres, gens, labels):
    ch = Chart(family, cls, (alpha, beta), inst, Ideal(pres.ring, gens, labels))
    ch.vectors = pres.vectors
    ch.extra = dict(pres.extra)
    ch.extra["psi"] = pres.psi
    ch.blocks = {"vars": list(pres.ring.names)}
    X = ch.matrix_X()
    ch.subs = _subs_table(inst, X, upsilon_conj(inst, X))
    for stem in ("s", "t", "lam", "mu"):
        for i, f in enumerate(pres.vectors[stem], 1):
            ch.subs[f"{stem}_{i}"] = f
    return ch


def build_class_presentation(n: int, k: int, alpha: int, beta: int) -> Chart:
    inst = instance(n, k)
    _check_indices(inst, alpha, beta)
    cls = chart_class(inst, alpha, beta)
    if cls == "iv":
        kra = build_kramer_chart(n, k, alpha, beta)
        ch = Chart("class", "iv", (alpha, beta), inst, kra.ideal, kra.blocks, kra.subs, kra.vectors)
        r = kra.ring
        ch.extra["unit_witness"] = r.var(PI) * r.var(f"t_{alpha}") * r.var(f"s_{beta}") - 1
        return ch
    pres = _PRES[cls](inst, alpha, beta)
    return _pres_chart("class", inst, cls, alpha, beta, pres, pres.gens, pres.labels)


def build_spl_chart(n: int, k: int, alpha: int, beta: int, eliminated: bool = False) -> Chart:
    inst = instance(n, k)
    _check_indices(inst, alpha, beta)
    cls = chart_class(inst, alpha, beta)
    if cls == "iv":
        raise ModelError("class (iv) charts lie in the generic fiber; no splitting chart is built")
    pres = _PRES[cls](inst, alpha, beta)
    V = pres.ring.var
    pi = V(PI)
    sig = pres.extra["Sigma"]
    if cls == "i":
        m, ta, sb = V(pres.extra["mu"]), V(pres.extra["t_alpha"]), V(pres.extra["s_beta"])
        gens = pres.gens[:4] + [sb * 2 - m * sig]
        labels = pres.labels[:4] + ["2 s_beta - mu Sigma"]
        if eliminated:
            keep = [v for v in pres.ring.names if v != pres.extra["s_beta"]]
            ring = make_ring(keep)
            sb_img = (m * sig).scale(HALF)
            vec = {
                key: [f.substitute({pres.extra["s_beta"]: sb_img}, ring) for f in vals]
                for key, vals in pres.vectors.items()
            }
            small = _Pres(ring, [], [], vec, {v: v for v in keep}, dict(pres.extra))
            small.extra["Sigma"] = sig.to_ring(ring)
            small.extra["eliminated"] = {pres.extra["s_beta"]: sb_img}
            g = [ring.convert(pres.gens[0]), ring.convert(pres.gens[1]), (m * ta * sig - pi * 2).to_ring(ring)]
            return _pres_chart("spl", inst, cls, alpha, beta, small, g, pres.labels[:2] + ["mu t_alpha Sigma - 2 pi"])
    elif cls == "ii":
        lv, zv = V(pres.extra["lam"]), V(pres.extra["inverse"])
        gens = [pres.gens[0], lv * sig - 2 * inst.eps(alpha), zv * V(pres.extra["inverts"]) - 1]
        labels = ["s_alpha - 1", "lam Sigma - 2 e", "z s_beta - 1"]
    else:
        gens, labels = pres.gens, pres.labels
    return _pres_chart("spl", inst, cls, alpha, beta, pres, gens, labels)


def kramer_to_presentation(pres_chart: Chart) -> dict:
    """Substitution map from Kramer chart variables into the presentation ring."""
    out = {}
    for stem in ("s", "t", "lam", "mu"):
        for i, f in enumerate(pres_chart.vectors[stem], 1):
            out[f"{stem}_{i}"] = f
    out[PI] = pres_chart.ring.var(PI)
    return out


def presentation_to_kramer(pres_chart: Chart, kramer_ring: PolyRing) -> dict:
    return {v: kramer_ring.var(img) for v, img in pres_chart.extra["psi"].items()}


# ------------------------------------------------------------- components


@dataclass
class Component:
    name: str
    ideal: Ideal


@dataclass
class ComponentSpec:
    chart: Chart
    special_fiber: Ideal
    components: list
    expected_count: int
    dropped: list = field(default_factory=list)


def expected_components(case: str, family: str) -> int:
    """Global component count c of the special fiber, plus one for the splitting model."""
    c = {SELF_DUAL: 1, ALMOST_PI_MODULAR: 1, YU: 3, STRONGLY_NON_SPECIAL: 2}[case]
    return c + 1 if family == "spl" else c


def _normalized(f: Poly, chart: Chart) -> Poly:
    """Evaluate the normalized chart coordinates (s_alpha, t_beta) at 1."""
    a, b = chart.indices
    m = {}
    for name in (f"s_{a}", f"t_{b}"):
        if name in chart.ring.index:
            m[name] = 1
    return f.substitute(m) if m else f


def _split_monomial(f: Poly):
    """Variables of f when f is a constant times a product of distinct variables."""
    if len(f.terms) != 1:
        return None
    (mon, _c), = f.terms.items()
    if any(e > 1 for e in mon) or sum(mon) < 2:
        return None
    return [f.ring.names[i] for i, e in enumerate(mon) if e]


def build_components(chart: Chart) -> ComponentSpec:
    if chart.family not in ("class", "spl") or chart.cls not in ("i", "ii", "iii"):
        raise ModelError("components are defined for class and spl charts of classes (i)-(iii)")
    ring = chart.ring
    V = ring.var
    pi = V(PI)
    SF = chart.ideal.with_gens([pi], ["pi"])
    sig = chart.extra["Sigma"]
    raw = []
    if chart.cls == "i":
        m, ta = V(chart.extra["mu"]), V(chart.extra["t_alpha"])
        elim = chart.extra.get("eliminated")
        sb = V(chart.extra["s_beta"]) if not elim else elim[chart.extra["s_beta"]]
        raw.append(("Exc1", [m, sb]))
        if chart.family == "class":
            raw.append(("Exc2", [m, ta]))
        raw.append(("Ztilde1", [sb, sig]))
        raw.append(("Ztilde2", [ta, sb * 2 - m * sig]))
    elif chart.cls == "ii":
        if chart.family == "class":
            raw.append(("F", [V(chart.extra["lam"])]))
            raw.append(("Ztilde2", [V(chart.extra["lam"]) * sig - 2 * chart.inst.eps(chart.indices[0])]))
        else:
            raw.append(("Ztilde2", []))
    else:
        raw.append(("Exc1", [V(chart.extra["mu"])]))
        raw.append(("Ztilde1", [sig]))
    comps, dropped = [], []
    for name, extra in raw:
        if chart.inst.case == YU and name == "Ztilde1":
            parts = _split_monomial(_normalized(sig, chart))
            if parts:
                for j, v in enumerate(parts, 1):
                    rest = [f for f in extra if f is not sig]
                    comps.append(Component(f"{name}.{j}", SF.with_gens(rest + [V(v)])))
                continue
        I = SF.with_gens(extra, [f"{name}:{f}" for f in extra])
        pre = presolve(I, allow_pi=True)
        if pre.unit:
            dropped.append(name)
            continue
        comps.append(Component(name, I))
    return ComponentSpec(chart, SF, comps, expected_components(chart.inst.case, chart.family), dropped)


@dataclass
class AffineCertificate:
    """Outcome of solving a component ideal for its variables.

    ``ok`` means the component is an open subset of affine space: every
    generator was solved either linearly with a constant coefficient or as
    z = -c/f for a variable z occurring in no other generator.  ``affine``
    additionally requires that no such open condition f != 0 was needed.
    """

    ok: bool
    dim: int
    opens: list
    residual: list
    solved: dict

    @property
    def affine(self) -> bool:
        return self.ok and not self.opens

    @property
    def shape(self) -> str:
        if not self.ok:
            return "uncertified"
        out = f"A^{self.dim}"
        for f in self.opens:
            out += f" minus V({f})"
        return out


def _unit_solvable(g: Poly, gens):
    """(variable, f) when g = z*f + c, c a nonzero constant, z only in g and not in f."""
    const = g.terms.get(g.ring.zero_mon)
    if not const:
        return None
    ring = g.ring
    cands = []
    for i in range(ring.nvars):
        if not all(m[i] <= 1 for m in g.terms):
            continue
        if not any(m[i] for m in g.terms):
            continue
        if any(m[i] == 0 and m != ring.zero_mon for m in g.terms):
            continue
        if any(h is not g and any(m[i] for m in h.terms) for h in gens):
            continue
        cands.append(i)
    if not cands:
        return None
    cands.sort(key=lambda i: (not ring.names[i].startswith("z_"), -i))
    i = cands[0]
    f = Poly(ring, {m[:i] + (0,) + m[i + 1:]: c for m, c in g.terms.items() if m[i]})
    return ring.names[i], f


def affine_certificate(I: Ideal) -> AffineCertificate:
    """Solve a component ideal variable by variable; see AffineCertificate."""
    pre = presolve(I, allow_pi=True)
    if pre.unit:
        return AffineCertificate(False, 0, [], ["1"], {})
    rest = [g for g in pre.ideal.groebner() if g] if any(pre.ideal.gens) else []
    solved = {v: str(p) for v, p in pre.sigma.items()}
    opens = []
    progress = True
    while rest and progress:
        progress = False
        for g in rest:
            hit = _unit_solvable(g, rest)
            if hit:
                z, f = hit
                solved[z] = f"{-g.terms[g.ring.zero_mon]}/({f})"
                opens.append(str(f))
                rest = [h for h in rest if h is not g]
                progress = True
                break
    dim = pre.ideal.ring.nvars - len(opens)
    return AffineCertificate(not rest, dim, opens, [str(g) for g in rest], solved)


# ----------------------------------------------------------------- blow-up


def build_blowup_chart(n: int, k: int, gamma: int, eta: int, sign: str = "sec33") -> Chart:
    inst = instance(n, k)
    _check_indices(inst, gamma, eta)
    xs = [f"x_{i}_{j}" for i in range(1, n + 1) for j in range(1, n + 1)]
    ws = [f"w_{i}_{j}" for i in range(1, n + 1) for j in range(1, n + 1)]
    ring = make_ring(xs + ws + ["varpi"])
    V = ring.var
    pi, vp = V(PI), V("varpi")
    X = PolyMatrix(ring, [[V(f"x_{i}_{j}") for j in range(1, n + 1)] for i in range(1, n + 1)])
    W = PolyMatrix(ring, [[V(f"w_{i}_{j}") for j in range(1, n + 1)] for i in range(1, n + 1)])
    I = PolyMatrix.identity(ring, n)
    rels = lm_relations(inst, X, sign) + spin_relations(inst, X)
    cells = [(i, j) for i in range(n) for j in range(n)]
    for i, j in cells:
        rels.append((f"BL.cross[{i + 1},{j + 1}]", X[i, j] * vp - W[i, j] * pi))
    for (a, b), (c, d) in itertools.combinations(cells, 2):
        rels.append((f"BL.rank[{a + 1}{b + 1};{c + 1}{d + 1}]", W[a, b] * X[c, d] - W[c, d] * X[a, b]))
    Wr = reordered_blocks(inst, W)[0]
    rels += _entries("BL.square", Wr @ Wr - I.scale(vp * vp))
    Wp = W + I.scale(vp)
    pairs = list(itertools.combinations(range(n), 2))
    for t, f in enumerate(Wp.minors(2)):
        rs, cs = pairs[t // len(pairs)], pairs[t % len(pairs)]
        rels.append((f"BL.wedge[{rs[0] + 1}{rs[1] + 1};{cs[0] + 1}{cs[1] + 1}]", f))
    rels.append(("BL.det", (W - I.scale(vp)).det()))
    rels += [("BL." + lab, f) for lab, f in linear_relations(inst, W, w=vp)]
    if k:
        bx, bw = std_blocks(inst, X), std_blocks(inst, W)
        Ik = PolyMatrix.identity(ring, k)
        rels += _entries("BL.half.A", bw["A"] + (bx["F"].ad() @ bw["E"]).scale(HALF) + Ik.scale(vp))
        rels += _entries("BL.half.B", bw["B"] + (bx["F"].ad() @ bw["F"]).scale(HALF))
        rels += _entries("BL.half.C", bw["C"] - (bx["E"].ad() @ bw["E"]).scale(HALF))
        rels += _entries("BL.half.D", bw["D"] - (bx["E"].ad() @ bw["F"]).scale(HALF) + Ik.scale(vp))
    rels.append(("BL.chart", W[gamma - 1, eta - 1] + (vp if gamma == eta else 0) - 1))
    gens, labels = _dedupe(rels)
    ch = Chart("blowup", blowup_class(inst, gamma, eta), (gamma, eta), inst, Ideal(ring, gens, labels))
    ch.config = {"sign_variant": sign}
    ch.blocks = {"X": xs, "W": ws, "varpi": ["varpi"]}
    g, e = gamma - 1, eta - 1
    s = [Wp[i, e] for i in range(n)]
    u = [Wp[g, j] for j in range(n)]
    lam = [X[g, j] + (pi if g == j else 0) for j in range(n)]
    ev = inst.eps(inst.dual(eta))
    t = [u[inst.dual(i) - 1].scale(ev * inst.eps(i)) for i in range(1, n + 1)]
    Y = upsilon_conj(inst, X)
    ed = inst.dual(eta) - 1
    mu = [Y[ed, j] + (pi if ed == j else 0) for j in range(n)]
    ch.vectors = {"s": s, "t": t, "lam": lam, "mu": mu, "u": u}
    ch.subs = _subs_table(inst, X, Y)
    for stem in ("s", "t", "lam", "mu", "u"):
        for i, f in enumerate(ch.vectors[stem], 1):
            ch.subs[f"{stem}_{i}"] = f
    if ch.cls == "iv":
        gv, ev_ = inst.dual(gamma) - 1, inst.dual(eta) - 1
        ch.extra["unit_witness"] = pi * u[gv] * s[ev_] - inst.eps(gamma)
    return ch


def chart_iso_map(n: int, k: int, gamma: int, eta: int, sign: str = "sec33"):
    """Return (V chart, U' chart, phi, psi) for a blow-up chart of class (i)-(iii).

    phi sends U' variables to V polynomials and psi sends V variables to U'
    polynomials; the U' chart has alpha = gamma and beta = dual(eta).
    """
    inst = instance(n, k)
    Vc = build_blowup_chart(n, k, gamma, eta, sign)
    if Vc.cls == "iv":
        raise ModelError("blow-up charts of class (iv) lie over the generic fiber")
    alpha, beta = gamma, inst.dual(eta)
    Uc = build_spl_chart(n, k, alpha, beta)
    vv = Vc.vectors
    phi = {}
    for stem in ("s", "t", "lam", "mu"):
        for i in range(1, n + 1):
            name = f"{stem}_{i}"
            if name in Uc.ring.index:
                phi[name] = vv[stem][i - 1]
    phi[PI] = Vc.ring.var(PI)
    if Uc.cls == "ii":
        phi[Uc.extra["inverse"]] = vv["t"][alpha - 1]
    elif Uc.cls == "iii":
        phi[Uc.extra["inverse"]] = vv["s"][beta - 1]
    ur = Uc.ring
    U = ur.var
    pi = U(PI)
    sig = Uc.extra["Sigma"]
    e_b = inst.eps(beta)
    if Uc.cls == "i":
        varpi = (U(Uc.extra["t_alpha"]) * sig).scale(HALF * e_b)
    elif Uc.cls == "ii":
        varpi = (pi * U(Uc.extra["inverse"]) * sig).scale(HALF * e_b)
    else:
        varpi = (U(Uc.extra["inverse"]) * sig).scale(HALF * e_b)
    s, t, lam = Uc.vectors["s"], Uc.vectors["t"], Uc.vectors["lam"]
    u = [t[inst.dual(j) - 1].scale(e_b * inst.eps(inst.dual(j))) for j in range(1, n + 1)]
    psi = {PI: pi, "varpi": varpi}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            d = pi if i == j else ur.zero()
            psi[f"x_{i}_{j}"] = s[i - 1] * lam[j - 1] - d
            psi[f"w_{i}_{j}"] = s[i - 1] * u[j - 1] - (varpi if i == j else ur.zero())
    return Vc, Uc, phi, psi


# ------------------------------------------------- exceptional divisors


@dataclass
class IncidenceSpec:
    """Bihomogeneous incidence data: an ideal plus the projective cone groups."""

    name: str
    ideal: Ideal
    cones: list
    components: dict = field(default_factory=dict)


def _minors_2col(ring, u, v):
    out = []
    for i, j in itertools.combinations(range(len(u)), 2):
        f = u[i] * v[j] - u[j] * v[i]
        if f:
            out.append(f)
    return out


def build_exc_incidence(n: int, k: int):
    """(quiver incidence for the naive exceptional divisor, Bl incidence)."""
    inst = instance(n, k)
    if (2 * k) % n == 0:
        raise ModelError("the quiver description needs 2k not divisible by n")
    an, bn = _vec_names("a", n), _vec_names("b", n)
    ring = PolyRing(an + bn)
    a = [ring.var(v) for v in an]
    b = [ring.var(v) for v in bn]
    zero = ring.zero()
    lk_a = [a[i] if not inst.is_mid(i + 1) else zero for i in range(n)]
    lnk_b = [b[i] if inst.is_mid(i + 1) else zero for i in range(n)]
    gens = _minors_2col(ring, lk_a, b) + _minors_2col(ring, lnk_b, a)
    Q = Ideal(ring, gens)
    quiver = IncidenceSpec("nexc", Q, [an, bn])
    e1 = [f for f in lk_a if f]
    e2 = [f for f in lnk_b if f]
    quiver.components = {"Exc1": Q.with_gens(e1), "Exc2": Q.with_gens(e2), "Exc1&Exc2": Q.with_gens(e1 + e2)}
    mids = inst.mid
    ln = [f"L_{i}" for i in mids]
    ring2 = PolyRing(an + ln)
    a2 = [ring2.var(v) for v in an]
    L2 = [ring2.var(v) for v in ln]
    rho = [a2[i - 1] for i in mids]
    bl = IncidenceSpec("bl", Ideal(ring2, _minors_2col(ring2, rho, L2)), [an, ln])
    return quiver, bl


def qint(m: int, q: int) -> int:
    """Number of points of P^{m-1} over F_q."""
    return sum(q ** i for i in range(m))


def exc_closed_forms(n: int, k: int, q: int) -> dict:
    """Closed-form counts used only as a cross-check of the enumerations."""
    m = n - 2 * k
    return {
        "Exc1": qint(m, q) * qint(2 * k + 1, q),
        "Exc2": qint(2 * k, q) * qint(m + 1, q),
        "Exc1&Exc2": qint(m, q) * qint(2 * k, q),
        "bl": qint(2 * k, q) * qint(m, q) + qint(n, q) - qint(2 * k, q),
    }


def exc1_gluing_charts(n: int, k: int):
    """Splitting charts meeting Exc1 with their Exc1 component ideals."""
    inst = instance(n, k)
    out = []
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            if chart_class(inst, a, b) not in ("i", "iii"):
                continue
            ch = build_spl_chart(n, k, a, b)
            spec = build_components(ch)
            for c in spec.components:
                if c.name == "Exc1":
                    out.append((ch, c.ideal))
    return out


# ----------------------------------------------------------------- pairing


def _lattice_basis(n: int, i: int):
    """O_F0-basis of Lambda_i as (j, exponent of pi) for the vectors pi^e e_j."""
    b, c = divmod(i, n)
    out = []
    for j in range(1, n + 1):
        d = b + 1 if j <= c else b
        out.append((j, -d))
        out.append((j, 1 - d))
    return out


def _form(n, x, y, shift):
    """Value of the F0-bilinear form on pi^p e_i, pi^r e_j as (coef, pi0 exponent).

    shift=1 gives <,> (trace of pi^-1 phi), shift=0 gives (,).
    """
    (i, p), (j, r) = x, y
    if i + j != n + 1:
        return None
    m = p + r - shift
    if m % 2:
        return None
    return ((-1) ** (p % 2), m // 2)


def gram(n: int, i: int, j: int, shift: int):
    """Gram matrix between the bases of Lambda_i and Lambda_j, entries {pi0 exponent: coef}."""
    B1, B2 = _lattice_basis(n, i), _lattice_basis(n, j)
    out = []
    for x in B1:
        row = []
        for y in B2:
            v = _form(n, x, y, shift)
            row.append({} if v is None else {v[1]: Fraction(v[0])})
        out.append(row)
    return out


def pi_matrix(n: int, i: int):
    """Matrix of multiplication by pi on the basis of Lambda_i (columns are images)."""
    B = _lattice_basis(n, i)
    idx = {v: t for t, v in enumerate(B)}
    M = [[{} for _ in B] for _ in B]
    for col, (j, e) in enumerate(B):
        tgt = (j, e + 1)
        if tgt in idx:
            M[idx[tgt]][col] = {0: Fraction(1)}
        else:
            M[idx[(j, e - 1)]][col] = {1: Fraction(1)}
    return M


def pairing_check_data(n: int) -> dict:
    data = {"bases": {}, "gram_alt": {}, "gram_sym": {}, "pi": {}}
    for i in range(-n, n + 1):
        data["bases"][i] = _lattice_basis(n, i)
        data["gram_alt"][i] = gram(n, i, -i, 1)
        data["gram_sym"][i] = gram(n, i, n - i, 0)
        data["pi"][i] = pi_matrix(n, i)
    return data


# ------------------------------------------------------------------ export


def build_chart(family: str, n: int, k: int, indices=None, sign="sec33", trace="two-pi") -> Chart:
    if family == "local":
        return build_local_chart(n, k, sign)
    if indices is None:
        raise ModelError(f"family {family!r} needs chart indices")
    a, b = indices
    if family == "kramer":
        return build_kramer_chart(n, k, a, b, sign)
    if family == "simplified":
        return build_simplified_chart(n, k, a, b, trace)
    if family == "class":
        return build_class_presentation(n, k, a, b)
    if family == "spl":
        return build_spl_chart(n, k, a, b)
    if family == "blowup":
        return build_blowup_chart(n, k, a, b, sign)
    raise ModelError(f"unknown family {family!r}")


def export_chart(chart: Chart) -> tuple[str, str]:
    """(ideal file text, manifest text) for a chart."""
    comments = [f"{chart.family} chart n={chart.inst.n} k={chart.inst.k} class={chart.cls} indices={chart.indices}"]
    text = format_ideal(chart.ideal, comments)
    lines = [f"chart: {chart.name}"]
    for name, vs in chart.blocks.items():
        lines.append(f"block {name}: {','.join(vs)}")
    for name, f in chart.subs.items():
        lines.append(f"{name} = {f}")
    return text, "\n".join(lines) + "\n"


__all__ = [
    "ALMOST_PI_MODULAR", "AffineCertificate", "Chart", "Component", "ComponentSpec", "IncidenceSpec",
    "Instance", "ModelError", "PI_MODULAR", "PolyError", "SELF_DUAL", "STRONGLY_NON_SPECIAL", "YU",
    "affine_certificate", "blowup_class", "build_blowup_chart", "build_chart", "build_class_presentation",
    "build_components", "build_exc_incidence", "build_kramer_chart", "build_local_chart",
    "build_simplified_chart", "build_spl_chart", "build_structure", "chart_class", "chart_iso_map",
    "classify_case", "exc1_gluing_charts", "exc_closed_forms", "export_chart", "instance",
    "kramer_to_presentation", "pairing_check_data", "presentation_to_kramer", "representatives",
]
