"""Sparse multivariate polynomials over QQ and GF(p), plus polynomial matrices.

Polynomials are dictionaries {exponent tuple: coefficient} attached to a ring
that fixes the variable names, the coefficient domain and a monomial order.
The variable ``pi`` (the uniformizer) is always the last variable, so it is
the smallest variable in every supported order.
"""

from __future__ import annotations

import itertools
import re
from fractions import Fraction

try:
    import gmpy2

    _mpq = gmpy2.mpq
except ImportError:  # pragma: no cover
    _mpq = Fraction

PI = "pi"
_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


class PolyError(ValueError):
    """Raised for malformed polynomial input or incompatible rings."""


# ---------------------------------------------------------------- domains


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


class Domain:
    """Coefficient domain: p == 0 means QQ, otherwise GF(p) with p an odd prime."""

    __slots__ = ("p",)

    def __init__(self, p: int = 0):
        if p:
            if p == 2:
                raise PolyError("characteristic 2 is not supported")
            if not _is_prime(p):
                raise PolyError(f"GF({p}) needs a prime modulus")
        self.p = p

    def __eq__(self, other):
        return isinstance(other, Domain) and other.p == self.p

    def __hash__(self):
        return hash(("Domain", self.p))

    def __repr__(self):
        return "QQ" if not self.p else f"GF({self.p})"

    def convert(self, c):
        """Coerce an int, Fraction, mpq or 'a/b' string into the domain."""
        if isinstance(c, str):
            c = Fraction(c)
        if self.p:
            if isinstance(c, int):
                return c % self.p
            num, den = int(c.numerator), int(c.denominator)
            if den % self.p == 0:
                raise PolyError(f"denominator {den} vanishes in {self!r}")
            return num * pow(den, -1, self.p) % self.p
        if isinstance(c, int):
            return _mpq(c)
        return _mpq(int(c.numerator), int(c.denominator))

    def inv(self, c):
        if self.p:
            return pow(c, -1, self.p)
        return 1 / c


QQ = Domain(0)


def GF(p: int) -> Domain:
    return Domain(p)


# ------------------------------------------------------------------ orders


def _grevlex_key(m):
    return (sum(m), tuple(-e for e in reversed(m)))


def _lex_key(m):
    return m


def _block_key(k):
    def key(m):
        a, b = m[:k], m[k:]
        return (sum(a), tuple(-e for e in reversed(a)), sum(b), tuple(-e for e in reversed(b)))

    return key


def order_key(order: str):
    """Return a sort key on exponent tuples; larger key means larger monomial."""
    if order == "grevlex":
        return _grevlex_key
    if order == "lex":
        return _lex_key
    if order.startswith("block:"):
        try:
            k = int(order.split(":", 1)[1])
        except ValueError:
            raise PolyError(f"bad block order {order!r}") from None
        return _block_key(k)
    raise PolyError(f"unknown monomial order {order!r}")


# -------------------------------------------------------------------- ring


class PolyRing:
    """Polynomial ring over a domain with named variables and a monomial order."""

    def __init__(self, names, domain: Domain = QQ, order: str = "grevlex"):
        names = [str(v) for v in names]
        for v in names:
            if not _NAME.match(v):
                raise PolyError(f"bad variable name {v!r}")
        if len(set(names)) != len(names):
            raise PolyError("duplicate variable names")
        if PI in names:
            names = [v for v in names if v != PI] + [PI]
        self.names = tuple(names)
        self.nvars = len(names)
        self.domain = domain
        self.order = order
        self.key = order_key(order)
        if order.startswith("block:") and not 0 <= int(order[6:]) <= self.nvars:
            raise PolyError(f"block size out of range in {order!r}")
        self.index = {v: i for i, v in enumerate(self.names)}
        self.zero_mon = (0,) * self.nvars

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.names == other.names
            and self.domain == other.domain
            and self.order == other.order
        )

    def __hash__(self):
        return hash((self.names, self.domain, self.order))

    def __repr__(self):
        return f"PolyRing({list(self.names)}, {self.domain!r}, {self.order!r})"

    # constructors
    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return self.const(1)

    def const(self, c) -> "Poly":
        c = self.domain.convert(c)
        return Poly(self, {self.zero_mon: c} if c else {})

    def var(self, name: str) -> "Poly":
        if name not in self.index:
            raise PolyError(f"unknown variable {name!r}")
        e = [0] * self.nvars
        e[self.index[name]] = 1
        return Poly(self, {tuple(e): self.domain.convert(1)})

    def gens(self):
        return [self.var(v) for v in self.names]

    def from_dict(self, terms) -> "Poly":
        conv = self.domain.convert
        out = {}
        for m, c in terms.items():
            c = conv(c)
            if c:
                out[tuple(m)] = c
        return Poly(self, out)

    def convert(self, x) -> "Poly":
        """Coerce a Poly from another ring (by variable name), a number, or a string."""
        if isinstance(x, Poly):
            if x.ring == self:
                return x
            return x.to_ring(self)
        if isinstance(x, str):
            return self.parse(x)
        return self.const(x)

    def with_order(self, order: str) -> "PolyRing":
        return PolyRing(self.names, self.domain, order)

    def with_domain(self, domain: Domain) -> "PolyRing":
        return PolyRing(self.names, domain, self.order)

    def parse(self, text: str) -> "Poly":
        return parse_poly(text, self)


def make_ring(names, domain: Domain = QQ, order: str = "grevlex") -> PolyRing:
    """Build a ring; 'pi' is appended last if missing."""
    names = list(names)
    if PI not in names:
        names.append(PI)
    return PolyRing(names, domain, order)


# -------------------------------------------------------------------- poly


class Poly:
    """Immutable-by-convention sparse polynomial."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms

    # basic queries
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.ring.zero_mon in self.terms)

    def const_value(self):
        return self.terms.get(self.ring.zero_mon, self.ring.domain.convert(0))

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def variables(self):
        used = set()
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    used.add(i)
        return [self.ring.names[i] for i in sorted(used)]

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: self.ring.key(t[0]), reverse=True)

    def leading_monomial(self):
        if not self.terms:
            raise PolyError("zero polynomial has no leading monomial")
        return max(self.terms, key=self.ring.key)

    def leading_coefficient(self):
        return self.terms[self.leading_monomial()]

    def monic(self) -> "Poly":
        if not self.terms:
            return self
        return self.scale(self.ring.domain.inv(self.leading_coefficient()))

    # arithmetic
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise PolyError("polynomials live in different rings")
            return other
        return self.ring.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        p = self.ring.domain.p
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v = v + c
                if p:
                    v %= p
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Poly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.domain.p
        if p:
            return Poly(self.ring, {m: (-c) % p for m, c in self.terms.items()})
        return Poly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "Poly":
        c = self.ring.domain.convert(c)
        if not c:
            return self.ring.zero()
        p = self.ring.domain.p
        if p:
            return Poly(self.ring, {m: v * c % p for m, v in self.terms.items()})
        return Poly(self.ring, {m: v * c for m, v in self.terms.items()})

    def mul_term(self, mon, c) -> "Poly":
        p = self.ring.domain.p
        out = {}
        for m, v in self.terms.items():
            nm = tuple(a + b for a, b in zip(m, mon))
            v = v * c
            if p:
                v %= p
            out[nm] = v
        return Poly(self.ring, out)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        other = self._coerce(other)
        if len(self.terms) > len(other.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        p = self.ring.domain.p
        out = {}
        get = out.get
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                m = tuple(x + y for x, y in zip(m1, m2))
                out[m] = get(m, 0) + c1 * c2
        if p:
            out = {m: c % p for m, c in out.items() if c % p}
        else:
            out = {m: c for m, c in out.items() if c}
        return Poly(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise PolyError("negative exponent")
        result = self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self.terms == other.terms
        try:
            return self == self.ring.const(other)
        except (TypeError, PolyError):
            return NotImplemented

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    # conversions
    def to_ring(self, ring: PolyRing) -> "Poly":
        """Move into a ring containing all used variables (matched by name)."""
        idx = []
        for i, v in enumerate(self.ring.names):
            j = ring.index.get(v)
            idx.append(j)
        out = {}
        conv = ring.domain.convert
        for m, c in self.terms.items():
            e = [0] * ring.nvars
            for i, k in enumerate(m):
                if k:
                    j = idx[i]
                    if j is None:
                        raise PolyError(f"variable {self.ring.names[i]!r} missing in target ring")
                    e[j] = k
            c = conv(_as_fraction(c))
            if c:
                out[tuple(e)] = c
        return Poly(ring, out)

    def substitute(self, mapping: dict, ring: PolyRing | None = None) -> "Poly":
        """Replace variables by polynomials; unmapped variables map to themselves."""
        target = ring or self.ring
        images = []
        for v in self.ring.names:
            if v in mapping:
                images.append(target.convert(mapping[v]))
            elif target is self.ring:
                images.append(target.var(v))
            elif v in target.index:
                images.append(target.var(v))
            else:
                images.append(None)
        cache = {}

        def power(i, e):
            key = (i, e)
            if key not in cache:
                if images[i] is None:
                    raise PolyError(f"variable {self.ring.names[i]!r} has no image")
                cache[key] = images[i] ** e
            return cache[key]

        out = target.zero()
        conv = target.domain.convert
        for m, c in self.terms.items():
            t = target.const(conv(_as_fraction(c)))
            for i, e in enumerate(m):
                if e:
                    t = t * power(i, e)
            out = out + t
        return out

    def eval_point(self, point, q: int) -> int:
        """Evaluate mod q at point (sequence of ints in ring variable order)."""
        total = 0
        for m, c in self.terms.items():
            c = _as_fraction(c)
            num, den = int(c.numerator), int(c.denominator)
            if den % q == 0:
                raise PolyError(f"coefficient {c} undefined mod {q}")
            v = num * pow(den, -1, q)
            for x, e in zip(point, m):
                if e:
                    v = v * pow(x, e, q)
            total += v
        return total % q

    # printing
    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)!r})"


def _as_fraction(c):
    if isinstance(c, int):
        return Fraction(c)
    return Fraction(int(c.numerator), int(c.denominator))


# ------------------------------------------------------------- text format


def _fmt_coeff(c, ring) -> str:
    if ring.domain.p:
        return str(int(c))
    f = _as_fraction(c)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def format_poly(f: Poly) -> str:
    """Canonical text: terms in decreasing monomial order."""
    if not f.terms:
        return "0"
    parts = []
    ring = f.ring
    for m, c in f.sorted_terms():
        neg = False
        if not ring.domain.p and c < 0:
            neg, c = True, -c
        factors = []
        for v, e in zip(ring.names, m):
            if e == 1:
                factors.append(v)
            elif e:
                factors.append(f"{v}^{e}")
        cs = _fmt_coeff(c, ring)
        if not factors:
            body = cs
        elif cs == "1":
            body = "*".join(factors)
        else:
            body = cs + "*" + "*".join(factors)
        parts.append(("-" if neg else "+", body))
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(.))")


def _tokenize(text: str):
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if mt is None:
            break
        pos = mt.end()
        if mt.group(1) is not None:
            toks.append(("int", int(mt.group(1))))
        elif mt.group(2) is not None:
            toks.append(("name", mt.group(2)))
        else:
            ch = mt.group(3)
            if ch.isspace():
                continue
            if ch not in "+-*/^":
                raise PolyError(f"unexpected character {ch!r}")
            toks.append(("op", ch))
    return toks


def parse_poly(text: str, ring: PolyRing) -> Poly:
    """Parse sums of terms ``[c*]x^a*y^b...``; a leading sign and bare constants are accepted."""
    toks = _tokenize(text)
    if not toks:
        raise PolyError("empty polynomial")
    pos = 0
    conv = ring.domain.convert

    def peek():
        return toks[pos] if pos < len(toks) else (None, None)

    result = {}
    sign = 1
    if peek() == ("op", "-"):
        sign, pos = -1, pos + 1
    elif peek() == ("op", "+"):
        pos += 1
    while True:
        coeff = Fraction(sign)
        mon = [0] * ring.nvars
        kind, val = peek()
        if kind == "int":
            num = val
            pos += 1
            if peek() == ("op", "/"):
                pos += 1
                k2, den = peek()
                if k2 != "int" or den == 0:
                    raise PolyError("bad rational coefficient")
                pos += 1
                coeff *= Fraction(num, den)
            else:
                coeff *= num
            if peek() == ("op", "*"):
                pos += 1
                kind, val = peek()
                if kind != "name":
                    raise PolyError("expected a variable after '*'")
            else:
                kind = None
        elif kind != "name":
            raise PolyError(f"expected a term, got {val!r}")
        while kind == "name":
            if val not in ring.index:
                raise PolyError(f"unknown variable {val!r}")
            pos += 1
            e = 1
            if peek() == ("op", "^"):
                pos += 1
                k2, e = peek()
                if k2 != "int":
                    raise PolyError("exponent must be a non-negative integer")
                pos += 1
            mon[ring.index[val]] += e
            if peek() == ("op", "*"):
                pos += 1
                kind, val = peek()
                if kind != "name":
                    raise PolyError("expected a variable after '*'")
            else:
                kind = None
        m = tuple(mon)
        result[m] = result.get(m, Fraction(0)) + coeff
        kind, val = peek()
        if kind is None:
            break
        if kind == "op" and val in "+-":
            sign = 1 if val == "+" else -1
            pos += 1
            continue
        raise PolyError(f"unexpected token {val!r}")
    return ring.from_dict({m: conv(c) for m, c in result.items() if c})


# ----------------------------------------------------------------- matrices


class PolyMatrix:
    """Dense matrix of polynomials over one ring."""

    def __init__(self, ring: PolyRing, rows):
        self.ring = ring
        self.rows = [[ring.convert(x) for x in row] for row in rows]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        if any(len(r) != self.ncols for r in self.rows):
            raise PolyError("ragged matrix")

    @classmethod
    def identity(cls, ring, n, c=1):
        return cls(ring, [[c if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, ring, r, c):
        return cls(ring, [[0] * c for _ in range(r)])

    @classmethod
    def from_function(cls, ring, r, c, fn):
        return cls(ring, [[fn(i, j) for j in range(c)] for i in range(r)])

    @classmethod
    def column(cls, ring, entries):
        return cls(ring, [[x] for x in entries])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def entries(self):
        return [x for row in self.rows for x in row]

    def __add__(self, other):
        return PolyMatrix(self.ring, [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return PolyMatrix(self.ring, [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __neg__(self):
        return PolyMatrix(self.ring, [[-a for a in r] for r in self.rows])

    def scale(self, c):
        return PolyMatrix(self.ring, [[a * c for a in r] for r in self.rows])

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise PolyError("shape mismatch in matrix product")
        zero = self.ring.zero()
        out = []
        for i in range(self.nrows):
            row = []
            for j in range(other.ncols):
                acc = zero
                for k in range(self.ncols):
                    a = self.rows[i][k]
                    if a.terms:
                        b = other.rows[k][j]
                        if b.terms:
                            acc = acc + a * b
                row.append(acc)
            out.append(row)
        return PolyMatrix(self.ring, out)

    def T(self):
        return PolyMatrix(self.ring, [list(col) for col in zip(*self.rows)])

    def ad(self):
        """Adjoint H M^T H with H the antidiagonal unit matrix."""
        r, c = self.nrows, self.ncols
        return PolyMatrix(self.ring, [[self.rows[r - 1 - j][c - 1 - i] for j in range(r)] for i in range(c)])

    def block(self, r0, r1, c0, c1):
        return PolyMatrix(self.ring, [row[c0:c1] for row in self.rows[r0:r1]])

    def substitute(self, mapping, ring=None):
        ring = ring or self.ring
        return PolyMatrix(ring, [[x.substitute(mapping, ring) for x in r] for r in self.rows])

    def trace(self):
        acc = self.ring.zero()
        for i in range(min(self.nrows, self.ncols)):
            acc = acc + self.rows[i][i]
        return acc

    def det(self):
        if self.nrows != self.ncols:
            raise PolyError("determinant of a non-square matrix")
        if self.nrows == 0:
            return self.ring.one()
        return _Minors(self).det(tuple(range(self.nrows)), tuple(range(self.ncols)))

    def minors(self, r: int):
        """All r x r minors; row subsets outer, column subsets inner, both lexicographic."""
        mm = _Minors(self)
        out = []
        for rs in itertools.combinations(range(self.nrows), r):
            for cs in itertools.combinations(range(self.ncols), r):
                out.append(mm.det(rs, cs))
        return out

    def __eq__(self, other):
        return isinstance(other, PolyMatrix) and self.rows == other.rows

    def __repr__(self):
        return "PolyMatrix(" + "; ".join(", ".join(str(x) for x in r) for r in self.rows) + ")"


class _Minors:
    """Memoized cofactor expansion along the first row."""

    def __init__(self, m: PolyMatrix):
        self.m = m
        self.memo = {}

    def det(self, rs, cs):
        key = (rs, cs)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        rows = self.m.rows
        if len(rs) == 1:
            val = rows[rs[0]][cs[0]]
        elif len(rs) == 2:
            a, b = rows[rs[0]][cs[0]], rows[rs[0]][cs[1]]
            c, d = rows[rs[1]][cs[0]], rows[rs[1]][cs[1]]
            val = a * d - b * c
        else:
            val = self.m.ring.zero()
            r0, rest = rs[0], rs[1:]
            for j, c in enumerate(cs):
                a = rows[r0][c]
                if not a.terms:
                    continue
                sub = self.det(rest, cs[:j] + cs[j + 1:])
                if not sub.terms:
                    continue
                term = a * sub
                val = val - term if j % 2 else val + term
        self.memo[key] = val
        return val


def antidiag(n: int):
    """Integer antidiagonal unit matrix H_n as nested lists."""
    return [[1 if i + j == n - 1 else 0 for j in range(n)] for i in range(n)]
