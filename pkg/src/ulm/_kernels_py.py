"""Pure-Python point enumeration, used when the compiled core is unavailable.

Polynomials arrive compiled: a list of terms ``(coef mod q, exps)``.
Each variable has a domain kind: 0 all of F_q, 1 nonzero, 2 fixed to
``arg``, 3 the inverse of variable ``arg`` (points where it is zero are
skipped).
"""

import itertools

ALL, NONZERO, FIXED, INVERSE = 0, 1, 2, 3


def _setup(nvars, q, kinds, args):
    free = [v for v in range(nvars) if kinds[v] in (ALL, NONZERO)]
    ranges = [range(q) if kinds[v] == ALL else range(1, q) for v in free]
    return free, ranges


def _evaluate(polys, point, q):
    for poly in polys:
        total = 0
        for c, sparse in poly:
            t = c
            for v, e in sparse:
                t = t * pow(point[v], e, q) % q
                if not t:
                    break
            total += t
        if total % q:
            return False
    return True


def _sparse(polys):
    return [[(c, [(v, e) for v, e in enumerate(exps) if e]) for c, exps in poly] for poly in polys]


def enumerate_points(polys, nvars, q, kinds, args, collect=False):
    """Return (count, points); points is a list only when collect is true."""
    sp = _sparse(polys)
    free, ranges = _setup(nvars, q, kinds, args)
    point = [0] * nvars
    inv = [0] + [pow(x, -1, q) for x in range(1, q)]
    deps = [v for v in range(nvars) if kinds[v] == INVERSE]
    for v in range(nvars):
        if kinds[v] == FIXED:
            point[v] = args[v] % q
    count = 0
    found = [] if collect else None
    for vals in itertools.product(*ranges):
        for v, x in zip(free, vals):
            point[v] = x
        ok = True
        for v in deps:
            base = point[args[v]]
            if base == 0:
                ok = False
                break
            point[v] = inv[base]
        if not ok:
            continue
        if _evaluate(sp, point, q):
            count += 1
            if collect:
                found.append(tuple(point))
    return count, found


def count_points(polys, nvars, q, kinds, args):
    return enumerate_points(polys, nvars, q, kinds, args)[0]
