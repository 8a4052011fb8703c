# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled point enumeration over F_q; same contract as _kernels_py."""

from libc.stdlib cimport malloc, free


cdef int ALL = 0
cdef int NONZERO = 1
cdef int FIXED = 2
cdef int INVERSE = 3


def enumerate_points(list polys, int nvars, long long q, list kinds, list args, bint collect=False):
    cdef int npoly = len(polys)
    cdef int nterms = 0, nfac = 0, maxdeg = 1
    cdef int i, j, v, e, t, f
    for poly in polys:
        nterms += len(poly)
        for c, exps in poly:
            for e in exps:
                if e:
                    nfac += 1
                    if e > maxdeg:
                        maxdeg = e
    cdef int *pstart = <int *> malloc((npoly + 1) * sizeof(int))
    cdef long long *coef = <long long *> malloc((nterms + 1) * sizeof(long long))
    cdef int *fstart = <int *> malloc((nterms + 1) * sizeof(int))
    cdef int *fvar = <int *> malloc((nfac + 1) * sizeof(int))
    cdef int *fexp = <int *> malloc((nfac + 1) * sizeof(int))
    cdef long long *pw = <long long *> malloc(q * (maxdeg + 1) * sizeof(long long))
    cdef long long *inv = <long long *> malloc(q * sizeof(long long))
    cdef long long *point = <long long *> malloc((nvars + 1) * sizeof(long long))
    cdef int *kind = <int *> malloc((nvars + 1) * sizeof(int))
    cdef int *arg = <int *> malloc((nvars + 1) * sizeof(int))
    cdef int *freev = <int *> malloc((nvars + 1) * sizeof(int))
    cdef int *deps = <int *> malloc((nvars + 1) * sizeof(int))
    cdef int nfree = 0, ndeps = 0
    cdef long long x, acc, term, count = 0
    cdef bint ok, done
    found = [] if collect else None
    try:
        t = 0
        f = 0
        for i in range(npoly):
            pstart[i] = t
            for c, exps in polys[i]:
                coef[t] = (<long long> c) % q
                fstart[t] = f
                for v in range(nvars):
                    e = exps[v]
                    if e:
                        fvar[f] = v
                        fexp[f] = e
                        f += 1
                t += 1
        pstart[npoly] = t
        fstart[t] = f
        for x in range(q):
            acc = 1
            for e in range(maxdeg + 1):
                pw[x * (maxdeg + 1) + e] = acc
                acc = acc * x % q
        inv[0] = 0
        for x in range(1, q):
            inv[x] = pow(x, q - 2, q)
        for v in range(nvars):
            kind[v] = kinds[v]
            arg[v] = args[v]
            point[v] = 0
            if kind[v] == ALL:
                freev[nfree] = v
                nfree += 1
            elif kind[v] == NONZERO:
                freev[nfree] = v
                nfree += 1
                point[v] = 1
            elif kind[v] == FIXED:
                point[v] = arg[v] % q
                if point[v] < 0:
                    point[v] += q
            else:
                deps[ndeps] = v
                ndeps += 1
        done = False
        while not done:
            ok = True
            for j in range(ndeps):
                v = deps[j]
                x = point[arg[v]]
                if x == 0:
                    ok = False
                    break
                point[v] = inv[x]
            if ok:
                for i in range(npoly):
                    acc = 0
                    for t in range(pstart[i], pstart[i + 1]):
                        term = coef[t]
                        for f in range(fstart[t], fstart[t + 1]):
                            term = term * pw[point[fvar[f]] * (maxdeg + 1) + fexp[f]] % q
                            if term == 0:
                                break
                        acc += term
                    if acc % q != 0:
                        ok = False
                        break
                if ok:
                    count += 1
                    if collect:
                        found.append(tuple([point[v] for v in range(nvars)]))
            # odometer step
            done = True
            for j in range(nfree):
                v = freev[j]
                if point[v] + 1 < q:
                    point[v] += 1
                    done = False
                    break
                point[v] = 1 if kind[v] == NONZERO else 0
    finally:
        free(pstart); free(coef); free(fstart); free(fvar); free(fexp)
        free(pw); free(inv); free(point); free(kind); free(arg); free(freev); free(deps)
    return count, found


def count_points(list polys, int nvars, long long q, list kinds, list args):
    return enumerate_points(polys, nvars, q, kinds, args, False)[0]
