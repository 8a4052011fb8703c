"""Seeded corpus of small random ideals shared by the kernel tests."""

import itertools
import random

from ulm.ideal import Ideal
from ulm.poly import GF, PolyRing


def random_ideal(rng: random.Random, p: int = 3) -> Ideal:
    nv = rng.randint(1, 4)
    ring = PolyRing("abcd"[:nv], GF(p))
    gens = []
    for _ in range(rng.randint(1, 3)):
        terms = {}
        for _ in range(rng.randint(1, 4)):
            mon = [0] * nv
            for _ in range(rng.randint(0, 3)):
                mon[rng.randrange(nv)] += 1
            terms[tuple(mon)] = rng.randrange(1, p)
        gens.append(ring.from_dict(terms))
    return Ideal(ring, gens)


def corpus(size: int = 1000, seed: int = 20241016):
    rng = random.Random(seed)
    return [random_ideal(rng) for _ in range(size)]


def points(ring, q):
    return itertools.product(range(q), repeat=ring.nvars)


def zero_set(polys, ring, q):
    return {pt for pt in points(ring, q) if all(f.eval_point(pt, q) == 0 for f in polys)}
