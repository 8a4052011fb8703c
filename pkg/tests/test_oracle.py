"""Finite-field enumeration: trivial cases, frozen counts and backend parity."""

import itertools
import random

import pytest

from corpus import random_ideal, zero_set
from ulm import _kernels_py, kernels, model as M, oracle
from ulm.ideal import Ideal
from ulm.poly import GF, PolyRing, make_ring


def brute(I, q):
    ring = I.ring
    return sum(1 for pt in itertools.product(range(q), repeat=ring.nvars)
               if all(g.eval_point(pt, q) == 0 for g in I.gens))


def test_zero_and_unit_ideal():
    ring = PolyRing(["a", "b", "c"])
    assert oracle.count_affine(Ideal(ring, []), 3).count == 27
    assert oracle.count_affine(Ideal(ring, [ring.one()]), 5).count == 0


@pytest.mark.parametrize("q", [2, 4, 9, 1])
def test_bad_fields(q):
    ring = PolyRing(["a"])
    with pytest.raises(oracle.OracleError):
        oracle.count_affine(Ideal(ring, []), q)


def test_characteristic_clash():
    ring = PolyRing(["a"])
    with pytest.raises(oracle.OracleError):
        oracle.count_affine(Ideal(ring, [ring.parse("1/3*a - 1")]), 3)


def test_guard(monkeypatch):
    monkeypatch.setenv("ULM_GUARD_POINTS", "10")
    ring = PolyRing(["a", "b", "c"])
    with pytest.raises(oracle.OracleError, match="guard"):
        oracle.count_affine(Ideal(ring, []), 3)


def test_fast_paths_agree_with_brute_force():
    ring = make_ring(["a", "b", "z_a"])
    I = Ideal(ring, [ring.parse("z_a*a - 1"), ring.parse("b - a^2"), ring.parse("pi - 2")])
    assert oracle.count_affine(I, 5).count == brute(I, 5) == 4


def test_random_ideals_agree_with_brute_force():
    rng = random.Random(7)
    for _ in range(60):
        I = random_ideal(rng)
        Q = Ideal(PolyRing(I.ring.names), [str(g) for g in I.gens])
        assert oracle.count_affine(Q, 3).count == brute(Q, 3)


def test_backends_agree():
    spec = M.build_components(M.build_class_presentation(5, 1, 3, 1))
    polys, kinds, args = oracle.compile_ideal(spec.special_fiber, 3)
    nv = spec.special_fiber.ring.nvars
    assert kernels.enumerate_points(polys, nv, 3, kinds, args)[0] == \
        _kernels_py.enumerate_points(polys, nv, 3, kinds, args)[0]
    assert kernels.count_points(polys, nv, 3, kinds, args) == \
        _kernels_py.count_points(polys, nv, 3, kinds, args)


def test_collected_points_vanish():
    ring = PolyRing(["a", "b"], GF(3))
    I = Ideal(ring, [ring.parse("a*b - 1")])
    pc = oracle.count_affine(I, 3, collect=True)
    assert pc.count == 2 and set(pc.points) == zero_set(I.gens, ring, 3)


# frozen counts; values come from independent brute-force enumeration

@pytest.mark.parametrize("q,expected", [(3, {"Exc1": 81, "Ztilde1": 54, "Ztilde2": 81}),
                                        (5, {"Exc1": 625, "Ztilde1": 500, "Ztilde2": 625})])
def test_spl_component_counts_self_dual_alpha(q, expected):
    uc = oracle.count_union_check(M.build_components(M.build_spl_chart(5, 1, 3, 1)), q)
    assert uc.consistent
    assert {k: v for k, v in uc.counts.items() if "&" not in k} == expected


def test_spl_component_counts_generic_alpha():
    uc = oracle.count_union_check(M.build_components(M.build_spl_chart(5, 1, 2, 1)), 3)
    assert uc.consistent
    assert uc.counts == {"Exc1": 81, "Ztilde1": 81, "Ztilde2": 81, "Exc1&Ztilde1": 27,
                         "Exc1&Ztilde2": 27, "Ztilde1&Ztilde2": 27, "Exc1&Ztilde1&Ztilde2": 9}


def test_single_component_union():
    spec = M.build_components(M.build_spl_chart(5, 1, 1, 1))
    uc = oracle.count_union_check(spec, 3)
    assert len(spec.components) == 1 and uc.total == uc.direct


def test_yu_class_iii_union():
    uc = oracle.count_union_check(M.build_components(M.build_spl_chart(4, 1, 2, 2)), 3)
    assert uc.consistent


@pytest.mark.parametrize("n,k,q,expected", [(4, 1, 3, 52), (4, 1, 5, 186), (5, 1, 3, 169), (5, 1, 5, 961)])
def test_bl_incidence_equals_gluing(n, k, q, expected):
    _, bl = M.build_exc_incidence(n, k)
    assert oracle.count_projective_incidence(bl, q).count == expected
    assert oracle.count_exc1_gluing(n, k, q).count == expected
    assert M.exc_closed_forms(n, k, q)["bl"] == expected


def test_quiver_counts():
    quiver, _ = M.build_exc_incidence(5, 1)
    got = {name: oracle.count_projective_incidence(quiver, 3, I).count for name, I in quiver.components.items()}
    assert got == {"Exc1": 169, "Exc2": 160, "Exc1&Exc2": 52}


def test_dimension_probe():
    ring = PolyRing(["a", "b"])
    assert oracle.dimension_probe(Ideal(ring, []), (3, 5))[0] == 2
    spec = M.build_components(M.build_class_presentation(5, 1, 3, 1))
    exc2 = [c for c in spec.components if c.name == "Exc2"][0]
    assert oracle.dimension_probe(exc2.ideal, (3, 5))[0] == 4
    d, counts = oracle.dimension_probe(spec.special_fiber, (3, 5))
    assert d is None and set(counts) == {3, 5}


def test_csv_rows():
    text = oracle.csv_rows([{"target": "t", "q": 3, "m": 2, "count": 9, "component": "all", "ms": 0}])
    assert text == "target,q,m,count,component,ms\nt,3,2,9,all,0\n"


def test_backend_switch():
    import os
    import subprocess
    import sys

    code = "import ulm.kernels as k; print(k.BACKEND)"
    env = dict(os.environ, ULM_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True).stdout.strip()
    assert out == "python"
    assert kernels.BACKEND in ("compiled", "python")
