"""Groebner bases, membership and ideal operations."""

import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import corpus, random_ideal, zero_set
from ulm.ideal import (
    Guard, GuardTripped, Ideal, contains_all, dim_leading, eliminate, format_ideal, ideal_equal,
    intersect, is_unit_ideal, localize, parse_ideal, presolve, saturate,
)
from ulm.poly import GF, PolyError, PolyRing, make_ring

R = PolyRing(["x", "y", "z"])


def ideal(*gens, ring=R):
    return Ideal(ring, [ring.parse(g) for g in gens])


def sympy_gb(I):
    syms = sympy.symbols(I.ring.names)
    exprs = [sympy.sympify(str(g).replace("^", "**"), locals=dict(zip(I.ring.names, syms))) for g in I.gens]
    G = sympy.groebner(exprs, *syms, order="grevlex")
    return {sympy.expand(g / sympy.Poly(g, *syms).LC(order="grevlex")) for g in G.exprs}


def ours_gb(I):
    syms = sympy.symbols(I.ring.names)
    loc = dict(zip(I.ring.names, syms))
    return {sympy.expand(sympy.sympify(str(g).replace("^", "**"), locals=loc)) for g in I.groebner()}


@pytest.mark.parametrize("gens", [
    ("x^2 - y", "x*y - z"),
    ("x*y - 1", "y*z - x", "z^2 - y"),
    ("x^3 - 2*x*y", "x^2*y - 2*y^2 + x"),
    ("x^2 + y^2 + z^2 - 1", "x - y*z", "y - 1/2*z^2"),
])
def test_groebner_matches_sympy(gens):
    I = ideal(*gens)
    assert ours_gb(I) == sympy_gb(I)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_random_groebner_matches_sympy(seed):
    rng = random.Random(seed)
    I = random_ideal(rng, p=3)
    Q = Ideal(PolyRing(I.ring.names), [str(g) for g in I.gens])
    assert ours_gb(Q) == sympy_gb(Q)


def test_reduced_basis_is_canonical_under_permutation():
    a = ideal("x^2 - y", "x*y - z", "y^2 - x*z")
    b = ideal("y^2 - x*z", "x*y - z", "x^2 - y")
    assert [str(g) for g in a.groebner()] == [str(g) for g in b.groebner()]


def test_membership_and_witness():
    I = ideal("x^2 - y", "x*y - z")
    assert I.contains(R.parse("x^3 - z"))
    v = contains_all(I, [R.parse("x^3 - z"), R.parse("x - 1")], ["ok", "bad"])
    assert not v.ok and v.generator == "bad"
    assert I.reduce(R.parse(v.normal_form)) == R.parse(v.normal_form)


def test_ideal_equal_and_unit():
    assert ideal_equal(ideal("x - y", "y"), ideal("x", "y")).ok
    assert not ideal_equal(ideal("x"), ideal("x", "y")).ok
    assert is_unit_ideal(ideal("x", "x - 1"))
    assert not is_unit_ideal(ideal("x*y - 1"))


def test_eliminate():
    I = ideal("x - y^2", "z - y^3")
    E = eliminate(I, ["y"])
    assert E.ring.names == ("x", "z")
    assert ideal_equal(E, Ideal(E.ring, [E.ring.parse("x^3 - z^2")])).ok


def test_saturate_and_intersect():
    I = ideal("x*y", "x*z")
    S = saturate(I, R.parse("x"))
    assert ideal_equal(S, ideal("y", "z")).ok
    J = intersect(ideal("x"), ideal("y"))
    assert ideal_equal(J, ideal("x*y")).ok


def test_dim_leading():
    assert dim_leading(ideal("x*y")) == 2
    assert dim_leading(ideal("x", "y", "z")) == 0
    assert dim_leading(ideal("1")) == -1


def test_localize_makes_variable_a_unit():
    L = localize(ideal("x*y"), "x")
    assert L.contains(L.ring.parse("y"))


def test_presolve_is_sound():
    ring = make_ring(["a", "b", "c"])
    I = Ideal(ring, [ring.parse(g) for g in ("a - b*c", "2*b - c^2 + pi", "c^3 - pi")])
    pre = presolve(I)
    assert "a" in pre.sigma and "b" in pre.sigma
    for f in ("a*c - b*c^2", "c^3 - pi", "a + b"):
        g = ring.parse(f)
        direct = not I.reduce(g)
        assert direct == (not pre.normal_form(g))
    assert "pi" not in presolve(Ideal(ring, [ring.parse("pi - a")])).sigma


def test_guard_trips():
    I = ideal("x^3 - y*z^2 + 1", "y^3 - x*z + 2", "z^3 - x^2*y - 3")
    with pytest.raises(GuardTripped):
        I.groebner(Guard(max_pairs=1))


def test_file_roundtrip():
    ring = make_ring(["a", "b"])
    I = Ideal(ring, [ring.parse("a*b - pi"), ring.parse("1/2*a^2 - b")])
    text = format_ideal(I, ["example"])
    J = parse_ideal(text)
    assert J.ring.names == ring.names
    assert [str(g) for g in J.gens] == [str(g) for g in I.gens]


@pytest.mark.parametrize("text", ["a*b\n", "ring: a,b\na*c\n", "ring: a,a\n"])
def test_file_errors(text):
    with pytest.raises(PolyError):
        parse_ideal(text)


def test_different_rings_rejected():
    with pytest.raises(PolyError):
        ideal_equal(ideal("x"), Ideal(PolyRing(["u"]), ["u"]))


# corpus-level kernel self-consistency (also reported by the acceptance gate)

CORPUS = corpus()


def test_corpus_shape():
    assert len(CORPUS) == 1000
    for I in CORPUS:
        assert I.ring.nvars <= 4 and len(I.gens) <= 3
        assert max(g.degree() for g in I.gens) <= 3


def test_corpus_membership_agrees_with_points():
    for I in CORPUS:
        gb = I.groebner()
        sols = zero_set(I.gens, I.ring, 3)
        assert sols == zero_set(gb, I.ring, 3)
        for g in I.gens:
            assert I.contains(g)


def test_corpus_groebner_idempotent():
    for I in CORPUS:
        gb = I.groebner()
        again = Ideal(I.ring, gb).groebner()
        assert [str(g) for g in again] == [str(g) for g in gb]


def test_corpus_saturation_monotone():
    for I in CORPUS:
        f = I.ring.var(I.ring.names[0])
        S = saturate(I, f)
        assert all(S.contains(g) for g in I.gens)
        bigger = I.with_gens([I.ring.var(I.ring.names[-1])])
        S2 = saturate(bigger, f)
        assert all(S2.contains(g) for g in S.gens)


def test_gf_domain_in_corpus():
    assert all(I.ring.domain == GF(3) for I in CORPUS[:10])
