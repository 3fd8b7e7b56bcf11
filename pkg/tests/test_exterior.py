"""Exact-backend algebra laws of the exterior calculus layer."""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cayleykit.exterior import (
    EXACT,
    FLOAT,
    ExactComplex,
    Multivector,
    Vector,
    hodge_star,
    hook,
    inner,
    musical_flat,
    musical_sharp,
    volume_form,
    wedge,
)
from cayleykit.errors import BackendMismatch, GradeError

rationals = st.builds(Fraction, st.integers(-8, 8), st.integers(1, 6))


def form_strategy(k, n=8):
    keys = list(itertools.combinations(range(1, n + 1), k))
    pairs = st.lists(
        st.tuples(st.sampled_from(keys), rationals), min_size=1, max_size=4
    )
    return pairs.map(lambda items: Multivector(n, dict(items), EXACT))


vectors = st.lists(rationals, min_size=8, max_size=8).map(
    lambda c: Vector(c, EXACT)
)


@given(form_strategy(1), form_strategy(2))
def test_wedge_graded_anticommutativity_odd_even(a, b):
    assert (wedge(a, b) - wedge(b, a)).max_abs() == 0


@given(form_strategy(1), form_strategy(3))
def test_wedge_anticommutes_odd_odd(a, b):
    assert (wedge(a, b) + wedge(b, a)).max_abs() == 0


@given(form_strategy(1), form_strategy(1), form_strategy(2))
def test_wedge_associativity(a, b, c):
    lhs = wedge(wedge(a, b), c)
    rhs = wedge(a, wedge(b, c))
    assert (lhs - rhs).max_abs() == 0


@given(vectors, form_strategy(2), form_strategy(2))
def test_hook_antiderivation(v, a, b):
    lhs = hook(v, wedge(a, b))
    rhs = wedge(hook(v, a), b) + wedge(a, hook(v, b))
    assert (lhs - rhs).max_abs() == 0


@given(vectors, form_strategy(3), form_strategy(2))
def test_hook_is_wedge_adjoint(v, a, b):
    assert inner(hook(v, a), b) == inner(a, wedge(musical_flat(v), b))


@given(form_strategy(2), form_strategy(2))
def test_hodge_defining_property(a, b):
    vol = volume_form(8)
    defect = wedge(a, hodge_star(b)) - vol.scale(inner(a, b))
    assert defect.max_abs() == 0


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_double_star_sign(k):
    key = tuple(range(1, k + 1))
    a = Multivector(8, {key: Fraction(3, 2)}, EXACT)
    sign = (-1) ** (k * (8 - k))
    assert (hodge_star(hodge_star(a)) - a.scale(Fraction(sign))).max_abs() == 0


@given(vectors)
def test_musical_round_trip(v):
    w = musical_sharp(musical_flat(v))
    assert all(a == b for a, b in zip(w.comps, v.comps))


@given(rationals, rationals, rationals, rationals)
def test_exact_complex_is_a_field(ar, ai, br, bi):
    a = ExactComplex(ar, ai)
    b = ExactComplex(br, bi)
    assert (a + b) * a == a * a + b * a
    assert (a * b).conj() == a.conj() * b.conj()
    assert a.abs2() == (a * a.conj()).re
    if b.abs2() != 0:
        q = a / b
        assert q * b == a


def test_volume_form_is_top_basis_element():
    vol = volume_form(8)
    assert vol.terms == {tuple(range(1, 9)): Fraction(1)}


def test_wedge_of_repeated_basis_vanishes():
    a = Multivector(8, {(1, 2): Fraction(1)}, EXACT)
    b = Multivector(8, {(2, 3): Fraction(1)}, EXACT)
    assert wedge(a, b).max_abs() == 0


def test_backend_mixing_rejected():
    a = Multivector(8, {(1, 2): Fraction(1)}, EXACT)
    b = Multivector(8, {(3, 4): 1.0}, FLOAT)
    with pytest.raises(BackendMismatch):
        wedge(a, b)


def test_inner_requires_matching_grade():
    a = Multivector(8, {(1, 2): Fraction(1)}, EXACT)
    b = Multivector(8, {(1, 2, 3): Fraction(1)}, EXACT)
    with pytest.raises(GradeError):
        inner(a, b)


def test_zero_coefficients_are_not_stored():
    a = Multivector(8, {(1, 2): Fraction(0), (3, 4): Fraction(2)}, EXACT)
    assert (3, 4) in a.terms and (1, 2) not in a.terms
