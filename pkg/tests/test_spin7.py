"""The calibration four-form, the two-form splitting, and the defect tensor."""

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cayleykit._ratlinalg import rank as exact_rank
from cayleykit.exterior import (
    EXACT,
    FLOAT,
    Multivector,
    Vector,
    apply_signed_permutation,
    form_value,
    hodge_star,
    inner,
    volume_form,
    wedge,
)
from cayleykit.graphs import OrientedPlane
from cayleykit.spin7 import (
    TWO_FORM_INDEX,
    decompose_two_form,
    find_equivalence,
    is_cayley,
    lambda27_basis,
    phi0,
    pi7_projection_scalar,
    tau_eval,
    tau_norm,
)

# the four-form's full coefficient table in the standard coordinates
EXPECTED_TERMS = {
    (1, 2, 3, 4): 1,
    (1, 2, 5, 6): -1,
    (1, 2, 7, 8): -1,
    (1, 3, 5, 7): -1,
    (1, 3, 6, 8): 1,
    (1, 4, 5, 8): -1,
    (1, 4, 6, 7): -1,
    (2, 3, 5, 8): -1,
    (2, 3, 6, 7): -1,
    (2, 4, 5, 7): 1,
    (2, 4, 6, 8): -1,
    (3, 4, 5, 6): -1,
    (3, 4, 7, 8): -1,
    (5, 6, 7, 8): 1,
}

rationals = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))


def test_term_table(phi_exact):
    got = {key: val for key, val in phi_exact.phi.terms.items()}
    assert got == {k: Fraction(v) for k, v in EXPECTED_TERMS.items()}


def test_self_dual(phi_exact):
    assert (hodge_star(phi_exact.phi) - phi_exact.phi).max_abs() == 0


def test_wedge_square_is_fourteen_volumes(phi_exact):
    vol = volume_form(8)
    defect = wedge(phi_exact.phi, phi_exact.phi) - vol.scale(Fraction(14))
    assert defect.max_abs() == 0


def test_norm_squared_is_fourteen(phi_exact):
    assert inner(phi_exact.phi, phi_exact.phi) == 14


def test_projection_is_symmetric_idempotent_rank_seven(phi_exact):
    P = phi_exact.proj7_matrix()
    for i in range(28):
        for j in range(28):
            assert P[i][j] == P[j][i]
            acc = sum(P[i][k] * P[k][j] for k in range(28))
            assert acc == P[i][j]
    assert exact_rank(P) == 7
    comp = [
        [Fraction(int(i == j)) - P[i][j] for j in range(28)]
        for i in range(28)
    ]
    assert exact_rank(comp) == 21


def test_rescaled_projection_scalar(phi_exact):
    assert pi7_projection_scalar(phi_exact) == 2
    P = phi_exact.proj7_matrix()
    Q = phi_exact.pi7_matrix()
    for i in range(28):
        for j in range(28):
            assert Q[i][j] == 2 * P[i][j]


def test_generators_span_the_small_piece(phi_exact):
    gens = lambda27_basis(phi_exact)
    assert len(gens) == 28
    for g in gens:
        assert (phi_exact.proj7_apply(g) - g).max_abs() == 0
    gram = [[inner(a, b) for b in gens] for a in gens]
    assert exact_rank(gram) == 7


@given(
    st.lists(
        st.tuples(st.sampled_from(list(TWO_FORM_INDEX)), rationals),
        min_size=1,
        max_size=5,
    )
)
@settings(max_examples=40)
def test_two_form_decomposition(items):
    Phi = phi0(backend=EXACT)
    a = Multivector(8, dict(items), EXACT)
    dec = decompose_two_form(Phi, a)
    assert (dec.part7 + dec.part21 - a).max_abs() == 0
    assert (Phi.proj7_apply(dec.part7) - dec.part7).max_abs() == 0
    assert Phi.proj7_apply(dec.part21).max_abs() == 0
    assert inner(dec.part7, dec.part21) == 0


def test_defect_anchor_value(phi_exact):
    frame = [Vector.basis(8, i, EXACT) for i in (1, 2, 3, 5)]
    t = tau_eval(phi_exact, *frame)
    assert t.terms == {
        (1, 8): Fraction(-1, 2),
        (2, 7): Fraction(1, 2),
        (3, 6): Fraction(-1, 2),
        (4, 5): Fraction(1, 2),
    }
    e18 = Multivector(8, {(1, 8): Fraction(1)}, EXACT)
    assert (t + phi_exact.pi7_apply(e18)).max_abs() == 0


def test_defect_vanishes_on_calibrated_planes(phi_exact):
    std = [Vector.basis(8, i, EXACT) for i in (1, 2, 3, 4)]
    assert tau_eval(phi_exact, *std).max_abs() == 0
    sl = [Vector.basis(8, i, EXACT) for i in (1, 3, 5, 7)]
    assert tau_eval(phi_exact, *sl).max_abs() == 0


def test_defect_is_alternating(phi_float):
    rng = np.random.default_rng(11)
    vs = [Vector(list(rng.standard_normal(8)), FLOAT) for _ in range(4)]
    t = tau_eval(phi_float, *vs)
    swapped = tau_eval(phi_float, vs[1], vs[0], vs[2], vs[3])
    assert (t + swapped).max_abs() < 1e-12


def test_comass_bound(phi_float):
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(300):
        q, _ = np.linalg.qr(rng.standard_normal((8, 4)))
        rows = [Vector(list(col), FLOAT) for col in q.T]
        worst = max(worst, abs(float(form_value(phi_float.phi, rows))))
    assert worst <= 1.0 + 1e-12


def test_standard_planes_are_calibrated(phi_cy_float):
    std = OrientedPlane.from_rows(
        [[1, 0, 0, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0, 0, 0],
         [0, 0, 1, 0, 0, 0, 0, 0], [0, 0, 0, 1, 0, 0, 0, 0]],
        backend=FLOAT)
    sl = OrientedPlane.from_rows(
        [[1, 0, 0, 0, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0, 0, 0],
         [0, 0, 0, 0, 1, 0, 0, 0], [0, 0, 0, 0, 0, 0, 1, 0]],
        backend=FLOAT)
    for plane in (std, sl):
        verdict = is_cayley(phi_cy_float, plane)
        assert verdict.is_cayley
        assert abs(verdict.phi_value - 1.0) < 1e-12
        assert verdict.tau_norm < 1e-12


def test_kahler_form_equivalence(phi_exact, phi_cy_exact):
    perm, signs = find_equivalence(phi_cy_exact.phi, phi_exact.phi)
    assert perm == (1, 2, 3, 4, 5, 6, 7, 8)
    assert signs == (1, 1, 1, 1, 1, -1, -1, 1)
    pushed = apply_signed_permutation(phi_cy_exact.phi, perm, signs)
    assert (pushed - phi_exact.phi).max_abs() == 0


def test_phase_family_is_still_a_calibration():
    from cayleykit.kahler import build_model
    from cayleykit.spin7 import phi_from_kahler

    model = build_model(4, backend=EXACT,
                        phase_pair=(Fraction(3, 5), Fraction(4, 5)))
    Phi = phi_from_kahler(model)
    assert (hodge_star(Phi.phi) - Phi.phi).max_abs() == 0
    assert inner(Phi.phi, Phi.phi) == 14
    vol = volume_form(8)
    defect = wedge(Phi.phi, Phi.phi) - vol.scale(Fraction(14))
    assert defect.max_abs() == 0


def test_defect_norm_scale(phi_exact):
    frame = [Vector.basis(8, i, EXACT) for i in (1, 2, 3, 5)]
    t = tau_eval(phi_exact, *frame)
    assert tau_norm(t) == pytest.approx(1.0)
