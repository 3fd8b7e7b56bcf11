"""Spectral model of the deformation operator on the flat four-torus."""

from fractions import Fraction

import numpy as np
import pytest

from cayleykit.errors import (
    NonIntegralError,
    ValidationError,
)
from cayleykit import torus_ops
from cayleykit.torus_ops import (
    GAP_FLOOR,
    FourierSection,
    TopologicalInvariants,
    TorusModel,
    chern_consistency_family,
    complex_linear_op,
    constant_section,
    dbar02_matrix,
    dbar_matrix,
    dbar_star_matrix,
    dirac_matrix,
    fd_linearization_check,
    grid_values,
    holomorphic_kernel_match,
    index_from_chern,
    index_from_topology,
    invariants_from_chern,
    kernel_dim,
    kernel_report,
    kernel_summary,
    linear_image_grid,
    nonlinear_F,
    pointwise_linearization_check,
    random_section,
    section_inner,
    section_norm,
    zero_section,
)


# -- kernels ---------------------------------------------------------------------


def test_kernel_dimensions_and_stability():
    summary = kernel_summary(K_values=(0, 1, 2, 3))
    for K, reports in summary["per_K"].items():
        assert reports["dbar"].dim_complex == 2, K
        assert reports["dbar_star"].dim_complex == 2, K
        assert reports["dirac"].dim_complex == 4, K
        assert reports["dirac"].dim_real == 8, K
    assert summary["adjoint_kernel_dim"] == 4
    assert summary["index"] == 0
    assert summary["worst_gap"] >= GAP_FLOOR


def test_kernel_matches_dense_assembly():
    for K in (0, 1):
        model = TorusModel(K)
        for op in (dbar_matrix(model), dbar_star_matrix(model),
                   dirac_matrix(model)):
            rep = kernel_report(op)
            dense = op.dense()
            sig = np.linalg.svd(dense, compute_uv=False)
            thresh = 1e-8 * sig.max()
            nullity = dense.shape[1] - int(np.sum(sig > thresh))
            assert rep.dim_complex == nullity


def test_constants_span_the_kernel():
    model = TorusModel(2)
    op = dirac_matrix(model)
    for fiber in np.eye(4):
        sec = constant_section(model, op.domain, fiber)
        assert section_norm(op.apply(sec)) < 1e-14


def test_dbar_squared_is_zero():
    for K in (1, 2):
        model = TorusModel(K)
        comp = np.einsum(
            "mij,mjk->mik",
            dbar02_matrix(model).blocks,
            dbar_matrix(model).blocks,
        )
        assert np.abs(comp).max() == 0.0


def test_adjoint_is_the_weighted_conjugate_transpose():
    model = TorusModel(2)
    adj = dbar02_matrix(model).adjoint()
    star = dbar_star_matrix(model)
    assert np.abs(adj.blocks - star.blocks).max() == 0.0


def test_adjoint_pairing_identity():
    model = TorusModel(1)
    rng = np.random.default_rng(8)
    op = dbar02_matrix(model)
    for _ in range(5):
        u = random_section(model, op.domain, rng)
        v = random_section(model, op.codomain, rng)
        lhs = section_inner(op.apply(u), v)
        rhs = section_inner(u, op.adjoint().apply(v))
        assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(lhs))


def test_rational_phase_preserves_kernel_counts():
    pair = (Fraction(3, 5), Fraction(4, 5))
    summary = kernel_summary(K_values=(0, 1), phase_pair=pair)
    for reports in summary["per_K"].values():
        assert reports["dirac"].dim_complex == 4
    assert summary["index"] == 0


# -- grid sampling ----------------------------------------------------------------


def test_grid_values_single_mode():
    model = TorusModel(1)
    coeffs = np.zeros((model.mode_count, 1), complex)
    modes = model.modes()
    target = 7  # some fixed mode index
    coeffs[target, 0] = 1.0
    G = 4
    vals = grid_values(model, coeffs, grid=G)
    k = modes[target]
    pts = np.stack(np.meshgrid(*([np.arange(G) / G] * 4), indexing="ij"),
                   axis=-1).reshape(-1, 4)
    want = np.exp(2j * np.pi * (pts @ k))
    assert np.abs(vals[:, 0] - want).max() < 1e-12


def test_grid_values_derivative_factor():
    model = TorusModel(1)
    rng = np.random.default_rng(21)
    coeffs = rng.standard_normal((model.mode_count, 2)) * (
        1.0 + 0.5j)
    for j in (1, 3):
        direct = grid_values(model, coeffs, derivative=j)
        factored = grid_values(
            model, coeffs * (2j * np.pi * model.modes()[:, j - 1:j]), grid=None
        )
        assert np.abs(direct - factored).max() < 1e-12


def test_grid_too_small_rejected():
    model = TorusModel(2)
    coeffs = np.zeros((model.mode_count, 1), complex)
    with pytest.raises(ValidationError):
        grid_values(model, coeffs, grid=4)  # needs at least 2K+1 = 5


# -- the nonlinear defect map -------------------------------------------------------


def _random_pair(model, rng, scale=1.0):
    return (
        random_section(model, "normal10", rng, scale=scale),
        random_section(model, "two_form_normal", rng, scale=scale),
    )


def test_defect_of_zero_section_is_zero():
    model = TorusModel(1)
    v = (zero_section(model, "normal10"), zero_section(model, "two_form_normal"))
    assert np.abs(nonlinear_F(model, v)).max() == 0.0


def test_defect_of_constant_sections_is_zero():
    model = TorusModel(1)
    v = (
        constant_section(model, "normal10", [0.3 - 0.2j, 0.1 + 0.4j]),
        constant_section(model, "two_form_normal", [0.2j, -0.1]),
    )
    assert np.abs(nonlinear_F(model, v)).max() < 1e-13


def test_defect_linearizes_to_the_operator():
    model = TorusModel(1)
    rng = np.random.default_rng(3)
    v = _random_pair(model, rng)
    lin = linear_image_grid(model, v)
    scale = np.abs(lin).max()
    rel = {}
    for t in (1e-4, 1e-5):
        fd = nonlinear_F(model, v, t=t) / t
        rel[t] = np.abs(fd - lin).max() / scale
    assert rel[1e-5] < 1e-5
    # the remainder is quadratic in t after the division
    assert rel[1e-4] / rel[1e-5] > 30


def test_defect_is_odd():
    model = TorusModel(1)
    rng = np.random.default_rng(14)
    for _ in range(3):
        v = _random_pair(model, rng)
        plus = nonlinear_F(model, v, t=0.37)
        minus = nonlinear_F(model, v, t=-0.37)
        assert np.abs(plus + minus).max() == 0.0


def test_remainder_scales_cubically():
    model = TorusModel(1)
    rep = fd_linearization_check(model, samples=20, seed=5)
    usable = [s for s, fl in zip(rep.slopes, rep.flagged_floor) if not fl]
    assert usable, "all samples hit the roundoff floor"
    assert all(2.9 < s < 3.1 for s in usable)
    assert rep.fraction_at_least_band == 1.0
    assert rep.fraction_in_band == 0.0


def test_roundoff_floor_is_flagged():
    model = TorusModel(1)
    rep = fd_linearization_check(model, samples=10, seed=5, scale=1e-4)
    assert all(rep.flagged_floor)


def test_ladder_validation():
    model = TorusModel(1)
    with pytest.raises(ValidationError):
        fd_linearization_check(model, samples=2, t_ladder=(1e-2, 1e-2, 1e-3))
    with pytest.raises(ValidationError):
        fd_linearization_check(model, samples=2, t_ladder=(1e-2, 1e-3))


def test_pointwise_linearization_certificate():
    matches, total = pointwise_linearization_check()
    assert (matches, total) == (64, 64)


# -- the complexified operator pair -------------------------------------------------


def test_complex_operator_kernels():
    model = TorusModel(2)
    A0, A1 = complex_linear_op(model)
    assert kernel_dim(A0) == 4
    assert kernel_dim(A1) == 4
    joint = np.concatenate([A0.blocks, A1.blocks], axis=1)
    sig = np.linalg.svd(joint, compute_uv=False)
    thresh = 1e-8 * sig.max()
    assert joint.shape[0] * 4 - int(np.sum(sig > thresh)) == 4
    assert holomorphic_kernel_match(model) < 1e-12


# -- sections and operators: validation ----------------------------------------------


def test_section_shape_validation():
    model = TorusModel(1)
    with pytest.raises(ValidationError):
        FourierSection("normal10", np.zeros((model.mode_count, 3), complex))


def test_operator_bundle_validation():
    model = TorusModel(1)
    op = dbar_matrix(model)
    wrong = zero_section(model, "two_form_normal")
    with pytest.raises(ValidationError):
        op.apply(wrong)


def test_section_inner_requires_same_bundle():
    model = TorusModel(1)
    a = zero_section(model, "normal10")
    b = zero_section(model, "two_form_normal")
    with pytest.raises(ValidationError):
        section_inner(a, b)


def test_model_validation():
    with pytest.raises(ValidationError):
        TorusModel(-1)
    with pytest.raises(ValidationError):
        TorusModel(1, phase_pair=(Fraction(1, 2), Fraction(1, 2)))


def test_inner_is_positive():
    model = TorusModel(1)
    rng = np.random.default_rng(77)
    for bundle in sorted(torus_ops.BUNDLE_WEIGHTS):
        sec = random_section(model, bundle, rng)
        val = section_inner(sec, sec)
        assert val.real > 0 and abs(val.imag) < 1e-13 * max(1.0, val.real)


# -- index formulas --------------------------------------------------------------------


def test_index_examples():
    assert index_from_topology(TopologicalInvariants(0, 0, 0)) == 0
    assert index_from_topology(TopologicalInvariants(-16, 24, 0)) == 4
    assert index_from_chern(0, 24, 0) == 4


def test_index_rejects_non_integral_combinations():
    with pytest.raises(NonIntegralError):
        index_from_topology(TopologicalInvariants(1, 0, 0))
    with pytest.raises(NonIntegralError):
        invariants_from_chern(1, 0, 0)


def test_chern_route_agrees_with_topology():
    rng = np.random.default_rng(123)
    triples = chern_consistency_family(100, rng)
    assert len(triples) == 100
    for c1sq, c2, c2nu in triples:
        via_chern = index_from_chern(c1sq, c2, c2nu)
        via_topology = index_from_topology(invariants_from_chern(c1sq, c2, c2nu))
        assert via_chern == via_topology


def test_invariants_cross_validation():
    TopologicalInvariants(-16, 24, 0, chern=(0, 24, 0))
    with pytest.raises(ValidationError):
        TopologicalInvariants(-16, 24, 0, chern=(3, 24, 0))
