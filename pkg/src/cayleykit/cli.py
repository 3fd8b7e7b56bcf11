"""Command-line verification suites and plane/graph classification tools.

Every subcommand emits a single JSON report: tool metadata, the resolved
configuration, a name-sorted list of checks (each with a status, residual,
tolerance, and details), and a pass/warn/fail summary.  Reports are
deterministic for a fixed seed so repeated runs can be diffed byte for
byte.  Exit status is 0 exactly when no check failed; input problems use
dedicated codes so scripts can tell a failed verification from a bad file.
"""

import argparse
import dataclasses
import json
import sys
from fractions import Fraction

import numpy as np

from .exterior import (
    EXACT,
    FLOAT,
    ExactComplex,
    hodge_star,
    inner,
    volume_form,
    wedge,
)
from ._ratlinalg import rank as exact_rank
from .errors import (
    CayleykitError,
    ConvergenceError,
    InputFormatError,
    ValidationError,
)
from .kahler import (
    TYPE_01,
    TypedVector,
    antiholo_vector,
    build_model,
    hook_identities_check,
    verify_normalization,
)
from .spin7 import (
    find_equivalence,
    is_cayley,
    lambda27_basis,
    phi0,
    phi_from_kahler,
    pi7_projection_scalar,
    tau_eval,
    tau_norm,
)
from .graphs import (
    ComplexGraphCoefficients,
    GraphCoefficients,
    OrientedPlane,
    canonical_angles,
    cr_residual,
    e_isom_checks,
    graph_frame,
    hook_coefficient_oracle,
    is_complex_plane,
    j_invariance_residual,
    normal_isom,
    normal_isom_inverse,
    plane_from_angles,
    random_complex_plane,
    random_graph_coefficients,
    random_plane,
    residual_quadratics,
    solve_complex_graph_linear,
    solve_tau_system,
    tau_graph_components,
    tau_system,
)
from . import torus_ops
from .torus_ops import (
    TopologicalInvariants,
    TorusModel,
    chern_consistency_family,
    fd_linearization_check,
    holomorphic_kernel_match,
    index_from_chern,
    index_from_topology,
    invariants_from_chern,
    kernel_summary,
    pointwise_linearization_check,
)

__version__ = "0.1.0"

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_UNREADABLE = 3
EXIT_MALFORMED = 4

SUITES = ("structure", "planes", "graphs", "angles", "torus", "index", "all")

_DEFAULT_LADDER = (1e-2, 3e-3, 1e-3, 3e-4)


class CliInputError(InputFormatError):
    """A problem with user-supplied input, carrying the exit code."""

    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


@dataclasses.dataclass(frozen=True)
class SuiteConfig:
    """Resolved knobs for one verification run."""

    suite: str = "all"
    backend: str = FLOAT
    tol: float = 1e-9
    seed: int = 0
    samples: int = 200
    K: int = 2
    t_ladder: tuple = _DEFAULT_LADDER
    json_path: str = None
    quiet: bool = False

    def __post_init__(self):
        if self.suite not in SUITES:
            raise ValidationError("unknown suite %r" % (self.suite,))
        if self.backend not in (EXACT, FLOAT):
            raise ValidationError("unknown backend %r" % (self.backend,))
        if self.samples < 1:
            raise ValidationError("samples must be positive")
        if not self.tol > 0.0:
            raise ValidationError("tol must be positive")
        if self.K < 0:
            raise ValidationError("K must be nonnegative")


def _rng(cfg, salt):
    return np.random.default_rng([cfg.seed, salt])


def _num(x):
    """JSON-safe scalar: rationals as strings, numpy scalars unwrapped."""
    if x is None:
        return None
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, ExactComplex):
        return {"re": str(x.re), "im": str(x.im)}
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, complex):
        return {"re": float(x.real), "im": float(x.imag)}
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _num(v) for k, v in x.items()}
    return str(x)


def _check(name, claim, passed, residual=None, tolerance=None, details=None,
           warn=False):
    status = "pass" if passed else "fail"
    if passed and warn:
        status = "warn"
    return {
        "name": name,
        "claim": claim,
        "status": status,
        "residual": _num(residual),
        "tolerance": _num(tolerance),
        "details": _num(details or {}),
    }


# structure suite --------------------------------------------------------------


def _suite_structure(cfg):
    checks = []
    Phi = phi0(backend=EXACT)
    model = build_model(4, backend=EXACT)
    Phic = phi_from_kahler(model)

    terms = Phi.phi.terms
    coeff_ok = len(terms) == 14 and all(
        val in (Fraction(1), Fraction(-1)) for val in terms.values()
    )
    checks.append(_check(
        "cayley-form:term-table", "four-form:unit-coefficients",
        coeff_ok, residual=0 if coeff_ok else 1, tolerance=0,
        details={"terms": len(terms)},
    ))

    sd = (hodge_star(Phi.phi) - Phi.phi).max_abs()
    checks.append(_check(
        "cayley-form:self-dual", "four-form:star-fixed",
        sd == 0, residual=sd, tolerance=0,
    ))
    vol = volume_form(8, backend=EXACT)
    wedge_def = (wedge(Phi.phi, Phi.phi) - vol.scale(Fraction(14))).max_abs()
    checks.append(_check(
        "cayley-form:wedge-square", "four-form:square-is-14-vol",
        wedge_def == 0, residual=wedge_def, tolerance=0,
    ))
    norm_def = inner(Phi.phi, Phi.phi) - Fraction(14)
    checks.append(_check(
        "cayley-form:inner-norm", "four-form:norm-squared-14",
        norm_def == 0, residual=abs(norm_def), tolerance=0,
    ))

    P = Phi.proj7_matrix()
    r7 = exact_rank(P)
    eye = [[Fraction(int(i == j)) for j in range(28)] for i in range(28)]
    comp = [[eye[i][j] - P[i][j] for j in range(28)] for i in range(28)]
    r21 = exact_rank(comp)
    checks.append(_check(
        "two-forms:rank-split", "two-forms:7-21-split",
        (r7, r21) == (7, 21), residual=abs(r7 - 7) + abs(r21 - 21),
        tolerance=0, details={"rank_small": r7, "rank_large": r21},
    ))

    gens = lambda27_basis(Phi)
    fixed = True
    for b in gens:
        if (Phi.proj7_apply(b) - b).max_abs() != 0:
            fixed = False
    gram = [[inner(a, b) for b in gens] for a in gens]
    rk = exact_rank(gram)
    span_ok = len(gens) == 28 and fixed and rk == 7
    checks.append(_check(
        "two-forms:spanning-set", "two-forms:small-piece-generators",
        span_ok, residual=0 if span_ok else 1, tolerance=0,
        details={"count": len(gens), "span_dimension": rk,
                 "fixed_by_projection": fixed},
    ))

    scal = pi7_projection_scalar(Phi)
    checks.append(_check(
        "two-forms:projection-scalar", "two-forms:double-contraction-scalar",
        scal == 2, residual=abs(scal - 2), tolerance=0,
        details={"scalar": scal},
    ))

    worst_norm = Fraction(0)
    for m in (1, 2, 3, 4):
        worst_norm = max(worst_norm, verify_normalization(build_model(m)))
    checks.append(_check(
        "kahler:volume-normalization", "kahler:power-normalization",
        worst_norm == 0, residual=worst_norm, tolerance=0,
    ))

    hooks = hook_identities_check(model)
    checks.append(_check(
        "kahler:hook-identities", "kahler:contraction-identities",
        hooks == 0, residual=hooks, tolerance=0,
    ))

    equiv = find_equivalence(Phic.phi, Phi.phi)
    checks.append(_check(
        "cayley-form:kahler-equivalence", "four-form:model-equivalence",
        equiv is not None, residual=0 if equiv is not None else 1,
        tolerance=0,
        details={} if equiv is None else {
            "permutation": list(equiv[0]), "signs": list(equiv[1])},
    ))

    rep = e_isom_checks(Phic, model)
    worst = max(rep.antiholomorphic_residual, rep.mixed_kill_residual,
                rep.surface_residual)
    checks.append(_check(
        "bundle-isomorphism:seven-piece", "normal-forms:decomposable-identities",
        worst == 0, residual=worst, tolerance=0,
        details={
            "antiholomorphic": rep.antiholomorphic_residual,
            "mixed_kill": rep.mixed_kill_residual,
            "surface": rep.surface_residual,
        },
    ))

    worst_rt = Fraction(0)
    b3 = antiholo_vector(model, 3)
    b4 = antiholo_vector(model, 4)
    combo = b3.scale(ExactComplex(Fraction(2), Fraction(-1))) + b4.scale(
        ExactComplex(Fraction(1, 3), Fraction(5)))
    for cv in (b3, b4, combo):
        tv = TypedVector(vec=cv, vtype=TYPE_01)
        image = normal_isom(model, tv)
        back = normal_isom_inverse(model, image.alpha, image.vector)
        diff = back.vec - tv.vec
        worst_rt = max(worst_rt,
                       *(abs(x) for x in diff.re.comps + diff.im.comps))
    checks.append(_check(
        "bundle-isomorphism:round-trip", "normal-forms:inverse-pair",
        worst_rt == 0, residual=worst_rt, tolerance=0,
    ))
    return checks


# planes suite -----------------------------------------------------------------


def _float_cayley_form():
    return phi_from_kahler(build_model(4, backend=FLOAT))


def _suite_planes(cfg):
    checks = []
    Phi = _float_cayley_form()
    model = build_model(4, backend=FLOAT)
    rng = _rng(cfg, 1)

    contradictions = 0
    cayley_hits = 0
    pool = [random_plane(8, 4, rng) for _ in range(cfg.samples)]
    for _ in range(max(2, cfg.samples // 10)):
        pool.append(random_complex_plane(model.J, 2, rng))
    for plane in pool:
        verdict = is_cayley(Phi, plane)
        by_value = abs(verdict.phi_value - 1.0) < 1e-9
        by_defect = verdict.tau_norm < 1e-7
        if by_value != by_defect:
            contradictions += 1
        if by_value:
            cayley_hits += 1
    checks.append(_check(
        "planes:calibration-defect-equivalence",
        "cayley-criterion:value-vs-defect",
        contradictions == 0, residual=contradictions, tolerance=0,
        details={"planes": len(pool), "cayley_in_sample": cayley_hits},
    ))

    std = OrientedPlane.from_rows(
        [[1, 0, 0, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0, 0, 0],
         [0, 0, 1, 0, 0, 0, 0, 0], [0, 0, 0, 1, 0, 0, 0, 0]],
        backend=FLOAT)
    v_std = is_cayley(Phi, std)
    c_std = is_complex_plane(model, std)
    checks.append(_check(
        "planes:standard-complex-plane", "cayley-criterion:complex-planes",
        v_std.is_cayley and c_std.is_complex,
        residual=max(abs(v_std.phi_value - 1.0), v_std.tau_norm),
        tolerance=1e-9,
        details={"phi_value": v_std.phi_value, "tau_norm": v_std.tau_norm},
    ))

    sl = OrientedPlane.from_rows(
        [[1, 0, 0, 0, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0, 0, 0],
         [0, 0, 0, 0, 1, 0, 0, 0], [0, 0, 0, 0, 0, 0, 1, 0]],
        backend=FLOAT)
    v_sl = is_cayley(Phi, sl)
    c_sl = is_complex_plane(model, sl)
    checks.append(_check(
        "planes:special-lagrangian-plane", "cayley-criterion:lagrangian-branch",
        v_sl.is_cayley and not c_sl.is_complex,
        residual=max(abs(v_sl.phi_value - 1.0), v_sl.tau_norm),
        tolerance=1e-9,
        details={"phi_value": v_sl.phi_value, "tau_norm": v_sl.tau_norm,
                 "is_complex": c_sl.is_complex},
    ))

    disagreements = 0
    tested = 0
    for _ in range(cfg.samples):
        plane = random_plane(8, 4, rng)
        sigma = is_complex_plane(model, plane)
        jres = j_invariance_residual(model.J, plane)
        if sigma.is_complex != (jres < 1e-9):
            disagreements += 1
        tested += 1
    for _ in range(max(2, cfg.samples // 10)):
        plane = random_complex_plane(model.J, 2, rng)
        sigma = is_complex_plane(model, plane)
        jres = j_invariance_residual(model.J, plane)
        if (not sigma.is_complex) or jres > 1e-9:
            disagreements += 1
        tested += 1
    checks.append(_check(
        "planes:complex-detector-agreement", "complex-criterion:hook-vs-rotation",
        disagreements == 0, residual=disagreements, tolerance=0,
        details={"planes": tested},
    ))

    small = build_model(2, backend=FLOAT)
    counter = OrientedPlane.from_rows(
        [[1, 0, 0, 0], [0, 0, 0, 1]], backend=FLOAT)
    verdict = is_complex_plane(small, counter)
    jres = j_invariance_residual(small.J, counter)
    angle = canonical_angles(small, counter).angles[0]
    ok = (verdict.max_sigma < 1e-12 and verdict.max_im is not None
          and abs(verdict.max_im - 1.0) < 1e-12 and not verdict.is_complex
          and jres > 1e-6 and abs(angle - np.pi / 2) < 1e-9)
    checks.append(_check(
        "planes:half-dimension-counterexample",
        "complex-criterion:imaginary-part-needed",
        ok, residual=verdict.max_sigma, tolerance=1e-12,
        details={"real_part_residual": verdict.max_sigma,
                 "imag_part_residual": verdict.max_im,
                 "rotation_residual": jres,
                 "angle": angle},
    ))
    return checks


# graphs suite -----------------------------------------------------------------


def _random_exact_lambda(rng):
    entries = [[Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 5)))
                for _ in range(4)] for _ in range(4)]
    return GraphCoefficients(entries, backend=EXACT)


def _suite_graphs(cfg):
    checks = []
    Phi = phi0(backend=EXACT)
    rng = _rng(cfg, 2)

    worst = Fraction(0)
    for _ in range(6):
        lam = _random_exact_lambda(rng)
        mixed, diagonal = tau_graph_components(lam)
        eqs = tau_system(lam)
        quads = residual_quadratics(lam)
        for got, want in zip(eqs, mixed):
            worst = max(worst, abs(got - want))
        for got, want in zip(quads, diagonal):
            worst = max(worst, abs(got - want))
    checks.append(_check(
        "graph-system:component-identity", "graph-defect:seven-component-match",
        worst == 0, residual=worst, tolerance=0,
    ))

    n_newton = max(5, min(50, cfg.samples // 4))
    solved = 0
    worst_quad = 0.0
    worst_tau = 0.0
    failures = 0
    Phif = phi0(backend=FLOAT)
    for _ in range(n_newton):
        start = random_graph_coefficients(rng, radius=0.25)
        try:
            sol = solve_tau_system(start)
        except (ConvergenceError, ValidationError):
            failures += 1
            continue
        solved += 1
        worst_quad = max(
            worst_quad, max(abs(float(q)) for q in residual_quadratics(sol)))
        frame = graph_frame(sol)
        worst_tau = max(worst_tau, tau_norm(tau_eval(Phif, *frame)))
    checks.append(_check(
        "graph-system:newton-batch", "graph-defect:solutions-are-calibrated",
        failures == 0 and worst_quad < 1e-8 and worst_tau < 1e-8,
        residual=max(worst_quad, worst_tau), tolerance=1e-8,
        details={"attempted": n_newton, "solved": solved,
                 "max_quadratic": worst_quad, "max_defect": worst_tau},
    ))

    worst_sys = 0.0
    for p, m in ((1, 2), (2, 3)):
        big = build_model(m, backend=FLOAT)
        for _ in range(4):
            width = 2 * (m - p)
            lam = tuple(tuple(rng.standard_normal() for _ in range(width))
                        for _ in range(p))
            mu = tuple(tuple(rng.standard_normal() for _ in range(width))
                       for _ in range(p))
            cg = ComplexGraphCoefficients(p, m, lam, mu)
            worst_sys = max(worst_sys, hook_coefficient_oracle(big, cg))
    checks.append(_check(
        "complex-graph:first-order-system", "complex-graph:hook-expansion",
        worst_sys < 1e-12, residual=worst_sys, tolerance=1e-12,
    ))

    model3 = build_model(3, backend=FLOAT)
    worst_cr = 0.0
    all_complex = True
    for _ in range(5):
        cg = solve_complex_graph_linear(model3, 1, rng)
        worst_cr = max(worst_cr, cr_residual(cg))
        frame = [[float(x) for x in v.comps] for v in cg.frame()]
        plane = OrientedPlane.from_rows(_orthonormalize(frame),
                                        backend=FLOAT)
        if not is_complex_plane(model3, plane).is_complex:
            all_complex = False
    checks.append(_check(
        "complex-graph:cauchy-riemann", "complex-graph:kernel-is-holomorphic",
        worst_cr < 1e-9 and all_complex, residual=worst_cr, tolerance=1e-9,
        details={"graphs_are_complex": all_complex},
    ))
    return checks


# angles suite -----------------------------------------------------------------


def _suite_angles(cfg):
    checks = []
    model = build_model(4, backend=FLOAT)
    rng = _rng(cfg, 3)

    n = cfg.samples // 2 or 1
    worst = 0.0
    for _ in range(n):
        target = np.sort(rng.uniform(0.1, 1.4, size=2))
        plane = plane_from_angles(model, tuple(target), rng)
        rec = canonical_angles(model, plane)
        worst = max(worst, float(np.max(np.abs(np.array(rec.angles)
                                               - target))))
    checks.append(_check(
        "angles:round-trip", "canonical-angles:recovery",
        worst < 1e-9, residual=worst, tolerance=1e-9,
        details={"planes": n},
    ))

    worst_c = 0.0
    worst_cos = 0.0
    for _ in range(10):
        plane = random_complex_plane(model.J, 2, rng)
        rec = canonical_angles(model, plane)
        worst_c = max(worst_c, max(abs(a) for a in rec.angles))
        worst_cos = max(worst_cos,
                        max(1.0 - np.cos(a) for a in rec.angles))
    checks.append(_check(
        "angles:complex-plane-zeros", "canonical-angles:complex-degenerate",
        worst_c < 1e-7, residual=worst_c, tolerance=1e-7,
        details={"cosine_defect": worst_cos},
    ))

    sl = OrientedPlane.from_rows(
        [[1, 0, 0, 0, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0, 0, 0],
         [0, 0, 0, 0, 1, 0, 0, 0], [0, 0, 0, 0, 0, 0, 1, 0]],
        backend=FLOAT)
    rec = canonical_angles(model, sl)
    res = max(abs(a - np.pi / 2) for a in rec.angles)
    checks.append(_check(
        "angles:isotropic-right-angles", "canonical-angles:lagrangian-extreme",
        res < 1e-9, residual=res, tolerance=1e-9,
        details={"angles": list(rec.angles)},
    ))
    return checks


# torus suite ------------------------------------------------------------------


def _suite_torus(cfg):
    checks = []
    K_values = tuple(range(min(cfg.K, 3) + 1))
    summary = kernel_summary(K_values=K_values, tol=1e-8)
    top = summary["per_K"][max(K_values)]
    dims = {name: rep.dim_complex for name, rep in top.items()}
    dims_ok = dims == {"dbar": 2, "dbar_star": 2, "dirac": 4}
    checks.append(_check(
        "torus:kernel-dimensions", "flat-model:kernel-counts",
        dims_ok, residual=0 if dims_ok else 1, tolerance=0,
        details={"complex_dims": dims,
                 "real_dims": {k: 2 * v for k, v in dims.items()},
                 "K": max(K_values)},
    ))

    stable = all(
        {name: rep.dim_complex for name, rep in per.items()} == dims
        for per in summary["per_K"].values()
    )
    checks.append(_check(
        "torus:kernel-stability", "flat-model:truncation-independence",
        stable, residual=0 if stable else 1, tolerance=0,
        details={"K_values": list(K_values)},
    ))

    gap_ok = summary["worst_gap"] >= torus_ops.GAP_FLOOR
    checks.append(_check(
        "torus:spectral-gap", "flat-model:isolated-kernel",
        gap_ok, residual=summary["worst_gap"], tolerance=torus_ops.GAP_FLOOR,
    ))

    model = TorusModel(max(K_values))
    adj = torus_ops.dbar02_matrix(model).adjoint()
    star = torus_ops.dbar_star_matrix(model)
    adj_res = float(np.max(np.abs(adj.blocks - star.blocks)))
    rngt = _rng(cfg, 4)
    u = torus_ops.random_section(model, "one_form_normal", rngt)
    v = torus_ops.random_section(model, "two_form_normal", rngt)
    lhs = torus_ops.section_inner(
        torus_ops.dbar02_matrix(model).apply(u), v)
    rhs = torus_ops.section_inner(u, star.apply(v))
    pair_res = abs(lhs - rhs)
    checks.append(_check(
        "torus:adjoint-pairing", "flat-model:formal-adjoint",
        adj_res == 0.0 and pair_res < 1e-10,
        residual=max(adj_res, pair_res), tolerance=1e-10,
        details={"matrix_residual": adj_res, "pairing_residual": pair_res},
    ))

    idx_ok = (summary["index"] == 0
              and index_from_topology(TopologicalInvariants(0, 0, 0)) == 0)
    checks.append(_check(
        "torus:operator-index", "flat-model:index-matches-topology",
        idx_ok, residual=summary["index"], tolerance=0,
        details={"kernel": dims.get("dirac"),
                 "adjoint_kernel": summary["adjoint_kernel_dim"]},
    ))

    fd_model = TorusModel(min(cfg.K, 1))
    rep = fd_linearization_check(
        fd_model, samples=min(cfg.samples, 50), t_ladder=cfg.t_ladder,
        seed=cfg.seed, band=(1.9, 2.1))
    usable = [s for s, fl in zip(rep.slopes, rep.flagged_floor) if not fl]
    fd_ok = (not usable) or rep.fraction_at_least_band >= 0.95
    checks.append(_check(
        "torus:linearization-slope", "deformation-map:derivative-dominates",
        fd_ok,
        residual=None if not usable else min(usable),
        tolerance=rep.band[0],
        details={
            "fraction_in_band": rep.fraction_in_band,
            "fraction_at_least_band": rep.fraction_at_least_band,
            "flagged_roundoff": int(sum(rep.flagged_floor)),
            "samples": len(rep.slopes),
            "slope_min": None if not usable else min(usable),
            "slope_max": None if not usable else max(usable),
        },
        warn=rep.fraction_in_band < 0.95,
    ))

    matches, total = pointwise_linearization_check()
    checks.append(_check(
        "torus:linearization-exact", "deformation-map:derivative-identity",
        matches == total, residual=total - matches, tolerance=0,
        details={"matches": matches, "total": total},
    ))

    A0, A1 = torus_ops.complex_linear_op(model)
    k0 = torus_ops.kernel_dim(A0)
    k1 = torus_ops.kernel_dim(A1)
    joint = np.concatenate([A0.blocks, A1.blocks], axis=1)
    sig = np.linalg.svd(joint, compute_uv=False)
    thresh = 1e-8 * float(sig.max())
    kj = joint.shape[0] * joint.shape[2] - int(np.sum(sig > thresh))
    match_res = holomorphic_kernel_match(model)
    kernels_ok = (k0, k1, kj) == (4, 4, 4) and match_res < 1e-10
    checks.append(_check(
        "torus:complex-kernel-match", "deformation-map:holomorphic-kernel",
        kernels_ok, residual=match_res, tolerance=1e-10,
        details={"first_order": k0, "conjugate": k1, "joint": kj},
    ))
    return checks


# index suite ------------------------------------------------------------------


def _suite_index(cfg):
    checks = []
    flat = index_from_topology(TopologicalInvariants(0, 0, 0))
    checks.append(_check(
        "index:flat-torus", "expected-dimension:flat-case",
        flat == 0, residual=flat, tolerance=0,
        details={"index": flat},
    ))

    k3 = index_from_topology(TopologicalInvariants(-16, 24, 0))
    k3c = index_from_chern(0, 24, 0)
    checks.append(_check(
        "index:k3-surface", "expected-dimension:k3-case",
        k3 == 4 and k3c == 4, residual=abs(k3 - 4) + abs(k3c - 4),
        tolerance=0, details={"topological": k3, "chern": k3c},
    ))

    rng = _rng(cfg, 5)
    triples = chern_consistency_family(100, rng)
    mismatches = sum(
        1 for c1sq, c2, c2nu in triples
        if index_from_chern(c1sq, c2, c2nu)
        != index_from_topology(invariants_from_chern(c1sq, c2, c2nu)))
    checks.append(_check(
        "index:route-agreement", "expected-dimension:chern-equivalence",
        mismatches == 0, residual=mismatches, tolerance=0,
        details={"triples": len(triples)},
    ))
    return checks


_SUITE_BUILDERS = {
    "structure": _suite_structure,
    "planes": _suite_planes,
    "graphs": _suite_graphs,
    "angles": _suite_angles,
    "torus": _suite_torus,
    "index": _suite_index,
}


def run_suite(cfg):
    """Run one suite (or all of them) and return the report dict."""
    if cfg.suite == "all":
        names = [s for s in SUITES if s != "all"]
    else:
        names = [cfg.suite]
    checks = []
    for name in names:
        checks.extend(_SUITE_BUILDERS[name](cfg))
    return _assemble(cfg.suite, cfg, checks)


def _assemble(kind, cfg, checks):
    checks = sorted(checks, key=lambda c: c["name"])
    summary = {
        "pass": sum(1 for c in checks if c["status"] == "pass"),
        "warn": sum(1 for c in checks if c["status"] == "warn"),
        "fail": sum(1 for c in checks if c["status"] == "fail"),
        "total": len(checks),
    }
    config = {
        "suite": kind,
        "backend": cfg.backend,
        "tol": cfg.tol,
        "seed": cfg.seed,
        "samples": cfg.samples,
        "K": cfg.K,
        "t_ladder": list(cfg.t_ladder),
    }
    return {
        "tool": "cayleykit",
        "version": __version__,
        "config": config,
        "checks": checks,
        "summary": summary,
    }


# file-driven subcommands -------------------------------------------------------


def _read_matrix(path, backend):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliInputError(EXIT_UNREADABLE, "cannot read %s: %s" % (path, exc))
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        row = []
        for token in line.split():
            try:
                value = Fraction(token)
            except (ValueError, ZeroDivisionError):
                raise CliInputError(
                    EXIT_MALFORMED, "bad number %r in %s" % (token, path))
            row.append(value if backend == EXACT else float(value))
        rows.append(row)
    if not rows:
        raise CliInputError(EXIT_MALFORMED, "no data rows in %s" % (path,))
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise CliInputError(EXIT_MALFORMED, "ragged rows in %s" % (path,))
    return rows


def _orthonormality_residual(rows):
    mat = np.array([[float(x) for x in r] for r in rows])
    gram = mat @ mat.T
    return float(np.max(np.abs(gram - np.eye(len(rows)))))


def _orthonormalize(rows):
    mat = np.array([[float(x) for x in r] for r in rows])
    q, r = np.linalg.qr(mat.T)
    flips = np.where(np.diag(r) < 0.0, -1.0, 1.0)
    q = q * flips[None, :]
    return [list(col) for col in q.T]


def classify_plane(path, cfg, reject=False):
    rows = _read_matrix(path, FLOAT)
    k, n = len(rows), len(rows[0])
    if k % 2 != 0 or n % 2 != 0 or k > n:
        raise CliInputError(
            EXIT_MALFORMED,
            "need a 2p x 2m frame with 2p <= 2m, got %d x %d" % (k, n))
    checks = []
    res = _orthonormality_residual(rows)
    if res > cfg.tol and reject:
        raise CliInputError(
            EXIT_MALFORMED,
            "rows not orthonormal (residual %.3g) and --reject set" % res)
    fixed = res > 1e-10
    if fixed:
        rows = _orthonormalize(rows)
    checks.append(_check(
        "input:orthonormality", "frame:unit-orthogonal-rows",
        True, residual=res, tolerance=cfg.tol,
        details={"action": "orthonormalized" if fixed else "accepted"},
        warn=res > cfg.tol))

    plane = OrientedPlane.from_rows(rows, backend=FLOAT)
    m = n // 2
    model = build_model(m, backend=FLOAT)

    cx = is_complex_plane(model, plane, tol=cfg.tol)
    jres = j_invariance_residual(model.J, plane)
    agree = cx.is_complex == (jres < max(cfg.tol, 1e-9))
    checks.append(_check(
        "plane:complex", "complex-criterion:hook-vs-rotation",
        agree, residual=cx.max_sigma, tolerance=cfg.tol,
        details={"is_complex": cx.is_complex,
                 "real_part_residual": cx.max_sigma,
                 "imag_part_residual": cx.max_im,
                 "rotation_residual": jres},
    ))

    rec = canonical_angles(model, plane)
    checks.append(_check(
        "plane:canonical-angles", "canonical-angles:definition",
        True, residual=None, tolerance=None,
        details={"angles": list(rec.angles), "gap_warning": rec.gap_warning},
        warn=rec.gap_warning,
    ))

    if (k, n) == (4, 8):
        Phi = _float_cayley_form()
        verdict = is_cayley(Phi, plane, tol_phi=max(cfg.tol, 1e-9))
        consistent = verdict.is_cayley == (
            abs(verdict.phi_value - 1.0) <= max(cfg.tol, 1e-9)
            and verdict.tau_norm <= 1e-7)
        checks.append(_check(
            "plane:calibration", "cayley-criterion:value-vs-defect",
            consistent, residual=verdict.tau_norm, tolerance=1e-7,
            details={"is_cayley": verdict.is_cayley,
                     "calibration_value": verdict.phi_value,
                     "defect_norm": verdict.tau_norm},
        ))
    return _assemble("classify-plane", cfg, checks)


def _lambda_from_file(path, backend):
    rows = _read_matrix(path, backend)
    if len(rows) != 4 or len(rows[0]) != 4:
        raise CliInputError(
            EXIT_MALFORMED,
            "tilt file must be 4 rows of 4 numbers, got %d x %d"
            % (len(rows), len(rows[0])))
    return GraphCoefficients(rows, backend=backend)


def _graph_report_checks(lam, tol):
    Phi = phi0(backend=FLOAT)
    eqs = [abs(float(e)) for e in tau_system(lam)]
    quads = [abs(float(q)) for q in residual_quadratics(lam)]
    frame = graph_frame(lam.to_float() if lam.backend == EXACT else lam)
    defect = tau_norm(tau_eval(Phi, *frame))
    checks = [
        _check("graph:system-residuals", "graph-defect:mixed-components",
               max(eqs) <= tol, residual=max(eqs), tolerance=tol,
               details={"components": eqs}),
        _check("graph:quadratic-residuals", "graph-defect:diagonal-components",
               max(quads) <= tol, residual=max(quads), tolerance=tol,
               details={"components": quads}),
        _check("graph:defect-norm", "graph-defect:total",
               defect <= max(tol, 1e-8) * 10, residual=defect,
               tolerance=max(tol, 1e-8) * 10),
    ]
    mat = np.array([[float(x) for x in v.comps] for v in frame])
    q, r = np.linalg.qr(mat.T)
    q = q * np.sign(np.diag(r))[None, :]
    plane = OrientedPlane.from_rows([list(col) for col in q.T], backend=FLOAT)
    verdict = is_cayley(Phi, plane)
    consistent = verdict.is_cayley == (max(eqs + quads) <= tol)
    checks.append(_check(
        "graph:cayley-verdict", "cayley-criterion:graph-form",
        consistent, residual=verdict.tau_norm, tolerance=1e-7,
        details={"is_cayley": verdict.is_cayley,
                 "calibration_value": verdict.phi_value,
                 "defect_norm": verdict.tau_norm},
    ))
    return checks


def graph_verify(path, cfg):
    if path is None:
        return run_suite(dataclasses.replace(cfg, suite="graphs"))
    lam = _lambda_from_file(path, cfg.backend)
    return _assemble("graph-verify", cfg, _graph_report_checks(lam, 1e-8))


def graph_solve(path, cfg):
    if path is not None:
        start = _lambda_from_file(path, FLOAT)
    else:
        start = random_graph_coefficients(_rng(cfg, 6), radius=0.25)
    checks = []
    try:
        sol = solve_tau_system(start)
    except (ConvergenceError, ValidationError) as exc:
        checks.append(_check(
            "newton:converged", "graph-defect:solvability",
            False, residual=getattr(exc, "residual", None), tolerance=1e-12,
            details={"error": str(exc)},
        ))
        return _assemble("graph-solve", cfg, checks)
    checks.append(_check(
        "newton:converged", "graph-defect:solvability",
        True, residual=max(abs(float(e)) for e in tau_system(sol)),
        tolerance=1e-12,
        details={"solution": [[float(x) for x in row]
                              for row in sol.entries]},
    ))
    checks.extend(_graph_report_checks(sol, 1e-8))
    return _assemble("graph-solve", cfg, checks)


def index_report(cfg, sign=None, euler=None, self_int=None,
                 c1sq=None, c2=None, c2nu=None):
    topo_given = any(v is not None for v in (sign, euler, self_int))
    chern_given = any(v is not None for v in (c1sq, c2, c2nu))
    if not topo_given and not chern_given:
        return run_suite(dataclasses.replace(cfg, suite="index"))
    checks = []
    topo_idx = chern_idx = None
    if topo_given:
        if None in (sign, euler, self_int):
            raise CliInputError(
                EXIT_MALFORMED,
                "need all of --sign --euler --self-int together")
        inv = TopologicalInvariants(sign, euler, self_int)
        topo_idx = index_from_topology(inv)
        checks.append(_check(
            "index:from-topology", "expected-dimension:topological-formula",
            True, residual=None, tolerance=None,
            details={"signature": sign, "euler": euler,
                     "self_intersection": self_int, "index": topo_idx},
        ))
    if chern_given:
        if None in (c1sq, c2, c2nu):
            raise CliInputError(
                EXIT_MALFORMED, "need all of --c1sq --c2 --c2nu together")
        chern_idx = index_from_chern(c1sq, c2, c2nu)
        inv2 = invariants_from_chern(c1sq, c2, c2nu)
        checks.append(_check(
            "index:from-chern", "expected-dimension:chern-formula",
            True, residual=None, tolerance=None,
            details={"c1_squared": c1sq, "c2": c2, "c2_normal": c2nu,
                     "signature": inv2.signature, "euler": inv2.euler,
                     "self_intersection": inv2.self_intersection,
                     "index": chern_idx},
        ))
    if topo_idx is not None and chern_idx is not None:
        checks.append(_check(
            "index:route-agreement", "expected-dimension:chern-equivalence",
            topo_idx == chern_idx, residual=abs(topo_idx - chern_idx),
            tolerance=0,
        ))
    return _assemble("index", cfg, checks)


# entry point -------------------------------------------------------------------


def _emit(report, json_path, quiet):
    doc = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if json_path:
        try:
            with open(json_path, "w", encoding="utf-8") as fh:
                fh.write(doc)
        except OSError as exc:
            print("cannot write %s: %s" % (json_path, exc), file=sys.stderr)
            return EXIT_UNREADABLE
        if not quiet:
            s = report["summary"]
            print("%s: %d pass, %d warn, %d fail -> %s" % (
                report["config"]["suite"], s["pass"], s["warn"], s["fail"],
                json_path))
    elif not quiet:
        sys.stdout.write(doc)
    return EXIT_OK if report["summary"]["fail"] == 0 else EXIT_CHECK_FAILED


def _parse_ladder(text):
    try:
        rungs = tuple(float(t) for t in text.split(","))
    except ValueError:
        raise CliInputError(EXIT_MALFORMED, "bad --t-ladder %r" % (text,))
    if len(rungs) < 3:
        raise CliInputError(EXIT_MALFORMED, "--t-ladder needs >= 3 rungs")
    return rungs


_GLOBAL_DEFAULTS = {
    "backend": FLOAT,
    "tol": 1e-9,
    "seed": 0,
    "samples": 200,
    "json_path": None,
    "quiet": False,
    "K": 2,
    "t_ladder": None,
}


def _add_common(parser):
    sup = argparse.SUPPRESS
    parser.add_argument("--backend", choices=(EXACT, FLOAT), default=sup)
    parser.add_argument("--tol", type=float, default=sup)
    parser.add_argument("--seed", type=int, default=sup)
    parser.add_argument("--samples", type=int, default=sup)
    parser.add_argument("--json", dest="json_path", metavar="PATH",
                        default=sup)
    parser.add_argument("--quiet", action="store_true", default=sup)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cayleykit",
        description="Verification suites for calibrated four-plane geometry.",
    )
    _add_common(parser)
    sub = parser.add_subparsers(dest="command", required=True)

    def _sub(name, **kw):
        p = sub.add_parser(name, **kw)
        _add_common(p)
        return p

    _sub("verify-structure",
         help="exact identities of the calibration form")

    cp = _sub("classify-plane", help="classify a frame file")
    cp.add_argument("file")
    cp.add_argument("--reject", action="store_true",
                    help="reject non-orthonormal frames instead of fixing")

    an = _sub("angles", help="canonical-angle checks or a frame file")
    an.add_argument("file", nargs="?", default=None)

    gv = _sub("graph-verify",
              help="verify a tilt matrix or run the graphs suite")
    gv.add_argument("file", nargs="?", default=None)

    gs = _sub("graph-solve", help="solve the graph defect system")
    gs.add_argument("file", nargs="?", default=None)

    to = _sub("torus", help="flat-model operator checks")
    to.add_argument("--K", type=int, default=argparse.SUPPRESS)
    to.add_argument("--t-ladder", dest="t_ladder",
                    default=argparse.SUPPRESS)

    ix = _sub("index", help="expected-dimension computations")
    ix.add_argument("--sign", type=int, default=None)
    ix.add_argument("--euler", type=int, default=None)
    ix.add_argument("--self-int", dest="self_int", type=int, default=None)
    ix.add_argument("--c1sq", type=int, default=None)
    ix.add_argument("--c2", type=int, default=None)
    ix.add_argument("--c2nu", type=int, default=None)

    al = _sub("all", help="run every suite")
    al.add_argument("--K", type=int, default=argparse.SUPPRESS)
    al.add_argument("--t-ladder", dest="t_ladder",
                    default=argparse.SUPPRESS)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    opts = dict(_GLOBAL_DEFAULTS)
    opts.update({k: v for k, v in vars(args).items()
                 if k in _GLOBAL_DEFAULTS})
    ladder = opts["t_ladder"]
    try:
        cfg = SuiteConfig(
            suite="all",
            backend=opts["backend"],
            tol=opts["tol"],
            seed=opts["seed"],
            samples=opts["samples"],
            K=opts["K"],
            t_ladder=_parse_ladder(ladder) if ladder else _DEFAULT_LADDER,
            json_path=opts["json_path"],
            quiet=opts["quiet"],
        )
        command = args.command
        if command == "verify-structure":
            report = run_suite(dataclasses.replace(cfg, suite="structure"))
        elif command == "classify-plane":
            report = classify_plane(args.file, cfg, reject=args.reject)
        elif command == "angles":
            if args.file is None:
                report = run_suite(dataclasses.replace(cfg, suite="angles"))
            else:
                report = classify_plane(args.file, cfg)
        elif command == "graph-verify":
            report = graph_verify(args.file, cfg)
        elif command == "graph-solve":
            report = graph_solve(args.file, cfg)
        elif command == "torus":
            report = run_suite(dataclasses.replace(cfg, suite="torus"))
        elif command == "index":
            report = index_report(
                cfg, sign=args.sign, euler=args.euler,
                self_int=args.self_int, c1sq=args.c1sq, c2=args.c2,
                c2nu=args.c2nu)
        else:
            report = run_suite(cfg)
    except CliInputError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except CayleykitError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_MALFORMED
    return _emit(report, cfg.json_path, cfg.quiet)


if __name__ == "__main__":
    sys.exit(main())
