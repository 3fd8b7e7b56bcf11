"""Spectral model of the deformation operator on a flat product torus.

The ambient space is the flat 8-torus obtained as the quotient of C^4 by the
standard unit lattice, and the submanifold is the 4-torus cut out by
z_3 = z_4 = 0.  Because the metric is flat and the calibration is parallel,
every operator in the deformation complex is diagonal over Fourier modes, so
kernel dimensions are exact integer counts rather than discretization
artifacts.  The module provides:

* truncated Fourier sections of the bundles that appear in the deformation
  complex (holomorphic normal fields, normal-valued (0,1)- and (0,2)-forms),
* the mode-diagonal matrices of dbar, its formal adjoint, and the combined
  first-order operator, with weighted-adjoint and kernel/gap reports,
* a geometric evaluation of the full nonlinear defect of a graphed
  deformation (built from the rank-7 projection machinery of the companion
  modules), finite-difference slope checks of its linearization, and an
  exact pointwise certification that the linearization agrees with the
  assembled first-order operator,
* the two signed first-order operators characterizing infinitesimal complex
  deformations, and
* integer index calculators from topological invariants and from Chern
  numbers, with a consistency family generator.
"""

import itertools
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import NonIntegralError, ValidationError
from .exterior import (
    EXACT,
    ExactComplex,
    Multivector,
    Vector,
)
from .kahler import build_model, to_complex_frame
from .spin7 import TWO_FORM_INDEX, phi_from_kahler, tau_eval

# bundle tags and fiber ranks ------------------------------------------------
#
# normal10            holomorphic part of the complexified normal bundle,
#                     components (d/dz3, d/dz4)
# two_form_normal     (0,2)-forms on the base torus valued in normal10,
#                     components f_3, f_4 on conj(dz1)^conj(dz2) (x) d/dz_a
# one_form_normal     (0,1)-forms valued in normal10, components on
#                     conj(dz_b) (x) d/dz_a, rows ordered
#                     (1,3), (1,4), (2,3), (2,4)
# deformation_pair    normal10 (+) two_form_normal, the domain of the
#                     combined first-order operator
# complexified_normal full complexified normal bundle, components
#                     (v_3, v_4, u_3, u_4) on (d/dz3, d/dz4, d/dzbar3,
#                     d/dzbar4)
# type_pair_forms     codomain of the complex-deformation operators:
#                     dz_b (x) dz_a components then conj components, rows
#                     (1,3), (1,4), (2,3), (2,4) twice

BUNDLE_RANK = {
    "normal10": 2,
    "two_form_normal": 2,
    "one_form_normal": 4,
    "deformation_pair": 4,
    "complexified_normal": 4,
    "type_pair_forms": 8,
}

# Hermitian fiber weights for the L2 pairing, from |dz|^2 = 2 and
# |d/dz|^2 = 1/2 in the flat metric.
BUNDLE_WEIGHTS = {
    "normal10": (0.5, 0.5),
    "two_form_normal": (2.0, 2.0),
    "one_form_normal": (1.0, 1.0, 1.0, 1.0),
    "deformation_pair": (0.5, 0.5, 2.0, 2.0),
    "complexified_normal": (0.5, 0.5, 0.5, 0.5),
    "type_pair_forms": (4.0,) * 8,
}

_DEFAULT_PHASE = (Fraction(1), Fraction(0))


@lru_cache(maxsize=8)
def _exact_surface_model(phase_pair):
    return build_model(4, backend=EXACT, phase_pair=phase_pair)


@dataclass(frozen=True)
class TorusModel:
    """Truncated Fourier model over the flat 4-torus inside the flat 8-torus.

    K bounds each of the four integer mode components by |k_i| <= K, so a
    scalar component carries (2K+1)^4 coefficients.  phase_pair is an exact
    rational point (cos, sin) on the unit circle fixing the phase of the
    holomorphic volume form.
    """

    K: int
    phase_pair: tuple = _DEFAULT_PHASE

    def __post_init__(self):
        if self.K < 0:
            raise ValidationError("mode truncation must be nonnegative")
        c, s = self.phase_pair
        c, s = Fraction(c), Fraction(s)
        if c * c + s * s != 1:
            raise ValidationError("phase pair must lie on the unit circle")
        object.__setattr__(self, "phase_pair", (c, s))

    @property
    def mode_count(self):
        return (2 * self.K + 1) ** 4

    def modes(self):
        """Integer mode vectors, shape (mode_count, 4), C-order over axes."""
        g = np.arange(-self.K, self.K + 1)
        k1, k2, k3, k4 = np.meshgrid(g, g, g, g, indexing="ij")
        return np.stack([k1.ravel(), k2.ravel(), k3.ravel(), k4.ravel()], axis=1)

    def multipliers(self):
        """Fourier multipliers of d/dzbar_1 and d/dzbar_2 per mode."""
        k = self.modes()
        m1 = np.pi * 1j * (k[:, 0] + 1j * k[:, 1])
        m2 = np.pi * 1j * (k[:, 2] + 1j * k[:, 3])
        return m1, m2

    def zero_mode(self):
        """Flat index of the constant mode."""
        L = 2 * self.K + 1
        return self.K * (L**3 + L**2 + L + 1)

    def surface_model(self):
        """Exact ambient Kahler model (complex dimension 4)."""
        return _exact_surface_model(self.phase_pair)

    def phase_complex(self):
        c, s = self.phase_pair
        return complex(float(c), float(s))


@dataclass(frozen=True, eq=False)
class FourierSection:
    """Truncated Fourier coefficients of a section of a tagged bundle."""

    bundle: str
    coefficients: np.ndarray  # (mode_count, rank) complex

    def __post_init__(self):
        if self.bundle not in BUNDLE_RANK:
            raise ValidationError("unknown bundle tag %r" % (self.bundle,))
        arr = np.asarray(self.coefficients, dtype=complex)
        if arr.ndim != 2 or arr.shape[1] != BUNDLE_RANK[self.bundle]:
            raise ValidationError(
                "coefficient array must have shape (modes, %d)"
                % BUNDLE_RANK[self.bundle]
            )
        object.__setattr__(self, "coefficients", arr)


def zero_section(model, bundle):
    return FourierSection(bundle, np.zeros((model.mode_count, BUNDLE_RANK[bundle]), complex))


def constant_section(model, bundle, fiber):
    """Section equal to the given fiber vector at every point."""
    coeffs = np.zeros((model.mode_count, BUNDLE_RANK[bundle]), complex)
    coeffs[model.zero_mode()] = np.asarray(fiber, dtype=complex)
    return FourierSection(bundle, coeffs)


def random_section(model, bundle, rng, scale=1.0):
    shape = (model.mode_count, BUNDLE_RANK[bundle])
    coeffs = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return FourierSection(bundle, coeffs * (scale / np.sqrt(2.0)))


def section_inner(a, b):
    """Weighted L2 pairing of two sections of the same bundle."""
    if a.bundle != b.bundle:
        raise ValidationError("sections live in different bundles")
    w = np.asarray(BUNDLE_WEIGHTS[a.bundle])
    return complex(np.sum(a.coefficients * np.conj(b.coefficients) * w))


def section_norm(a):
    return float(np.sqrt(max(section_inner(a, a).real, 0.0)))


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Mode-diagonal operator between tagged bundles.

    blocks has shape (mode_count, rank_out, rank_in); block m acts on the
    coefficients of mode m.  dense() assembles the full matrix (mode-major
    flattening on both sides) for small truncations.
    """

    blocks: np.ndarray
    domain: str
    codomain: str

    def __post_init__(self):
        arr = np.asarray(self.blocks, dtype=complex)
        if arr.ndim != 3:
            raise ValidationError("blocks must be a 3-d array")
        if arr.shape[1] != BUNDLE_RANK[self.codomain] or arr.shape[2] != BUNDLE_RANK[self.domain]:
            raise ValidationError("block shape does not match bundle ranks")
        object.__setattr__(self, "blocks", arr)

    @property
    def mode_count(self):
        return self.blocks.shape[0]

    def apply(self, section):
        if section.bundle != self.domain:
            raise ValidationError(
                "operator domain %r does not accept %r sections"
                % (self.domain, section.bundle)
            )
        out = np.einsum("mij,mj->mi", self.blocks, section.coefficients)
        return FourierSection(self.codomain, out)

    def dense(self):
        m, r_out, r_in = self.blocks.shape
        full = np.zeros((m * r_out, m * r_in), complex)
        for i in range(m):
            full[i * r_out:(i + 1) * r_out, i * r_in:(i + 1) * r_in] = self.blocks[i]
        return full

    def adjoint(self):
        """Formal adjoint with respect to the weighted L2 pairings."""
        w_dom = np.asarray(BUNDLE_WEIGHTS[self.domain])
        w_cod = np.asarray(BUNDLE_WEIGHTS[self.codomain])
        adj = np.einsum("i,mji,j->mij", 1.0 / w_dom, np.conj(self.blocks), w_cod)
        return OperatorMatrix(adj, domain=self.codomain, codomain=self.domain)

    def stack(self, other):
        """Vertical concatenation with another operator on the same domain."""
        if other.domain != self.domain:
            raise ValidationError("stacked operators must share their domain")
        if other.codomain != self.codomain:
            raise ValidationError("stacked operators must share their codomain tag")
        blocks = np.concatenate([self.blocks, other.blocks], axis=1)
        # the stacked codomain has doubled rank; reuse the tag machinery by
        # returning raw blocks, since only kernels of stacks are ever needed
        return _RawBlocks(blocks)


@dataclass(frozen=True, eq=False)
class _RawBlocks:
    """Block array without bundle tags, for kernel counts of stacked maps."""

    blocks: np.ndarray


def dbar_matrix(model):
    """dbar on holomorphic normal fields, valued in (0,1)-forms.

    On mode k the coefficient of conj(dz_b) (x) d/dz_a is m_b v_a with
    m_b the d/dzbar_b multiplier; the kernel is exactly the constants.
    """
    m1, m2 = model.multipliers()
    blocks = np.zeros((model.mode_count, 4, 2), complex)
    blocks[:, 0, 0] = m1
    blocks[:, 1, 1] = m1
    blocks[:, 2, 0] = m2
    blocks[:, 3, 1] = m2
    return OperatorMatrix(blocks, domain="normal10", codomain="one_form_normal")


def dbar02_matrix(model):
    """dbar from normal-valued (0,1)-forms into (0,2)-forms."""
    m1, m2 = model.multipliers()
    blocks = np.zeros((model.mode_count, 2, 4), complex)
    blocks[:, 0, 0] = -m2
    blocks[:, 0, 2] = m1
    blocks[:, 1, 1] = -m2
    blocks[:, 1, 3] = m1
    return OperatorMatrix(blocks, domain="one_form_normal", codomain="two_form_normal")


def dbar_star_matrix(model):
    """Formal adjoint of dbar02_matrix, assembled from its position-space
    formula: f (x) conj(dz1)^conj(dz2) goes to
    2 (df/dz2) conj(dz1) - 2 (df/dz1) conj(dz2), tensored with the normal leg.
    The weighted conjugate-transpose relation with dbar02_matrix is pinned by
    the tests rather than used as the construction."""
    m1, m2 = model.multipliers()
    blocks = np.zeros((model.mode_count, 4, 2), complex)
    blocks[:, 0, 0] = -2.0 * np.conj(m2)
    blocks[:, 1, 1] = -2.0 * np.conj(m2)
    blocks[:, 2, 0] = 2.0 * np.conj(m1)
    blocks[:, 3, 1] = 2.0 * np.conj(m1)
    return OperatorMatrix(blocks, domain="two_form_normal", codomain="one_form_normal")


def dirac_matrix(model):
    """The combined first-order operator [dbar | dbar_star] acting on pairs."""
    a = dbar_matrix(model).blocks
    b = dbar_star_matrix(model).blocks
    return OperatorMatrix(
        np.concatenate([a, b], axis=2),
        domain="deformation_pair",
        codomain="one_form_normal",
    )


# kernel counting -------------------------------------------------------------


@dataclass(frozen=True)
class KernelReport:
    dim_complex: int
    dim_real: int
    gap: float
    sigma_max: float
    threshold: float
    warning: bool


GAP_FLOOR = 1e6


def kernel_report(op, tol=1e-8):
    """Singular-value kernel count with a spectral-gap report.

    The kernel dimension is the number of singular values at or below
    tol times the largest singular value; gap is the ratio of the smallest
    kept singular value to the largest dropped one (inf when nothing is
    dropped or everything dropped is exactly zero)."""
    blocks = op.blocks
    n_modes, r_out, r_in = blocks.shape
    sigma = np.linalg.svd(blocks, compute_uv=False)
    sigma_max = float(sigma.max()) if sigma.size else 0.0
    threshold = tol * sigma_max
    kept = sigma > threshold
    rank = int(kept.sum())
    dim = n_modes * r_in - rank
    dropped = sigma[~kept]
    largest_dropped = float(dropped.max()) if dropped.size else 0.0
    smallest_kept = float(sigma[kept].min()) if rank else float("inf")
    gap = float("inf") if largest_dropped == 0.0 else smallest_kept / largest_dropped
    warning = gap < GAP_FLOOR
    if warning:
        warnings.warn(
            "kernel threshold sits inside a weak spectral gap (ratio %.3e)" % gap
        )
    return KernelReport(
        dim_complex=dim,
        dim_real=2 * dim,
        gap=gap,
        sigma_max=sigma_max,
        threshold=threshold,
        warning=warning,
    )


def kernel_dim(op, tol=1e-8):
    """Complex dimension of the kernel of a mode-diagonal operator."""
    return kernel_report(op, tol).dim_complex


def kernel_summary(K_values=(0, 1, 2, 3), tol=1e-8, phase_pair=_DEFAULT_PHASE):
    """Kernel dimensions of the three operators across truncations.

    Returns a dict with per-K reports, the adjoint-kernel count at the
    largest K, the operator index, and the worst spectral gap."""
    per_k = {}
    worst_gap = float("inf")
    for K in K_values:
        model = TorusModel(K, phase_pair)
        reports = {
            "dbar": kernel_report(dbar_matrix(model), tol),
            "dbar_star": kernel_report(dbar_star_matrix(model), tol),
            "dirac": kernel_report(dirac_matrix(model), tol),
        }
        for rep in reports.values():
            worst_gap = min(worst_gap, rep.gap)
        per_k[K] = reports
    K_top = max(K_values)
    model = TorusModel(K_top, phase_pair)
    adj = kernel_report(dirac_matrix(model).adjoint(), tol)
    worst_gap = min(worst_gap, adj.gap)
    dirac_dim = per_k[K_top]["dirac"].dim_complex
    return {
        "per_K": per_k,
        "adjoint_kernel_dim": adj.dim_complex,
        "index": dirac_dim - adj.dim_complex,
        "worst_gap": worst_gap,
    }


# grid sampling ---------------------------------------------------------------


def grid_values(model, coefficients, grid=None, derivative=None):
    """Sample a coefficient array on the uniform grid (j_1..j_4)/G.

    coefficients has shape (mode_count, r); the return has shape (G^4, r).
    derivative=j (1-based) differentiates along the j-th real coordinate
    before sampling.  G defaults to 2K+2 and must be at least 2K+1."""
    K = model.K
    L = 2 * K + 1
    G = int(grid) if grid is not None else 2 * K + 2
    if G < L:
        raise ValidationError("grid resolution too small for the mode band")
    coeffs = np.asarray(coefficients, dtype=complex)
    r = coeffs.shape[1]
    cube = coeffs.reshape(L, L, L, L, r).copy()
    if derivative is not None:
        if not 1 <= derivative <= 4:
            raise ValidationError("derivative direction must be 1..4")
        k = np.arange(-K, K + 1)
        shape = [1, 1, 1, 1, 1]
        shape[derivative - 1] = L
        cube = cube * (2j * np.pi * k.reshape(shape))
    slots = np.arange(-K, K + 1) % G
    emb = np.zeros((G, G, G, G, r), complex)
    emb[np.ix_(slots, slots, slots, slots, np.arange(r))] = cube
    vals = np.fft.ifftn(emb, axes=(0, 1, 2, 3)) * G**4
    return vals.reshape(G**4, r)


# geometric defect evaluation --------------------------------------------------

# complex normal basis vectors written in the real frame of C^4 = R^8,
# rows: d/dz3, d/dz4, d/dzbar3, d/dzbar4
_B_NORMAL = np.array(
    [
        [0, 0, 0, 0, 0.5, -0.5j, 0, 0],
        [0, 0, 0, 0, 0, 0, 0.5, -0.5j],
        [0, 0, 0, 0, 0.5, 0.5j, 0, 0],
        [0, 0, 0, 0, 0, 0, 0.5, 0.5j],
    ],
    dtype=complex,
)

_COMBOS = tuple(itertools.combinations(range(8), 4))


@lru_cache(maxsize=8)
def _defect_tables_exact(phase_pair):
    """Exact coefficient tables of the pointwise defect map.

    Returns (tau_table, psi_table): tau_table[c] is the 28-vector (over
    TWO_FORM_INDEX) of Fraction coefficients of the rank-7 defect evaluated
    on the c-th increasing frame quadruple; psi_table[(row, col)] is the
    ExactComplex entry sending those two-form coordinates to the four
    components of a normal-valued (0,1)-form (rows (1,3),(1,4),(2,3),(2,4))."""
    model = _exact_surface_model(phase_pair)
    Phi = phi_from_kahler(model)
    tau_table = []
    for combo in _COMBOS:
        vectors = [Vector.basis(8, i + 1, EXACT) for i in combo]
        value = tau_eval(Phi, *vectors)
        tau_table.append(tuple(value.coeff(key) for key in TWO_FORM_INDEX))
    psi = {}
    rows = ((1, 3), (1, 4), (2, 3), (2, 4))
    for col, key in enumerate(TWO_FORM_INDEX):
        zform = to_complex_frame(model, Multivector.basis(8, key, EXACT))
        for row, (b, a) in enumerate(rows):
            c = zform.coeff((4 + b, 4 + a))
            if not isinstance(c, ExactComplex):
                c = ExactComplex(Fraction(c), Fraction(0))
            val = c * 2
            if val.re != 0 or val.im != 0:
                psi[(row, col)] = val
    return tuple(tau_table), psi


@lru_cache(maxsize=8)
def _defect_tables_float(phase_pair):
    tau_table, psi = _defect_tables_exact(phase_pair)
    tau = np.array([[float(x) for x in row] for row in tau_table])  # (70, 28)
    psi_mat = np.zeros((4, 28), complex)
    for (row, col), val in psi.items():
        psi_mat[row, col] = complex(val.as_complex())
    return tau, psi_mat


def _displacement_coefficients(model, v1, w):
    """Combined complex-normal coefficients of the displacement field.

    v1 supplies the holomorphic components; w is carried to the
    antiholomorphic components through the inverse of the normal-bundle
    isomorphism: u_3 = 2 e^{i phase} f_4 and u_4 = -2 e^{i phase} f_3."""
    if v1.bundle != "normal10" or w.bundle != "two_form_normal":
        raise ValidationError("expected a (normal10, two_form_normal) pair")
    phase = model.phase_complex()
    out = np.zeros((model.mode_count, 4), complex)
    out[:, 0] = v1.coefficients[:, 0]
    out[:, 1] = v1.coefficients[:, 1]
    out[:, 2] = 2.0 * phase * w.coefficients[:, 1]
    out[:, 3] = -2.0 * phase * w.coefficients[:, 0]
    return out


def _frame_minors(frames):
    """All 4x4 minors of the frame rows, shape (points, 70)."""
    sub = frames[:, :, _COMBOS]  # (P, 4, 70, 4)
    sub = np.moveaxis(sub, 2, 1)  # (P, 70, 4, 4)
    return np.linalg.det(sub)


def nonlinear_F(model, v, t=1.0, grid=None):
    """Grid samples of the geometric defect of the graphed deformation.

    v is a (v1, w) pair of Fourier sections (holomorphic normal field and
    normal-valued (0,2)-form).  The displacement t * (v1 + iso^{-1}(w)) is
    graphed over the base torus; at each grid point the tangent frame of the
    graph feeds the rank-7 defect four-form, whose normal-valued (0,1)-part
    is returned, components ordered (1,3), (1,4), (2,3), (2,4).  The result
    has shape (G^4, 4); the map extends the real geometric defect complex-
    multilinearly in the frame vectors."""
    v1, w = v
    tau_table, psi_mat = _defect_tables_float(model.phase_pair)
    disp = _displacement_coefficients(model, v1, w)  # (M, 4) complex basis
    disp_real = disp @ _B_NORMAL  # (M, 8) real-frame components
    G = int(grid) if grid is not None else 2 * model.K + 2
    P = G**4
    frames = np.zeros((P, 4, 8), complex)
    for j in range(4):
        frames[:, j, j] = 1.0
        frames[:, j, :] += t * grid_values(model, disp_real, grid=G, derivative=j + 1)
    minors = _frame_minors(frames)  # (P, 70)
    return minors @ tau_table @ psi_mat.T  # (P, 4)


def linear_image_grid(model, v, grid=None):
    """Grid samples of the first-order operator applied to the pair v."""
    v1, w = v
    image = dbar_matrix(model).apply(v1).coefficients + dbar_star_matrix(model).apply(w).coefficients
    return grid_values(model, image, grid=grid)


@dataclass(frozen=True)
class SlopeReport:
    slopes: tuple
    flagged_floor: tuple
    fraction_in_band: float
    fraction_at_least_band: float
    band: tuple
    residual_floor: float


def fd_linearization_check(
    model,
    samples=50,
    t_ladder=(1e-2, 3e-3, 1e-3, 3e-4),
    seed=0,
    grid=None,
    band=(1.9, 2.1),
    residual_floor=1e-13,
    scale=1.0,
):
    """Finite-difference slope test of the defect's linearization.

    For random truncated section pairs v, fits the least-squares slope of
    log ||F(t v) - t L v|| against log t over the ladder.  Quadratic
    remainders give slope 2; rungs below the residual floor are dropped as
    pure roundoff, and a sample with fewer than three surviving rungs is
    flagged instead of fitted."""
    if len(t_ladder) < 3 or any(
        t_ladder[i] <= t_ladder[i + 1] for i in range(len(t_ladder) - 1)
    ):
        raise ValidationError("t ladder must be strictly decreasing with >= 3 rungs")
    rng = np.random.default_rng(seed)
    slopes = []
    flagged = []
    in_band = 0
    at_least = 0
    counted = 0
    for _ in range(samples):
        v1 = random_section(model, "normal10", rng, scale)
        w = random_section(model, "two_form_normal", rng, scale)
        lin = linear_image_grid(model, (v1, w), grid=grid)
        pts = lin.shape[0]
        residuals = []
        for t in t_ladder:
            F = nonlinear_F(model, (v1, w), t=t, grid=grid)
            r = float(np.sqrt(np.sum(np.abs(F - t * lin) ** 2) / pts))
            residuals.append(r)
        usable = [
            (t, r) for t, r in zip(t_ladder, residuals) if r > residual_floor
        ]
        if len(usable) < 3:
            flagged.append(True)
            slopes.append(float("nan"))
            continue
        ts = np.log([t for t, _ in usable])
        rs = np.log([r for _, r in usable])
        slope = float(np.polyfit(ts, rs, 1)[0])
        slopes.append(slope)
        flagged.append(False)
        counted += 1
        if band[0] <= slope <= band[1]:
            in_band += 1
        if slope >= band[0]:
            at_least += 1
    fraction = (in_band / counted) if counted else 1.0
    fraction_al = (at_least / counted) if counted else 1.0
    return SlopeReport(
        slopes=tuple(slopes),
        flagged_floor=tuple(flagged),
        fraction_in_band=fraction,
        fraction_at_least_band=fraction_al,
        band=tuple(band),
        residual_floor=residual_floor,
    )


# exact pointwise certification of the linearization ---------------------------


def _exact_det4(rows):
    """Determinant of a 4x4 matrix of ExactComplex entries."""
    total = ExactComplex(0, 0)
    for perm in itertools.permutations(range(4)):
        sign = 1
        for i in range(4):
            for j in range(i + 1, 4):
                if perm[i] > perm[j]:
                    sign = -sign
        term = ExactComplex(sign, 0)
        for i in range(4):
            term = term * rows[i][perm[i]]
        total = total + term
    return total


def _exact_zero():
    return ExactComplex(0, 0)


def _exact_defect_point(phase_pair, frame_rows):
    """Exact pointwise defect of a complex 4-frame (rows of ExactComplex)."""
    tau_table, psi = _defect_tables_exact(phase_pair)
    minors = []
    for combo in _COMBOS:
        sub = [[frame_rows[r][c] for c in combo] for r in range(4)]
        minors.append(_exact_det4(sub))
    two_form = [_exact_zero() for _ in range(28)]
    for c, minor in enumerate(minors):
        if minor.re == 0 and minor.im == 0:
            continue
        row = tau_table[c]
        for p in range(28):
            if row[p] != 0:
                two_form[p] = two_form[p] + minor * row[p]
    out = [_exact_zero() for _ in range(4)]
    for (row, col), val in psi.items():
        if two_form[col].re != 0 or two_form[col].im != 0:
            out[row] = out[row] + val * two_form[col]
    return out


# exact one-forms dz_a and conj(dz_a) on complex 8-vectors stored as
# ExactComplex components in the real frame
def _dz(a, vec):
    i = 2 * a - 2
    return vec[i] + vec[i + 1] * ExactComplex(0, 1)


def _dzbar(a, vec):
    i = 2 * a - 2
    return vec[i] - vec[i + 1] * ExactComplex(0, 1)


def _exact_basis_frame():
    rows = []
    for j in range(4):
        row = [_exact_zero() for _ in range(8)]
        row[j] = ExactComplex(1, 0)
        rows.append(row)
    return rows


# exact complex normal basis vectors in the real frame, same row order as
# _B_NORMAL: d/dz3, d/dz4, d/dzbar3, d/dzbar4
_HALF = Fraction(1, 2)
_B_NORMAL_EXACT = (
    (4, ExactComplex(_HALF, 0), 5, ExactComplex(0, -_HALF)),
    (6, ExactComplex(_HALF, 0), 7, ExactComplex(0, -_HALF)),
    (4, ExactComplex(_HALF, 0), 5, ExactComplex(0, _HALF)),
    (6, ExactComplex(_HALF, 0), 7, ExactComplex(0, _HALF)),
)


def pointwise_linearization_check(phase_pair=(Fraction(3, 5), Fraction(4, 5))):
    """Exact certification that the defect linearizes to dbar + dbar_star.

    Perturbs one tangent direction of the standard frame at a time by each
    complex normal basis vector, evaluates the defect exactly (it is linear
    in a single perturbed row), and compares against the symbol formulas:
    the dbar part reads the holomorphic normal components through dz_a and
    the adjoint part reads the antiholomorphic ones through conj(dz_a), with
    the phase-dependent two-form translation in between.  Returns
    (matches, total) over all 64 component comparisons."""
    c, s = Fraction(phase_pair[0]), Fraction(phase_pair[1])
    phase = ExactComplex(c, s)
    phase_conj = phase.conj()
    i_unit = ExactComplex(0, 1)
    matches = 0
    total = 0
    rows = ((1, 3), (1, 4), (2, 3), (2, 4))

    def f_comp(a_idx, dvec):
        # (0,2)-component translation of the antiholomorphic displacement:
        # f_4 = (1/2) conj(phase) u_3, f_3 = -(1/2) conj(phase) u_4
        if a_idx == 4:
            return phase_conj * _dzbar(3, dvec) * _HALF
        return phase_conj * _dzbar(4, dvec) * (-_HALF)

    for j in range(4):
        for beta in range(4):
            delta = [_exact_zero() for _ in range(8)]
            i1, c1, i2, c2 = _B_NORMAL_EXACT[beta]
            delta[i1] = c1
            delta[i2] = c2
            deltas = [[_exact_zero()] * 8 for _ in range(4)]
            deltas[j] = delta
            frame = _exact_basis_frame()
            frame[j] = [frame[j][k] + delta[k] for k in range(8)]
            measured = _exact_defect_point((c, s), frame)

            expected = [_exact_zero() for _ in range(4)]
            for r, (b, a) in enumerate(rows):
                d_odd = deltas[2 * b - 2]
                d_even = deltas[2 * b - 1]
                expected[r] = expected[r] + (
                    _dz(a, d_odd) + i_unit * _dz(a, d_even)
                ) * _HALF
            for r, (b, a) in enumerate(rows):
                # adjoint part: 2 d f_a / dz_2 on rows b=1, -2 d f_a / dz_1
                # on rows b=2, with d/dz_k = (d/dx_odd - i d/dx_even) / 2
                if b == 1:
                    d_odd, d_even, sgn = deltas[2], deltas[3], 1
                else:
                    d_odd, d_even, sgn = deltas[0], deltas[1], -1
                df = (f_comp(a, d_odd) - i_unit * f_comp(a, d_even)) * _HALF
                expected[r] = expected[r] + df * (2 * sgn)
            for r in range(4):
                total += 1
                diff = measured[r] - expected[r]
                if diff.re == 0 and diff.im == 0:
                    matches += 1
    return matches, total


# complex-deformation operators -----------------------------------------------


def complex_linear_op(model):
    """The two signed first-order operators on the complexified normal bundle.

    Domain components are (v_3, v_4, u_3, u_4); the codomain stacks the
    dz_b (x) dz_a components (from the holomorphic input through the
    holomorphic volume form) over their conjugates (from the antiholomorphic
    input).  Returns the pair (A_0, A_1); the two differ only by the scalar
    prefactor and the relative sign between the halves, so their kernels
    coincide with the joint kernel."""
    m1, m2 = model.multipliers()
    phase = model.phase_complex()
    M = model.mode_count

    t1 = np.zeros((M, 4, 2), complex)  # acts on (v_3, v_4)
    t1[:, 0, 1] = -2.0 * m2 * phase
    t1[:, 1, 0] = 2.0 * m2 * phase
    t1[:, 2, 1] = 2.0 * m1 * phase
    t1[:, 3, 0] = -2.0 * m1 * phase

    t2 = np.zeros((M, 4, 2), complex)  # acts on (u_3, u_4)
    t2[:, 0, 1] = 2.0 * np.conj(m2) * np.conj(phase)
    t2[:, 1, 0] = -2.0 * np.conj(m2) * np.conj(phase)
    t2[:, 2, 1] = -2.0 * np.conj(m1) * np.conj(phase)
    t2[:, 3, 0] = 2.0 * np.conj(m1) * np.conj(phase)

    ops = []
    for j in (0, 1):
        pref = -1.0 if j == 0 else 1.0j
        rel = 1.0 if j == 0 else -1.0
        blocks = np.zeros((M, 8, 4), complex)
        blocks[:, :4, :2] = pref * t1
        blocks[:, 4:, 2:] = pref * rel * t2
        ops.append(
            OperatorMatrix(blocks, domain="complexified_normal", codomain="type_pair_forms")
        )
    return tuple(ops)


def holomorphic_kernel_match(model, tol=1e-8):
    """Largest deviation between the kernel projectors of the holomorphic half
    of the complex-deformation operator and of dbar, mode by mode."""
    m1, m2 = model.multipliers()
    phase = model.phase_complex()
    worst = 0.0
    dbar_blocks = dbar_matrix(model).blocks
    for mode in range(model.mode_count):
        t1 = np.array(
            [
                [0.0, -2.0 * m2[mode] * phase],
                [2.0 * m2[mode] * phase, 0.0],
                [0.0, 2.0 * m1[mode] * phase],
                [-2.0 * m1[mode] * phase, 0.0],
            ]
        )
        p1 = _null_projector(t1, tol)
        p2 = _null_projector(dbar_blocks[mode], tol)
        worst = max(worst, float(np.linalg.norm(p1 - p2, 2)))
    return worst


def _null_projector(block, tol):
    u, s, vh = np.linalg.svd(block)
    cutoff = tol * (s.max() if s.size else 0.0)
    rank = int((s > cutoff).sum())
    null_basis = vh[rank:].conj().T
    if null_basis.shape[1] == 0:
        return np.zeros((block.shape[1], block.shape[1]), complex)
    return null_basis @ null_basis.conj().T


# index calculators -----------------------------------------------------------


@dataclass(frozen=True)
class TopologicalInvariants:
    """Integer invariants of a compact surface and its normal bundle."""

    signature: int
    euler: int
    self_intersection: int
    chern: tuple = None  # optional (c1^2, c2, c2(normal))

    def __post_init__(self):
        if self.chern is not None:
            c1sq, c2, c2nu = self.chern
            if Fraction(c1sq - 2 * c2, 3) != self.signature:
                raise ValidationError(
                    "signature inconsistent with (c1^2 - 2 c2) / 3"
                )
            if c2 != self.euler:
                raise ValidationError("euler number inconsistent with c2")
            if c2nu != self.self_intersection:
                raise ValidationError(
                    "self-intersection inconsistent with normal-bundle c2"
                )


def index_from_topology(inv):
    """Index = signature/2 + euler/2 - self-intersection, as an exact integer."""
    value = (
        Fraction(inv.signature, 2)
        + Fraction(inv.euler, 2)
        - Fraction(inv.self_intersection)
    )
    if value.denominator != 1:
        raise NonIntegralError(
            "half-integer combination: signature + euler must be even"
        )
    return int(value)


def index_from_chern(c1sq, c2, c2nu):
    """Index = (c1^2 + c2)/6 - c2(normal bundle), as an exact integer."""
    value = Fraction(c1sq + c2, 6) - Fraction(c2nu)
    if value.denominator != 1:
        raise NonIntegralError("(c1^2 + c2) must be divisible by 6")
    return int(value)


def invariants_from_chern(c1sq, c2, c2nu):
    """Convert Chern numbers to (signature, euler, self-intersection)."""
    sig = Fraction(c1sq - 2 * c2, 3)
    if sig.denominator != 1:
        raise NonIntegralError("(c1^2 - 2 c2) must be divisible by 3")
    return TopologicalInvariants(
        signature=int(sig),
        euler=c2,
        self_intersection=c2nu,
        chern=(c1sq, c2, c2nu),
    )


def chern_consistency_family(count, rng):
    """Random Chern triples (c1^2, c2, c2nu) with integral index and signature.

    Writing c1^2 = 5 c2 + 6 r makes both (c1^2 + c2)/6 = c2 + r and
    (c1^2 - 2 c2)/3 = c2 + 2 r integers for every integer r."""
    triples = []
    for _ in range(count):
        c2 = int(rng.integers(-30, 31))
        r = int(rng.integers(-20, 21))
        c2nu = int(rng.integers(-25, 26))
        triples.append((5 * c2 + 6 * r, c2, c2nu))
    return triples
