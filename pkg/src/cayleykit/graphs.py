"""Planes, graph deformations, canonical angles, and complex-plane tests.

Conventions used throughout:

* A plane is an ordered orthonormal frame of row vectors; the row order
  fixes the orientation.
* Graph coefficients lam[j][i] describe the tilted frame
  v_j = e_j + sum_i lam^j_i e_i with tangent rows j = 1..4 and normal
  columns i = 5..8.
* The flat complex model identifies z_k = x_{2k-1} + i x_{2k}; complex
  p-dimensional graphs over the z_1..z_p coordinate plane carry two
  coefficient blocks (lam for the x-rows, mu for the y-rows), with normal
  labels k in {p+1..m} for x-legs and k+m for y-legs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import (
    ConvergenceError,
    DimensionMismatch,
    PlaneError,
    TypeMismatch,
    ValidationError,
)
from .exterior import (
    EXACT,
    FLOAT,
    ComplexMultivector,
    ComplexVector,
    ExactComplex,
    Multivector,
    Vector,
    coerce_scalar,
    hodge_star,
    hook,
    hook_many,
    inner,
    musical_sharp,
    wedge,
)
from .frames import as_matrix, haar_frame, orthonormality_residual, random_unitary
from .kahler import (
    TYPE_01,
    TYPE_10,
    TypedVector,
    dz_form,
    dzbar_form,
    holo_vector,
    imag_unit,
    to_complex_frame,
    typed_vector,
    wedge_many,
)
from .spin7 import CayleyForm, phi0, tau_eval


# -- oriented planes -------------------------------------------------------


@dataclass(frozen=True)
class OrientedPlane:
    """An ordered orthonormal frame spanning a 2p-dimensional subspace."""

    rows: tuple

    def __post_init__(self):
        rows = tuple(self.rows)
        if not rows:
            raise PlaneError("a plane needs at least one frame vector")
        n = rows[0].n
        backend = rows[0].backend
        for r in rows:
            if r.n != n or r.backend != backend:
                raise PlaneError("frame vectors disagree in dimension or backend")
        if len(rows) > n:
            raise PlaneError("more frame vectors than ambient dimensions")
        if backend == EXACT:
            for i, vi in enumerate(rows):
                for j, vj in enumerate(rows):
                    want = 1 if i == j else 0
                    if vi.dot(vj) != want:
                        raise PlaneError("frame is not exactly orthonormal")
        else:
            res = orthonormality_residual(rows)
            if res > 1e-8:
                raise PlaneError(
                    "frame is not orthonormal (residual %.3e)" % (res,)
                )
        object.__setattr__(self, "rows", rows)

    @property
    def n(self):
        return self.rows[0].n

    @property
    def dim(self):
        return len(self.rows)

    @property
    def backend(self):
        return self.rows[0].backend

    @classmethod
    def from_rows(cls, rows, backend=FLOAT):
        vecs = [r if isinstance(r, Vector) else Vector(r, backend) for r in rows]
        return cls(rows=tuple(vecs))

    @classmethod
    def from_matrix(cls, mat, backend=FLOAT):
        return cls.from_rows([list(row) for row in mat], backend)

    def matrix(self):
        return as_matrix(self.rows)

    def projection_matrix(self):
        r = self.matrix()
        return r.T @ r

    def to_float(self):
        return OrientedPlane(rows=tuple(v.to_float() for v in self.rows))


def random_plane(n, dim, rng):
    """A uniformly random oriented plane (float backend)."""
    return OrientedPlane(rows=tuple(haar_frame(n, dim, rng)))


def orthonormalize_rows(rows):
    """Gram-Schmidt a spanning list of float Vectors into an OrientedPlane."""
    mat = as_matrix(rows)
    q, r = np.linalg.qr(mat.T)
    q = q * np.sign(np.where(np.diag(r) == 0, 1.0, np.diag(r)))
    vecs = [Vector(q[:, j].tolist(), FLOAT) for j in range(mat.shape[0])]
    return OrientedPlane(rows=tuple(vecs))


def j_invariance_residual(J, plane):
    """Operator-norm distance of the plane from J-invariance.

    Computes ||(I - P) J P||_2 with P the orthogonal projection onto the
    plane; zero exactly when the plane is closed under J.
    """
    p = plane.projection_matrix()
    jm = np.array(J.matrix(), dtype=float)
    n = p.shape[0]
    return float(np.linalg.norm((np.eye(n) - p) @ jm @ p, 2))


def random_complex_plane(J, p, rng):
    """A random J-invariant 2p-dimensional plane in R^{2m} (float)."""
    m = J.m
    if p > m:
        raise PlaneError("complex dimension %d exceeds m=%d" % (p, m))
    u = random_unitary(m, rng)
    rows = []
    for j in range(p):
        w = u[:, j]
        rows.append(_realify(w, m))
        rows.append(_realify(1j * w, m))
    return OrientedPlane(rows=tuple(rows))


def _realify(w, m):
    comps = []
    for k in range(m):
        comps.append(float(np.real(w[k])))
        comps.append(float(np.imag(w[k])))
    return Vector(comps, FLOAT)


# -- the graph deformation polynomial system -------------------------------


@dataclass(frozen=True)
class GraphCoefficients:
    """4x4 tilt coefficients: rows are tangent 1..4, columns normal 5..8."""

    entries: tuple
    backend: str = FLOAT

    def __post_init__(self):
        rows = tuple(
            tuple(coerce_scalar(x, self.backend) for x in row)
            for row in self.entries
        )
        if len(rows) != 4 or any(len(r) != 4 for r in rows):
            raise ValidationError("graph coefficients must be a 4x4 array")
        object.__setattr__(self, "entries", rows)

    def entry(self, j, i):
        """lam^j_i with tangent j in 1..4 and normal i in 5..8."""
        return self.entries[j - 1][i - 5]

    def norm(self):
        return float(
            sum(float(x) ** 2 for row in self.entries for x in row)
        ) ** 0.5

    def replace_first_row(self, row):
        new = (tuple(row),) + self.entries[1:]
        return GraphCoefficients(entries=new, backend=self.backend)

    def to_float(self):
        return GraphCoefficients(
            entries=tuple(tuple(float(x) for x in row) for row in self.entries),
            backend=FLOAT,
        )


def random_graph_coefficients(rng, radius=0.25):
    """Random coefficients with Frobenius norm scaled to ``radius``."""
    raw = rng.standard_normal((4, 4))
    raw *= radius / max(np.linalg.norm(raw), 1e-12)
    return GraphCoefficients(entries=tuple(tuple(row) for row in raw), backend=FLOAT)


def graph_frame(lam):
    """Frame of the tilted plane: v_j = e_j + sum_i lam^j_i e_i (not unit)."""
    out = []
    for j in range(1, 5):
        comps = [coerce_scalar(0, lam.backend)] * 8
        comps[j - 1] = coerce_scalar(1, lam.backend)
        for i in range(5, 9):
            comps[i - 1] = lam.entry(j, i)
        out.append(Vector(comps, lam.backend))
    return out


def _det3(lam, rows, cols):
    a = [[lam.entry(j, i) for i in cols] for j in rows]
    return (
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    )


def tau_system(lam):
    """The four graph equations: linear tilt terms minus cubic minors."""
    L = lam.entry
    D = lambda rows, cols: _det3(lam, rows, cols)
    eq1 = (
        L(1, 5) + L(2, 6) + L(3, 7) + L(4, 8)
        - D((2, 3, 4), (6, 7, 8))
        - D((1, 3, 4), (5, 7, 8))
        - D((1, 2, 4), (5, 6, 8))
        - D((1, 2, 3), (5, 6, 7))
    )
    eq2 = (
        L(1, 6) - L(2, 5) - L(3, 8) + L(4, 7)
        + D((2, 3, 4), (5, 7, 8))
        - D((1, 3, 4), (6, 7, 8))
        - D((1, 2, 4), (5, 6, 7))
        + D((1, 2, 3), (5, 6, 8))
    )
    eq3 = (
        L(1, 7) + L(2, 8) - L(3, 5) - L(4, 6)
        - D((2, 3, 4), (5, 6, 8))
        - D((1, 3, 4), (5, 6, 7))
        + D((1, 2, 4), (6, 7, 8))
        + D((1, 2, 3), (5, 7, 8))
    )
    eq4 = (
        L(1, 8) - L(2, 7) + L(3, 6) - L(4, 5)
        + D((2, 3, 4), (5, 6, 7))
        - D((1, 3, 4), (5, 6, 8))
        + D((1, 2, 4), (5, 7, 8))
        - D((1, 2, 3), (6, 7, 8))
    )
    return (eq1, eq2, eq3, eq4)


_EPS_PAIRS = ((5, 6), (6, 7), (7, 8), (5, 8), (7, 5), (6, 8))
_EPS = {}
for _a, _b in _EPS_PAIRS:
    _EPS[(_a, _b)] = 1
    _EPS[(_b, _a)] = -1


def _eps_sum(lam, pairs, fn):
    total = coerce_scalar(0, lam.backend)
    for (a, b) in pairs:
        for (i, j) in ((a, b), (b, a)):
            total = total + _EPS[(i, j)] * fn(i, j)
    return total


def residual_quadratics(lam):
    """The three quadratic constraints that complete tau_system: together the
    seven expressions vanish exactly when the graphed plane is calibrated.
    Each equals one diagonal component of the four-vector defect (see
    tau_graph_components), an identity pinned by the regression tests."""
    L = lam.entry
    q1 = _eps_sum(
        lam, ((5, 7), (6, 8)), lambda i, j: L(1, i) * L(4, j) + L(2, i) * L(3, j)
    ) + _eps_sum(
        lam, ((6, 7), (5, 8)), lambda i, j: L(1, i) * L(3, j) - L(2, i) * L(4, j)
    )
    q2 = _eps_sum(
        lam, ((5, 6), (7, 8)), lambda i, j: L(1, i) * L(4, j) + L(2, i) * L(3, j)
    ) - _eps_sum(
        lam, ((5, 8), (6, 7)), lambda i, j: L(1, i) * L(2, j) + L(3, i) * L(4, j)
    )
    q3 = _eps_sum(
        lam, ((5, 6), (7, 8)), lambda i, j: L(2, i) * L(4, j) - L(1, i) * L(3, j)
    ) - _eps_sum(
        lam, ((5, 7), (6, 8)), lambda i, j: L(1, i) * L(2, j) + L(3, i) * L(4, j)
    )
    return (q1, q2, q3)


# orthonormal basis of the 7-dimensional two-form piece adapted to the
# splitting R^4 + R^4: four "mixed" directions and three "diagonal" ones
def seven_basis(Phi):
    mixed = [
        Phi.pi7_apply(Multivector.basis(8, (1, 4 + i), Phi.backend))
        for i in range(1, 5)
    ]
    diagonal = [
        Phi.pi7_apply(Multivector.basis(8, (1, 1 + a), Phi.backend))
        for a in range(1, 4)
    ]
    return mixed, diagonal


def tau_graph_components(lam, Phi=None):
    """Components of the alternation of the graph frame in the adapted
    orthonormal basis of the 7-piece: (mixed 4-tuple, diagonal 3-tuple)."""
    if Phi is None:
        Phi = phi0(lam.backend)
    frame = graph_frame(lam)
    val = tau_eval(Phi, *frame)
    mixed, diagonal = seven_basis(Phi)
    return (
        tuple(inner(val, b) for b in mixed),
        tuple(inner(val, b) for b in diagonal),
    )


def solve_tau_system(lam0, max_iter=50, tol=1e-12, radius=0.3):
    """Newton-solve the four graph equations in the first-row unknowns.

    The system is affine in (lam^1_5..lam^1_8), so a unit-step finite
    difference Jacobian is exact and convergence is essentially one step;
    the loop re-evaluates the Jacobian anyway and guards with
    ConvergenceError.
    """
    lam = lam0.to_float()
    if lam.norm() > radius:
        raise ValidationError(
            "starting coefficients have norm %.4f > %.2f" % (lam.norm(), radius)
        )
    for it in range(1, max_iter + 1):
        res = np.array([float(x) for x in tau_system(lam)])
        if float(np.max(np.abs(res))) < tol:
            return lam
        jac = np.empty((4, 4))
        row = [float(x) for x in lam.entries[0]]
        for c in range(4):
            bumped = list(row)
            bumped[c] += 1.0
            shifted = lam.replace_first_row(bumped)
            jac[:, c] = np.array(
                [float(x) for x in tau_system(shifted)]
            ) - res
        try:
            step = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(
                "singular Jacobian at iteration %d" % (it,),
                residual=float(np.max(np.abs(res))),
                iterations=it,
            ) from exc
        lam = lam.replace_first_row([row[c] + step[c] for c in range(4)])
    res = np.array([float(x) for x in tau_system(lam)])
    final = float(np.max(np.abs(res)))
    if final < tol:
        return lam
    raise ConvergenceError(
        "no convergence after %d iterations" % (max_iter,),
        residual=final,
        iterations=max_iter,
    )


# -- canonical angles ------------------------------------------------------


@dataclass(frozen=True)
class CanonicalAngles:
    """Result of the angle extraction for an even-dimensional plane."""

    angles: tuple            # p values, ascending, last possibly > pi/2
    pair_frame: tuple        # 2p Vectors (f_1, g_1, ..., f_p, g_p)
    gap: Optional[float]     # smallest spacing between distinct cosines
    gap_warning: bool

    @property
    def p(self):
        return len(self.angles)

    def plane(self):
        return OrientedPlane(rows=self.pair_frame)


def canonical_angles(model, plane, tol=1e-9, gap_tol=1e-8):
    """Adapted frame and angles of a 2p-plane against the model pairing.

    Produces an orthonormal frame (f_1, g_1, .., f_p, g_p) of the plane
    with pairing values omega(f_j, g_j) = cos(theta_j), zero across pairs,
    theta_1 <= ... <= theta_p, the first p-1 angles in [0, pi/2], and the
    last flipped past pi/2 when needed to preserve orientation.
    """
    if plane.dim % 2 != 0:
        raise PlaneError("angle extraction needs an even-dimensional plane")
    p = plane.dim // 2
    if plane.n != 2 * model.m:
        raise DimensionMismatch("plane and model dimensions disagree")
    rows = as_matrix([r.to_float() for r in plane.rows])
    if np.linalg.matrix_rank(rows, tol=1e-10) < 2 * p:
        raise PlaneError("degenerate frame: rank below 2p")
    jm = np.array(model.J.matrix(), dtype=float)
    # pairing matrix A_ab = omega(f_a, f_b) = <J f_a, f_b>
    amat = rows @ jm.T @ rows.T
    amat = 0.5 * (amat - amat.T)
    evals, evecs = np.linalg.eigh(1j * amat)
    pairs = []
    for idx in range(2 * p):
        c = float(evals[idx])
        if c <= tol:
            continue
        u = evecs[:, idx]
        x = np.real(u)
        y = np.imag(u)
        nx = np.linalg.norm(x)
        ny = np.linalg.norm(y)
        if nx < 1e-12 or ny < 1e-12:
            raise PlaneError("pairing eigenvector degenerated; cannot pair")
        f = y / ny
        g = x / nx
        pairs.append((c, f, g))
    # zero block: real kernel of the pairing matrix, paired in order
    nzero = 2 * p - 2 * len(pairs)
    if nzero:
        _, s_svd, vt = np.linalg.svd(amat)
        order = np.argsort(np.abs(s_svd))
        null = vt[order[:nzero], :]
        # orthonormalize the kernel block
        q, _ = np.linalg.qr(null.T)
        for a in range(nzero // 2):
            pairs.append((0.0, q[:, 2 * a], q[:, 2 * a + 1]))
    pairs.sort(key=lambda t: -t[0])
    frame_coords = []
    for c, f, g in pairs:
        frame_coords.append(f)
        frame_coords.append(g)
    # frame vectors in ambient coordinates
    amb = np.array(frame_coords) @ rows
    det = float(np.linalg.det(np.array(frame_coords)))
    angles = [float(np.arccos(np.clip(c, -1.0, 1.0))) for c, _, _ in pairs]
    if det < 0:
        amb[-1] = -amb[-1]
        angles[-1] = float(np.pi) - angles[-1]
    vecs = tuple(Vector(a.tolist(), FLOAT) for a in amb)
    cosines = sorted({round(c, 12) for c, _, _ in pairs})
    gap = None
    if len(cosines) > 1:
        gap = float(min(b - a for a, b in zip(cosines, cosines[1:])))
    warn = gap is not None and gap < gap_tol
    return CanonicalAngles(
        angles=tuple(angles),
        pair_frame=vecs,
        gap=gap,
        gap_warning=warn,
    )


def plane_from_angles(model, angles, rng):
    """Sample a plane realizing the requested angles.

    Uses a random unitary to place the pairs: each angle theta_j consumes
    one complex direction for f_j and (when sin(theta_j) != 0) one more for
    the partner leg.
    """
    m = model.m
    p = len(angles)
    sins = [abs(np.sin(t)) > 1e-12 for t in angles]
    needed = p + sum(sins)
    if needed > m:
        raise ValidationError(
            "angles need %d complex directions but m=%d" % (needed, m)
        )
    u = random_unitary(m, rng)
    rows = []
    extra = p
    for j, theta in enumerate(angles):
        w = u[:, j]
        f = _realify(w, m)
        jf = _realify(1j * w, m)
        if sins[j]:
            uvec = _realify(u[:, extra], m)
            extra += 1
            g_np = np.cos(theta) * as_matrix([jf])[0] + np.sin(theta) * as_matrix([uvec])[0]
            g = Vector(g_np.tolist(), FLOAT)
        else:
            g = jf if np.cos(theta) > 0 else Vector((-as_matrix([jf])[0]).tolist(), FLOAT)
        rows.append(f)
        rows.append(g)
    return OrientedPlane(rows=tuple(rows))


# -- complex-plane detection ----------------------------------------------


def sigma_eval(model, vectors):
    """Hook p+1 vectors into Re(Omega); vanishing over all frame subsets
    characterizes complex planes (with an extra Im check when m = p+1)."""
    acc = hook_many(list(vectors), model.Omega)
    return acc.re


@dataclass(frozen=True)
class ComplexPlaneVerdict:
    is_complex: bool
    max_sigma: float
    max_im: Optional[float]
    p: int
    m: int


def is_complex_plane(model, plane, tol=1e-9):
    """Decide J-invariance via the holomorphic volume form contractions."""
    if plane.dim % 2 != 0:
        raise PlaneError("complex-plane test needs an even-dimensional plane")
    p = plane.dim // 2
    m = model.m
    if plane.n != 2 * m:
        raise DimensionMismatch("plane and model dimensions disagree")
    if p + 1 > m:
        # hooks of more than m vectors vanish identically: nothing to test,
        # and a 2m-dimensional plane is the whole space (J-invariant).
        full = plane.dim == 2 * m
        return ComplexPlaneVerdict(
            is_complex=full, max_sigma=0.0, max_im=None, p=p, m=m
        )
    worst = 0.0
    worst_im = 0.0
    check_im = (m == p + 1)
    for subset in itertools.combinations(plane.rows, p + 1):
        hooked = hook_many(list(subset), model.Omega)
        worst = max(worst, float(hooked.re.max_abs()))
        if check_im:
            worst_im = max(worst_im, float(hooked.im.max_abs()))
    ok = worst <= tol and (not check_im or worst_im <= tol)
    return ComplexPlaneVerdict(
        is_complex=ok,
        max_sigma=worst,
        max_im=worst_im if check_im else None,
        p=p,
        m=m,
    )


# -- complex graphs and their linear system --------------------------------


@dataclass(frozen=True)
class ComplexGraphCoefficients:
    """Tilt coefficients for a graph over the z_1..z_p coordinate plane.

    ``lam`` tilts the x-rows (v_j over e_{2j-1}) and ``mu`` the y-rows
    (w_j over e_{2j}); columns follow the normal labels
    [p+1, ..., m, m+p+1, ..., 2m], where label k <= m means the normal
    x-direction of z_k and label k+m its y-direction.
    """

    p: int
    m: int
    lam: tuple
    mu: tuple
    backend: str = FLOAT

    def __post_init__(self):
        width = 2 * (self.m - self.p)
        lam = tuple(
            tuple(coerce_scalar(x, self.backend) for x in row) for row in self.lam
        )
        mu = tuple(
            tuple(coerce_scalar(x, self.backend) for x in row) for row in self.mu
        )
        if len(lam) != self.p or len(mu) != self.p:
            raise ValidationError("need p rows in each coefficient block")
        if any(len(r) != width for r in lam + mu):
            raise ValidationError("need 2(m-p) columns per row")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu", mu)

    def column_labels(self):
        return tuple(range(self.p + 1, self.m + 1)) + tuple(
            range(self.m + self.p + 1, 2 * self.m + 1)
        )

    def _real_coord(self, label):
        # normal label -> 1-based real coordinate in the interleaved model
        if label <= self.m:
            return 2 * label - 1
        return 2 * (label - self.m)

    def frame(self):
        """[v_1..v_p, w_1..w_p] as real vectors in R^{2m}."""
        labels = self.column_labels()
        out = []
        n = 2 * self.m
        for j in range(1, self.p + 1):
            comps = [coerce_scalar(0, self.backend)] * n
            comps[2 * j - 2] = coerce_scalar(1, self.backend)
            for col, lab in enumerate(labels):
                comps[self._real_coord(lab) - 1] = self.lam[j - 1][col]
            out.append(Vector(comps, self.backend))
        for j in range(1, self.p + 1):
            comps = [coerce_scalar(0, self.backend)] * n
            comps[2 * j - 1] = coerce_scalar(1, self.backend)
            for col, lab in enumerate(labels):
                comps[self._real_coord(lab) - 1] = self.mu[j - 1][col]
            out.append(Vector(comps, self.backend))
        return out

    def flat(self):
        vals = []
        for row in self.lam:
            vals.extend(row)
        for row in self.mu:
            vals.extend(row)
        return vals

    @classmethod
    def from_flat(cls, p, m, values, backend=FLOAT):
        width = 2 * (m - p)
        vals = list(values)
        if len(vals) != 2 * p * width:
            raise ValidationError("wrong number of coefficient values")
        lam = tuple(
            tuple(vals[r * width: (r + 1) * width]) for r in range(p)
        )
        mu = tuple(
            tuple(vals[(p + r) * width: (p + r + 1) * width]) for r in range(p)
        )
        return cls(p=p, m=m, lam=lam, mu=mu, backend=backend)


def normal_volume_form(model, p):
    """beta = dz_{p+1} ^ ... ^ dz_m (grade m-p, complexified)."""
    if p >= model.m:
        raise DimensionMismatch("no normal directions when p >= m")
    return wedge_many([dz_form(model, k) for k in range(p + 1, model.m + 1)])


def complex_graph_linear_system(model, cg):
    """The first-order graph constraints and their complex combinations.

    For each row j this returns the real form
      Re[e^{i phase}(w_j -| beta  -  i v_j -| beta)]
    plus the full complex combination before taking the real part.
    """
    if cg.m != model.m:
        raise DimensionMismatch("coefficients and model disagree on m")
    if cg.backend != model.backend:
        raise DimensionMismatch("coefficients and model use different backends")
    beta = normal_volume_form(model, cg.p)
    frame = cg.frame()
    phase = model.phase_scalar()
    i_unit = imag_unit(cg.backend)
    reals, combos = [], []
    for j in range(cg.p):
        v = frame[j]
        w = frame[cg.p + j]
        combo = (hook(w, beta) - hook(v, beta).scale(i_unit)).scale(phase)
        combos.append(combo)
        reals.append(combo.re)
    return reals, combos


def hook_coefficient_oracle(model, cg):
    """Residual of the closed form of the combinations above.

    Each combination must equal
      sum_k [(mu^j_k + lam^j_{k+m}) + i (mu^j_{k+m} - lam^j_k)] e_k -| beta
    (phase factored out), where e_k is the x-leg of z_k.  Returns the
    largest coefficient deviation.
    """
    beta = normal_volume_form(model, cg.p)
    frame = cg.frame()
    labels = cg.column_labels()
    i_unit = imag_unit(cg.backend)
    width = cg.m - cg.p
    worst = 0.0
    for j in range(cg.p):
        v = frame[j]
        w = frame[cg.p + j]
        combo = hook(w, beta) - hook(v, beta).scale(i_unit)
        acc = None
        for col in range(width):
            k = labels[col]
            lam_x = cg.lam[j][col]
            lam_y = cg.lam[j][col + width]
            mu_x = cg.mu[j][col]
            mu_y = cg.mu[j][col + width]
            if cg.backend == EXACT:
                coeff = ExactComplex(mu_x + lam_y, mu_y - lam_x)
            else:
                coeff = complex(float(mu_x) + float(lam_y), float(mu_y) - float(lam_x))
            ek = Vector.basis(2 * cg.m, 2 * k - 1, cg.backend)
            term = hook(ek, beta).scale(coeff)
            acc = term if acc is None else acc + term
        diff = combo - acc
        worst = max(worst, float(diff.max_abs()))
    return worst


def cr_residual(cg):
    """Residual of the first-order holomorphicity relations:
    mu^j_k = -lam^j_{k+m} and mu^j_{k+m} = lam^j_k."""
    width = cg.m - cg.p
    worst = 0.0
    for j in range(cg.p):
        for col in range(width):
            worst = max(
                worst,
                abs(float(cg.mu[j][col]) + float(cg.lam[j][col + width])),
                abs(float(cg.mu[j][col + width]) - float(cg.lam[j][col])),
            )
    return worst


def linear_system_matrix(model, p):
    """Real matrix of the first-order constraints acting on flat
    coefficient vectors (rows: constraint coefficients; cols: unknowns)."""
    m = model.m
    width = 2 * (m - p)
    nunk = 2 * p * width
    cols = []
    for u in range(nunk):
        flat = [0.0] * nunk
        flat[u] = 1.0
        cg = ComplexGraphCoefficients.from_flat(p, m, flat, backend=FLOAT)
        reals, _ = complex_graph_linear_system(model, cg)
        entries = []
        for form in reals:
            for key in sorted(
                itertools.combinations(range(1, 2 * m + 1), m - p - 1)
            ):
                entries.append(float(form.coeff(key)))
        cols.append(entries)
    return np.array(cols).T


def solve_complex_graph_linear(model, p, rng):
    """A random solution of the first-order constraints."""
    mat = linear_system_matrix(model, p)
    _, s, vt = np.linalg.svd(mat)
    tol = (s.max() if s.size else 0.0) * 1e-10
    rank = int(np.sum(s > tol))
    null = vt[rank:, :]
    if null.shape[0] == 0:
        raise PlaneError("constraint system has no kernel")
    coeffs = rng.standard_normal(null.shape[0])
    flat = coeffs @ null
    return ComplexGraphCoefficients.from_flat(p, model.m, flat.tolist(), FLOAT)


# -- the normal-form isomorphism (m = 4 graphs over a surface) -------------


@dataclass(frozen=True)
class NormalFormImage:
    """A decomposed element alpha (x) vector of the target bundle; alpha is
    pinned to the unit antiholomorphic surface volume dzbar_1 ^ dzbar_2."""

    alpha: ComplexMultivector
    vector: TypedVector


def _require_surface_model(model):
    if model.m != 4:
        raise DimensionMismatch("this construction needs the m=4 flat model")


def _check_normal_01(model, tv):
    if tv.vtype != TYPE_01:
        raise TypeMismatch("expected a (0,1) vector")
    for i in (1, 2, 3, 4):
        re = float(tv.vec.re.comps[i - 1])
        im = float(tv.vec.im.comps[i - 1])
        if model.backend == EXACT:
            if tv.vec.re.comps[i - 1] != 0 or tv.vec.im.comps[i - 1] != 0:
                raise TypeMismatch("vector has tangential components")
        elif abs(re) > 1e-12 or abs(im) > 1e-12:
            raise TypeMismatch("vector has tangential components")


def normal_isom(model, tv):
    """Quarter of the sharpened contraction with conj(Omega).

    Sends a (0,1) normal vector v to alpha (x) u with alpha the unit
    dzbar_1 ^ dzbar_2 and u of type (1,0); all scalars are carried on u.
    """
    _require_surface_model(model)
    _check_normal_01(model, tv)
    three_form = hook(tv.vec, model.Omega.conj())
    cf = to_complex_frame(model, three_form)
    # frame slots: dzbar_k <-> 4 + k; surface legs are (5, 6)
    c3 = cf.coeff((5, 6, 7))
    c4 = cf.coeff((5, 6, 8))
    stray = 0.0
    for key in set(cf.re.terms) | set(cf.im.terms):
        if key not in ((5, 6, 7), (5, 6, 8)):
            stray = max(
                stray,
                abs(float(cf.re.terms.get(key, 0))),
                abs(float(cf.im.terms.get(key, 0))),
            )
    if model.backend == EXACT:
        if stray != 0:
            raise TypeMismatch("contraction has unexpected components")
    elif stray > 1e-10:
        raise TypeMismatch("contraction has unexpected components")
    alpha = wedge(dzbar_form(model, 1), dzbar_form(model, 2))
    half = Fraction(1, 2) if model.backend == EXACT else 0.5
    # sharp of dzbar_b is 2 * (holomorphic coordinate vector), then / 4
    u = holo_vector(model, 3).scale(c3).scale(half) + holo_vector(
        model, 4
    ).scale(c4).scale(half)
    return NormalFormImage(
        alpha=alpha, vector=TypedVector(vec=u, vtype=TYPE_10)
    )


def normal_isom_inverse(model, alpha, tv):
    """Inverse construction: alpha (x) u -> -1/4 sharp of the surface-star
    of alpha ^ (u -| Omega)."""
    _require_surface_model(model)
    if tv.vtype != TYPE_10:
        raise TypeMismatch("expected a (1,0) vector")
    # alpha must be a multiple of dzbar_1 ^ dzbar_2
    cf = to_complex_frame(model, alpha)
    scale_c = cf.coeff((5, 6))
    for key in set(cf.re.terms) | set(cf.im.terms):
        if key != (5, 6):
            bad = max(
                abs(float(cf.re.terms.get(key, 0))),
                abs(float(cf.im.terms.get(key, 0))),
            )
            if model.backend == EXACT:
                if bad != 0:
                    raise TypeMismatch("alpha is not a (0,2) surface form")
            elif bad > 1e-12:
                raise TypeMismatch("alpha is not a (0,2) surface form")
    five_form = wedge(alpha, hook(tv.vec, model.Omega))
    # extract the coefficients of vol_N ^ dx_r, r in 5..8
    quarter = Fraction(1, 4) if model.backend == EXACT else 0.25
    comps_re = [coerce_scalar(0, model.backend)] * 8
    comps_im = [coerce_scalar(0, model.backend)] * 8
    for r in (5, 6, 7, 8):
        key = (1, 2, 3, 4, r)
        comps_re[r - 1] = five_form.re.terms.get(key, coerce_scalar(0, model.backend))
        comps_im[r - 1] = five_form.im.terms.get(key, coerce_scalar(0, model.backend))
    stray = 0.0
    for part in (five_form.re, five_form.im):
        for key, val in part.terms.items():
            if not (key[:4] == (1, 2, 3, 4) and len(key) == 5):
                stray = max(stray, abs(float(val)))
    if model.backend == EXACT:
        if stray != 0:
            raise TypeMismatch("unexpected components in the contraction")
    elif stray > 1e-10:
        raise TypeMismatch("unexpected components in the contraction")
    gamma = ComplexVector(
        Vector(comps_re, model.backend), Vector(comps_im, model.backend)
    )
    out = gamma.scale(-1).scale(quarter)
    return typed_vector(model.J, out, TYPE_01, tol=1e-9)


# -- decomposable-pair identities for the 7-piece over a surface -----------


@dataclass(frozen=True)
class SevenPieceIdentityReport:
    antiholomorphic_residual: float
    mixed_kill_residual: float
    surface_residual: float


def _restrict_to_surface(a):
    """Keep only terms supported on coordinates 1..4, reindexed to R^4."""
    if isinstance(a, ComplexMultivector):
        return ComplexMultivector(
            _restrict_to_surface(a.re), _restrict_to_surface(a.im)
        )
    terms = {
        key: val for key, val in a.terms.items() if all(i <= 4 for i in key)
    }
    return Multivector(4, terms, a.backend)


def e_isom_checks(Phi, model):
    """Exactness checks of the decomposable-pair identities over the
    surface z_3 = z_4 = 0.  Returns maximal residuals; all are zero on the
    exact backend when the identities hold."""
    _require_surface_model(model)
    quarter = Fraction(1, 4) if model.backend == EXACT else 0.25
    worst_i = 0.0
    # (i) antiholomorphic surface x normal pairs
    for a in (1, 2):
        for c in (3, 4):
            v = dzbar_form(model, a)
            w = dzbar_form(model, c)
            vs = musical_sharp(v)
            ws = musical_sharp(w)
            corr = hook_many([vs, ws], model.Omega).scale(quarter)
            lhs = Phi.pi7_apply(wedge(v, w))
            diff = lhs - (wedge(v, w) + corr)
            worst_i = max(worst_i, float(diff.max_abs()))
            # conjugate flavor: holomorphic pairs against conj(Omega)
            vb = dz_form(model, a)
            wb = dz_form(model, c)
            corr_b = hook_many(
                [musical_sharp(vb), musical_sharp(wb)], model.Omega.conj()
            ).scale(quarter)
            lhs_b = Phi.pi7_apply(wedge(vb, wb))
            diff_b = lhs_b - (wedge(vb, wb) + corr_b)
            worst_i = max(worst_i, float(diff_b.max_abs()))
    # (ii) mixed-type surface x normal pairs are annihilated
    worst_ii = 0.0
    for a in (1, 2):
        for c in (3, 4):
            for pair in (
                wedge(dz_form(model, a), dzbar_form(model, c)),
                wedge(dzbar_form(model, a), dz_form(model, c)),
            ):
                img = Phi.pi7_apply(pair)
                worst_ii = max(worst_ii, float(img.max_abs()))
    # (iii) restriction to the surface: half of (1 + surface star)
    worst_iii = 0.0
    surface_pairs = []
    for a in (1, 2):
        for b in (1, 2):
            surface_pairs.append(wedge(dz_form(model, a), dz_form(model, b)))
            surface_pairs.append(wedge(dz_form(model, a), dzbar_form(model, b)))
            surface_pairs.append(wedge(dzbar_form(model, a), dzbar_form(model, b)))
    half = Fraction(1, 2) if model.backend == EXACT else 0.5
    for pair in surface_pairs:
        if pair.is_zero():
            continue
        lhs = _restrict_to_surface(Phi.pi7_apply(pair))
        restricted = _restrict_to_surface(pair)
        rhs = (
            restricted
            + ComplexMultivector(
                hodge_star(restricted.re), hodge_star(restricted.im)
            )
        ).scale(half)
        diff = lhs - rhs
        worst_iii = max(worst_iii, float(diff.max_abs()))
    return SevenPieceIdentityReport(
        antiholomorphic_residual=worst_i,
        mixed_kill_residual=worst_ii,
        surface_residual=worst_iii,
    )
