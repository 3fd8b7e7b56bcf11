"""The flat fourfold calibration on R^8 and its two-form machinery.

The distinguished four-form is

  phi0 = e1234 - e1256 - e1278 - e1357 + e1368 - e1458 - e1467
       - e2358 - e2367 + e2457 - e2468 - e3456 - e3478 + e5678.

Two-forms split into a 7-dimensional and a 21-dimensional piece.  Two
independent routes to the splitting are provided and cross-checked:

* ``pi7``       -- linear extension of the decomposable-pair formula
                   (x^ ^ y^ + phi(x, y, . , .)) / 2; this is twice the
                   orthogonal projection.
* ``proj7``     -- spectral construction (T + 1)/4 from the self-adjoint
                   map T(a) = *(phi ^ a), which has eigenvalue 3 on the
                   small piece and -1 on the large one.

Keeping both routes separate is deliberate: their agreement (a fixed factor
of two) is one of the verified claims, not an assumption.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import _ratlinalg
from .errors import DimensionMismatch, GradeError, PlaneError
from .exterior import (
    EXACT,
    FLOAT,
    ComplexMultivector,
    ComplexVector,
    Multivector,
    Vector,
    as_complex_multivector,
    coerce_scalar,
    form_value,
    hodge_star,
    hook,
    hook_many,
    inner,
    musical_flat,
    wedge,
)

TWO_FORM_INDEX = tuple(itertools.combinations(range(1, 9), 2))
PAIR_POS = {pair: i for i, pair in enumerate(TWO_FORM_INDEX)}

PHI0_TERMS = {
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


class CayleyForm:
    """A calibration four-form on R^8 with cached two-form operators."""

    def __init__(self, phi):
        if phi.n != 8:
            raise DimensionMismatch("calibration four-form must live on R^8")
        if phi.grades() not in ([], [4]):
            raise GradeError("calibration form must be homogeneous of grade 4")
        self.phi = phi
        self._pi7 = None
        self._transform = None
        self._proj7 = None

    @property
    def backend(self):
        return self.phi.backend

    def _two_form_to_column(self, a):
        col = [coerce_scalar(0, self.backend)] * 28
        for key, val in a.terms.items():
            col[PAIR_POS[key]] = val
        return col

    def _column_to_two_form(self, col, backend=None):
        backend = backend or self.backend
        terms = {
            TWO_FORM_INDEX[i]: c for i, c in enumerate(col) if c != 0
        }
        return Multivector(8, terms, backend)

    def pi7_matrix(self):
        """28x28 matrix of the decomposable-pair splitting formula."""
        if self._pi7 is None:
            half = Fraction(1, 2) if self.backend == EXACT else 0.5
            cols = []
            for (i, j) in TWO_FORM_INDEX:
                ei = Vector.basis(8, i, self.backend)
                ej = Vector.basis(8, j, self.backend)
                pair_form = hook(ej, hook(ei, self.phi))
                img = (Multivector.basis(8, (i, j), self.backend) + pair_form).scale(half)
                cols.append(self._two_form_to_column(img))
            self._pi7 = [[cols[c][r] for c in range(28)] for r in range(28)]
        return self._pi7

    def transform_matrix(self):
        """28x28 matrix of a |-> *(phi ^ a)."""
        if self._transform is None:
            cols = []
            for (i, j) in TWO_FORM_INDEX:
                img = hodge_star(wedge(self.phi, Multivector.basis(8, (i, j), self.backend)))
                cols.append(self._two_form_to_column(img))
            self._transform = [[cols[c][r] for c in range(28)] for r in range(28)]
        return self._transform

    def proj7_matrix(self):
        """Orthogonal projection onto the 7-dimensional piece: (T + 1)/4."""
        if self._proj7 is None:
            t = self.transform_matrix()
            quarter = Fraction(1, 4) if self.backend == EXACT else 0.25
            self._proj7 = [
                [
                    (t[r][c] + (1 if r == c else 0)) * quarter
                    for c in range(28)
                ]
                for r in range(28)
            ]
        return self._proj7

    def _apply_matrix(self, mat, a):
        if isinstance(a, ComplexMultivector):
            return ComplexMultivector(
                self._apply_matrix(mat, a.re), self._apply_matrix(mat, a.im)
            )
        if a.grades() not in ([], [2]):
            raise GradeError("two-form operator applied to grades %s" % (a.grades(),))
        col = self._two_form_to_column(a)
        out = [
            sum((mat[r][c] * col[c] for c in range(28) if col[c] != 0),
                coerce_scalar(0, a.backend))
            for r in range(28)
        ]
        return self._column_to_two_form(out, a.backend)

    def pi7_apply(self, a):
        return self._apply_matrix(self.pi7_matrix(), a)

    def proj7_apply(self, a):
        return self._apply_matrix(self.proj7_matrix(), a)


def phi0(backend=EXACT):
    """The standard calibration four-form."""
    return CayleyForm(Multivector(8, dict(PHI0_TERMS), backend))


def phi_from_kahler(model):
    """Build the calibration form omega^2/2 + Re(Omega) from an m=4 model."""
    if model.m != 4:
        raise DimensionMismatch("need the m=4 flat model")
    half = Fraction(1, 2) if model.backend == EXACT else 0.5
    four = wedge(model.omega, model.omega).scale(half) + model.Omega.re
    return CayleyForm(four)


def pi7(Phi, a):
    return Phi.pi7_apply(a)


def proj7(Phi, a):
    return Phi.proj7_apply(a)


def pi7_projection_scalar(Phi):
    """The constant c with pi7 = c * proj7 (as matrices).

    Raises PlaneError if no single constant works.
    """
    p = Phi.pi7_matrix()
    q = Phi.proj7_matrix()
    c = None
    for r in range(28):
        for s in range(28):
            if q[r][s] != 0:
                ratio = p[r][s] / q[r][s]
                if c is None:
                    c = ratio
                elif Phi.backend == EXACT and ratio != c:
                    raise PlaneError("splitting routes are not proportional")
                elif Phi.backend == FLOAT and abs(ratio - c) > 1e-12:
                    raise PlaneError("splitting routes are not proportional")
            elif p[r][s] != 0:
                raise PlaneError("splitting routes have different supports")
    return c


@dataclass(frozen=True)
class TwoFormDecomposition:
    part7: Multivector
    part21: Multivector


def decompose_two_form(Phi, a):
    """Split a two-form into its 7-part and 21-part (orthogonal pieces)."""
    small = Phi.proj7_apply(a)
    return TwoFormDecomposition(part7=small, part21=a - small)


def lambda27_basis(Phi):
    """The 28 generators e^i ^ e^j - e_i -| (e_j -| phi); they span the 7-part."""
    out = []
    for (i, j) in TWO_FORM_INDEX:
        ei = Vector.basis(8, i, Phi.backend)
        ej = Vector.basis(8, j, Phi.backend)
        gen = Multivector.basis(8, (i, j), Phi.backend) - hook(ei, hook(ej, Phi.phi))
        out.append(gen)
    return out


# -- the four-vector alternation ------------------------------------------


def _slot_one_form(Phi, u, v, w):
    """The 1-form z |-> phi(z, u, v, w), via -(u -| v -| w -| phi)."""
    return hook_many([u, v, w], Phi.phi).scale(-1)


def tau_eval(Phi, x, u, v, w):
    """Alternating two-form-valued obstruction on four vectors.

    Value lands in the 7-dimensional piece.  Inputs may be real or
    complexified vectors; the result is then real or complexified.
    """
    quarter = Fraction(1, 4) if Phi.backend == EXACT else 0.25
    t1 = Phi.pi7_apply(wedge(_slot_one_form(Phi, u, v, w), musical_flat(x)))
    t2 = Phi.pi7_apply(wedge(_slot_one_form(Phi, v, w, x), musical_flat(u)))
    t3 = Phi.pi7_apply(wedge(_slot_one_form(Phi, w, x, u), musical_flat(v)))
    t4 = Phi.pi7_apply(wedge(_slot_one_form(Phi, x, u, v), musical_flat(w)))
    val = t1 - t2 + t3 - t4
    return val.scale(quarter)


def tau_norm_sq(value):
    """Sum of squared coefficient magnitudes of a two-form value."""
    if isinstance(value, ComplexMultivector):
        return inner(value.re, value.re) + inner(value.im, value.im)
    return inner(value, value)


def tau_norm(value):
    return float(tau_norm_sq(value)) ** 0.5


@dataclass(frozen=True)
class CayleyVerdict:
    is_cayley: bool
    phi_value: float
    tau_norm: float


def is_cayley(Phi, plane, tol_phi=1e-9, tol_tau=1e-7):
    """Classify an oriented 4-plane by the calibration value and the
    alternation norm.  ``plane`` is anything with orthonormal ``rows``
    (or a plain list of 4 Vectors)."""
    rows = list(getattr(plane, "rows", plane))
    if len(rows) != 4:
        raise PlaneError("need exactly 4 frame vectors, got %d" % (len(rows),))
    val = float(form_value(Phi.phi, rows))
    tval = tau_eval(Phi, *rows)
    tn = tau_norm(tval)
    return CayleyVerdict(
        is_cayley=abs(val - 1.0) <= tol_phi and tn <= tol_tau,
        phi_value=val,
        tau_norm=tn,
    )


def frame_tensor_crosscheck(Phi, frames):
    """Compare the alternation against its expanded tensor form.

    Both sides are multilinear and alternating, so agreement on all 70
    increasing basis 4-tuples proves agreement everywhere.  The expanded
    form is

      sum_{i=2}^{8} (e^i ^ (e_1 -| phi) - e^1 ^ (e_i -| phi))(x,u,v,w)
                    * pi7(e^1 ^ e^i)       (no extra normalization),

    ``frames`` is an iterable of 4-tuples of 1-based indices or Vectors.
    Returns the largest coefficient deviation seen.
    """
    worst = coerce_scalar(0, Phi.backend)
    e = [None] + [Vector.basis(8, i, Phi.backend) for i in range(1, 9)]
    for frame in frames:
        x, u, v, w = (e[i] if isinstance(i, int) else i for i in frame)
        direct = tau_eval(Phi, x, u, v, w)
        acc = Multivector.zero(8, Phi.backend)
        for i in range(2, 9):
            lhs = wedge(
                Multivector.basis(8, (i,), Phi.backend), hook(e[1], Phi.phi)
            ) - wedge(
                Multivector.basis(8, (1,), Phi.backend), hook(e[i], Phi.phi)
            )
            coeff = form_value(lhs, [x, u, v, w])
            if coeff != 0:
                acc = acc + Phi.pi7_apply(
                    Multivector.basis(8, (1, i), Phi.backend)
                ).scale(coeff)
        diff = direct - acc
        worst = max(worst, diff.max_abs())
    return worst


def find_equivalence(a, b):
    """Search for a signed axis relabeling carrying form a onto form b.

    Returns (perm, signs) with perm a tuple of 1-based targets and signs a
    tuple of +-1 such that pushing a through e_i -> signs[i]*e_perm[i]
    gives b; or None when no such relabeling exists.  Tries the identity
    relabeling first.
    """
    from .exterior import apply_signed_permutation

    n = a.n
    if b.n != n:
        raise DimensionMismatch("forms live in different dimensions")
    support_b = frozenset(b.terms)

    def try_perm(perm):
        mapped = {}
        for key in a.terms:
            img = tuple(sorted(perm[i - 1] for i in key))
            if img in mapped or img not in support_b:
                return None
            mapped[img] = key
        if len(mapped) != len(support_b):
            return None
        # solve for signs axis by axis over all +-1 assignments of the
        # axes that actually appear; n <= 8 keeps this tiny
        for bits in itertools.product((1, -1), repeat=n):
            cand = apply_signed_permutation(a, perm, bits)
            if cand == b:
                return tuple(bits)
        return None

    identity = tuple(range(1, n + 1))
    hit = try_perm(identity)
    if hit is not None:
        return identity, hit
    for perm in itertools.permutations(range(1, n + 1)):
        if perm == identity:
            continue
        hit = try_perm(perm)
        if hit is not None:
            return perm, hit
    return None
